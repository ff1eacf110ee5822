"""Concrete syntax for ``.crwlf`` programs, goals and constraints.

::

    % comment
    data z/0 s/1 nil/0 cons/2.
    coin -> z.
    coin -> s(z).
    mb(X,[Y|Ys]) -> true <= X == Y.
    default path(X,Y) -> false.

Lowercase (or digit-initial) identifiers are symbols, uppercase ones are
variables. ``F`` is the failure constant and ``⊥`` (or ``_|_``) is bottom;
both are rejected inside programs but accepted in goals. ``[a,b|T]`` and
``[]`` stand for ``cons``/``nil``, which are declared on first use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .program import (
    Condition,
    Diagnostic,
    Kind,
    Origin,
    Program,
    ProgramError,
    ProgramRule,
    transform_defaults,
    validate,
)
from .terms import BOT, FAIL, Con, Fails, Fun, Signature, Term, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<bot>⊥|_\|_)
  | (?P<op>!==|!/=|->|<=|==|/=)
  | (?P<punct>[()\[\]|,./])
  | (?P<ident>[a-z0-9][A-Za-z0-9_']*)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_KINDS = {k.value: k for k in Kind}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProgramError([Diagnostic(f"unexpected character {text[pos]!r}", line, pos - start + 1)])
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


# raw syntax trees, resolved against the signature after a full pass
@dataclass
class _App:
    name: str
    args: list
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ProgramError([Diagnostic(msg, tok.line, tok.col)])

    def eat(self, text: str | None = None, kind: str | None = None) -> Token:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            self.error(f"expected {want}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "punct", "ident")

    def term(self):
        t = self.tok
        if t.kind == "bot":
            self.i += 1
            return BOT
        if t.kind == "var":
            self.i += 1
            if t.text == "F" and not self.at("("):
                return FAIL
            return Var(t.text)
        if t.kind == "ident":
            self.i += 1
            args = []
            if self.at("("):
                self.eat("(")
                args.append(self.term())
                while self.at(","):
                    self.eat(",")
                    args.append(self.term())
                self.eat(")")
            return _App(t.text, args, t.line, t.col)
        if self.at("["):
            return self.list_term()
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def list_term(self):
        start = self.eat("[")
        items = []
        tail = _App("nil", [], start.line, start.col)
        if not self.at("]"):
            items.append(self.term())
            while self.at(","):
                self.eat(",")
                items.append(self.term())
            if self.at("|"):
                self.eat("|")
                tail = self.term()
        self.eat("]")
        for item in reversed(items):
            tail = _App("cons", [item, tail], start.line, start.col)
        return tail

    def condition(self, allowed=(Kind.JOIN, Kind.DIV)):
        lhs = self.term()
        t = self.tok
        kind = _KINDS.get(t.text) if t.kind == "op" else None
        if kind not in allowed:
            self.error(f"expected one of {', '.join(k.value for k in allowed)}, found {t.text!r}")
        self.i += 1
        return lhs, kind, self.term()

    def clause(self):
        t = self.tok
        if t.kind == "ident" and t.text == "data" and self.toks[self.i + 1].kind == "ident":
            self.i += 1
            decls = []
            while not self.at("."):
                name = self.eat(kind="ident")
                self.eat("/")
                arity = self.eat(kind="ident")
                if not arity.text.isdigit():
                    self.error("arity must be a number", arity)
                decls.append((name.text, int(arity.text), name))
            self.eat(".")
            return ("data", decls)
        origin = Origin.USER
        if t.kind == "ident" and t.text == "default" and self.toks[self.i + 1].kind == "ident":
            self.i += 1
            origin = Origin.DEFAULT
        head_tok = self.tok
        head = self.term()
        if not isinstance(head, _App):
            self.error("rule head must be a function call", head_tok)
        self.eat("->")
        body = self.term()
        conds = []
        if self.at("<="):
            self.eat("<=")
            conds.append(self.condition())
            while self.at(","):
                self.eat(",")
                conds.append(self.condition())
        self.eat(".")
        return ("rule", (head, body, conds, origin))


def _collect_apps(raw, out):
    if isinstance(raw, _App):
        out.append(raw)
        for a in raw.args:
            _collect_apps(a, out)


class _Resolver:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.diags: list[Diagnostic] = []

    def resolve(self, raw) -> Term:
        if not isinstance(raw, _App):
            return raw
        args = tuple(self.resolve(a) for a in raw.args)
        if raw.name == "fails":
            if len(args) != 1:
                self.diags.append(Diagnostic("fails expects 1 argument", raw.line, raw.col))
                return Fails(args[0] if args else BOT)
            return Fails(args[0])
        if raw.name in self.sig.constructors:
            if self.sig.constructors[raw.name] != len(args):
                self.diags.append(
                    Diagnostic(
                        f"arity mismatch: {raw.name} expects {self.sig.constructors[raw.name]} arguments, got {len(args)}",
                        raw.line,
                        raw.col,
                    )
                )
            return Con(raw.name, args)
        if raw.name in self.sig.functions:
            if self.sig.functions[raw.name] != len(args):
                self.diags.append(
                    Diagnostic(
                        f"arity mismatch: {raw.name} expects {self.sig.functions[raw.name]} arguments, got {len(args)}",
                        raw.line,
                        raw.col,
                    )
                )
            return Fun(raw.name, args)
        self.diags.append(Diagnostic(f"unknown symbol {raw.name}", raw.line, raw.col))
        return Con(raw.name, args)


def parse_program(text: str, *, check: bool = True) -> Program:
    """Parse and validate a program; raise ``ProgramError`` with diagnostics on failure."""
    p = _Parser(text)
    clauses = []
    while p.tok.kind != "eof":
        clauses.append(p.clause())

    diags = []
    constructors: dict[str, int] = {}
    functions: dict[str, int] = {}
    for kind, payload in clauses:
        if kind == "data":
            for name, arity, tok in payload:
                if constructors.get(name, arity) != arity:
                    diags.append(Diagnostic(f"constructor {name} declared with two arities", tok.line, tok.col))
                constructors[name] = arity
    apps = []
    for kind, payload in clauses:
        if kind != "rule":
            continue
        head, body, conds, _ = payload
        if head.name in constructors or head.name == "fails":
            diags.append(Diagnostic(f"{head.name} cannot be defined by a rule", head.line, head.col))
            continue
        if functions.get(head.name, len(head.args)) != len(head.args):
            diags.append(Diagnostic(f"function {head.name} defined with two arities", head.line, head.col))
        functions.setdefault(head.name, len(head.args))
        for raw in [body] + [c[0] for c in conds] + [c[2] for c in conds] + head.args:
            _collect_apps(raw, apps)
    if any(a.name in ("cons", "nil") for a in apps) and not {"cons", "nil"} & set(functions):
        constructors.setdefault("cons", 2)
        constructors.setdefault("nil", 0)
    if diags:
        raise ProgramError(diags)
    try:
        sig = Signature(constructors, functions)
    except ValueError as exc:
        raise ProgramError([Diagnostic(str(exc))]) from None

    res = _Resolver(sig)
    rules = []
    for kind, payload in clauses:
        if kind != "rule":
            continue
        head, body, conds, origin = payload
        rules.append(
            ProgramRule(
                head.name,
                tuple(res.resolve(a) for a in head.args),
                res.resolve(body),
                tuple(Condition(res.resolve(l), k, res.resolve(r)) for l, k, r in conds),
                origin,
                head.line,
                head.col,
            )
        )
    program = Program(sig, tuple(rules))
    found = list(res.diags)
    if check or found:
        # symbol errors were already reported with positions by the resolver
        found += [
            d for d in validate(program) if not (found and d.message.startswith(("unknown", "arity mismatch")))
        ]
    if found:
        raise ProgramError(found)
    return program


def load_program(path, *, transform: bool = True) -> Program:
    program = parse_program(Path(path).read_text(encoding="utf-8"))
    return transform_defaults(program) if transform else program


def _finish(p: _Parser, what: str):
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after {what}")


def parse_term(text: str, signature: Signature) -> Term:
    """Parse a goal expression; variables, ``⊥`` and ``F`` are allowed."""
    p = _Parser(text)
    raw = p.term()
    _finish(p, "term")
    res = _Resolver(signature)
    t = res.resolve(raw)
    if res.diags:
        raise ProgramError(res.diags)
    return t


def parse_constraint(text: str, signature: Signature) -> tuple[Term, Kind, Term]:
    """Parse ``lhs OP rhs`` with OP one of ``==``, ``/=``, ``!==``, ``!/=``."""
    p = _Parser(text)
    lhs, kind, rhs = p.condition(allowed=tuple(Kind))
    _finish(p, "constraint")
    res = _Resolver(signature)
    out = res.resolve(lhs), kind, res.resolve(rhs)
    if res.diags:
        raise ProgramError(res.diags)
    return out

