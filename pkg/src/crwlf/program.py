"""Programs: conditional rules, validation, matching and default-rule elimination."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Sequence

from .relations import clash_position
from .terms import (
    BOT,
    FAIL,
    Con,
    Fails,
    Fun,
    Signature,
    Substitution,
    Term,
    TRUE_TERM,
    Var,
    apply_subst,
    is_cterm,
    pretty,
    subterms,
    variables,
)


class Kind(enum.Enum):
    JOIN = "=="
    DIV = "/="
    NOT_JOIN = "!=="
    NOT_DIV = "!/="

    @property
    def complement(self) -> "Kind":
        return _COMPLEMENT[self]

    @property
    def relation(self) -> str:
        return _RELATION[self]


_COMPLEMENT = {
    Kind.JOIN: Kind.NOT_JOIN,
    Kind.NOT_JOIN: Kind.JOIN,
    Kind.DIV: Kind.NOT_DIV,
    Kind.NOT_DIV: Kind.DIV,
}
_RELATION = {Kind.JOIN: "down", Kind.DIV: "up", Kind.NOT_JOIN: "not_down", Kind.NOT_DIV: "not_up"}


class Origin(enum.Enum):
    USER = "user"
    DEFAULT = "default"
    GENERATED = "generated"


@dataclass(frozen=True)
class Condition:
    lhs: Term
    kind: Kind
    rhs: Term

    def __str__(self) -> str:
        return f"{pretty(self.lhs)} {self.kind.value} {pretty(self.rhs)}"

    def subst(self, theta: Substitution) -> "Condition":
        return Condition(apply_subst(self.lhs, theta), self.kind, apply_subst(self.rhs, theta))


@dataclass(frozen=True)
class ProgramRule:
    function: str
    patterns: tuple
    body: Term
    conditions: tuple = ()
    origin: Origin = Origin.USER
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def head(self) -> Fun:
        return Fun(self.function, self.patterns)

    def __str__(self) -> str:
        text = f"{pretty(self.head())} -> {pretty(self.body)}"
        if self.conditions:
            text += " <= " + ", ".join(str(c) for c in self.conditions)
        if self.origin is Origin.DEFAULT:
            text = "default " + text
        return text + "."

    def pattern_vars(self) -> list[str]:
        return [v for p in self.patterns for v in variables(p)]


@dataclass(frozen=True)
class Program:
    signature: Signature
    rules: tuple

    by_function: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        index = defaultdict(list)
        for r in self.rules:
            index[r.function].append(r)
        object.__setattr__(self, "by_function", {k: tuple(v) for k, v in index.items()})

    def rules_for(self, name: str) -> tuple:
        return self.by_function.get(name, ())

    def uses_fails(self) -> bool:
        for r in self.rules:
            terms = [r.body] + [c.lhs for c in r.conditions] + [c.rhs for c in r.conditions]
            if any(isinstance(s, Fails) for t in terms for s in subterms(t)):
                return True
        return False

    def pretty(self) -> str:
        decls = " ".join(f"{c}/{n}" for c, n in self.signature.constructors.items())
        lines = [f"data {decls}."]
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0
    column: int = 0
    rule: str | None = None

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line else ""
        suffix = f" (in rule: {self.rule})" if self.rule else ""
        return f"{where}{self.message}{suffix}"


class ProgramError(Exception):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def _rule_terms(r: ProgramRule) -> list[Term]:
    return [r.body] + [c.lhs for c in r.conditions] + [c.rhs for c in r.conditions]


def validate(p: Program) -> list[Diagnostic]:
    """Check the static well-formedness conditions on every rule."""
    diags = []
    sig = p.signature
    for name in ("true", "false"):
        if sig.constructors.get(name) != 0:
            diags.append(Diagnostic(f"missing nullary constructor {name!r}"))

    def report(r, msg):
        diags.append(Diagnostic(msg, r.line, r.column, str(r)))

    for r in p.rules:
        if r.function not in sig.functions:
            report(r, f"function {r.function!r} is not declared")
        elif sig.functions[r.function] != len(r.patterns):
            report(r, f"arity mismatch: {r.function} has arity {sig.functions[r.function]}")
        for pat in r.patterns:
            subs = list(subterms(pat))
            if any(isinstance(s, Fails) for s in subs):
                report(r, "fails in pattern")
            elif any(isinstance(s, Fun) for s in subs):
                report(r, "function symbol in pattern")
            if any(s is FAIL for s in subs):
                report(r, "F not allowed in programs")
            if any(s is BOT for s in subs):
                report(r, "⊥ not allowed in programs")
        pvars = r.pattern_vars()
        seen = set()
        for v in pvars:
            if v in seen:
                report(r, f"nonlinear head: variable {v} occurs more than once")
            seen.add(v)
        for t in _rule_terms(r):
            subs = list(subterms(t))
            if any(s is FAIL for s in subs):
                report(r, "F not allowed in programs")
            if any(s is BOT for s in subs):
                report(r, "⊥ not allowed in programs")
            for v in variables(t):
                if v not in seen:
                    report(r, f"extra variable {v}")
                    seen.add(v)
        for t in list(r.patterns) + _rule_terms(r):
            for s in subterms(t):
                match s:
                    case Con(name, args) if sig.constructors.get(name) != len(args):
                        what = "unknown constructor" if name not in sig.constructors else "arity mismatch for"
                        report(r, f"{what} {name}")
                    case Fun(name, args) if sig.functions.get(name) != len(args):
                        what = "unknown function" if name not in sig.functions else "arity mismatch for"
                        report(r, f"{what} {name}")
    for name in sig.functions:
        if not p.rules_for(name):
            diags.append(Diagnostic(f"function {name!r} has no rules"))
    return diags


def check_no_defaults(p: Program) -> list[Diagnostic]:
    return [
        Diagnostic("untransformed default rule (run transform_defaults first)", r.line, r.column, str(r))
        for r in p.rules
        if r.origin is Origin.DEFAULT
    ]


def _fresh_name(base: str, taken) -> str:
    name = base + "'"
    while name in taken:
        name += "'"
    return name


def transform_defaults(p: Program) -> Program:
    """Replace each ``default`` rule by a wrapper around a primed copy of the function.

    ``h`` with ordinary rules ``R1..Rn`` and ``default h(X1..Xk) -> e <= C``
    becomes ``h(X) -> h'(X)``, ``h(X) -> e <= fails(h'(X)) == true, C`` and
    ``h'`` carrying ``R1..Rn``.
    """
    diags = []
    grouped = defaultdict(list)
    for r in p.rules:
        grouped[r.function].append(r)
    taken = set(p.signature.constructors) | set(p.signature.functions)
    new_functions = {}
    out = []
    for name, rules in grouped.items():
        defaults = [r for r in rules if r.origin is Origin.DEFAULT]
        if not defaults:
            out.extend(rules)
            continue
        if len(defaults) > 1:
            diags.append(Diagnostic(f"multiple default rules for {name}", defaults[1].line, defaults[1].column))
            continue
        d = defaults[0]
        if rules[-1] is not d:
            diags.append(Diagnostic(f"default rule for {name} is not its last rule", d.line, d.column, str(d)))
            continue
        if not all(isinstance(t, Var) for t in d.patterns):
            diags.append(
                Diagnostic(f"default rule for {name} must have only variables as patterns", d.line, d.column, str(d))
            )
            continue
        ordinary = rules[:-1]
        if not ordinary:
            out.append(replace(d, origin=Origin.GENERATED))
            continue
        primed = _fresh_name(name, taken)
        taken.add(primed)
        new_functions[primed] = len(d.patterns)
        call = Fun(primed, d.patterns)
        out.append(ProgramRule(name, d.patterns, call, (), Origin.GENERATED, d.line, d.column))
        guard = Condition(Fails(call), Kind.JOIN, TRUE_TERM)
        out.append(ProgramRule(name, d.patterns, d.body, (guard,) + d.conditions, Origin.GENERATED, d.line, d.column))
        out.extend(replace(r, function=primed) for r in ordinary)
    if diags:
        raise ProgramError(diags)
    return Program(p.signature.with_functions(new_functions), tuple(out))


@dataclass(frozen=True)
class Match:
    theta: dict


@dataclass(frozen=True)
class Clash:
    position: tuple


@dataclass(frozen=True)
class Suspend:
    position: tuple


def _match(pat: Term, arg: Term, pos: tuple, theta: dict, suspended: list):
    if isinstance(pat, Var):
        theta[pat.name] = arg
        return
    # pattern is a constructor application
    if isinstance(arg, Con):
        if arg.name != pat.name or len(arg.args) != len(pat.args):
            raise _Clashed(pos)
        for i, (p, a) in enumerate(zip(pat.args, arg.args)):
            _match(p, a, pos + (i,), theta, suspended)
    elif arg is FAIL:
        raise _Clashed(pos)
    else:
        # bottom or a free variable: no matcher now and no clash in any refinement
        suspended.append(pos)


class _Clashed(Exception):
    def __init__(self, pos):
        self.pos = pos


def match_call(patterns: Sequence[Term], args: Sequence[Term]) -> Match | Clash | Suspend:
    """Classify how a call with c-term arguments meets a rule's linear patterns.

    Positions are ``(argument index, *path)``. A clash anywhere wins over
    suspension.
    """
    if len(patterns) != len(args):
        raise ValueError("pattern/argument count mismatch")
    theta, suspended = {}, []
    try:
        for i, (p, a) in enumerate(zip(patterns, args)):
            _match(p, a, (i,), theta, suspended)
    except _Clashed as c:
        return Clash(c.pos)
    if suspended:
        return Suspend(suspended[0])
    return Match(theta)


def has_clash(patterns: Sequence[Term], args: Sequence[Term]) -> bool:
    return any(clash_position(a, p, with_fail=True) is not None for p, a in zip(patterns, args))


def pattern_instance_of(patterns: Sequence[Term], args: Sequence[Term]) -> dict | None:
    """The unique matcher ``theta`` with ``patterns·theta == args``, if any."""
    r = match_call(patterns, args)
    return r.theta if isinstance(r, Match) else None


__all__ = [
    "Kind",
    "Origin",
    "Condition",
    "ProgramRule",
    "Program",
    "Diagnostic",
    "ProgramError",
    "validate",
    "check_no_defaults",
    "transform_defaults",
    "Match",
    "Clash",
    "Suspend",
    "match_call",
    "has_clash",
    "pattern_instance_of",
    "is_cterm",
]
