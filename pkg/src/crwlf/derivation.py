"""Derivation trees for both calculi and a node-by-node checker.

CRWL rules: 1 ``e -> ⊥``, 2 ``X -> X``, 3 decomposition, 4 c-instance
unfolding, 5 joinability, 6 divergence.

CRWLF rules: 1 ``e ⊲ {⊥}``, 2 ``X ⊲ {X}``, 3 decomposition (also ``F``),
4 union over rules and argument tuples, 5-8 single-rule contributions
(trivial, parameter passing, failed condition, clash), 9-12 constraints,
13-14 ``fails``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator

from .program import Kind, Program, has_clash
from .relations import RELATIONS
from .terms import (
    BOT,
    FAIL,
    FALSE_TERM,
    TRUE_TERM,
    Con,
    Fails,
    Fun,
    Term,
    Var,
    apply_subst,
    contains_fail,
    is_cterm,
    is_total,
    pretty,
    pretty_set,
)

CRWL = "CRWL"
CRWLF = "CRWLF"

CONSTRAINT_RULE = {Kind.JOIN: 9, Kind.DIV: 10, Kind.NOT_JOIN: 11, Kind.NOT_DIV: 12}
EXISTENTIAL = (Kind.JOIN, Kind.DIV)


@dataclass(frozen=True)
class SasStmt:
    """``expr ⊲ sas``"""

    expr: Term
    sas: frozenset

    def __str__(self) -> str:
        return f"{pretty(self.expr)} ⊲ {pretty_set(self.sas)}"


@dataclass(frozen=True)
class RuleSasStmt:
    """``call ⊲_R sas`` where ``R`` is the ``rule_index``-th rule (1-based) of the function."""

    call: Fun
    rule_index: int
    sas: frozenset

    def __str__(self) -> str:
        return f"{pretty(self.call)} ⊲_{self.rule_index} {pretty_set(self.sas)}"


@dataclass(frozen=True)
class ConstraintStmt:
    lhs: Term
    kind: Kind
    rhs: Term

    def __str__(self) -> str:
        return f"{pretty(self.lhs)} {self.kind.value} {pretty(self.rhs)}"


@dataclass(frozen=True)
class ApproxStmt:
    """CRWL approximation statement ``expr -> value``."""

    expr: Term
    value: Term

    def __str__(self) -> str:
        return f"{pretty(self.expr)} -> {pretty(self.value)}"


Statement = SasStmt | RuleSasStmt | ConstraintStmt | ApproxStmt


@dataclass(frozen=True)
class Derivation:
    calculus: str
    rule: int
    conclusion: Statement
    children: tuple = ()
    rule_index: int | None = None
    theta: tuple = ()

    @property
    def subst(self) -> dict:
        return dict(self.theta)

    def nodes(self) -> Iterator["Derivation"]:
        seen = set()
        stack = [self]
        while stack:
            d = stack.pop()
            if id(d) in seen:
                continue
            seen.add(id(d))
            yield d
            stack.extend(d.children)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def to_dict(self) -> dict:
        inst = None
        if self.rule_index is not None:
            inst = {"ruleIndex": self.rule_index, "theta": {k: pretty(v) for k, v in self.theta}}
        return {
            "calculus": self.calculus,
            "rule": self.rule,
            "conclusion": str(self.conclusion),
            "instantiation": inst,
            "children": [c.to_dict() for c in self.children],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, **kw)

    def render(self, indent: str = "") -> str:
        head = f"{indent}[{self.calculus} {self.rule}] {self.conclusion}"
        if self.theta:
            head += "   θ=" + "{" + ", ".join(f"{k}↦{pretty(v)}" for k, v in self.theta) + "}"
        return "\n".join([head] + [c.render(indent + "  ") for c in self.children])


def node(calculus, rule, conclusion, children=(), rule_index=None, theta=None) -> Derivation:
    return Derivation(
        calculus,
        rule,
        conclusion,
        tuple(children),
        rule_index,
        tuple(sorted(theta.items())) if theta else (),
    )


# -- JSON ----------------------------------------------------------------


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur).strip())
    return parts


_RULE_SAS = re.compile(r"^(.*) ⊲_(\d+) \{(.*)\}$")
_SAS = re.compile(r"^(.*) ⊲ \{(.*)\}$")
_CONSTRAINT = re.compile(r"^(.*?) (!==|!/=|==|/=) (.*)$")
_APPROX = re.compile(r"^(.*) -> (.*)$")


def parse_statement(text: str, program: Program) -> Statement:
    from .parser import parse_term

    sig = program.signature

    def term(s):
        return parse_term(s, sig)

    if m := _RULE_SAS.match(text):
        call = term(m.group(1))
        if not isinstance(call, Fun):
            raise ValueError(f"not a function call: {m.group(1)}")
        return RuleSasStmt(call, int(m.group(2)), frozenset(term(s) for s in _split_top(m.group(3))))
    if m := _SAS.match(text):
        return SasStmt(term(m.group(1)), frozenset(term(s) for s in _split_top(m.group(2))))
    if m := _CONSTRAINT.match(text):
        return ConstraintStmt(term(m.group(1)), Kind(m.group(2)), term(m.group(3)))
    if m := _APPROX.match(text):
        return ApproxStmt(term(m.group(1)), term(m.group(2)))
    raise ValueError(f"unrecognised statement: {text!r}")


def from_dict(data: dict, program: Program) -> Derivation:
    from .parser import parse_term

    inst = data.get("instantiation")
    rule_index, theta = None, {}
    if inst is not None:
        rule_index = inst["ruleIndex"]
        theta = {k: parse_term(v, program.signature) for k, v in inst.get("theta", {}).items()}
    return node(
        data["calculus"],
        data["rule"],
        parse_statement(data["conclusion"], program),
        [from_dict(c, program) for c in data.get("children", [])],
        rule_index,
        theta,
    )


def from_json(text: str, program: Program) -> Derivation:
    return from_dict(json.loads(text), program)


# -- checking ------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    diagnostics: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


class _Invalid(Exception):
    pass


class _Checker:
    def __init__(self, program: Program):
        self.p = program
        self.ok_nodes: set[int] = set()

    def fail(self, d: Derivation, msg: str):
        raise _Invalid(f"[{d.calculus} rule {d.rule}] {d.conclusion}: {msg}")

    def expect(self, d, cond, msg):
        if not cond:
            self.fail(d, msg)

    def check(self, d: Derivation):
        # iterative post-order so deep trees do not hit the recursion limit
        stack = [(d, False)]
        while stack:
            cur, expanded = stack.pop()
            if id(cur) in self.ok_nodes:
                continue
            if expanded:
                self.check_node(cur)
                self.ok_nodes.add(id(cur))
            else:
                stack.append((cur, True))
                stack.extend((c, False) for c in cur.children)

    def check_node(self, d: Derivation):
        if not isinstance(d, Derivation):
            raise _Invalid(f"not a derivation node: {d!r}")
        for c in d.children:
            self.expect(d, c.calculus == d.calculus, "child from a different calculus")
        if d.calculus == CRWLF:
            method = getattr(self, f"crwlf_{d.rule}", None)
        elif d.calculus == CRWL:
            method = getattr(self, f"crwl_{d.rule}", None)
        else:
            method = None
        if method is None:
            self.fail(d, "unknown rule")
        method(d, d.conclusion, d.children)

    def rule_of(self, d, fname, index):
        rules = self.p.rules_for(fname)
        self.expect(d, index is not None and 1 <= index <= len(rules), f"no rule {index} for {fname}")
        return rules[index - 1]

    def check_theta(self, d, rule, theta, args, allow_fail):
        names = set(rule.pattern_vars())
        self.expect(d, set(theta) == names, "substitution domain differs from the rule's variables")
        for v in theta.values():
            self.expect(d, is_cterm(v), "substitution maps to a non c-term")
            if not allow_fail:
                self.expect(d, not contains_fail(v), "F in a CRWL substitution")
        inst = tuple(apply_subst(p, theta) for p in rule.patterns)
        self.expect(d, inst == tuple(args), "rule head instance does not equal the call")

    def sas_children(self, d, children, exprs):
        self.expect(d, len(children) >= len(exprs), "missing premises")
        out = []
        for c, e in zip(children, exprs):
            self.expect(d, isinstance(c.conclusion, SasStmt) and c.conclusion.expr == e, f"premise is not about {pretty(e)}")
            out.append(c.conclusion.sas)
        return out

    # CRWLF

    def crwlf_1(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt) and s.sas == {BOT} and not ch, "expected e ⊲ {⊥} without premises")

    def crwlf_2(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt) and isinstance(s.expr, Var), "expected a variable")
        self.expect(d, s.sas == {s.expr} and not ch, "expected X ⊲ {X}")

    def crwlf_3(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt), "expected a SAS statement")
        e = s.expr
        if e is FAIL:
            self.expect(d, s.sas == {FAIL} and not ch, "expected F ⊲ {F}")
            return
        self.expect(d, isinstance(e, Con), "rule 3 needs a constructor or F")
        self.expect(d, len(ch) == len(e.args), "one premise per argument")
        sets = self.sas_children(d, ch, e.args)
        want = frozenset(Con(e.name, tuple(ts)) for ts in itertools.product(*sets))
        self.expect(d, s.sas == want, "SAS is not the cross product of the premises")

    def crwlf_4(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt) and isinstance(s.expr, Fun), "rule 4 needs a function call")
        e = s.expr
        n = len(e.args)
        rules = self.p.rules_for(e.name)
        self.expect(d, bool(rules), f"{e.name} has no rules")
        sets = self.sas_children(d, ch, e.args)
        expected = {
            (i, ts) for i in range(1, len(rules) + 1) for ts in itertools.product(*sets)
        }
        got, union = set(), set()
        for c in ch[n:]:
            cs = c.conclusion
            self.expect(d, isinstance(cs, RuleSasStmt) and cs.call.name == e.name, "expected a single-rule premise")
            key = (cs.rule_index, cs.call.args)
            self.expect(d, key not in got, "duplicate single-rule premise")
            got.add(key)
            union |= cs.sas
        self.expect(d, got == expected, "premises do not cover every rule and argument tuple exactly")
        self.expect(d, s.sas == union, "SAS is not the union of the single-rule premises")

    def _rule_stmt(self, d, s):
        self.expect(d, isinstance(s, RuleSasStmt), "expected a single-rule statement")
        self.expect(d, all(is_cterm(a) for a in s.call.args), "arguments must be c-terms")
        return self.rule_of(d, s.call.name, s.rule_index)

    def crwlf_5(self, d, s, ch):
        self._rule_stmt(d, s)
        self.expect(d, s.sas == {BOT} and not ch, "expected ⊲_R {⊥} without premises")

    def crwlf_6(self, d, s, ch):
        rule = self._rule_stmt(d, s)
        self.expect(d, d.rule_index == s.rule_index, "instantiation names another rule")
        theta = d.subst
        self.check_theta(d, rule, theta, s.call.args, allow_fail=True)
        self.expect(d, len(ch) == 1 + len(rule.conditions), "expected body and condition premises")
        body = ch[0].conclusion
        self.expect(d, isinstance(body, SasStmt) and body.expr == apply_subst(rule.body, theta), "body premise mismatch")
        self.expect(d, body.sas == s.sas, "SAS differs from the body's SAS")
        for c, cond in zip(ch[1:], rule.conditions):
            ci = cond.subst(theta)
            self.expect(d, c.conclusion == ConstraintStmt(ci.lhs, ci.kind, ci.rhs), f"condition premise is not {ci}")

    def crwlf_7(self, d, s, ch):
        rule = self._rule_stmt(d, s)
        self.expect(d, d.rule_index == s.rule_index, "instantiation names another rule")
        theta = d.subst
        self.check_theta(d, rule, theta, s.call.args, allow_fail=True)
        self.expect(d, s.sas == {FAIL} and len(ch) == 1, "expected ⊲_R {F} from one premise")
        complements = [
            ConstraintStmt(apply_subst(c.lhs, theta), c.kind.complement, apply_subst(c.rhs, theta))
            for c in rule.conditions
        ]
        self.expect(d, ch[0].conclusion in complements, "premise is not the complement of a condition")

    def crwlf_8(self, d, s, ch):
        rule = self._rule_stmt(d, s)
        self.expect(d, s.sas == {FAIL} and not ch, "expected ⊲_R {F} without premises")
        self.expect(d, has_clash(rule.patterns, s.call.args), "no DC∪{F} clash with the rule's patterns")

    def _constraint(self, d, s, ch, kind):
        self.expect(d, isinstance(s, ConstraintStmt) and s.kind is kind, f"expected a {kind.value} statement")
        self.expect(d, len(ch) == 2, "expected two SAS premises")
        left, right = self.sas_children(d, ch, (s.lhs, s.rhs))
        rel = RELATIONS[kind.relation]
        pairs = [(a, b) for a in left for b in right]
        if kind in EXISTENTIAL:
            self.expect(d, any(rel(a, b) for a, b in pairs), "no pair satisfies the relation")
        else:
            self.expect(d, all(rel(a, b) for a, b in pairs), "some pair violates the relation")

    def crwlf_9(self, d, s, ch):
        self._constraint(d, s, ch, Kind.JOIN)

    def crwlf_10(self, d, s, ch):
        self._constraint(d, s, ch, Kind.DIV)

    def crwlf_11(self, d, s, ch):
        self._constraint(d, s, ch, Kind.NOT_JOIN)

    def crwlf_12(self, d, s, ch):
        self._constraint(d, s, ch, Kind.NOT_DIV)

    def crwlf_13(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt) and isinstance(s.expr, Fails), "expected fails(e)")
        self.expect(d, s.sas == {TRUE_TERM} and len(ch) == 1, "expected fails(e) ⊲ {true} from one premise")
        (inner,) = self.sas_children(d, ch, (s.expr.arg,))
        self.expect(d, inner == {FAIL}, "premise SAS is not {F}")

    def crwlf_14(self, d, s, ch):
        self.expect(d, isinstance(s, SasStmt) and isinstance(s.expr, Fails), "expected fails(e)")
        self.expect(d, s.sas == {FALSE_TERM} and len(ch) == 1, "expected fails(e) ⊲ {false} from one premise")
        (inner,) = self.sas_children(d, ch, (s.expr.arg,))
        self.expect(d, any(t is not BOT and t is not FAIL for t in inner), "premise SAS has no value besides ⊥/F")

    # CRWL

    def _approx(self, d, s):
        self.expect(d, isinstance(s, ApproxStmt), "expected an approximation statement")
        self.expect(d, is_cterm(s.value) and not contains_fail(s.value), "value must be a c-term over ⊥")

    def approx_children(self, d, children, pairs):
        self.expect(d, len(children) >= len(pairs), "missing premises")
        for c, (e, t) in zip(children, pairs):
            self.expect(d, c.conclusion == ApproxStmt(e, t), f"premise is not {pretty(e)} -> {pretty(t)}")

    def crwl_1(self, d, s, ch):
        self._approx(d, s)
        self.expect(d, s.value is BOT and not ch, "expected e -> ⊥")

    def crwl_2(self, d, s, ch):
        self._approx(d, s)
        self.expect(d, isinstance(s.expr, Var) and s.value == s.expr and not ch, "expected X -> X")

    def crwl_3(self, d, s, ch):
        self._approx(d, s)
        e, t = s.expr, s.value
        self.expect(d, isinstance(e, Con) and isinstance(t, Con) and e.name == t.name, "constructor mismatch")
        self.expect(d, len(ch) == len(e.args) == len(t.args), "one premise per argument")
        self.approx_children(d, ch, list(zip(e.args, t.args)))

    def crwl_4(self, d, s, ch):
        self._approx(d, s)
        e, t = s.expr, s.value
        self.expect(d, isinstance(e, Fun), "rule 4 needs a function call")
        self.expect(d, t is not BOT, "rule 4 cannot conclude ⊥")
        rule = self.rule_of(d, e.name, d.rule_index)
        theta = d.subst
        args = tuple(apply_subst(p, theta) for p in rule.patterns)
        self.check_theta(d, rule, theta, args, allow_fail=False)
        n, m = len(e.args), len(rule.conditions)
        self.expect(d, len(ch) == n + m + 1, "expected argument, condition and body premises")
        self.approx_children(d, ch, list(zip(e.args, args)))
        for c, cond in zip(ch[n : n + m], rule.conditions):
            ci = cond.subst(theta)
            self.expect(d, c.conclusion == ConstraintStmt(ci.lhs, ci.kind, ci.rhs), f"condition premise is not {ci}")
        self.approx_children(d, ch[n + m :], [(apply_subst(rule.body, theta), t)])

    def _crwl_constraint(self, d, s, ch, kind):
        self.expect(d, isinstance(s, ConstraintStmt) and s.kind is kind, f"expected a {kind.value} statement")
        self.expect(d, len(ch) == 2, "expected two premises")
        a, b = ch[0].conclusion, ch[1].conclusion
        self.expect(d, isinstance(a, ApproxStmt) and isinstance(b, ApproxStmt), "premises must be approximations")
        self.expect(d, a.expr == s.lhs and b.expr == s.rhs, "premises are about other expressions")
        return a.value, b.value

    def crwl_5(self, d, s, ch):
        t, u = self._crwl_constraint(d, s, ch, Kind.JOIN)
        self.expect(d, t == u and is_total(t), "values are not one common total c-term")

    def crwl_6(self, d, s, ch):
        t, u = self._crwl_constraint(d, s, ch, Kind.DIV)
        self.expect(d, RELATIONS["up"](t, u), "values have no constructor clash")


def check_derivation(program: Program, d: Derivation) -> CheckResult:
    """Check every node against its rule schema; report the first failure."""
    try:
        _Checker(program).check(d)
    except _Invalid as exc:
        return CheckResult(False, [str(exc)])
    return CheckResult(True)


def statements(d: Derivation) -> Iterator[Any]:
    for n in d.nodes():
        yield n.conclusion


# -- transformations used by the property suites ------------------------


class ReplayError(ValueError):
    pass


def replay(d: Derivation, target: Term) -> Derivation:
    """Re-read a CRWLF derivation of ``e ⊲ C`` as one of ``target ⊲ C``.

    ``target`` must refine ``e`` only at ``⊥`` positions; those are closed by
    rule 1 in the original tree, and rule 1 holds for any expression.
    """
    s = d.conclusion
    if not isinstance(s, SasStmt):
        raise ReplayError("replay starts at a SAS statement")
    e = s.expr
    if d.rule == 1:
        return replace_conclusion(d, SasStmt(target, s.sas))
    if e == target:
        return d
    match e, target:
        case (Con(f, xs), Con(g, ys)) | (Fun(f, xs), Fun(g, ys)) if f == g and len(xs) == len(ys):
            n = len(xs)
            kids = [replay(c, y) for c, y in zip(d.children[:n], ys)] + list(d.children[n:])
            return Derivation(d.calculus, d.rule, SasStmt(target, s.sas), tuple(kids), d.rule_index, d.theta)
        case Fails(x), Fails(y):
            return Derivation(d.calculus, d.rule, SasStmt(target, s.sas), (replay(d.children[0], y),), d.rule_index, d.theta)
    raise ReplayError(f"{pretty(target)} does not refine {pretty(e)} at ⊥ positions")


def replace_conclusion(d: Derivation, stmt) -> Derivation:
    return Derivation(d.calculus, d.rule, stmt, d.children, d.rule_index, d.theta)


def cterm_derivation(t: Term) -> Derivation:
    """CRWLF derivation of ``t ⊲ {t}`` for a c-term ``t`` (rules 1, 2, 3)."""
    if t is BOT:
        return node(CRWLF, 1, SasStmt(t, frozenset({BOT})))
    if isinstance(t, Var):
        return node(CRWLF, 2, SasStmt(t, frozenset({t})))
    if t is FAIL:
        return node(CRWLF, 3, SasStmt(t, frozenset({FAIL})))
    if isinstance(t, Con):
        return node(CRWLF, 3, SasStmt(t, frozenset({t})), [cterm_derivation(a) for a in t.args])
    raise ValueError(f"not a c-term: {pretty(t)}")


class InstantiationError(ValueError):
    pass


def _subst_stmt(s, theta):
    def sset(ts):
        return frozenset(apply_subst(t, theta) for t in ts)

    match s:
        case SasStmt(e, sas):
            return SasStmt(apply_subst(e, theta), sset(sas))
        case RuleSasStmt(call, idx, sas):
            return RuleSasStmt(apply_subst(call, theta), idx, sset(sas))
        case ConstraintStmt(l, k, r):
            return ConstraintStmt(apply_subst(l, theta), k, apply_subst(r, theta))
        case ApproxStmt(e, t):
            return ApproxStmt(apply_subst(e, theta), apply_subst(t, theta))
    raise TypeError(s)


def instantiate(d: Derivation, theta: dict) -> Derivation:
    """Apply a total substitution to a CRWLF derivation, repairing the nodes that need it.

    Rule-2 leaves ``X ⊲ {X}`` become derivations of ``Xθ ⊲ {Xθ}``; rule-4
    premises that coincide after substitution are kept once; the matchers of
    rules 6 and 7 are composed with ``theta``.
    """
    memo: dict = {}

    def go(n: Derivation) -> Derivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        stmt = _subst_stmt(n.conclusion, theta)
        if n.calculus == CRWLF and n.rule == 2:
            out = cterm_derivation(stmt.expr)
        else:
            kids = [go(c) for c in n.children]
            if n.calculus == CRWLF and n.rule == 4:
                arity = len(n.conclusion.expr.args)
                seen, kept = {}, kids[:arity]
                for c in kids[arity:]:
                    cs = c.conclusion
                    key = (cs.rule_index, cs.call.args)
                    if key in seen:
                        if seen[key] != cs:
                            raise InstantiationError(f"premises for {cs.call} collapse with different SAS's")
                        continue
                    seen[key] = cs
                    kept.append(c)
                kids = kept
            new_theta = {k: apply_subst(v, theta) for k, v in n.theta}
            out = node(n.calculus, n.rule, stmt, kids, n.rule_index, new_theta)
        memo[id(n)] = out
        return out

    return go(d)


def _edit_path(d: Derivation, path: tuple, fn) -> Derivation:
    if not path:
        return fn(d)
    i = path[0]
    kids = list(d.children)
    kids[i] = _edit_path(kids[i], path[1:], fn)
    return Derivation(d.calculus, d.rule, d.conclusion, tuple(kids), d.rule_index, d.theta)


def _paths(d: Derivation, limit: int = 5000) -> list:
    out, stack = [], [((), d)]
    while stack and len(out) < limit:
        path, n = stack.pop()
        out.append((path, n))
        stack.extend((path + (i,), c) for i, c in enumerate(n.children))
    return out


_EXTRA = (BOT, FAIL, Con("true"), Con("false"))


def mutate(d: Derivation, rng) -> Derivation:
    """One random local edit: drop or add a SAS element, renumber a rule, or drop a premise."""
    paths = _paths(d)
    while True:
        path, n = rng.choice(paths)
        s = n.conclusion
        ops = ["rule"]
        if isinstance(s, (SasStmt, RuleSasStmt)):
            ops += ["drop_elem", "add_elem"]
        if n.children:
            ops.append("drop_child")
        op = rng.choice(ops)
        if op == "rule":
            top = 14 if n.calculus == CRWLF else 6
            new = rng.choice([r for r in range(1, top + 1) if r != n.rule])
            fn = lambda m, new=new: Derivation(m.calculus, new, m.conclusion, m.children, m.rule_index, m.theta)
        elif op == "drop_elem":
            victim = rng.choice(sorted(s.sas, key=pretty))
            fn = lambda m, v=victim: replace_conclusion(m, _with_sas(m.conclusion, m.conclusion.sas - {v}))
        elif op == "add_elem":
            extra = [t for t in _EXTRA if t not in s.sas]
            if not extra:
                continue
            t = rng.choice(extra)
            fn = lambda m, t=t: replace_conclusion(m, _with_sas(m.conclusion, m.conclusion.sas | {t}))
        else:
            i = rng.randrange(len(n.children))
            fn = lambda m, i=i: Derivation(
                m.calculus, m.rule, m.conclusion, m.children[:i] + m.children[i + 1 :], m.rule_index, m.theta
            )
        return _edit_path(d, path, fn)


def _with_sas(s, sas):
    if isinstance(s, SasStmt):
        return SasStmt(s.expr, frozenset(sas))
    return RuleSasStmt(s.call, s.rule_index, frozenset(sas))
