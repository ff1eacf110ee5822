"""Reference interpreter for the CRWL calculus.

Denotations are computed bottom-up under the same budget accounting as the
CRWLF engine: arguments keep the caller's unfold budget, bodies and
conditions get one unit less, and ``depth`` caps the defined layers of the
approximations. Derivations are then rebuilt top-down, guided by membership
in those denotations.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass

from .derivation import CRWL, ApproxStmt, ConstraintStmt, Derivation, node
from .engine import CrwlfBudget, check_program
from .program import Kind, Program, pattern_instance_of
from .relations import rel_up
from .terms import (
    BOT,
    FAIL,
    Con,
    Fails,
    Fun,
    Term,
    Var,
    apply_subst,
    contains_fail,
    info_depth,
    info_leq,
    is_cterm,
    is_total,
    subterms,
    term_key,
)

CrwlBudget = CrwlfBudget


class CrwlPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Proved:
    derivation: Derivation


class NotProvedWithinBudget:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NotProvedWithinBudget"


NOT_PROVED = NotProvedWithinBudget()
CrwlAnswer = Proved | NotProvedWithinBudget


def _maximal(ts) -> list:
    ts = sorted(ts, key=term_key)
    return [t for t in ts if not any(t != u and info_leq(t, u) for u in ts)]


class Oracle:
    def __init__(self, program: Program, budget: CrwlBudget = CrwlBudget()):
        check_program(program)
        if program.uses_fails():
            raise CrwlPreconditionError("CRWL programs cannot use fails")
        self.p = program
        self.budget = budget
        self._den: dict = {}
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    def check_expr(self, e: Term):
        for s in subterms(e):
            if s is FAIL:
                raise CrwlPreconditionError("CRWL expressions cannot contain F")
            if isinstance(s, Fails):
                raise CrwlPreconditionError("CRWL expressions cannot use fails")

    def den(self, e: Term, u: int, d: int) -> frozenset:
        key = (e, u, d)
        hit = self._den.get(key)
        if hit is None:
            hit = self._compute(e, u, d)
            self._den[key] = hit
        return hit

    def _compute(self, e: Term, u: int, d: int) -> frozenset:
        out = {BOT}
        if e is BOT or d == 0:
            return frozenset(out)
        match e:
            case Var():
                out.add(e)
            case Con(name, args):
                parts = [sorted(self.den(a, u, d - 1), key=term_key) for a in args]
                out.update(Con(name, ts) for ts in itertools.product(*parts))
            case Fun(name, args):
                if u > 0:
                    for rule, theta in self._fire(e, u):
                        out |= self.den(apply_subst(rule.body, theta), u - 1, d)
            case _:
                raise CrwlPreconditionError(f"not a CRWL expression: {e!r}")
        return frozenset(out)

    def instances(self, e: Fun, u: int):
        # the unique matcher exists only for argument tuples that are c-instances
        # of the patterns; restricting to maximal approximations loses nothing by
        # monotonicity of the calculus
        parts = [_maximal(self.den(a, u, self.budget.depth)) for a in e.args]
        for idx, rule in enumerate(self.p.rules_for(e.name), start=1):
            for ts in itertools.product(*parts):
                theta = pattern_instance_of(rule.patterns, ts)
                if theta is not None:
                    yield idx, theta, ts

    def _fire(self, e: Fun, u: int):
        rules = self.p.rules_for(e.name)
        for idx, theta, _ in self.instances(e, u):
            rule = rules[idx - 1]
            if all(self.provable(c.subst(theta), u - 1) for c in rule.conditions):
                yield rule, theta

    def provable(self, c, u: int) -> bool:
        return self._constraint_witness(c.lhs, c.kind, c.rhs, u) is not None

    def _constraint_witness(self, lhs, kind, rhs, u):
        left = _maximal(self.den(lhs, u, self.budget.depth)) if kind is Kind.DIV else sorted(
            self.den(lhs, u, self.budget.depth), key=term_key
        )
        right = self.den(rhs, u, self.budget.depth)
        if kind is Kind.JOIN:
            for t in left:
                if is_total(t) and t in right:
                    return t, t
            return None
        if kind is Kind.DIV:
            rmax = _maximal(right)
            for t in left:
                for t2 in rmax:
                    if rel_up(t, t2):
                        return t, t2
            return None
        raise CrwlPreconditionError(f"CRWL has no {kind.value} constraints")

    # derivations

    def _depth_for(self, t: Term) -> int:
        return max(self.budget.depth, info_depth(t))

    def derive(self, e: Term, t: Term, u: int) -> Derivation | None:
        stmt = ApproxStmt(e, t)
        if t is BOT:
            return node(CRWL, 1, stmt)
        if t not in self.den(e, u, self._depth_for(t)):
            return None
        match e:
            case Var():
                return node(CRWL, 2, stmt)
            case Con(_, args):
                kids = [self.derive(a, s, u) for a, s in zip(args, t.args)]
                return node(CRWL, 3, stmt, kids)
            case Fun():
                rules = self.p.rules_for(e.name)
                for idx, theta, ts in self.instances(e, u):
                    rule = rules[idx - 1]
                    conds = [c.subst(theta) for c in rule.conditions]
                    body = apply_subst(rule.body, theta)
                    if t not in self.den(body, u - 1, self._depth_for(t)):
                        continue
                    proofs = [self.constraint_proof(c.lhs, c.kind, c.rhs, u - 1) for c in conds]
                    if any(pr is None for pr in proofs):
                        continue
                    kids = [self.derive(a, s, u) for a, s in zip(e.args, ts)]
                    kids += proofs
                    kids.append(self.derive(body, t, u - 1))
                    return node(CRWL, 4, stmt, kids, idx, theta)
        return None

    def constraint_proof(self, lhs, kind, rhs, u) -> Derivation | None:
        w = self._constraint_witness(lhs, kind, rhs, u)
        if w is None:
            return None
        t, t2 = w
        rule = 5 if kind is Kind.JOIN else 6
        return node(CRWL, rule, ConstraintStmt(lhs, kind, rhs), [self.derive(lhs, t, u), self.derive(rhs, t2, u)])


def crwl_derives(p: Program, e: Term, t: Term, b: CrwlBudget = CrwlBudget()) -> CrwlAnswer:
    o = Oracle(p, b)
    o.check_expr(e)
    if not is_cterm(t) or contains_fail(t):
        raise CrwlPreconditionError("the approximated value must be a c-term without F")
    d = o.derive(e, t, b.unfold)
    return NOT_PROVED if d is None else Proved(d)


def crwl_denotation(p: Program, e: Term, b: CrwlBudget = CrwlBudget()) -> frozenset:
    o = Oracle(p, b)
    o.check_expr(e)
    return o.den(e, b.unfold, b.depth)


def _prove(p, lhs, kind, rhs, b) -> CrwlAnswer:
    o = Oracle(p, b)
    o.check_expr(lhs)
    o.check_expr(rhs)
    d = o.constraint_proof(lhs, kind, rhs, b.unfold)
    return NOT_PROVED if d is None else Proved(d)


def crwl_prove_join(p: Program, lhs: Term, rhs: Term, b: CrwlBudget = CrwlBudget()) -> CrwlAnswer:
    return _prove(p, lhs, Kind.JOIN, rhs, b)


def crwl_prove_div(p: Program, lhs: Term, rhs: Term, b: CrwlBudget = CrwlBudget()) -> CrwlAnswer:
    return _prove(p, lhs, Kind.DIV, rhs, b)
