"""Budgeted computation of sufficient approximation sets (SAS's).

The engine follows one deterministic strategy through the CRWLF rules and
records the derivation it used, so every answer comes with a checkable proof.

Budgets: ``unfold`` bounds nested rule-6/7 entries (bodies and conditions run
with one unit less; arguments keep the caller's budget). ``depth`` bounds the
number of defined layers of SAS elements; when it runs out the engine closes
that subderivation with rule 1 (``e ⊲ {⊥}``). Either cut sets
``budget_exhausted``.
"""

from __future__ import annotations

import enum
import itertools
import sys
from dataclasses import dataclass

from .derivation import (
    CONSTRAINT_RULE,
    CRWLF,
    EXISTENTIAL,
    ConstraintStmt,
    Derivation,
    RuleSasStmt,
    SasStmt,
    node,
)
from .program import (
    Clash,
    Kind,
    Match,
    Program,
    ProgramError,
    ProgramRule,
    check_no_defaults,
    match_call,
    validate,
)
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
    term_key,
)

DEFAULT_UNFOLD = 64
DEFAULT_DEPTH = 32


@dataclass(frozen=True)
class CrwlfBudget:
    unfold: int = DEFAULT_UNFOLD
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if self.unfold < 0 or self.depth < 0:
            raise ValueError("budget components must be >= 0")


@dataclass(frozen=True)
class SasReport:
    sas: frozenset
    budget_exhausted: bool = False
    suspensions: bool = False
    derivation: Derivation | None = None

    @property
    def complete(self) -> bool:
        return not (self.budget_exhausted or self.suspensions)


class Verdict(enum.Enum):
    PROVED = "Proved"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ConstraintVerdict:
    verdict: Verdict
    lhs: Term
    kind: Kind
    rhs: Term
    left: SasReport
    right: SasReport
    # proof of the constraint (Proved) or of its complement (Refuted)
    derivation: Derivation | None = None


class FailsVerdict(enum.Enum):
    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class FailsAnswer:
    verdict: FailsVerdict
    report: SasReport

    @property
    def cause(self) -> str | None:
        if self.verdict is not FailsVerdict.UNKNOWN:
            return None
        if self.report.budget_exhausted:
            return "budget exhausted"
        return "suspension"


def _sorted(sas) -> list:
    return sorted(sas, key=term_key)


def check_program(p: Program) -> None:
    diags = validate(p) + check_no_defaults(p)
    if diags:
        raise ProgramError(diags)


class Engine:
    """One evaluation context; the memo table only lives as long as the engine."""

    def __init__(self, program: Program, budget: CrwlfBudget = CrwlfBudget(), *, checked: bool = False):
        if not checked:
            check_program(program)
        self.p = program
        self.budget = budget
        self._sas: dict = {}
        self._contrib: dict = {}
        self._prove: dict = {}
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    # each result is a SasReport whose derivation is always present

    def eval(self, e: Term, unfold: int | None = None, depth: int | None = None) -> SasReport:
        u = self.budget.unfold if unfold is None else unfold
        d = self.budget.depth if depth is None else depth
        key = (e, u, d)
        hit = self._sas.get(key)
        if hit is None:
            hit = self._eval(e, u, d)
            self._sas[key] = hit
        return hit

    def _eval(self, e: Term, u: int, d: int) -> SasReport:
        if e is BOT:
            return _leaf(e, 1, {BOT})
        if d == 0:
            return _leaf(e, 1, {BOT}, exhausted=True)
        match e:
            case Var():
                return _leaf(e, 2, {e})
            case _ if e is FAIL:
                return _leaf(e, 3, {FAIL})
            case Con(name, args):
                parts = [self.eval(a, u, d - 1) for a in args]
                sas = frozenset(Con(name, ts) for ts in itertools.product(*(_sorted(r.sas) for r in parts)))
                return _combine(SasStmt(e, sas), 3, parts)
            case Fun(name, args):
                if u == 0:
                    return _leaf(e, 1, {BOT}, exhausted=True)
                parts = [self.eval(a, u, self.budget.depth) for a in args]
                contribs = []
                for idx, rule in enumerate(self.p.rules_for(name), start=1):
                    for ts in itertools.product(*(_sorted(r.sas) for r in parts)):
                        contribs.append(self.contribution(rule, idx, ts, u, d))
                sas = frozenset().union(*(c.sas for c in contribs))
                return _combine(SasStmt(e, sas), 4, parts + contribs)
            case Fails(arg):
                if u == 0:
                    return _leaf(e, 1, {BOT}, exhausted=True)
                inner = self.eval(arg, u, self.budget.depth)
                if inner.sas == {FAIL}:
                    return _combine(SasStmt(e, frozenset({TRUE_TERM})), 13, [inner])
                if any(t is not BOT and t is not FAIL for t in inner.sas):
                    return _combine(SasStmt(e, frozenset({FALSE_TERM})), 14, [inner])
                # neither rule 13 nor 14 applies: fall back to rule 1
                return SasReport(
                    frozenset({BOT}),
                    inner.budget_exhausted,
                    inner.suspensions or not inner.budget_exhausted,
                    node(CRWLF, 1, SasStmt(e, frozenset({BOT}))),
                )
        raise TypeError(f"not a term: {e!r}")

    def contribution(self, rule: ProgramRule, index: int, args: tuple, u: int, d: int) -> SasReport:
        key = (rule.function, index, args, u, d)
        hit = self._contrib.get(key)
        if hit is None:
            hit = self._contribution(rule, index, args, u, d)
            self._contrib[key] = hit
        return hit

    def _contribution(self, rule, index, args, u, d) -> SasReport:
        call = Fun(rule.function, tuple(args))

        def stmt(sas):
            return RuleSasStmt(call, index, frozenset(sas))

        m = match_call(rule.patterns, args)
        if isinstance(m, Clash):
            return SasReport(frozenset({FAIL}), derivation=node(CRWLF, 8, stmt({FAIL})))
        if not isinstance(m, Match):
            return SasReport(frozenset({BOT}), suspensions=True, derivation=node(CRWLF, 5, stmt({BOT})))
        theta = m.theta
        verdicts = []
        for cond in rule.conditions:
            c = cond.subst(theta)
            v = self.prove(c.lhs, c.kind, c.rhs, u - 1)
            if v.verdict is Verdict.REFUTED:
                return SasReport(
                    frozenset({FAIL}),
                    v.left.budget_exhausted or v.right.budget_exhausted,
                    v.left.suspensions or v.right.suspensions,
                    node(CRWLF, 7, stmt({FAIL}), [v.derivation], index, theta),
                )
            verdicts.append(v)
        unknown = [v for v in verdicts if v.verdict is Verdict.UNKNOWN]
        if unknown:
            exhausted = any(v.left.budget_exhausted or v.right.budget_exhausted for v in unknown)
            suspended = any(v.left.suspensions or v.right.suspensions for v in unknown) or not exhausted
            return SasReport(frozenset({BOT}), exhausted, suspended, node(CRWLF, 5, stmt({BOT})))
        body = self.eval(apply_subst(rule.body, theta), u - 1, d)
        reports = [body] + [r for v in verdicts for r in (v.left, v.right)]
        return SasReport(
            body.sas,
            any(r.budget_exhausted for r in reports),
            any(r.suspensions for r in reports),
            node(CRWLF, 6, stmt(body.sas), [body.derivation] + [v.derivation for v in verdicts], index, theta),
        )

    def prove(self, lhs: Term, kind: Kind, rhs: Term, unfold: int | None = None) -> ConstraintVerdict:
        u = self.budget.unfold if unfold is None else unfold
        key = (lhs, kind, rhs, u)
        hit = self._prove.get(key)
        if hit is None:
            hit = self._prove_constraint(lhs, kind, rhs, u)
            self._prove[key] = hit
        return hit

    def _holds(self, kind: Kind, left: SasReport, right: SasReport) -> bool:
        rel = RELATIONS[kind.relation]
        pairs = itertools.product(left.sas, right.sas)
        if kind in EXISTENTIAL:
            return any(rel(a, b) for a, b in pairs)
        if left.budget_exhausted or right.budget_exhausted:
            return False
        return all(rel(a, b) for a, b in pairs)

    def _prove_constraint(self, lhs, kind, rhs, u) -> ConstraintVerdict:
        left = self.eval(lhs, u, self.budget.depth)
        right = self.eval(rhs, u, self.budget.depth)
        for verdict, k in ((Verdict.PROVED, kind), (Verdict.REFUTED, kind.complement)):
            if self._holds(k, left, right):
                d = node(CRWLF, CONSTRAINT_RULE[k], ConstraintStmt(lhs, k, rhs), [left.derivation, right.derivation])
                return ConstraintVerdict(verdict, lhs, kind, rhs, left, right, d)
        return ConstraintVerdict(Verdict.UNKNOWN, lhs, kind, rhs, left, right)


def _leaf(e, rule, sas, exhausted=False) -> SasReport:
    sas = frozenset(sas)
    return SasReport(sas, exhausted, False, node(CRWLF, rule, SasStmt(e, sas)))


def _combine(stmt, rule, parts) -> SasReport:
    return SasReport(
        stmt.sas,
        any(r.budget_exhausted for r in parts),
        any(r.suspensions for r in parts),
        node(CRWLF, rule, stmt, [r.derivation for r in parts]),
    )


def eval_sas(p: Program, e: Term, b: CrwlfBudget = CrwlfBudget()) -> SasReport:
    return Engine(p, b).eval(e)


def rule_contribution(p: Program, function: str, index: int, args, b: CrwlfBudget = CrwlfBudget()) -> SasReport:
    """Contribution ``f(args) ⊲_R C`` of the ``index``-th rule (1-based) of ``function``."""
    rules = p.rules_for(function)
    if not 1 <= index <= len(rules):
        raise ValueError(f"{function} has no rule {index}")
    return Engine(p, b).contribution(rules[index - 1], index, tuple(args), b.unfold, b.depth)


def prove_constraint(p: Program, lhs: Term, kind: Kind, rhs: Term, b: CrwlfBudget = CrwlfBudget()) -> ConstraintVerdict:
    return Engine(p, b).prove(lhs, kind, rhs)


def eval_fails_goal(p: Program, e: Term, b: CrwlfBudget = CrwlfBudget()) -> FailsAnswer:
    report = eval_sas(p, e, b)
    if report.sas == {FAIL}:
        return FailsAnswer(FailsVerdict.TRUE, report)
    if any(t is not BOT and t is not FAIL for t in report.sas):
        return FailsAnswer(FailsVerdict.FALSE, report)
    return FailsAnswer(FailsVerdict.UNKNOWN, report)
