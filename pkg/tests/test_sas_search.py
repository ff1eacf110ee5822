"""Brute-force enumeration of every SAS the calculus can derive, for tiny goals.

Independent of the engine's strategy: each rule is tried wherever it applies.
"""

import itertools
from functools import lru_cache

from crwlf.engine import CrwlfBudget, eval_sas
from crwlf.program import Clash, Kind, Match, match_call
from crwlf.relations import RELATIONS
from crwlf.terms import BOT, FAIL, FALSE_TERM, TRUE_TERM, Con, Fails, Fun, Var, apply_subst

from conftest import T


def derivable_sas(program, e, unfold):
    @lru_cache(maxsize=None)
    def options(e, u):
        out = {frozenset({BOT})}
        if isinstance(e, Var):
            out.add(frozenset({e}))
        elif e is FAIL:
            out.add(frozenset({FAIL}))
        elif isinstance(e, Con):
            for choice in itertools.product(*(options(a, u) for a in e.args)):
                out.add(frozenset(Con(e.name, ts) for ts in itertools.product(*choice)))
        elif isinstance(e, Fun) and u > 0:
            rules = program.rules_for(e.name)
            for choice in itertools.product(*(options(a, u) for a in e.args)):
                pairs = [(i, ts) for i in range(len(rules)) for ts in itertools.product(*choice)]
                per_pair = [contributions(e.name, i, ts, u) for i, ts in pairs]
                for pick in itertools.product(*per_pair):
                    out.add(frozenset().union(*pick))
        elif isinstance(e, Fails) and u > 0:
            for c in options(e.arg, u):
                if c == {FAIL}:
                    out.add(frozenset({TRUE_TERM}))
                if any(t is not BOT and t is not FAIL for t in c):
                    out.add(frozenset({FALSE_TERM}))
        return frozenset(out)

    @lru_cache(maxsize=None)
    def contributions(name, i, ts, u):
        rule = program.rules_for(name)[i]
        out = {frozenset({BOT})}
        m = match_call(rule.patterns, ts)
        if isinstance(m, Clash):
            out.add(frozenset({FAIL}))
        elif isinstance(m, Match):
            conds = [c.subst(m.theta) for c in rule.conditions]
            if all(provable(c.lhs, c.kind, c.rhs, u - 1) for c in conds):
                out |= options(apply_subst(rule.body, m.theta), u - 1)
            if any(provable(c.lhs, c.kind.complement, c.rhs, u - 1) for c in conds):
                out.add(frozenset({FAIL}))
        return frozenset(out)

    @lru_cache(maxsize=None)
    def provable(l, kind, r, u):
        rel = RELATIONS[kind.relation]
        for cl, cr in itertools.product(options(l, u), options(r, u)):
            pairs = list(itertools.product(cl, cr))
            if kind in (Kind.JOIN, Kind.DIV):
                if any(rel(a, b) for a, b in pairs):
                    return True
            elif all(rel(a, b) for a, b in pairs):
                return True
        return False

    return options(e, unfold)


def S(p, *texts):
    return frozenset(T(p, t) for t in texts)


def test_default_f_never_has_a_singleton_sas(defaults):
    for goal, value in [("f(0)", "0"), ("f(s(z))", "1")]:
        for u in range(1, 5):
            opts = derivable_sas(defaults, T(defaults, goal), u)
            assert S(defaults, value) not in opts
        assert S(defaults, value, "F") in opts


def test_coin_sas_family(coin):
    opts = derivable_sas(coin, T(coin, "coin"), 2)
    expected = [{"⊥"}, {"⊥", "s(⊥)"}, {"⊥", "s(z)"}, {"z", "⊥"}, {"z", "s(⊥)"}, {"z", "s(z)"}]
    assert opts == {S(coin, *c) for c in expected}


def test_engine_answers_are_derivable(coin, graph):
    cases = [(coin, "coin"), (coin, "double(coin)"), (coin, "g(coin)"), (coin, "k(z)"), (coin, "f(s(z))"),
             (graph, "path(c,d)"), (graph, "next(a)")]
    for p, goal in cases:
        for u in (1, 2, 3):
            got = eval_sas(p, T(p, goal), CrwlfBudget(u, 8)).sas
            assert got in derivable_sas(p, T(p, goal), u), (goal, u)


def test_all_derivable_sas_are_mutually_consistent(coin, defaults):
    from crwlf.terms import consistent_sets

    for p, goal in [(coin, "double(coin)"), (defaults, "f(0)"), (coin, "k(coin)")]:
        opts = list(derivable_sas(p, T(p, goal), 3))
        for a, b in itertools.combinations(opts, 2):
            assert consistent_sets(a, b)
