"""Executable acceptance criteria over the bundled corpus.

Each criterion returns an ``Outcome``; ``run_all`` evaluates every one of
them. Both the test suite and ``crwlf corpus`` print one line per criterion.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import cache
from importlib.resources import files
from pathlib import Path
from typing import Callable

from .crwl import CrwlBudget, Proved, crwl_denotation, crwl_derives, crwl_prove_div, crwl_prove_join
from .derivation import check_derivation, instantiate, mutate, replay
from .engine import CrwlfBudget, Engine, Verdict
from .parser import load_program, parse_term
from .program import Kind, Program
from .relations import RELATIONS
from .terms import (
    BOT,
    FAIL,
    Con,
    Fun,
    Var,
    apply_subst,
    consistent_sets,
    enumerate_cterms,
    hat,
    is_total,
    pretty,
    pretty_set,
)

SEED = 20010


def corpus_dir() -> Path:
    return Path(str(files("crwlf") / "corpus"))


_corpus_root: list[Path] = []


def set_corpus(path) -> None:
    _corpus_root[:] = [Path(path)]
    program.cache_clear()


@cache
def program(name: str) -> Program:
    root = _corpus_root[0] if _corpus_root else corpus_dir()
    return load_program(root / f"{name}.crwlf")


def term(prog: str, text: str):
    return parse_term(text, program(prog).signature)


def sas(prog: str, goal: str, b: CrwlfBudget = CrwlfBudget()):
    return Engine(program(prog), b).eval(term(prog, goal))


@dataclass
class Outcome:
    ok: bool
    detail: str = ""
    derivations: list = field(default_factory=list, repr=False)


@dataclass
class Criterion:
    cid: str
    title: str
    run: Callable[[], Outcome]


CRITERIA: list[Criterion] = []


def criterion(cid: str, title: str):
    def deco(fn):
        CRITERIA.append(Criterion(cid, title, fn))
        return fn

    return deco


def _checked(prog, reports) -> tuple[bool, str]:
    for r in reports:
        res = check_derivation(program(prog), r.derivation)
        if not res:
            return False, "; ".join(res.diagnostics)
    return True, ""


def _exact(prog, goal, expected, b=CrwlfBudget(), exhausted=None) -> Outcome:
    r = sas(prog, goal, b)
    want = frozenset(term(prog, t) for t in expected)
    ok = r.sas == want
    detail = f"{goal} ⊲ {pretty_set(r.sas)} (expected {pretty_set(want)})"
    if exhausted is not None:
        ok = ok and r.budget_exhausted == exhausted
        detail += f", budgetExhausted={r.budget_exhausted}"
    good, why = _checked(prog, [r])
    return Outcome(ok and good, detail + ("" if good else f", check failed: {why}"), [(prog, r.derivation)])


# 1. golden derivations


@criterion("1.coin", "coin ⊲ {z, s(z)}")
def golden_coin():
    return _exact("coin", "coin", ["z", "s(z)"])


@criterion("1.h", "h at unfold=2 ⊲ {s(⊥)} with budgetExhausted")
def golden_h():
    # depth 1 cuts below the first defined layer; see README for the budget measure
    return _exact("coin", "h", ["s(⊥)"], CrwlfBudget(unfold=2, depth=1), exhausted=True)


@criterion("1.mb", "mb(coin,[s(h)]) ⊲ {F}")
def golden_mb():
    return _exact("coin", "mb(coin,[s(h)])", ["F"])


@criterion("1.graph", "fails(path(c,d)) ⊲ {true}; safe(c) ⊲ {true}; safe(a|b|d) ⊲ {false}")
def golden_graph():
    cases = [("fails(path(c,d))", "true"), ("safe(c)", "true"), ("safe(a)", "false"), ("safe(b)", "false"), ("safe(d)", "false")]
    outs = [_exact("safe", g, [v]) for g, v in cases]
    return Outcome(all(o.ok for o in outs), "; ".join(o.detail for o in outs), [d for o in outs for d in o.derivations])


@criterion("1.nim", "winMove([s(s(z)),s(z)]): values besides ⊥/F are exactly {[s(z),s(z)]}")
def golden_nim():
    r = sas("nim", "winMove([s(s(z)),s(z)])")
    values = frozenset(t for t in r.sas if t is not BOT and t is not FAIL)
    want = frozenset({term("nim", "[s(z),s(z)]")})
    good, why = _checked("nim", [r])
    return Outcome(
        values == want and good,
        f"SAS {pretty_set(r.sas)}, values {pretty_set(values)}" + ("" if good else f", check failed: {why}"),
        [("nim", r.derivation)],
    )


@criterion("1.default-f0", "default-transformed f: f(0) ⊲ exactly {0}")
def golden_default_f0():
    return _exact("defaults", "f(0)", ["0"])


@criterion("1.default-f1", "default-transformed f: f(s(z)) ⊲ exactly {1}")
def golden_default_f1():
    return _exact("defaults", "f(s(z))", ["1"])


# 2. oracle correspondence on fails-free programs

FAILS_FREE_GOALS = [
    ("coin", g)
    for g in [
        "coin",
        "z",
        "double(coin)",
        "add(coin,coin)",
        "add(s(z),coin)",
        "g(coin)",
        "f(s(z))",
        "f(z)",
        "k(z)",
        "k(s(z))",
        "k(coin)",
        "h",
        "f(h)",
        "g(h)",
        "mb(coin,[s(h)])",
        "mb(z,[coin])",
        "mb(s(z),[z,coin])",
        "mb(coin,[z,s(z)])",
        "double(X)",
        "add(X,s(z))",
        "[coin,h]",
    ]
] + [
    ("graph", g)
    for g in ["next(a)", "next(d)", "path(a,d)", "path(c,d)", "path(a,c)", "path(b,a)", "path(d,d)", "path(next(a),d)"]
]

MATCHED_BUDGETS = [CrwlfBudget(3, 3), CrwlfBudget(6, 5), CrwlfBudget(12, 8)]


@criterion("2.sas-derivable", "every SAS element t of ê is CRWL-derivable as t̂")
def oracle_sas_derivable():
    total, bad = 0, []
    for (prog, goal), b in itertools.product(FAILS_FREE_GOALS, MATCHED_BUDGETS):
        e = term(prog, goal)
        r = Engine(program(prog), b).eval(e)
        for t in r.sas:
            total += 1
            ans = crwl_derives(program(prog), hat(e), hat(t), CrwlBudget(b.unfold, b.depth))
            if not isinstance(ans, Proved) or not check_derivation(program(prog), ans.derivation):
                bad.append(f"{goal} -> {pretty(hat(t))} at {b}")
    return Outcome(not bad, f"{total - len(bad)}/{total} proved" + (f"; missing: {bad[:5]}" if bad else ""))


CONSTRAINT_PAIRS = [
    ("coin", "coin", "z"),
    ("coin", "coin", "s(z)"),
    ("coin", "coin", "s(s(z))"),
    ("coin", "double(coin)", "z"),
    ("coin", "double(coin)", "s(z)"),
    ("coin", "double(coin)", "s(s(z))"),
    ("coin", "h", "z"),
    ("coin", "h", "s(s(z))"),
    ("coin", "add(coin,coin)", "s(z)"),
    ("coin", "g(coin)", "z"),
    ("coin", "f(s(z))", "z"),
    ("coin", "k(s(z))", "z"),
    ("coin", "mb(coin,[s(h)])", "true"),
    ("graph", "path(a,d)", "true"),
    ("graph", "path(c,d)", "true"),
]


@criterion("2.constraint-agreement", "Join/Div verdicts agree with the CRWL oracle on 30 goal pairs")
def oracle_constraint_agreement():
    b = CrwlfBudget(12, 8)
    disagreements, n = [], 0
    for (prog, l, r), kind in itertools.product(CONSTRAINT_PAIRS, (Kind.JOIN, Kind.DIV)):
        n += 1
        p = program(prog)
        lt, rt = term(prog, l), term(prog, r)
        v = Engine(p, b).prove(lt, kind, rt)
        oracle = crwl_prove_join if kind is Kind.JOIN else crwl_prove_div
        o = oracle(p, hat(lt), hat(rt), CrwlBudget(b.unfold, b.depth))
        if (v.verdict is Verdict.PROVED) != isinstance(o, Proved):
            disagreements.append(f"{l} {kind.value} {r}: engine {v.verdict.value}, oracle {type(o).__name__}")
    return Outcome(not disagreements, f"{n} pairs, {len(disagreements)} disagreements {disagreements}")


FAILING_GOALS = [("coin", "g(coin)"), ("coin", "f(s(z))"), ("coin", "mb(coin,[s(h)])"), ("graph", "path(c,d)")]


@criterion("2.failure-denotation", "goals with SAS {F} denote exactly {⊥} at unfold 4, 8, 16")
def oracle_failure_denotation():
    lines, ok = [], True
    for prog, goal in FAILING_GOALS:
        r = sas(prog, goal)
        dens = [crwl_denotation(program(prog), hat(term(prog, goal)), CrwlBudget(u, 32)) for u in (4, 8, 16)]
        good = r.sas == {FAIL} and all(d == {BOT} for d in dens)
        ok &= good
        lines.append(f"{goal}: SAS {pretty_set(r.sas)}, [[·]] {' '.join(pretty_set(d) for d in dens)}")
    return Outcome(ok, "; ".join(lines))


@criterion("2.call-time", "[[double(coin)]] has z and s(s(z)) but never s(z)")
def oracle_call_time_choice():
    z, one, two = term("coin", "z"), term("coin", "s(z)"), term("coin", "s(s(z))")
    ok, seen = True, []
    for u, d in itertools.product((4, 8, 16), (3, 8, 32)):
        den = crwl_denotation(program("coin"), term("coin", "double(coin)"), CrwlBudget(u, d))
        ok &= z in den and two in den and one not in den
        seen.append(f"({u},{d}):{len(den)}")
    return Outcome(ok, "budgets " + " ".join(seen))


# 3. property suites

CTERM_SIG = {"z": 0, "s": 1, "cons": 2, "nil": 0}


def _covers(t, pool):
    """Terms of ``pool`` obtained by refining exactly one ⊥ of ``t`` by a one-layer term."""
    fillers = [FAIL, Var("X"), Con("z"), Con("nil"), Con("s", (BOT,)), Con("cons", (BOT, BOT))]
    out = []

    def go(u):
        if u is BOT:
            return [f for f in fillers]
        if isinstance(u, Con):
            res = []
            for i, a in enumerate(u.args):
                for a2 in go(a):
                    res.append(Con(u.name, u.args[:i] + (a2,) + u.args[i + 1 :]))
            return res
        return []

    for s in go(t):
        if s in pool:
            out.append(s)
    return out


@criterion("3.relations", "relation properties, all c-term pairs of depth ≤ 2 over z, s, cons, nil, X")
def props_relations():
    terms = sorted(enumerate_cterms(CTERM_SIG, 2, ["X"]), key=pretty)
    index = {t: i for i, t in enumerate(terms)}
    n = len(terms)
    rows = {name: [0] * n for name in RELATIONS}
    cols = {name: [0] * n for name in RELATIONS}
    for name, rel in RELATIONS.items():
        row, col = rows[name], cols[name]
        for i, a in enumerate(terms):
            bits = 0
            for j, b in enumerate(terms):
                if rel(a, b):
                    bits |= 1 << j
                    col[j] |= 1 << i
            row[i] = bits
    problems = []
    full = (1 << n) - 1
    down, up, nd, nu = rows["down"], rows["up"], rows["not_down"], rows["not_up"]
    for name in RELATIONS:
        if rows[name] != cols[name]:
            problems.append(f"{name} not symmetric")
    for i in range(n):
        if up[i] & ~nd[i]:
            problems.append(f"up ⊄ not_down at {pretty(terms[i])}")
        if nd[i] & down[i]:
            problems.append(f"not_down meets down at {pretty(terms[i])}")
        if down[i] & ~nu[i]:
            problems.append(f"down ⊄ not_up at {pretty(terms[i])}")
        if nu[i] & up[i]:
            problems.append(f"not_up meets up at {pretty(terms[i])}")
    # (a.i) invariance under hat for ↓ and ↑
    hat_idx = [index[hat(t)] for t in terms]
    for name in ("down", "up"):
        row = rows[name]
        for i in range(n):
            hi = row[hat_idx[i]]
            bits = 0
            for j in range(n):
                if (hi >> hat_idx[j]) & 1:
                    bits |= 1 << j
            if bits != row[i]:
                problems.append(f"{name} not hat-invariant at {pretty(terms[i])}")
    # (b) monotonicity, one refinement step at a time (symmetry covers the other side)
    covers = {i: [index[s] for s in _covers(t, index)] for i, t in enumerate(terms)}
    for name in RELATIONS:
        row = rows[name]
        for i, ks in covers.items():
            for k in ks:
                if row[i] & (full ^ row[k]):
                    problems.append(f"{name} not monotone from {pretty(terms[i])} to {pretty(terms[k])}")
    # (c) substitution closure, sampled
    rng = random.Random(SEED)
    shallow = sorted(enumerate_cterms(CTERM_SIG, 1, ["X"]), key=pretty)
    with_x = [t for t in terms if "X" in pretty(t)]
    thetas = [{"X": u} for u in shallow] + [{"X": rng.choice(terms)} for _ in range(40)]
    samples = 0
    for theta in thetas:
        total = all(is_total(v) for v in theta.values())
        pairs = [(rng.choice(with_x), rng.choice(terms)) for _ in range(300)]
        for a, b in pairs:
            for name, rel in RELATIONS.items():
                if name in ("down", "not_up") and not total:
                    continue
                samples += 1
                if rel(a, b) and not rel(apply_subst(a, theta), apply_subst(b, theta)):
                    problems.append(f"{name} not closed under {theta} at ({pretty(a)}, {pretty(b)})")
    return Outcome(
        not problems,
        f"{n} terms, {n * n} pairs, {sum(len(v) for v in covers.values())} refinement steps, {samples} substitution samples"
        + (f"; counterexamples: {problems[:5]}" if problems else ""),
    )


ALL_GOALS = FAILS_FREE_GOALS + [
    ("safe", g) for g in ["safe(a)", "safe(b)", "safe(c)", "safe(d)", "fails(path(c,d))", "fails(next(X))"]
] + [("nim", g) for g in ["winMove([s(s(z)),s(z)])", "winMove([s(z)])", "winMove([z,z])", "move([s(z),z])"]] + [
    ("defaults", g) for g in ["f(0)", "f(s(z))", "f(X)", "safe(a)", "safe(c)", "path(c,d)"]
] + [("lists", g) for g in ["add(z,[s(z)],L)", "add(z,[z],[z,z])", "member2(z,[s(z),z])", "add2(s(z),[z],[s(z),z])"]]


def _random_budget(rng) -> CrwlfBudget:
    return CrwlfBudget(rng.randint(0, 10), rng.randint(0, 8))


@criterion("3.consistency", "SAS's of one goal under two budgets are consistent (200 triples)")
def props_consistency():
    rng = random.Random(SEED + 1)
    bad = []
    for _ in range(200):
        prog, goal = rng.choice(ALL_GOALS)
        b1, b2 = _random_budget(rng), _random_budget(rng)
        s1, s2 = sas(prog, goal, b1).sas, sas(prog, goal, b2).sas
        if not consistent_sets(s1, s2):
            bad.append(f"{goal}: {pretty_set(s1)} vs {pretty_set(s2)}")
    return Outcome(not bad, f"200 triples, {len(bad)} inconsistent {bad[:3]}")


CONSTRAINT_TERMS = {
    "coin": ["coin", "z", "s(z)", "s(s(z))", "double(coin)", "h", "g(coin)", "f(s(z))", "k(coin)", "X", "[coin]", "F", "s(F)", "⊥"],
    "graph": ["a", "b", "c", "d", "next(a)", "next(b)", "next(c)", "path(a,d)", "path(c,d)", "true", "Y"],
    "safe": ["safe(a)", "safe(c)", "true", "false", "fails(next(d))"],
    "nim": ["winMove([s(s(z)),s(z)])", "move([s(z)])", "[z]", "[s(z),s(z)]", "pick(s(s(z)))", "z"],
}


@criterion("3.no-contradiction", "no constraint is Proved together with its complement (200 goals)")
def props_no_contradiction():
    rng = random.Random(SEED + 2)
    bad = []
    for _ in range(200):
        prog = rng.choice(sorted(CONSTRAINT_TERMS))
        l, r = rng.choice(CONSTRAINT_TERMS[prog]), rng.choice(CONSTRAINT_TERMS[prog])
        kind = rng.choice(list(Kind))
        b1, b2 = _random_budget(rng), _random_budget(rng)
        p = program(prog)
        v1 = Engine(p, b1).prove(term(prog, l), kind, term(prog, r))
        v2 = Engine(p, b2).prove(term(prog, l), kind.complement, term(prog, r))
        if v1.verdict is Verdict.PROVED and v2.verdict is Verdict.PROVED:
            bad.append(f"{l} {kind.value} {r}")
    return Outcome(not bad, f"200 goals, {len(bad)} contradictions {bad[:3]}")


OPEN_GOALS = [
    ("coin", "add(X,s(z))"),
    ("coin", "double(X)"),
    ("coin", "k(X)"),
    ("coin", "g(X)"),
    ("coin", "f(X)"),
    ("coin", "mb(X,[Y,z])"),
    ("coin", "add(coin,X)"),
    ("graph", "path(X,d)"),
    ("graph", "next(X)"),
    ("safe", "safe(X)"),
    ("lists", "member2(X,[z,Y])"),
    ("nim", "move([X,s(z)])"),
    ("defaults", "f(X)"),
]


def _random_total(rng, sig, depth):
    cons = sorted(sig.constructors.items())
    leaves = [c for c, n in cons if n == 0]
    if depth == 0:
        return Con(rng.choice(leaves))
    c, n = rng.choice(cons)
    return Con(c, tuple(_random_total(rng, sig, depth - 1) for _ in range(n)))


@criterion("3.substitution", "total substitutions: SAS of eθ consistent with Cθ, θ-instantiated tree checks (100 θ)")
def props_substitution():
    rng = random.Random(SEED + 3)
    bad = []
    derivs = []
    b = CrwlfBudget(10, 6)
    for _ in range(100):
        prog, goal = rng.choice(OPEN_GOALS)
        p = program(prog)
        e = term(prog, goal)
        r = Engine(p, b).eval(e)
        names = sorted({v.name for v in _vars(e)})
        theta = {v: _random_total(rng, p.signature, rng.randint(0, 2)) for v in names}
        c_theta = frozenset(apply_subst(t, theta) for t in r.sas)
        r2 = Engine(p, b).eval(apply_subst(e, theta))
        if not consistent_sets(r2.sas, c_theta):
            bad.append(f"{goal}θ: {pretty_set(r2.sas)} vs {pretty_set(c_theta)}")
        try:
            d = instantiate(r.derivation, theta)
        except ValueError as exc:
            bad.append(f"{goal}: {exc}")
            continue
        res = check_derivation(p, d)
        if not res:
            bad.append(f"{goal} with {theta}: {res.diagnostics}")
        derivs.append((prog, d))
    return Outcome(not bad, f"100 substitutions, {len(bad)} failures {bad[:3]}", derivs)


def _vars(e):
    from .terms import subterms

    return [s for s in subterms(e) if isinstance(s, Var)]


def _refine_one_bottom(e, rng, fill):
    """Replace one ⊥ of ``e`` by ``fill``; ``None`` if ``e`` has no ⊥."""
    positions = []

    def walk(t, path):
        if t is BOT:
            positions.append(path)
        elif isinstance(t, (Con, Fun)):
            for i, a in enumerate(t.args):
                walk(a, path + (i,))

    walk(e, ())
    if not positions:
        return None
    target = rng.choice(positions)

    def put(t, path):
        if not path:
            return fill
        i = path[0]
        args = list(t.args)
        args[i] = put(args[i], path[1:])
        return type(t)(t.name, tuple(args))

    return put(e, target)


PARTIAL_GOALS = [
    ("coin", "add(⊥,s(z))", ["z", "s(z)", "coin", "s(⊥)"]),
    ("coin", "double(s(⊥))", ["z", "coin", "h", "s(z)"]),
    ("coin", "g(s(⊥))", ["z", "s(z)", "coin", "h"]),
    ("coin", "mb(⊥,[s(h)])", ["z", "coin", "s(s(z))"]),
    ("coin", "k(⊥)", ["s(z)", "z", "coin"]),
    ("graph", "path(⊥,d)", ["a", "b", "c", "d", "next(a)"]),
    ("safe", "safe(⊥)", ["a", "c", "next(a)"]),
    ("nim", "winMove([⊥,s(z)])", ["z", "s(z)", "s(s(z))"]),
]


@criterion("3.emit-check", "every emitted derivation checks; 50 random mutations are all rejected")
def props_emit_then_check():
    rng = random.Random(SEED + 4)
    trees = []
    for prog, goal in ALL_GOALS:
        for b in (CrwlfBudget(), CrwlfBudget(4, 3)):
            trees.append((prog, Engine(program(prog), b).eval(term(prog, goal)).derivation))
    for (prog, l, r), kind in itertools.product(CONSTRAINT_PAIRS, list(Kind)):
        v = Engine(program(prog), CrwlfBudget(12, 8)).prove(term(prog, l), kind, term(prog, r))
        if v.derivation is not None:
            trees.append((prog, v.derivation))
    # monotonicity: replaying a tree for e against a refinement e'
    replayed = 0
    for prog, goal, fills in PARTIAL_GOALS:
        e = term(prog, goal)
        d = Engine(program(prog)).eval(e).derivation
        for f in fills:
            e2 = _refine_one_bottom(e, rng, term(prog, f))
            trees.append((prog, replay(d, e2)))
            replayed += 1
    for c in CRITERIA:
        if c.cid in ("1.coin", "1.h", "1.mb", "1.graph", "1.nim", "3.substitution"):
            trees.extend(c.run().derivations)
    failed = [(prog, check_derivation(program(prog), d)) for prog, d in trees]
    failed = [f"{prog}: {res.diagnostics}" for prog, res in failed if not res]
    accepted = []
    candidates = [(p, d) for p, d in trees if d.size() > 1]
    for _ in range(50):
        prog, d = rng.choice(candidates)
        m = mutate(d, rng)
        if check_derivation(program(prog), m):
            accepted.append(f"{prog}: {m.conclusion}")
    ok = not failed and not accepted
    return Outcome(
        ok,
        f"{len(trees)} trees checked ({replayed} replayed onto refinements), {len(failed)} rejected; "
        f"50 mutations, {len(accepted)} wrongly accepted" + (f" {failed[:2]} {accepted[:2]}" if not ok else ""),
    )


@criterion("3.monotonicity", "refining a ⊥ keeps the SAS consistent (monotonicity, sampled)")
def props_monotonicity():
    rng = random.Random(SEED + 5)
    bad, n = [], 0
    for prog, goal, fills in PARTIAL_GOALS:
        e = term(prog, goal)
        base = sas(prog, goal)
        for f in fills:
            e2 = _refine_one_bottom(e, rng, term(prog, f))
            r2 = Engine(program(prog)).eval(e2)
            n += 1
            if not consistent_sets(base.sas, r2.sas):
                bad.append(f"{pretty(e2)}: {pretty_set(r2.sas)} vs {pretty_set(base.sas)}")
    return Outcome(not bad, f"{n} refinements, {len(bad)} failures {bad[:3]}")


def run_all(only=None, echo=None) -> list[tuple[Criterion, Outcome, float]]:
    results = []
    for c in CRITERIA:
        if only and c.cid not in only:
            continue
        t0 = time.perf_counter()
        try:
            out = c.run()
        except Exception as exc:  # report and keep going
            out = Outcome(False, f"error: {type(exc).__name__}: {exc}")
        dt = time.perf_counter() - t0
        results.append((c, out, dt))
        if echo:
            echo(format_line(c, out, dt))
    return results


def format_line(c: Criterion, out: Outcome, dt: float) -> str:
    return f"{'PASS' if out.ok else 'FAIL'} [{c.cid}] {c.title} ({dt:.2f}s): {out.detail}"
