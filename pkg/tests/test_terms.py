import itertools
import pickle

import pytest
from hypothesis import given, strategies as st

from crwlf.terms import (
    BOT,
    FAIL,
    ArityError,
    Con,
    Fails,
    Fun,
    Signature,
    SignatureError,
    Var,
    apply_subst,
    consistent,
    consistent_sets,
    depth,
    enumerate_cterms,
    hat,
    info_depth,
    info_leq,
    is_cterm,
    is_ground,
    is_total,
    is_total_subst,
    pretty,
    truncate,
)

z = Con("z")


def s(t):
    return Con("s", (t,))


NAT = {"z": 0, "s": 1}
SMALL = sorted(enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 1, ["X"]), key=pretty)
NAT2 = sorted(enumerate_cterms(NAT, 2, ["X"]), key=pretty)


def test_apply_subst_examples():
    assert apply_subst(s(Var("X")), {"X": z}) == s(z)
    assert apply_subst(z, {"X": s(z)}) == z
    add = Fun("add", (Var("X"), Var("X")))
    assert apply_subst(add, {"X": s(BOT)}) == Fun("add", (s(BOT), s(BOT)))


def test_apply_subst_leaves_unmapped_variables():
    assert apply_subst(Con("p", (Var("X"), Var("Y"))), {"X": z}) == Con("p", (z, Var("Y")))
    assert apply_subst(Fails(Var("Y")), {"Y": FAIL}) == Fails(FAIL)


def test_info_leq_examples():
    assert info_leq(BOT, s(z))
    assert not info_leq(FAIL, s(z))
    assert info_leq(s(BOT), s(FAIL))


def test_consistent_examples():
    assert consistent(BOT, s(z))
    assert not consistent(FAIL, z)
    assert consistent(s(BOT), s(z))
    assert consistent(Var("X"), BOT)
    assert not consistent(Var("X"), z)


def test_hat_examples():
    assert hat(s(FAIL)) == s(BOT)
    assert hat(z) == z
    assert hat(FAIL) is BOT


def test_enumerate_cterms_examples():
    assert enumerate_cterms(NAT, 0) == {BOT, FAIL, z}
    assert enumerate_cterms(NAT, 1) == {BOT, FAIL, z, s(BOT), s(FAIL), s(z)}
    assert enumerate_cterms({"z": 0}, 0, ["X"]) == {BOT, FAIL, z, Var("X")}
    with pytest.raises(ValueError):
        enumerate_cterms(NAT, -1)


def test_enumerate_respects_tree_depth():
    terms = enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 2, ["X"])
    assert all(depth(t) <= 2 and is_cterm(t) for t in terms)
    assert len(terms) == 1265


def test_signature_invariants():
    sig = Signature({"z": 0}, {"f": 1})
    assert sig.constructors["true"] == 0 and sig.constructors["false"] == 0
    with pytest.raises(SignatureError):
        Signature({"f": 0}, {"f": 1})
    with pytest.raises(SignatureError):
        Signature({}, {"fails": 1})
    with pytest.raises(SignatureError):
        Signature({"true": 1})
    with pytest.raises(ArityError):
        sig.con("z", z)
    with pytest.raises(ArityError):
        sig.check(Fun("f", ()))
    assert sig.fun("f", z) == Fun("f", (z,))


def test_classification():
    assert is_total(s(Var("X"))) and not is_ground(s(Var("X")))
    assert not is_total(s(BOT)) and not is_total(s(FAIL))
    assert not is_cterm(s(Fun("f", ()))) and not is_cterm(Fails(z))
    assert is_total_subst({"X": s(z)}) and not is_total_subst({"X": s(BOT)})


def test_info_depth_and_truncate():
    assert info_depth(BOT) == 0 and info_depth(z) == 1 and info_depth(s(BOT)) == 1 and info_depth(s(z)) == 2
    assert truncate(s(s(z)), 1) == s(BOT)
    assert truncate(s(s(z)), 3) == s(s(z))
    assert all(info_leq(truncate(t, k), t) for t in NAT2 for k in range(4))


def test_pretty_list_sugar():
    cons = lambda h, t: Con("cons", (h, t))
    assert pretty(cons(z, cons(s(z), Con("nil")))) == "[z,s(z)]"
    assert pretty(cons(z, Var("T"))) == "[z|T]"
    assert pretty(Fails(Fun("f", (BOT, FAIL)))) == "fails(f(⊥,F))"


def test_singletons_survive_pickling():
    assert pickle.loads(pickle.dumps(BOT)) is BOT
    assert pickle.loads(pickle.dumps(s(FAIL))) == s(FAIL)


def test_order_is_a_partial_order():
    for a in NAT2:
        assert info_leq(a, a)
    for a, b in itertools.product(NAT2, repeat=2):
        if info_leq(a, b) and info_leq(b, a):
            assert a == b
    for a, b, c in itertools.product(SMALL, repeat=3):
        if info_leq(a, b) and info_leq(b, c):
            assert info_leq(a, c)


def test_bottom_least_and_maximal_elements():
    terms = sorted(enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 2, ["X"]), key=pretty)
    assert all(info_leq(BOT, t) for t in terms)
    assert [t for t in terms if all(info_leq(t, u) for u in terms)] == [BOT]
    for t in terms:
        if t is FAIL or is_total(t):
            assert not any(info_leq(t, u) and u != t for u in terms)


def test_consistent_matches_brute_force_upper_bounds():
    pool = enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 2, ["X"])
    ups = {a: {u for u in pool if info_leq(a, u)} for a in SMALL}
    for a, b in itertools.product(SMALL, repeat=2):
        brute = any(depth(u) <= depth(a) + depth(b) for u in ups[a] & ups[b])
        assert consistent(a, b) == brute, (a, b)
        assert consistent(a, b) == consistent(b, a)


def test_hat_properties_exhaustive():
    for e in NAT2 + SMALL:
        assert hat(hat(e)) == hat(e)
        assert info_leq(hat(e), e)
        assert (hat(e) == e) == (FAIL not in _leaves(e))


def _leaves(e):
    if isinstance(e, Con):
        return [x for a in e.args for x in _leaves(a)]
    return [e]


def test_consistent_sets_is_two_sided():
    assert consistent_sets({z, s(BOT)}, {s(z), BOT})
    assert not consistent_sets({z}, {z, FAIL})
    assert not consistent_sets({z, FAIL}, {z})


cterms = st.recursive(
    st.sampled_from([BOT, FAIL, z, Var("X"), Var("Y")]),
    lambda kids: st.builds(lambda a: s(a), kids) | st.builds(lambda a, b: Con("cons", (a, b)), kids, kids),
    max_leaves=8,
)


@given(cterms, cterms)
def test_hat_monotone_and_consistency_refines(a, b):
    if info_leq(a, b):
        assert info_leq(hat(a), hat(b))
        assert consistent(a, b)


@given(cterms, st.dictionaries(st.sampled_from(["X", "Y"]), cterms))
def test_substitution_is_monotone(t, theta):
    assert info_leq(t, t) and info_leq(apply_subst(t, {k: BOT for k in theta}), apply_subst(t, theta))
