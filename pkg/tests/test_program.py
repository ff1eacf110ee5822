import itertools
import random

import pytest

from crwlf.parser import parse_constraint, parse_program, parse_term
from crwlf.program import (
    Clash,
    Kind,
    Match,
    Origin,
    ProgramError,
    Suspend,
    check_no_defaults,
    has_clash,
    match_call,
    transform_defaults,
    validate,
)
from crwlf.terms import BOT, FAIL, Con, Fails, Fun, Var, apply_subst, enumerate_cterms, is_total, pretty

from conftest import CORPUS, T, corpus

z = Con("z")


def s(t):
    return Con("s", (t,))


def diagnostics(text):
    with pytest.raises(ProgramError) as exc:
        parse_program(text)
    return [d.message for d in exc.value.diagnostics]


def test_parse_coin():
    p = parse_program("data z/0 s/1.\ncoin -> z.\ncoin -> s(z).")
    assert len(p.rules_for("coin")) == 2
    assert p.signature.functions == {"coin": 0}
    assert validate(p) == []


def test_nonlinear_head():
    assert any("nonlinear head" in m for m in diagnostics("data z/0.\nf(X,X) -> z."))


def test_extra_variable():
    assert "extra variable Y" in diagnostics("g(X) -> Y.")


def test_fail_literal_in_body():
    assert "F not allowed in programs" in diagnostics("data z/0.\nf(X) -> F.")


def test_bottom_literal_in_program():
    assert "⊥ not allowed in programs" in diagnostics("data z/0.\nf(X) -> ⊥.")


def test_fails_in_pattern():
    assert "fails in pattern" in diagnostics("data z/0.\nk(fails(X)) -> z.")


def test_function_in_pattern():
    assert "function symbol in pattern" in diagnostics("data z/0.\nf(z) -> z.\ng(f(X)) -> z.")


def test_unknown_symbol_and_arity():
    msgs = diagnostics("data z/0 s/1.\nf(X) -> s(X, X).\ng(X) -> w.")
    assert any("arity mismatch" in m for m in msgs)
    assert any("unknown symbol w" in m for m in msgs)


def test_syntax_error_has_position():
    with pytest.raises(ProgramError) as exc:
        parse_program("data z/0.\nf(X) -> z\ng(X) -> z.")
    d = exc.value.diagnostics[0]
    assert d.line == 3 and d.column == 1


def test_conditions_and_lists():
    p = parse_program("data z/0.\nmb(X,[Y|Ys]) -> true <= X == Y.\nd(X) -> [X,z] <= X /= z.")
    r = p.rules_for("mb")[0]
    assert r.patterns[1] == Con("cons", (Var("Y"), Var("Ys")))
    assert r.conditions[0].kind is Kind.JOIN
    assert p.rules_for("d")[0].conditions[0].kind is Kind.DIV
    assert p.signature.constructors["nil"] == 0


def test_fails_allowed_in_bodies_and_conditions():
    p = parse_program("data z/0.\nf(z) -> z.\ng(X) -> fails(f(X)) <= fails(f(X)) == true.")
    assert p.uses_fails()


def test_program_goal_and_constraint_parsing(coin):
    assert T(coin, "[coin|T]") == Con("cons", (Fun("coin"), Var("T")))
    assert T(coin, "s(F)") == s(FAIL)
    assert T(coin, "_|_") is BOT
    assert parse_constraint("z !/= s(z)", coin.signature) == (z, Kind.NOT_DIV, s(z))
    with pytest.raises(ProgramError):
        parse_term("s(z", coin.signature)


@pytest.mark.parametrize("name", sorted(p.stem for p in CORPUS.glob("*.crwlf")))
def test_round_trip(name):
    p = corpus(name, transform=False)
    again = parse_program(p.pretty())
    assert again.rules == p.rules
    assert again.signature == p.signature


def test_transform_defaults_f(defaults):
    raw = corpus("defaults", transform=False)
    assert check_no_defaults(raw)
    rules = [str(r) for r in defaults.rules_for("f")] + [str(r) for r in defaults.rules_for("f'")]
    assert rules == ["f(X) -> f'(X).", "f(X) -> 1 <= fails(f'(X)) == true.", "f'(0) -> 0."]
    assert all(r.origin is Origin.GENERATED for r in defaults.rules_for("f"))
    assert validate(defaults) == [] and check_no_defaults(defaults) == []
    assert "f'" not in raw.signature.functions


def test_transform_defaults_path(defaults):
    rules = [str(r) for r in defaults.rules_for("path")]
    assert rules == ["path(X,Y) -> path'(X,Y).", "path(X,Y) -> false <= fails(path'(X,Y)) == true."]
    assert len(defaults.rules_for("path'")) == 2


def test_transform_without_defaults_is_identity(coin):
    assert transform_defaults(coin) == coin


def test_transform_fresh_name_avoids_clashes():
    p = parse_program("data z/0.\nf(z) -> z.\ndefault f(X) -> z.\nf'(X) -> z.")
    q = transform_defaults(p)
    assert "f''" in q.signature.functions


@pytest.mark.parametrize(
    "text, message",
    [
        ("data z/0.\nf(z) -> z.\ndefault f(X) -> z.\ndefault f(X) -> z.", "multiple default"),
        ("data z/0.\ndefault f(X) -> z.\nf(z) -> z.", "not its last rule"),
        ("data z/0.\nf(z) -> z.\ndefault f(z) -> z.", "only variables"),
    ],
)
def test_transform_errors(text, message):
    with pytest.raises(ProgramError) as exc:
        transform_defaults(parse_program(text))
    assert message in str(exc.value)


def test_match_call_examples():
    X = Var("X")
    assert isinstance(match_call([s(s(X))], [s(FAIL)]), Clash)
    assert match_call([s(s(X))], [s(s(FAIL))]) == Match({"X": FAIL})
    assert isinstance(match_call([z], [BOT]), Suspend)
    assert isinstance(match_call([z], [Var("Y")]), Suspend)
    # a clash anywhere wins over a suspension elsewhere
    assert match_call([z, z], [BOT, s(z)]) == Clash((1,))


PATTERNS = [
    [s(s(Var("X")))],
    [z, Var("Y")],
    [Con("cons", (Var("H"), Var("T")))],
    [s(Var("X")), Con("cons", (z, Var("T")))],
]
VALUES = sorted(enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 1, ["V"]), key=pretty)


def test_matching_is_sound():
    rng = random.Random(7)
    for pats in PATTERNS:
        names = [v for p in pats for v in _vars(p)]
        for _ in range(200):
            theta = {n: rng.choice(VALUES) for n in names}
            args = [apply_subst(p, theta) for p in pats]
            assert match_call(pats, args) == Match(theta)


def test_clash_excludes_every_instance():
    rng = random.Random(11)
    pool = sorted(enumerate_cterms({"z": 0, "s": 1, "nil": 0, "cons": 2}, 2), key=pretty)
    for pats in PATTERNS:
        names = [v for p in pats for v in _vars(p)]
        tuples = list(itertools.product(VALUES, repeat=len(pats)))
        for args in rng.sample(tuples, min(len(tuples), 150)):
            result = match_call(pats, list(args))
            if isinstance(result, Clash):
                assert has_clash(pats, args)
                assert not any(
                    [apply_subst(p, dict(zip(names, vals))) for p in pats] == list(args)
                    for vals in itertools.product(pool[:60], repeat=len(names))
                )
            else:
                assert not has_clash(pats, args)


def _vars(t):
    if isinstance(t, Var):
        return [t.name]
    if isinstance(t, Con):
        return [v for a in t.args for v in _vars(a)]
    return []


def test_patterns_are_total_in_corpus():
    for path in CORPUS.glob("*.crwlf"):
        p = corpus(path.stem)
        for r in p.rules:
            assert all(is_total(pt) for pt in r.patterns)
            assert not any(isinstance(pt, (Fun, Fails)) for pt in r.patterns)
