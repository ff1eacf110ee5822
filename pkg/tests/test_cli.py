import json
import subprocess
import sys

import pytest

from crwlf.cli import main
from crwlf.serialize import report_from_dict, verdict_from_dict

from conftest import CORPUS, corpus


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


COIN = CORPUS / "coin.crwlf"


def test_check(capsys, tmp_path):
    code, out, _ = run(capsys, "check", COIN)
    assert code == 0 and "coin -> s(z)." in out
    bad = tmp_path / "bad.crwlf"
    bad.write_text("data z/0.\nf(X,X) -> z.\n")
    code, _, err = run(capsys, "check", bad)
    assert code == 1 and "nonlinear head" in err


def test_check_prints_transformed_defaults(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "defaults.crwlf")
    assert code == 0
    assert "f'(0) -> 0." in out and "f(X) -> 1 <= fails(f'(X)) == true." in out


def test_no_default_transform_is_rejected_at_evaluation(capsys):
    code, _, err = run(capsys, "eval", "--no-default-transform", CORPUS / "defaults.crwlf", "f(0)")
    assert code == 1 and "untransformed default" in err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", CORPUS / "nim.crwlf", "winMove([s(s(z)),s(z)])")
    assert code == 0 and "[s(z),s(z)]" in out
    code, out, _ = run(capsys, "eval", CORPUS / "safe.crwlf", "safe(c)")
    assert out.startswith("safe(c) ⊲ {true}")
    code, out, _ = run(capsys, "eval", CORPUS / "safe.crwlf", "safe(a)")
    assert out.startswith("safe(a) ⊲ {false}")


def test_eval_trace_and_budget(capsys):
    code, out, _ = run(capsys, "eval", "--unfold", "2", "--depth", "1", "--trace", COIN, "h")
    assert "h ⊲ {s(⊥)}" in out and "budgetExhausted=true" in out and "[CRWLF 4]" in out


@pytest.mark.parametrize(
    "constraint, verdict, code",
    [("coin == z", "Proved", 0), ("z !== s(z)", "Proved", 0), ("X == z", "Unknown", 2), ("z == s(z)", "Refuted", 1)],
)
def test_prove(capsys, constraint, verdict, code):
    got, out, _ = run(capsys, "prove", COIN, constraint)
    assert got == code and out.startswith(verdict)


def test_fails(capsys):
    assert run(capsys, "fails", COIN, "g(coin)")[0] == 0
    assert run(capsys, "fails", COIN, "coin")[0] == 1
    code, out, _ = run(capsys, "fails", COIN, "f(z)")
    assert code == 2 and "budget exhausted" in out


def test_denote(capsys):
    assert run(capsys, "denote", COIN, "coin")[1].strip() == "[[coin]] = {⊥, s(⊥), z, s(z)}"
    assert run(capsys, "denote", COIN, "z")[1].strip() == "[[z]] = {⊥, z}"
    assert run(capsys, "denote", COIN, "f(s(z))")[1].strip() == "[[f(s(z))]] = {⊥}"
    assert run(capsys, "denote", CORPUS / "lists.crwlf", "member(z,[z])")[0] == 1


def test_errors(capsys, tmp_path):
    code, _, err = run(capsys, "eval", COIN, "nosuch(z)")
    assert code == 1 and "unknown symbol nosuch" in err
    code, _, err = run(capsys, "eval", tmp_path / "missing.crwlf", "z")
    assert code == 1
    with pytest.raises(SystemExit):
        main(["eval", "--unfold", "-1", str(COIN), "z"])


def test_eval_json_round_trip(capsys):
    p = corpus("coin")
    code, out, _ = run(capsys, "eval", "--json", "--trace", COIN, "mb(coin,[s(h)])")
    data = json.loads(out)
    assert data["sas"] == ["F"] and data["derivation"]["rule"] == 4
    goal, report = report_from_dict(data, p)
    from crwlf.serialize import report_to_dict

    assert report_to_dict(goal, report) == data


def test_prove_json_round_trip(capsys):
    p = corpus("coin")
    code, out, _ = run(capsys, "prove", "--json", "--trace", COIN, "coin /= z")
    data = json.loads(out)
    assert data["verdict"] == "Proved" and data["derivation"]["rule"] == 10
    from crwlf.serialize import verdict_to_dict

    assert verdict_to_dict(verdict_from_dict(data, p)) == data


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "crwlf", "eval", str(COIN), "coin"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.startswith("coin ⊲ {z, s(z)}")
