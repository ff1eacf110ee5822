"""Command-line front end.

Exit codes: 0 success (Proved, True), 1 diagnostics (Refuted, False),
2 Unknown, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import acceptance
from .crwl import CrwlBudget, CrwlPreconditionError, crwl_denotation
from .engine import CrwlfBudget, Engine, FailsVerdict, Verdict, check_program, eval_fails_goal
from .parser import load_program, parse_constraint, parse_term
from .program import ProgramError
from .serialize import report_to_dict, verdict_to_dict
from .terms import pretty, pretty_set, sorted_terms

OK, NEGATIVE, UNKNOWN, INTERNAL = 0, 1, 2, 3


def _budget(args) -> CrwlfBudget:
    return CrwlfBudget(args.unfold, args.depth)


def _load(args):
    return load_program(args.program, transform=not args.no_default_transform)


def _flags(r) -> str:
    return f"budgetExhausted={str(r.budget_exhausted).lower()} suspensions={str(r.suspensions).lower()}"


def _emit(args, data: dict, text: str):
    print(json.dumps(data, ensure_ascii=False, indent=2) if args.json else text)


def cmd_check(args) -> int:
    p = _load(args)
    if not args.no_default_transform:
        check_program(p)
    if args.json:
        print(json.dumps({"rules": [str(r) for r in p.rules], "diagnostics": []}, ensure_ascii=False, indent=2))
    else:
        print(p.pretty(), end="")
    return OK


def cmd_eval(args) -> int:
    p = _load(args)
    goal = parse_term(args.goal, p.signature)
    r = Engine(p, _budget(args)).eval(goal)
    text = f"{pretty(goal)} ⊲ {pretty_set(r.sas)}\n{_flags(r)}"
    if args.trace:
        text += "\n" + r.derivation.render()
    _emit(args, report_to_dict(goal, r, args.trace), text)
    return OK


def cmd_prove(args) -> int:
    p = _load(args)
    lhs, kind, rhs = parse_constraint(args.constraint, p.signature)
    v = Engine(p, _budget(args)).prove(lhs, kind, rhs)
    text = (
        f"{v.verdict.value}: {pretty(lhs)} {kind.value} {pretty(rhs)}\n"
        f"  {pretty(lhs)} ⊲ {pretty_set(v.left.sas)} ({_flags(v.left)})\n"
        f"  {pretty(rhs)} ⊲ {pretty_set(v.right.sas)} ({_flags(v.right)})"
    )
    if args.trace and v.derivation is not None:
        text += "\n" + v.derivation.render()
    _emit(args, verdict_to_dict(v, args.trace), text)
    return {Verdict.PROVED: OK, Verdict.REFUTED: NEGATIVE, Verdict.UNKNOWN: UNKNOWN}[v.verdict]


def cmd_fails(args) -> int:
    p = _load(args)
    goal = parse_term(args.goal, p.signature)
    ans = eval_fails_goal(p, goal, _budget(args))
    r, verdict, cause = ans.report, ans.verdict, ans.cause
    data = {"goal": pretty(goal), "fails": verdict.value, "cause": cause, "report": report_to_dict(goal, r, args.trace)}
    text = f"fails({pretty(goal)}) = {verdict.value}" + (f" ({cause})" if cause else "")
    text += f"\n  {pretty(goal)} ⊲ {pretty_set(r.sas)} ({_flags(r)})"
    if args.trace:
        text += "\n" + r.derivation.render()
    _emit(args, data, text)
    return {FailsVerdict.TRUE: OK, FailsVerdict.FALSE: NEGATIVE, FailsVerdict.UNKNOWN: UNKNOWN}[verdict]


def cmd_denote(args) -> int:
    p = _load(args)
    goal = parse_term(args.goal, p.signature)
    den = crwl_denotation(p, goal, CrwlBudget(args.unfold, args.depth))
    _emit(args, {"goal": pretty(goal), "denotation": sorted_terms(den)}, f"[[{pretty(goal)}]] = {pretty_set(den)}")
    return OK


def cmd_corpus(args) -> int:
    if args.corpus_dir:
        acceptance.set_corpus(args.corpus_dir)
    results = acceptance.run_all(echo=None if args.json else print)
    passed = sum(out.ok for _, out, _ in results)
    if args.json:
        rows = [{"id": c.cid, "title": c.title, "ok": out.ok, "detail": out.detail, "seconds": round(dt, 3)} for c, out, dt in results]
        print(json.dumps({"criteria": rows, "passed": passed, "total": len(results)}, ensure_ascii=False, indent=2))
    else:
        print(f"{passed}/{len(results)} criteria passed")
    return OK if passed == len(results) else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crwlf", description="SAS evaluation, constructive failure and CRWL denotations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--unfold", type=_count, default=64, help="rule-unfolding budget (default 64)")
    budget.add_argument("--depth", type=_count, default=32, help="depth cap for computed values (default 32)")
    budget.add_argument("--trace", action="store_true", help="print the derivation tree")
    prog = argparse.ArgumentParser(add_help=False)
    prog.add_argument("program", type=Path)
    prog.add_argument("--no-default-transform", action="store_true", help="keep default rules as written")

    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common, prog], help="parse, validate and transform a program").set_defaults(fn=cmd_check)
    p = sub.add_parser("eval", parents=[common, prog, budget], help="compute a SAS for a goal")
    p.add_argument("goal")
    p.set_defaults(fn=cmd_eval)
    p = sub.add_parser("prove", parents=[common, prog, budget], help="prove or refute 'lhs OP rhs'")
    p.add_argument("constraint")
    p.set_defaults(fn=cmd_prove)
    p = sub.add_parser("fails", parents=[common, prog, budget], help="decide fails(goal)")
    p.add_argument("goal")
    p.set_defaults(fn=cmd_fails)
    p = sub.add_parser("denote", parents=[common, prog, budget], help="CRWL denotation of a goal")
    p.add_argument("goal")
    p.set_defaults(fn=cmd_denote)
    p = sub.add_parser("corpus", parents=[common], help="run the acceptance checks over the corpus")
    p.add_argument("corpus_dir", nargs="?", type=Path)
    p.set_defaults(fn=cmd_corpus)
    return ap


def _count(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ProgramError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return NEGATIVE
    except (OSError, CrwlPreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
