"""JSON shapes for reports, verdicts and derivations (documented in docs/)."""

from __future__ import annotations

from .derivation import from_dict as derivation_from_dict
from .engine import ConstraintVerdict, SasReport, Verdict
from .parser import parse_term
from .program import Kind, Program
from .terms import pretty, sorted_terms


def report_to_dict(goal, r: SasReport, trace: bool = True) -> dict:
    return {
        "goal": pretty(goal),
        "sas": sorted_terms(r.sas),
        "budgetExhausted": r.budget_exhausted,
        "suspensions": r.suspensions,
        "derivation": r.derivation.to_dict() if trace and r.derivation is not None else None,
    }


def report_from_dict(data: dict, program: Program) -> tuple:
    sig = program.signature
    d = data.get("derivation")
    report = SasReport(
        frozenset(parse_term(t, sig) for t in data["sas"]),
        data["budgetExhausted"],
        data["suspensions"],
        derivation_from_dict(d, program) if d is not None else None,
    )
    return parse_term(data["goal"], sig), report


def verdict_to_dict(v: ConstraintVerdict, trace: bool = True) -> dict:
    return {
        "constraint": f"{pretty(v.lhs)} {v.kind.value} {pretty(v.rhs)}",
        "kind": v.kind.value,
        "verdict": v.verdict.value,
        "left": report_to_dict(v.lhs, v.left, trace),
        "right": report_to_dict(v.rhs, v.right, trace),
        "derivation": v.derivation.to_dict() if trace and v.derivation is not None else None,
    }


def verdict_from_dict(data: dict, program: Program) -> ConstraintVerdict:
    lhs, left = report_from_dict(data["left"], program)
    rhs, right = report_from_dict(data["right"], program)
    kind = Kind(data["kind"])
    d = data.get("derivation")
    return ConstraintVerdict(
        Verdict(data["verdict"]),
        lhs,
        kind,
        rhs,
        left,
        right,
        derivation_from_dict(d, program) if d is not None else None,
    )
