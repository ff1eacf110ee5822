"""Sufficient approximation sets, constructive failure and a CRWL reference interpreter."""

from .crwl import (
    CrwlBudget,
    CrwlPreconditionError,
    NOT_PROVED,
    NotProvedWithinBudget,
    Proved,
    crwl_denotation,
    crwl_derives,
    crwl_prove_div,
    crwl_prove_join,
)
from .derivation import Derivation, check_derivation, from_json
from .engine import (
    ConstraintVerdict,
    CrwlfBudget,
    Engine,
    FailsVerdict,
    SasReport,
    Verdict,
    eval_fails_goal,
    eval_sas,
    prove_constraint,
    rule_contribution,
)
from .parser import load_program, parse_constraint, parse_program, parse_term
from .program import Kind, Program, ProgramError, match_call, transform_defaults, validate
from .terms import BOT, FAIL, Con, Fails, Fun, Signature, Var

__all__ = [name for name in dir() if not name.startswith("_")]
