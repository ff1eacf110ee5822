"""Decidable relations on partial c-terms.

``rel_down`` is strict equality, ``rel_up`` a constructor clash, and the two
negative relations are their failure counterparts, which also read ``F``.
"""

from __future__ import annotations

from .terms import FAIL, Con, Term, Var, contains_fail, is_total


def rel_down(t: Term, u: Term) -> bool:
    return t == u and is_total(t)


def rel_up(t: Term, u: Term) -> bool:
    # F and bottom are not constructors, so they never clash
    if isinstance(t, Con) and isinstance(u, Con):
        if t.name != u.name or len(t.args) != len(u.args):
            return True
        return any(map(rel_up, t.args, u.args))
    return False


def rel_not_down(t: Term, u: Term) -> bool:
    return contains_fail(t) or contains_fail(u) or rel_up(t, u)


def rel_not_up(t: Term, u: Term) -> bool:
    if t is FAIL or u is FAIL:
        return True
    if isinstance(t, Var):
        return t == u
    if isinstance(t, Con) and isinstance(u, Con):
        return t.name == u.name and len(t.args) == len(u.args) and all(map(rel_not_up, t.args, u.args))
    return False


def clash_position(t: Term, u: Term, with_fail: bool = False, pos: tuple = ()) -> tuple | None:
    """First position where ``t`` and ``u`` carry different constructors.

    With ``with_fail`` the symbol ``F`` takes part as well, so ``F`` against a
    constructor (but not against ``⊥`` or a variable) counts as a clash.
    """
    if with_fail and (t is FAIL) != (u is FAIL):
        other = u if t is FAIL else t
        return pos if isinstance(other, Con) else None
    if isinstance(t, Con) and isinstance(u, Con):
        if t.name != u.name or len(t.args) != len(u.args):
            return pos
        for i, (a, b) in enumerate(zip(t.args, u.args)):
            p = clash_position(a, b, with_fail, pos + (i,))
            if p is not None:
                return p
    return None


RELATIONS = {
    "down": rel_down,
    "up": rel_up,
    "not_down": rel_not_down,
    "not_up": rel_not_up,
}
