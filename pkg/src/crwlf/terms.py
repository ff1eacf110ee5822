"""Terms over a constructor-based signature, extended with bottom and fail.

Terms are immutable and hashable; structural equality is syntactic equality.
Variables compare by name (there are no binders, so no renaming happens).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class ArityError(ValueError):
    pass


class SignatureError(ValueError):
    pass


RESERVED_FAILS = "fails"
TRUE = "true"
FALSE = "false"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Con:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Fun:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Fails:
    arg: "Term"

    def __str__(self) -> str:
        return pretty(self)


class _Bottom:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BOT"

    def __str__(self) -> str:
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


class _Fail:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FAIL"

    def __str__(self) -> str:
        return "F"

    def __reduce__(self):
        return (_Fail, ())


BOT = _Bottom()
FAIL = _Fail()

Term = Union[Var, Con, Fun, Fails, _Bottom, _Fail]
Substitution = Mapping[str, Term]

TRUE_TERM = Con(TRUE)
FALSE_TERM = Con(FALSE)


@dataclass(frozen=True)
class Signature:
    """Constructor and function symbols with their arities.

    ``true``/``false`` are always present as nullary constructors and
    ``fails`` is a built-in that never appears in ``functions``.
    """

    constructors: Mapping[str, int] = field(default_factory=dict)
    functions: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        cons = dict(self.constructors)
        cons.setdefault(TRUE, 0)
        cons.setdefault(FALSE, 0)
        object.__setattr__(self, "constructors", cons)
        object.__setattr__(self, "functions", dict(self.functions))
        clash = set(cons) & set(self.functions)
        if clash:
            raise SignatureError(f"symbols declared both as constructor and function: {sorted(clash)}")
        if RESERVED_FAILS in cons or RESERVED_FAILS in self.functions:
            raise SignatureError("'fails' is a reserved built-in")
        if cons[TRUE] != 0 or cons[FALSE] != 0:
            raise SignatureError("true/false must be nullary constructors")

    def __hash__(self):
        return hash((tuple(sorted(self.constructors.items())), tuple(sorted(self.functions.items()))))

    def with_functions(self, extra: Mapping[str, int]) -> "Signature":
        return Signature(self.constructors, {**self.functions, **extra})

    def con(self, name: str, *args: Term) -> Con:
        if name not in self.constructors:
            raise SignatureError(f"unknown constructor {name!r}")
        if self.constructors[name] != len(args):
            raise ArityError(f"{name} expects {self.constructors[name]} arguments, got {len(args)}")
        return Con(name, tuple(args))

    def fun(self, name: str, *args: Term) -> Fun:
        if name not in self.functions:
            raise SignatureError(f"unknown function {name!r}")
        if self.functions[name] != len(args):
            raise ArityError(f"{name} expects {self.functions[name]} arguments, got {len(args)}")
        return Fun(name, tuple(args))

    def check(self, e: Term) -> None:
        """Raise if ``e`` uses an undeclared symbol or a wrong arity."""
        for sub in subterms(e):
            match sub:
                case Con(name, args):
                    if name not in self.constructors:
                        raise SignatureError(f"unknown constructor {name!r}")
                    if self.constructors[name] != len(args):
                        raise ArityError(f"{name} expects {self.constructors[name]} arguments, got {len(args)}")
                case Fun(name, args):
                    if name not in self.functions:
                        raise SignatureError(f"unknown function {name!r}")
                    if self.functions[name] != len(args):
                        raise ArityError(f"{name} expects {self.functions[name]} arguments, got {len(args)}")


def subterms(e: Term) -> Iterator[Term]:
    stack = [e]
    while stack:
        t = stack.pop()
        yield t
        match t:
            case Con(_, args) | Fun(_, args):
                stack.extend(reversed(args))
            case Fails(arg):
                stack.append(arg)


def variables(e: Term) -> list[str]:
    """Variable names of ``e`` in left-to-right order, with repetitions."""
    out = []

    def walk(t):
        match t:
            case Var(name):
                out.append(name)
            case Con(_, args) | Fun(_, args):
                for a in args:
                    walk(a)
            case Fails(arg):
                walk(arg)

    walk(e)
    return out


def is_cterm(e: Term) -> bool:
    return not any(isinstance(s, (Fun, Fails)) for s in subterms(e))


def is_total(e: Term) -> bool:
    if e is BOT or e is FAIL:
        return False
    if isinstance(e, (Con, Fun)):
        return all(map(is_total, e.args))
    if isinstance(e, Fails):
        return is_total(e.arg)
    return True


def is_ground(e: Term) -> bool:
    return not any(isinstance(s, Var) for s in subterms(e))


def contains_fail(e: Term) -> bool:
    if e is FAIL:
        return True
    if isinstance(e, (Con, Fun)):
        return any(map(contains_fail, e.args))
    if isinstance(e, Fails):
        return contains_fail(e.arg)
    return False


def contains_bottom(e: Term) -> bool:
    return any(s is BOT for s in subterms(e))


def depth(e: Term) -> int:
    """Tree depth: leaves have depth 0."""
    match e:
        case Con(_, args) | Fun(_, args) if args:
            return 1 + max(depth(a) for a in args)
        case Fails(arg):
            return 1 + depth(arg)
        case _:
            return 0


def info_depth(e: Term) -> int:
    """Number of defined layers: ``⊥`` counts 0, any other leaf counts 1.

    Budgets cap this measure, so a cap of 1 admits ``z`` and ``s(⊥)`` but
    not ``s(z)``.
    """
    match e:
        case _Bottom():
            return 0
        case Con(_, args) | Fun(_, args) if args:
            return 1 + max(info_depth(a) for a in args)
        case Fails(arg):
            return 1 + info_depth(arg)
        case _:
            return 1


def truncate(t: Term, limit: int) -> Term:
    """Replace everything below ``limit`` defined layers by ``⊥``."""
    if limit <= 0:
        return BOT
    match t:
        case Con(name, args) if args:
            return Con(name, tuple(truncate(a, limit - 1) for a in args))
        case _:
            return t


def apply_subst(e: Term, theta: Substitution) -> Term:
    match e:
        case Var(name):
            return theta.get(name, e)
        case Con(name, args):
            return Con(name, tuple(apply_subst(a, theta) for a in args)) if args else e
        case Fun(name, args):
            return Fun(name, tuple(apply_subst(a, theta) for a in args)) if args else e
        case Fails(arg):
            return Fails(apply_subst(arg, theta))
        case _:
            return e


def is_total_subst(theta: Substitution) -> bool:
    return all(is_cterm(t) and is_total(t) for t in theta.values())


def info_leq(t: Term, u: Term) -> bool:
    """The approximation ordering: ``⊥`` is least, ``F`` and total terms are maximal."""
    if t is BOT:
        return True
    match t, u:
        case _Fail(), _Fail():
            return True
        case Var(a), Var(b):
            return a == b
        case (Con(f, xs), Con(g, ys)) | (Fun(f, xs), Fun(g, ys)):
            return f == g and len(xs) == len(ys) and all(map(info_leq, xs, ys))
        case Fails(x), Fails(y):
            return info_leq(x, y)
    return False


def consistent(t: Term, u: Term) -> bool:
    """Whether ``t`` and ``u`` have a common upper bound under ``info_leq``."""
    if t is BOT or u is BOT:
        return True
    match t, u:
        case _Fail(), _Fail():
            return True
        case Var(a), Var(b):
            return a == b
        case (Con(f, xs), Con(g, ys)) | (Fun(f, xs), Fun(g, ys)):
            return f == g and len(xs) == len(ys) and all(map(consistent, xs, ys))
        case Fails(x), Fails(y):
            return consistent(x, y)
    return False


def consistent_sets(cs: Iterable[Term], ds: Iterable[Term]) -> bool:
    cs, ds = list(cs), list(ds)
    return all(any(consistent(c, d) for d in ds) for c in cs) and all(
        any(consistent(c, d) for c in cs) for d in ds
    )


def hat(e: Term) -> Term:
    """Replace every ``F`` by ``⊥``."""
    match e:
        case _Fail():
            return BOT
        case Con(name, args) if args:
            return Con(name, tuple(hat(a) for a in args))
        case Fun(name, args) if args:
            return Fun(name, tuple(hat(a) for a in args))
        case Fails(arg):
            return Fails(hat(arg))
        case _:
            return e


def enumerate_cterms(constructors: Mapping[str, int], max_depth: int, vars: Iterable[str] = ()) -> frozenset:
    """All c-terms over ``constructors`` plus ``⊥``, ``F`` and ``vars`` with tree depth <= ``max_depth``."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if isinstance(constructors, Signature):
        constructors = constructors.constructors
    leaves = [BOT, FAIL] + [Var(v) for v in vars]
    leaves += [Con(c) for c, n in sorted(constructors.items()) if n == 0]
    level = set(leaves)
    for _ in range(max_depth):
        nxt = set(leaves)
        pool = sorted(level, key=pretty)
        for c, n in sorted(constructors.items()):
            if n == 0:
                continue
            for args in itertools.product(pool, repeat=n):
                nxt.add(Con(c, args))
        level = nxt
    return frozenset(level)


def _list_items(t: Term):
    items = []
    while isinstance(t, Con) and t.name == "cons" and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


def pretty(e: Term) -> str:
    match e:
        case Var(name):
            return name
        case _Bottom():
            return "⊥"
        case _Fail():
            return "F"
        case Fails(arg):
            return f"fails({pretty(arg)})"
        case Con("nil", ()):
            return "[]"
        case Con("cons", (_, _)):
            items, tail = _list_items(e)
            body = ",".join(pretty(i) for i in items)
            if tail == Con("nil"):
                return f"[{body}]"
            return f"[{body}|{pretty(tail)}]"
        case Con(name, args) | Fun(name, args):
            if not args:
                return name
            return f"{name}({','.join(pretty(a) for a in args)})"
    raise TypeError(f"not a term: {e!r}")


def pretty_set(ts: Iterable[Term]) -> str:
    return "{" + ", ".join(sorted_terms(ts)) + "}"


def term_key(t: Term):
    return (info_depth(t), pretty(t))


def sorted_terms(ts: Iterable[Term]) -> list[str]:
    return [pretty(t) for t in sorted(ts, key=term_key)]


def pretty_subst(theta: Substitution) -> str:
    return "{" + ", ".join(f"{k}↦{pretty(v)}" for k, v in sorted(theta.items())) + "}"
