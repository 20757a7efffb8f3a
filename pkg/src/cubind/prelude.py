"""Built-in schemas the rest of the kernel relies on.

Natural numbers are needed by the ``natrec`` extension and by numeral
literals; booleans, the empty type and the circle are small enough to be
useful everywhere (the command-line tool loads them when no file is given).
"""

from __future__ import annotations

from .syntax import (
    ArgDecl,
    BFace,
    BIntro,
    Constraint,
    Constructor,
    DimVar,
    Ind,
    Intro,
    Schema,
    SelfAt,
    Tele,
    Term,
)

NAT_SCHEMA = Schema(
    (
        ("zero", Constructor()),
        ("suc", Constructor(args=(ArgDecl("n", SelfAt(())),))),
    )
)
NAT = Ind(Tele(), NAT_SCHEMA, ())

BOOL_SCHEMA = Schema((("tt", Constructor()), ("ff", Constructor())))
BOOL = Ind(Tele(), BOOL_SCHEMA, ())

EMPTY_SCHEMA = Schema(())
EMPTY = Ind(Tele(), EMPTY_SCHEMA, ())

CIRCLE_SCHEMA = Schema(
    (
        ("base", Constructor()),
        (
            "lp",
            Constructor(
                dims=("x",),
                boundary=(
                    BFace(Constraint(DimVar("x"), 0), BIntro("base")),
                    BFace(Constraint(DimVar("x"), 1), BIntro("base")),
                ),
            ),
        ),
    )
)
CIRCLE = Ind(Tele(), CIRCLE_SCHEMA, ())


def zero() -> Intro:
    return Intro(NAT_SCHEMA, "zero")


def suc(n: Term) -> Intro:
    return Intro(NAT_SCHEMA, "suc", args=(n,))


def numeral(k: int) -> Term:
    """The closed numeral ``suc^k(zero)``."""
    if k < 0:
        raise ValueError("numerals are non-negative")
    t: Term = zero()
    for _ in range(k):
        t = suc(t)
    return t


def tt() -> Intro:
    return Intro(BOOL_SCHEMA, "tt")


def ff() -> Intro:
    return Intro(BOOL_SCHEMA, "ff")


def is_nat_schema(schema: Schema) -> bool:
    return schema == NAT_SCHEMA


def nat_intro_kind(t: Term) -> str | None:
    """``"zero"`` or ``"suc"`` when ``t`` is a natural-number constructor value."""
    if isinstance(t, Intro) and not t.dims and not t.params:
        if t.label == "zero" and not t.args:
            return "zero"
        if t.label == "suc" and len(t.args) == 1:
            return "suc"
    return None


def read_numeral(t: Term) -> int | None:
    """Read a fully evaluated numeral back to an int, or ``None``."""
    k = 0
    while True:
        if not isinstance(t, Intro) or not is_nat_schema(t.schema):
            return None
        kind = nat_intro_kind(t)
        if kind == "zero":
            return k
        if kind != "suc":
            return None
        k += 1
        t = t.args[0]
