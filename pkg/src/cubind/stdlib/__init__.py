"""The example inductive types as checked data, with derived eliminators.

Each family (W-types, W-quotients, truncation, hub-and-spokes, localization,
identity types) is a Python function from its parameters to an index
telescope and a schema.  The catalog instantiates them at small closed types;
the ``.cit`` files next to this module spell the same instances in surface
syntax, and the test-suite checks that both routes produce the same schema.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Optional, Sequence

from ..elaborate import Env, load_source
from ..prelude import BOOL, CIRCLE_SCHEMA, EMPTY, NAT, NAT_SCHEMA
from ..syntax import (
    ArgDecl,
    ArgPi,
    BApp,
    BFace,
    BFhcom,
    BIntro,
    BLam,
    BNatRec,
    Binding,
    BVar,
    Constraint,
    Constructor,
    DimVar,
    Elim,
    ElimCase,
    ElimList,
    Face,
    Ind,
    Intro,
    Schema,
    SelfAt,
    Tele,
    Term,
    Var,
    instantiate,
    shift,
)

# ---------------------------------------------------------------------------
# Small builders


def _x(name: str) -> DimVar:
    return DimVar(name)


def _face(x: str, e: int, body) -> BFace:
    return BFace(Constraint(DimVar(x), e), body)


def _tele(*entries: tuple[str, Term]) -> Tele:
    return Tele(tuple(Binding(n, t) for n, t in entries))


def _self(*indices: Term) -> SelfAt:
    return SelfAt(tuple(indices))


def _suc(t: Term) -> Intro:
    return Intro(NAT_SCHEMA, "suc", (), (), (t,))


# ---------------------------------------------------------------------------
# Families


def w_type(a: Term, b: Term) -> tuple[Tele, Schema]:
    """Well-founded trees: ``wsup(a : A; g : B a -> self)``.  ``b`` is under one binder."""
    wsup = Constructor(params=_tele(("a", a)), args=(ArgDecl("g", ArgPi("b", b, _self())),))
    return Tele(), Schema((("wsup", wsup),))


def w_quotient(a: Term, b: Term, c: Term, f0: Term, f1: Term) -> tuple[Tele, Schema]:
    """Trees with a path from ``wsup(F0 c, g0)`` to ``wsup(F1 c, g1)``.

    ``b`` is under one binder (the label), ``f0`` and ``f1`` under one (the
    cell parameter).
    """
    wqsup = Constructor(params=_tele(("a", a)), args=(ArgDecl("g", ArgPi("b", b, _self())),))
    wqcell = Constructor(
        dims=("x",),
        params=_tele(("c", c)),
        args=(
            ArgDecl("g0", ArgPi("b", instantiate(shift(b, 1, 1), (f0,)), _self())),
            ArgDecl("g1", ArgPi("b", instantiate(shift(b, 1, 1), (f1,)), _self())),
        ),
        boundary=(
            _face("x", 0, BIntro("wqsup", (), (f0,), (BVar(0, "g0"),))),
            _face("x", 1, BIntro("wqsup", (), (f1,), (BVar(1, "g1"),))),
        ),
    )
    return Tele(), Schema((("wqsup", wqsup), ("wqcell", wqcell)))


def truncation(a: Term) -> tuple[Tele, Schema]:
    """Propositional truncation: points and a line between any two elements."""
    trpt = Constructor(params=_tele(("a", a)))
    trglue = Constructor(
        dims=("x",),
        args=(ArgDecl("t0", _self()), ArgDecl("t1", _self())),
        boundary=(_face("x", 0, BVar(0, "t0")), _face("x", 1, BVar(1, "t1"))),
    )
    return Tele(), Schema((("trpt", trpt), ("trglue", trglue)))


def hub_spokes(a: Term, c: Term) -> tuple[Tele, Schema]:
    """Hub-and-spokes nullification of ``a`` at ``c``: every map from ``c`` is constant."""
    hpt = Constructor(params=_tele(("a", a)))
    hub = Constructor(args=(ArgDecl("f", ArgPi("c", c, _self())),))
    spoke = Constructor(
        dims=("x",),
        params=_tele(("s", c)),
        args=(ArgDecl("f", ArgPi("c", shift(c, 1), _self())),),
        boundary=(
            _face("x", 0, BIntro("hub", (), (), (BVar(0, "f"),))),
            _face("x", 1, BApp(BVar(0, "f"), Var(0, "s"))),
        ),
    )
    return Tele(), Schema((("hpt", hpt), ("hub", hub), ("spoke", spoke)))


def localization(a: Term, i: Term, s: Term, t: Term, f: Term) -> tuple[Tele, Schema]:
    """Localization of ``a`` at the family of maps ``F_i : S_i -> T_i``.

    ``s`` and ``t`` are under one binder (the index ``i``); ``f`` is under two
    (``i`` and the argument).
    """
    inl = Constructor(params=_tele(("a", a)))

    def ext_like() -> Constructor:
        return Constructor(
            params=_tele(("i", i), ("t", t)),
            args=(ArgDecl("g", ArgPi("s", shift(s, 1), _self())),),
        )

    rtr = Constructor(
        dims=("x",),
        params=_tele(("i", i), ("s", s)),
        args=(ArgDecl("g", ArgPi("s", shift(s, 1), _self())),),
        boundary=(
            _face("x", 0, BApp(BVar(0, "g"), Var(0, "s"))),
            _face("x", 1, BIntro("ext", (), (Var(1, "i"), f), (BVar(0, "g"),))),
        ),
    )
    rtr2 = Constructor(
        dims=("x",),
        params=_tele(("i", i), ("t", t)),
        args=(ArgDecl("h", ArgPi("t", shift(t, 1), _self())),),
        boundary=(
            _face("x", 0, BApp(BVar(0, "h"), Var(0, "t"))),
            _face(
                "x",
                1,
                BIntro("ext'", (), (Var(1, "i"), Var(0, "t")), (BLam("s", BApp(BVar(0, "h"), shift(f, 1, 1))),)),
            ),
        ),
    )
    return Tele(), Schema(
        (("inl", inl), ("ext", ext_like()), ("ext'", ext_like()), ("rtr", rtr), ("rtr'", rtr2))
    )


def identity(a: Term) -> tuple[Tele, Schema]:
    """The identity type as an indexed family with a single ``refl``."""
    refl = Constructor(params=_tele(("u", a)), indices=(Var(0, "u"), Var(0, "u")))
    return _tele(("u", a), ("v", shift(a, 1))), Schema((("refl", refl),))


# ---------------------------------------------------------------------------
# Fixed higher inductive types


def _torus_schema(globular: bool) -> Schema:
    base = BIntro("base")
    lpa = Constructor(dims=("x",), boundary=(_face("x", 0, base), _face("x", 1, base)))
    lpb = Constructor(dims=("y",), boundary=(_face("y", 0, base), _face("y", 1, base)))
    if globular:
        x = _x("x")

        def side(first: str, second: str) -> BFhcom:
            return BFhcom(
                (),
                0,
                1,
                BIntro(first, (x,)),
                (
                    Face(Constraint(x, 0), "z", base),
                    Face(Constraint(x, 1), "z", BIntro(second, (_x("z"),))),
                ),
            )

        surf_faces = (
            _face("x", 0, base),
            _face("x", 1, base),
            _face("y", 0, side("lpa", "lpb")),
            _face("y", 1, side("lpb", "lpa")),
        )
    else:
        surf_faces = (
            _face("x", 0, BIntro("lpb", (_x("y"),))),
            _face("x", 1, BIntro("lpb", (_x("y"),))),
            _face("y", 0, BIntro("lpa", (_x("x"),))),
            _face("y", 1, BIntro("lpa", (_x("x"),))),
        )
    surf = Constructor(dims=("x", "y"), boundary=surf_faces)
    return Schema((("base", Constructor()), ("lpa", lpa), ("lpb", lpb), ("surf", surf)))


TORUS_SCHEMA = _torus_schema(False)
GTORUS_SCHEMA = _torus_schema(True)

SPHERE2_SCHEMA = Schema(
    (
        ("base2", Constructor()),
        (
            "surf2",
            Constructor(
                dims=("x", "y"),
                boundary=tuple(_face(d, e, BIntro("base2")) for d in ("x", "y") for e in (0, 1)),
            ),
        ),
    )
)

# A minimal use of recursion in a boundary: ``scell(0, n)`` unfolds ``natrec``.
STRICT_SCHEMA = Schema(
    (
        ("spt", Constructor(params=_tele(("n", NAT)))),
        (
            "scell",
            Constructor(
                dims=("x",),
                params=_tele(("n", NAT)),
                boundary=(
                    _face(
                        "x",
                        0,
                        BNatRec(Var(0, "n"), BIntro("spt", (), (Intro(NAT_SCHEMA, "zero"),)), ("a", "p"), BVar(0, "p")),
                    ),
                    _face("x", 1, BIntro("spt", (), (Var(0, "n"),))),
                ),
            ),
        ),
    )
)


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class NamedDecl:
    """A catalog entry: the type, where its surface form lives, and smoke programs.

    ``smoke`` lists ``(expression, expected)`` pairs in surface syntax, read in
    the environment of ``file``.  The identity eliminator of a type whose
    boundary composes along a constant line is coherent only when coercion
    along constant lines of closed types is trivial; such entries set
    ``identity_elim_needs_opt_closed``.
    """

    name: str
    tele: Tele
    schema: Schema
    file: str
    extensions: frozenset = frozenset()
    smoke: tuple[tuple[str, str], ...] = ()
    identity_elim_needs_opt_closed: bool = False

    @property
    def type(self) -> Ind:
        if self.tele.entries:
            raise ValueError(f"{self.name} is indexed; supply indices")
        return Ind(self.tele, self.schema, ())

    def at(self, *indices: Term) -> Ind:
        return Ind(self.tele, self.schema, tuple(indices))


def _decl(name, family, file, **kw) -> NamedDecl:
    tele, schema = family
    return NamedDecl(name, tele, schema, file, **kw)


CATALOG: dict[str, NamedDecl] = {
    d.name: d
    for d in (
        _decl(
            "nat",
            (Tele(), NAT_SCHEMA),
            "nat.cit",
            smoke=(("add 2 3", "5"), ("mul 2 3", "6"), ("pred 0", "0")),
        ),
        _decl("bool", (Tele(), BOOL.schema), "bool.cit", smoke=(("not tt", "ff"), ("and tt ff", "ff"))),
        _decl(
            "circle",
            (Tele(), CIRCLE_SCHEMA),
            "circle.cit",
            smoke=(("lp(0)", "base"), ("lp(1)", "base"), ("winding_const lp(0)", "0")),
        ),
        _decl("torus", (Tele(), TORUS_SCHEMA), "torus.cit", smoke=(("surf(0, 1)", "base"),)),
        _decl(
            "gtorus",
            (Tele(), GTORUS_SCHEMA),
            "torus_globular.cit",
            smoke=(("surf(0, 1)", "base"),),
            identity_elim_needs_opt_closed=True,
        ),
        _decl("sphere2", (Tele(), SPHERE2_SCHEMA), "sphere2.cit", smoke=(("surf2(1, 0)", "base2"),)),
        _decl("wnat", w_type(NAT, EMPTY), "w.cit", smoke=(("wlabel wsup(3, \\b. elim [h. wnat] b { })", "3"),)),
        _decl(
            "wq",
            w_quotient(NAT, EMPTY, NAT, Var(0, "c"), _suc(Var(0, "c"))),
            "wq.cit",
            smoke=(("wq_trivial wqcell(0, 2, wq_empty, wq_empty)", "0"),),
        ),
        _decl(
            "trunc",
            truncation(NAT),
            "trunc.cit",
            smoke=(("trglue(0, trpt(1), trpt(2))", "trpt(1)"), ("trunc_map trglue(1, trpt(1), trpt(2))", "trpt(3)")),
        ),
        _decl(
            "hs",
            hub_spokes(NAT, Ind(Tele(), CIRCLE_SCHEMA, ())),
            "hubspokes.cit",
            smoke=(("spoke(1, base, \\c. hpt(4))", "hpt(4)"),),
        ),
        _decl(
            "loc",
            localization(NAT, BOOL, NAT, NAT, _suc(Var(0, "s"))),
            "loc.cit",
            smoke=(("loc_map rtr(0, tt, 2, \\n. inl(n))", "inl(3)"), ("rtr(1, tt, 2, \\n. inl(n))", "ext(tt, 3, \\n. inl(n))")),
        ),
        _decl("Id", identity(NAT), "id.cit", smoke=(("idelim_nat 4 4 refl(4)", "4"),)),
        _decl(
            "strict",
            (Tele(), STRICT_SCHEMA),
            "natrec_ext.cit",
            extensions=frozenset({"natrec"}),
            smoke=(("scell(0, 2)", "spt(0)"), ("scell(1, 2)", "spt(2)")),
        ),
    )
}

STDLIB_FILES: dict[str, frozenset] = {
    "nat.cit": frozenset(),
    "bool.cit": frozenset(),
    "circle.cit": frozenset(),
    "torus.cit": frozenset(),
    "torus_globular.cit": frozenset(),
    "sphere2.cit": frozenset(),
    "w.cit": frozenset(),
    "wq.cit": frozenset(),
    "trunc.cit": frozenset(),
    "hubspokes.cit": frozenset(),
    "loc.cit": frozenset(),
    "id.cit": frozenset(),
    "id_paths.cit": frozenset({"paths"}),
    "natrec_ext.cit": frozenset({"natrec"}),
}
"""Every shipped file and the extensions it needs."""


def read_file(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _env(name: str) -> Env:
    return load_source(read_file(name))


def env_for(name: str) -> Env:
    """The environment of a shipped file (declarations elaborated, not checked)."""
    return _env(name).copy()


def decl_for_file(name: str) -> Optional[NamedDecl]:
    return next((d for d in CATALOG.values() if d.file == name), None)


# ---------------------------------------------------------------------------
# Eliminators


def derive_eliminator(
    decl: NamedDecl,
    names: Sequence[str],
    motive: Term,
    cases: Mapping[str, ElimCase],
    scrut: Term,
    indices: Sequence[Term] = (),
) -> Elim:
    """Assemble ``elim`` with the cases put in constructor order.

    ``names`` binds the indices and the scrutinee in ``motive``.  Every
    constructor needs exactly one case.
    """
    missing = [lbl for lbl in decl.schema.labels if lbl not in cases]
    extra = [lbl for lbl in cases if lbl not in decl.schema]
    if missing or extra:
        raise ValueError(f"cases for {decl.name}: missing {missing}, unknown {extra}")
    if len(names) != len(decl.tele) + 1:
        raise ValueError(f"motive for {decl.name} binds {len(decl.tele)} indices and the scrutinee")
    ordered = ElimList(tuple((lbl, cases[lbl]) for lbl in decl.schema.labels))
    return Elim(tuple(names), motive, tuple(indices), scrut, ordered)


def welim(a: Term, b: Term, motive: Term, case: ElimCase, scrut: Term) -> Elim:
    """The W-type eliminator: a single ``wsup`` case binding ``a``, ``g`` and ``r``."""
    tele, schema = w_type(a, b)
    return derive_eliminator(NamedDecl("W", tele, schema, ""), ("h",), motive, {"wsup": case}, scrut)


def idelim(a: Term, names: Sequence[str], motive: Term, m: Term, n: Term, p: Term, refl_case: Term) -> Elim:
    """``Idelim``: a motive over ``a``, ``b`` and the proof, and a ``refl`` case under ``a``."""
    tele, schema = identity(a)
    case = ElimCase((), ("a",), (), (), refl_case)
    return derive_eliminator(NamedDecl("Id", tele, schema, ""), names, motive, {"refl": case}, p, (m, n))


def identity_cases(decl: NamedDecl) -> dict[str, ElimCase]:
    """Cases that rebuild each constructor from the recursive results.

    With the motive ``d.h. T(d)`` these form the identity eliminator, whose
    coherence conditions hold by the boundary reductions alone, so every
    schema has at least one eliminator the checker must accept.
    """
    out = {}
    for label, c in decl.schema.ctors:
        ng, nt = len(c.params), len(c.args)
        k = ng + 2 * nt
        params = tuple(Var(k - 1 - p, b.name) for p, b in enumerate(c.params.entries))
        results = tuple(Var(nt - 1 - j, f"r{j}") for j in range(nt))
        body = Intro(shift(decl.schema, k), label, tuple(_x(x) for x in c.dims), params, results)
        out[label] = ElimCase(
            c.dims,
            tuple(b.name for b in c.params.entries),
            tuple(a.name for a in c.args),
            tuple(f"r{j}" for j in range(nt)),
            body,
        )
    return out


def identity_motive(decl: NamedDecl) -> tuple[tuple[str, ...], Term]:
    n = len(decl.tele)
    names = tuple(b.name for b in decl.tele.entries) + ("h",)
    fam = Ind(shift(decl.tele, n + 1), shift(decl.schema, n + 1), tuple(Var(n - i, b.name) for i, b in enumerate(decl.tele.entries)))
    return names, fam
