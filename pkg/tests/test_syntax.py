from __future__ import annotations

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from cubind.prelude import CIRCLE_SCHEMA, NAT, NAT_SCHEMA, numeral
from cubind.stdlib import w_type
from cubind.syntax import (
    UNSAT,
    App,
    BIntro,
    BVar,
    Constraint,
    DimVar,
    Face,
    Fhcom,
    Lam,
    PLam,
    PApp,
    Schema,
    Var,
    alpha_eq,
    apply_dim,
    compose_dsubst,
    constraint_mgu,
    constraint_satisfied,
    ctx_valid,
    dim_subst,
    fresh_dim,
    fresh_name,
    height,
    instantiate,
    shift,
    term_subst,
)

from strategies import DIM_NAMES, closed_terms, constraints, dim_closed_terms, dim_substs, dims, open_terms

x, y, z = DimVar("x"), DimVar("y"), DimVar("z")
M = numeral(2)
N = numeral(3)


# -- freshness ---------------------------------------------------------------


def test_fresh_names_are_distinct():
    assert fresh_name() != fresh_name()


def test_thousand_fresh_names_are_distinct():
    assert len({fresh_name("x") for _ in range(1000)}) == 1000


def test_fresh_dim_survives_substitution():
    w = fresh_dim()
    t = PApp(Var(0), z)
    assert w.name not in dim_subst(t, {"z": x}).free_dims


# -- dimension substitution --------------------------------------------------


def test_dim_subst_is_a_homomorphism_on_fhcom():
    t = Fhcom(0, x, M, (Face(Constraint(x, 0), "y", N),))
    assert dim_subst(t, {"x": 1}) == Fhcom(0, 1, M, (Face(Constraint(1, 0), "y", N),))


def test_dim_subst_renames_a_capturing_binder():
    t = PLam("z", PApp(Var(0), x))
    out = dim_subst(t, {"x": z})
    assert isinstance(out, PLam)
    assert out.var != "z"
    assert out.body == PApp(Var(0), z)


def test_dim_subst_identity():
    t = Fhcom(x, y, M, (Face(Constraint(x, 0), "w", N),))
    assert dim_subst(t, {}) is t
    assert dim_subst(t, {"x": x}) is t


@given(open_terms, dim_substs, dim_substs)
def test_dim_subst_composes(t, psi, phi):
    assert alpha_eq(dim_subst(dim_subst(t, psi), phi), dim_subst(t, compose_dsubst(psi, phi)))


@given(open_terms, dim_substs, dim_closed_terms)
def test_term_subst_commutes_with_dim_subst(t, psi, p):
    lhs = dim_subst(term_subst(t, [p], [0]), psi)
    rhs = term_subst(dim_subst(t, psi), [p], [0])
    assert alpha_eq(lhs, rhs)


# -- term substitution -------------------------------------------------------


def test_term_subst_replaces_the_variable():
    assert term_subst(Var(0, "a"), [M], [0]) == M


def test_term_subst_respects_shadowing():
    t = Lam("a", Var(0, "a"))
    assert term_subst(t, [M], [0]) == t


def test_term_subst_avoids_capture():
    # (λb. a b)[b/a] where b is a free variable one level out
    t = Lam("b", App(Var(1, "a"), Var(0, "b")))
    out = term_subst(t, [Var(1, "b")], [0])
    assert out == Lam("b", App(Var(2, "b"), Var(0, "b")))


@given(open_terms)
def test_shift_then_unshift_is_identity(t):
    assert instantiate(shift(t, 1), [M]) == t


@given(open_terms)
def test_shift_composes(t):
    assert shift(shift(t, 1), 2) == shift(t, 3)


@given(closed_terms)
def test_closed_terms_ignore_substitution(t):
    assert term_subst(t, [M], [0]) == t


@given(open_terms)
def test_alpha_eq_is_reflexive(t):
    assert alpha_eq(t, t)


# -- constraints -------------------------------------------------------------


def test_constraint_satisfied():
    assert constraint_satisfied(Constraint(0, 0))
    assert constraint_satisfied(Constraint(x, x))
    assert not constraint_satisfied(Constraint(x, 0))


def test_ctx_valid_examples():
    assert ctx_valid([Constraint(x, 0), Constraint(x, 1)])
    assert ctx_valid([Constraint(0, 0)])
    assert not ctx_valid([Constraint(x, 0)])
    assert not ctx_valid([])


def test_ctx_valid_rejects_a_single_face_by_enumeration():
    cs = [Constraint(x, 0)]
    assert not all(any(constraint_satisfied(c.subst({"x": e})) for c in cs) for e in (0, 1))


def test_constraint_mgu_examples():
    assert constraint_mgu(Constraint(x, 0)) == {"x": 0}
    assert constraint_mgu(Constraint(x, y), ("x", "y")) == {"y": x}
    assert constraint_mgu(Constraint(y, x), ("x", "y")) == {"y": x}
    assert constraint_mgu(Constraint(0, 1)) is UNSAT
    assert constraint_mgu(Constraint(1, 1)) == {}


@given(constraints)
def test_mgu_satisfies_its_constraint(c):
    psi = constraint_mgu(c, DIM_NAMES)
    if psi is UNSAT:
        assert c.lhs != c.rhs and not isinstance(c.lhs, DimVar) and not isinstance(c.rhs, DimVar)
    else:
        assert constraint_satisfied(c.subst(psi))


@given(constraints, st.fixed_dictionaries({n: st.sampled_from((0, 1)) for n in DIM_NAMES}))
def test_mgu_is_most_general(c, closing):
    """Every closing substitution satisfying ``c`` factors through the mgu."""
    if not constraint_satisfied(c.subst(closing)):
        return
    psi = constraint_mgu(c, DIM_NAMES)
    assert psi is not UNSAT
    for n in DIM_NAMES:
        assert apply_dim(closing, apply_dim(psi, DimVar(n))) == closing[n]


@settings(max_examples=300)
@given(st.lists(constraints, max_size=4))
def test_ctx_valid_is_sound(cs):
    if not ctx_valid(cs):
        return
    for values in itertools.product((0, 1), repeat=len(DIM_NAMES)):
        psi = dict(zip(DIM_NAMES, values))
        assert any(constraint_satisfied(c.subst(psi)) for c in cs)


@given(dims, dim_substs)
def test_apply_dim_on_constants(r, psi):
    if r in (0, 1):
        assert apply_dim(psi, r) == r


# -- heights -----------------------------------------------------------------


def test_height_of_a_label():
    assert height(CIRCLE_SCHEMA, "lp") == 1


def test_height_without_labels():
    assert height(CIRCLE_SCHEMA, BVar(0)) == -1


def test_height_of_a_w_constructor():
    _, schema = w_type(NAT, NAT)
    assert height(schema, BIntro("wsup", (), (M,), (BVar(0),))) == 0


def test_height_is_stable_under_prefix_extension():
    bigger = Schema(CIRCLE_SCHEMA.ctors + NAT_SCHEMA.ctors)
    for label in CIRCLE_SCHEMA.labels:
        assert height(CIRCLE_SCHEMA, label) == height(bigger, label)
