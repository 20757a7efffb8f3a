"""Hypothesis strategies for dimensions, constraints and terms."""

from __future__ import annotations

from hypothesis import strategies as st

from cubind.prelude import NAT, NAT_SCHEMA, numeral
from cubind.syntax import (
    App,
    Coe,
    Constraint,
    DimVar,
    Face,
    Fhcom,
    Hcom,
    Intro,
    Lam,
    PApp,
    PLam,
    Var,
)

DIM_NAMES = ("x", "y", "z")

dim_vars = st.sampled_from(DIM_NAMES).map(DimVar)
dims = st.one_of(st.sampled_from((0, 1)), dim_vars)
constraints = st.builds(Constraint, dims, dims)
dim_substs = st.dictionaries(st.sampled_from(DIM_NAMES), dims, max_size=3)
closing_substs = st.fixed_dictionaries({x: st.sampled_from((0, 1)) for x in DIM_NAMES})


def terms(depth: int = 3, scope: int = 2, dims=dims):
    """Terms over ``scope`` free term variables and the dimensions drawn from ``dims``."""
    leaves = [st.integers(0, 3).map(numeral)]
    if scope:
        leaves.append(st.integers(0, scope - 1).map(lambda i: Var(i, f"v{i}")))
    leaf = st.one_of(*leaves)
    if depth == 0:
        return leaf
    sub = terms(depth - 1, scope, dims)
    under = terms(depth - 1, scope + 1, dims)
    face = st.builds(lambda c, body: Face(c, "w", body), st.builds(Constraint, dims, dims), sub)
    return st.one_of(
        leaf,
        st.builds(lambda b: Lam("a", b), under),
        st.builds(App, sub, sub),
        st.builds(lambda t: Intro(NAT_SCHEMA, "suc", (), (), (t,)), sub),
        st.builds(lambda r, s, cap, tube: Hcom(NAT, r, s, cap, tuple(tube)), dims, dims, sub, st.lists(face, max_size=2)),
        st.builds(lambda r, s, cap, tube: Fhcom(r, s, cap, tuple(tube)), dims, dims, sub, st.lists(face, max_size=2)),
        st.builds(lambda r, s, body: Coe("w", NAT, r, s, body), dims, dims, sub),
        st.builds(lambda body: PLam("w", body), sub),
        st.builds(PApp, sub, dims),
    )


closed_terms = terms(3, 0)
dim_closed_terms = terms(2, 0, st.sampled_from((0, 1)))
open_terms = terms(3, 2)
