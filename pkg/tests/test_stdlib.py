from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubind import surface as S
from cubind.checker import CheckCtx, Checker, CheckError
from cubind.cli import Session
from cubind.evaluator import StuckTerm, evaluate, observe
from cubind.prelude import NAT, NAT_SCHEMA, numeral
from cubind.stdlib import (
    CATALOG,
    STDLIB_FILES,
    NamedDecl,
    derive_eliminator,
    env_for,
    idelim,
    identity,
    read_file,
)
from cubind.suites import TermGenerator
from cubind.syntax import ElimCase, Intro, Var, alpha_eq


def session_for(name: str) -> Session:
    session = Session(extensions=STDLIB_FILES[name])
    outcomes = session.load(read_file(name), run_directives=False)
    assert all(o.ok for o in outcomes)
    return session


def run(session: Session, src: str):
    (d,) = S.parse(src).decls
    return session.run_decl(d)


# -- catalog -----------------------------------------------------------------


def test_torus_has_a_point_two_loops_and_a_square():
    schema = CATALOG["torus"].schema
    assert schema.labels == ("base", "lpa", "lpb", "surf")
    assert [len(c.dims) for _, c in schema.ctors] == [0, 1, 1, 2]
    assert len(schema.lookup("surf").boundary) == 4


def test_refl_lands_on_the_diagonal():
    tele, schema = identity(NAT)
    refl = schema.lookup("refl")
    assert len(tele) == 2
    assert refl.indices == (Var(0, "u"), Var(0, "u"))


def test_natural_numbers():
    assert NAT_SCHEMA.labels == ("zero", "suc")
    assert CATALOG["nat"].schema == NAT_SCHEMA


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_agrees_with_its_source_file(name):
    """The hand-built schema and the elaborated surface declaration are the same."""
    decl = CATALOG[name]
    found = env_for(decl.file).types.lookup_type(decl.name)
    assert found is not None
    tele, schema = found
    assert alpha_eq(tele, decl.tele) and alpha_eq(schema, decl.schema)


# -- eliminators -------------------------------------------------------------


def test_derived_eliminator_orders_cases_by_constructor():
    decl = CATALOG["torus"]
    cases = {lbl: ElimCase(c.dims, (), (), (), numeral(0)) for lbl, c in reversed(decl.schema.ctors)}
    e = derive_eliminator(decl, ("h",), NAT, cases, Intro(decl.schema, "base"))
    assert e.cases.labels == decl.schema.labels


def test_derived_eliminator_reports_missing_and_unknown_cases():
    decl = CATALOG["bool"]
    with pytest.raises(ValueError, match="missing \\['ff'\\], unknown \\['maybe'\\]"):
        derive_eliminator(decl, ("h",), NAT, {"tt": ElimCase(), "maybe": ElimCase()}, Intro(decl.schema, "tt"))


def test_derived_eliminator_needs_a_binder_per_index():
    decl = NamedDecl("Id", *identity(NAT), "")
    with pytest.raises(ValueError):
        derive_eliminator(decl, ("h",), NAT, {"refl": ElimCase()}, numeral(0))


def test_idelim_on_refl_runs_its_case():
    refl = Intro(identity(NAT)[1], "refl", (), (numeral(4),))
    e = idelim(NAT, ("a", "b", "q"), NAT, numeral(4), numeral(4), refl, Intro(NAT_SCHEMA, "suc", (), (), (Var(0, "a"),)))
    Checker(families=[identity(NAT)]).check(CheckCtx(), e, NAT)
    assert observe(e).numeral() == 5


def test_idelim_with_mismatched_indices_is_rejected():
    refl = Intro(identity(NAT)[1], "refl", (), (numeral(4),))
    e = idelim(NAT, ("a", "b", "q"), NAT, numeral(4), numeral(3), refl, numeral(0))
    with pytest.raises(CheckError):
        Checker(families=[identity(NAT)]).check(CheckCtx(), e, NAT)


# -- shipped programs ---------------------------------------------------------


@pytest.mark.parametrize("name", sorted(STDLIB_FILES))
def test_every_shipped_file_checks_and_runs(name):
    session = Session(extensions=STDLIB_FILES[name], source=name)
    outcomes = session.load(read_file(name), run_directives=True)
    assert all(o.ok for o in outcomes), [o.error for o in outcomes if not o.ok]


@pytest.mark.parametrize("name,expr,expected", [(n, e, x) for n, d in sorted(CATALOG.items()) for e, x in d.smoke])
def test_smoke_program(name, expr, expected):
    session = session_for(CATALOG[name].file)
    out = run(session, f"eval {expr} = {expected}")
    assert out.ok, out.error


@pytest.mark.parametrize("m,n", [(0, 0), (1, 4), (3, 2), (5, 5)])
def test_arithmetic(m, n):
    session = session_for("nat.cit")
    assert run(session, f"eval add {m} {n}").value == str(m + n)
    assert run(session, f"eval mul {m} {n}").value == str(m * n)


def test_identity_to_path_to_identity():
    session = session_for("id_paths.cit")
    out = run(session, "eval elim [a b q. nat] 2 2 (path_to_id 2 2 (id_to_path 2 2 refl(2))) { refl(u) -> suc(u) }")
    assert out.ok and out.value == "3"


@pytest.mark.parametrize("end", [0, 1])
def test_path_to_identity_to_path(end):
    session = session_for("id_paths.cit")
    out = run(session, f"eval id_to_path 3 3 (path_to_id 3 3 (<x> 3)) @ {end}")
    assert out.ok and out.value == "3"


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(("nat", "bool")))
def test_well_typed_closed_terms_never_get_stuck(seed, kind):
    gen = TermGenerator(seed, max_depth=3)
    t = gen.gen(kind)
    Checker().infer(CheckCtx(), t)
    try:
        evaluate(t)
    except StuckTerm as exc:  # pragma: no cover - reported as a failure
        pytest.fail(f"stuck: {exc}")
