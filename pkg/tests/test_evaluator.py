from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubind.evaluator import (
    IS_VALUE,
    EvalConfig,
    FuelExhausted,
    NotObservable,
    Steps,
    StuckTerm,
    evaluate,
    is_value,
    observe,
    step,
    trace,
)
from cubind.interp import mcoe
from cubind.prelude import BOOL, BOOL_SCHEMA, CIRCLE, CIRCLE_SCHEMA, EMPTY, NAT, NAT_SCHEMA, numeral
from cubind.stdlib import w_type, welim
from cubind.suites import TermGenerator, expected_elim_step, stdlib_term
from cubind.syntax import (
    App,
    Coe,
    Constraint,
    DimVar,
    Elim,
    ElimCase,
    ElimList,
    Face,
    Fcoe,
    Fcom,
    Fhcom,
    Hcom,
    Intro,
    Lam,
    Tcoe,
    Var,
    alpha_eq,
    Binding,
    Ind,
    Pi,
    Tele,
)

x = DimVar("x")
BASE = Intro(CIRCLE_SCHEMA, "base")


def lp(r):
    return Intro(CIRCLE_SCHEMA, "lp", (r,))


# -- values ------------------------------------------------------------------


def test_open_loop_is_a_value_and_its_endpoint_is_not():
    assert is_value(lp(x))
    assert not is_value(lp(0))


def test_degenerate_fhcom_is_not_a_value():
    assert not is_value(Fhcom(0, 0, BASE, (Face(Constraint(x, 0), "y", lp(DimVar("y"))),)))


def test_fcoe_along_an_empty_line_is_not_a_value():
    assert not is_value(Fcoe("z", (), 0, 1, BASE))


@settings(max_examples=200)
@given(st.integers(0, 10_000))
def test_is_value_agrees_with_step(seed):
    gen = TermGenerator(seed, max_depth=3)
    t = gen.gen(gen.rng.choice(("nat", "bool")))
    for u in trace(t, 200).terms:
        assert is_value(u) == (step(u) is IS_VALUE)


# -- single steps ------------------------------------------------------------


def test_degenerate_fhcom_steps_to_its_cap():
    res = step(Fhcom(1, 1, BASE, (Face(Constraint(x, 0), "y", lp(DimVar("y"))),)))
    assert isinstance(res, Steps) and res.next == BASE


def test_fhcom_steps_to_the_first_satisfied_face():
    t = Fhcom(0, 1, BASE, (Face(Constraint(0, 1), "y", numeral(4)), Face(Constraint(1, 1), "y", lp(DimVar("y")))))
    res = step(t)
    assert isinstance(res, Steps) and res.next == lp(1)


def test_loop_endpoint_steps_to_base():
    res = step(lp(0))
    assert isinstance(res, Steps) and res.next == BASE


def test_hcom_at_an_inductive_type_becomes_fhcom():
    t = Hcom(CIRCLE, 0, 1, BASE, (Face(Constraint(x, 0), "y", lp(DimVar("y"))),))
    tr = trace(t, 5)
    assert tr.rules[0] == "hcom-ind"
    assert isinstance(tr.terms[1], Fhcom)


def test_elim_on_wsup_steps_to_the_case_with_mapped_branches():
    _, schema = w_type(NAT, EMPTY)
    no_branches = Lam("b", Elim(("h",), Ind(Tele(), schema, ()), (), Var(0), ElimList(())))
    scrut = Intro(schema, "wsup", (), (numeral(3),), (no_branches,))
    # R = r: the case returns the recursive results as a function on branches
    case = ElimCase((), ("a",), ("g",), ("r",), Var(0, "r"))
    e = welim(NAT, EMPTY, Pi("b", EMPTY, NAT), case, scrut)
    res = step(e)
    assert isinstance(res, Steps) and res.rule == "elim-intro"
    assert isinstance(res.next, Lam)
    assert alpha_eq(res.next, expected_elim_step(e))


def test_tcoe_with_equal_endpoints_returns_its_argument():
    v = numeral(3)
    t = Tcoe("z", NAT.tele, NAT_SCHEMA, 1, 1, v)
    res = step(t)
    assert isinstance(res, Steps) and isinstance(res.next, Fcoe)
    assert observe(t).numeral() == 3


# -- evaluation --------------------------------------------------------------


def test_evaluate_beta():
    assert evaluate(App(Lam("a", Var(0, "a")), BASE)) == BASE


def test_evaluate_degenerate_fcom_collapses_to_its_cap():
    t = Fcom("z", (), 0, 0, numeral(2), ())
    assert observe(t).numeral() == 2


def test_evaluate_addition():
    assert observe(stdlib_term("nat.cit", "add 2 3")).numeral() == 5


def test_open_terms_are_stuck():
    with pytest.raises(StuckTerm):
        evaluate(App(Var(0, "f"), BASE))


def test_fuel_is_enforced():
    with pytest.raises(FuelExhausted):
        evaluate(stdlib_term("nat.cit", "mul 5 5"), fuel=1)


# -- observation -------------------------------------------------------------


def test_observe_a_numeral():
    assert str(observe(numeral(2))) == "2"
    assert observe(numeral(2)).label == "suc"


def test_observe_a_coercion_along_a_constant_line():
    assert observe(Coe("z", NAT, 0, 1, numeral(2))).numeral() == 2


def test_observe_a_bool_eliminator():
    e = Elim(("h",), NAT, (), Intro(BOOL_SCHEMA, "tt"), ElimList((("tt", ElimCase((), (), (), (), numeral(1))), ("ff", ElimCase((), (), (), (), numeral(0))))))
    assert observe(e).numeral() == 1


def test_observe_rejects_higher_types():
    with pytest.raises(NotObservable):
        observe(BASE, CIRCLE)


def test_observe_rejects_function_arguments():
    _, schema = w_type(NAT, EMPTY)
    with pytest.raises(NotObservable):
        observe(Intro(schema, "wsup", (), (numeral(0),), (Lam("b", Var(0)),)), Ind(Tele(), schema, ()))


# -- traces ------------------------------------------------------------------


def test_trace_of_a_loop_endpoint():
    tr = trace(lp(0))
    assert tr.terms == (lp(0), BASE)
    assert tr.complete


def test_trace_of_a_value_has_one_entry():
    tr = trace(BASE)
    assert tr.terms == (BASE,) and tr.rules == ()


def test_trace_respects_its_bound():
    tr = trace(stdlib_term("nat.cit", "mul 3 3"), 5)
    assert len(tr.rules) == 5 and tr.result == "max-steps"


# -- determinism and configuration -------------------------------------------


@settings(max_examples=100)
@given(st.integers(0, 10_000))
def test_evaluation_is_deterministic(seed):
    gen = TermGenerator(seed, max_depth=3)
    t = gen.gen("nat")
    first, second = trace(t, 500), trace(t, 500)
    assert first.rules == second.rules
    assert all(alpha_eq(a, b) for a, b in zip(first.terms, second.terms))


@settings(max_examples=100)
@given(st.integers(0, 10_000))
def test_closed_type_optimization_preserves_observations(seed):
    gen = TermGenerator(seed, max_depth=3)
    kind = gen.rng.choice(("nat", "bool"))
    t = gen.gen(kind)
    assert observe(t) == observe(t, cfg=EvalConfig(opt_closed=True))


def test_mcoe_results_evaluate():
    out = mcoe("z", Tele((Binding("a", NAT), Binding("b", BOOL))), 0, 1, (numeral(1), Intro(BOOL_SCHEMA, "ff")))
    assert [str(observe(t)) for t in out] == ["1", "ff"]


def test_hcom_at_a_function_type_is_pointwise():
    f = Lam("a", Var(0, "a"))
    t = App(Hcom(Pi("a", NAT, NAT), 0, 1, f, (Face(Constraint(1, 1), "y", f),)), numeral(3))
    assert observe(t).numeral() == 3


def test_alpha_equivalent_traces_for_renamed_binders():
    a = Lam("p", Var(0, "p"))
    b = Lam("q", Var(0, "q"))
    assert alpha_eq(evaluate(App(a, BASE)), evaluate(App(b, BASE)))
