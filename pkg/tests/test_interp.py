from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from cubind.evaluator import evaluate, observe
from cubind.interp import func_action, insttm, insttm_dep, mcoe, tyatty, tyatty_dep
from cubind.prelude import BOOL, CIRCLE_SCHEMA, EMPTY, NAT, NAT_SCHEMA, numeral
from cubind.stdlib import CATALOG, identity, identity_cases, truncation, w_quotient, w_type
from cubind.syntax import (
    App,
    ArgPi,
    BIntro,
    Binding,
    BVar,
    Coe,
    ElimCase,
    ElimList,
    Ind,
    Intro,
    Lam,
    Pi,
    Schema,
    SelfAt,
    Tele,
    Var,
    alpha_eq,
    instantiate,
    shift,
    term_subst,
)

M, N = numeral(2), numeral(5)
NAT_FAMILY = NAT  # a family with no indices


# -- tyatty ------------------------------------------------------------------


def test_tyatty_self_without_indices():
    assert tyatty(SelfAt(()), 0, NAT_FAMILY) == NAT


def test_tyatty_function_argument():
    assert tyatty(ArgPi("b", BOOL, SelfAt(())), 0, NAT_FAMILY) == Pi("b", BOOL, NAT)


def test_tyatty_identity_refl_argument():
    tele, schema = identity(NAT)
    fam = Ind(shift(tele, 2), shift(schema, 2), (Var(1, "u"), Var(0, "v")))
    a = Var(0, "a")
    assert tyatty(SelfAt((a, a)), 2, fam) == Ind(tele, schema, (a, a))


# -- tyatty_dep --------------------------------------------------------------


def test_tyatty_dep_self_substitutes_the_scrutinee():
    motive = Intro(NAT_SCHEMA, "suc", args=(Var(0, "h"),))
    assert tyatty_dep(SelfAt(()), 0, motive, M) == Intro(NAT_SCHEMA, "suc", args=(M,))


def test_tyatty_dep_function_argument():
    f = Var(0, "f")
    out = tyatty_dep(ArgPi("b", BOOL, SelfAt(())), 0, Var(0, "h"), f)
    assert out == Pi("b", BOOL, App(Var(1, "f"), Var(0, "b")))


def test_tyatty_dep_on_the_w_branching_argument():
    _, schema = w_type(NAT, BOOL)
    (g,) = schema.lookup("wsup").args
    # context: D, g; the motive sits under h
    motive = App(Var(2, "D"), Var(0, "h"))
    g_var = Var(0, "g")
    out = tyatty_dep(instantiate(g.type, (M,)), 0, motive, g_var)
    assert out == Pi("b", BOOL, App(Var(2, "D"), App(Var(1, "g"), Var(0, "b"))))


# -- insttm ------------------------------------------------------------------


def test_insttm_variable_picks_its_argument():
    assert insttm(BVar(1), CIRCLE_SCHEMA, (M, N)) == N


def test_insttm_constructor_without_arguments():
    assert insttm(BIntro("base"), CIRCLE_SCHEMA, ()) == Intro(CIRCLE_SCHEMA, "base")


def test_insttm_realizes_the_truncation_left_face():
    _, schema = truncation(NAT)
    face = schema.lookup("trglue").boundary[0]
    t0, t1 = Intro(schema, "trpt", params=(M,)), Intro(schema, "trpt", params=(N,))
    assert insttm(face.body, schema, (t0, t1)) == t0
    glued = Intro(schema, "trglue", (0,), (), (t0, t1))
    assert evaluate(glued) == t0


@given(st.integers(0, 4))
def test_insttm_commutes_with_term_substitution(a):
    """Substituting into the interpretation equals interpreting the substituted pieces."""
    _, schema = truncation(NAT)
    body = BIntro("trglue", (0,), (), (BVar(0), BIntro("trpt", (), (Var(0, "p"),), ())))
    ns = (Intro(schema, "trpt", params=(Var(0, "p"),)),)
    p = numeral(a)
    lhs = term_subst(insttm(body, schema, ns), [p], [0])
    rhs = insttm(term_subst(body, [p], [0]), term_subst(schema, [p], [0]), [term_subst(n, [p], [0]) for n in ns])
    assert alpha_eq(lhs, rhs)


def test_insttm_ignores_schema_extensions():
    body = BIntro("base")
    bigger = Schema(CIRCLE_SCHEMA.ctors + (("extra", CIRCLE_SCHEMA.lookup("base")),))
    assert insttm(body, CIRCLE_SCHEMA, ()).label == insttm(body, bigger, ()).label


def test_insttm_composition():
    """Interpreting after substituting boundary terms for variables is interpreting in stages."""
    _, schema = truncation(NAT)
    outer = BIntro("trglue", (0,), (), (BVar(0), BVar(0)))
    inner = (BIntro("trpt", (), (M,), ()),)
    composed = BIntro("trglue", (0,), (), inner + inner)
    assert insttm(composed, schema, ()) == insttm(outer, schema, tuple(insttm(m, schema, ()) for m in inner))


# -- insttm_dep --------------------------------------------------------------


def test_insttm_dep_variable_picks_its_result():
    assert insttm_dep(BVar(0), CIRCLE_SCHEMA, ElimList(()), 0, NAT, (M,), (N,)) == N


def test_insttm_dep_constructor_runs_its_case():
    decl = CATALOG["torus"]
    cases = ElimList(tuple((lbl, ElimCase(c.dims, (), (), (), numeral(i))) for i, (lbl, c) in enumerate(decl.schema.ctors)))
    assert insttm_dep(BIntro("base"), decl.schema, cases, 0, NAT, (), ()) == numeral(0)


def test_insttm_dep_on_the_w_quotient_left_face():
    f0 = Var(0, "c")
    f1 = Intro(NAT_SCHEMA, "suc", args=(Var(0, "c"),))
    _, schema = w_quotient(NAT, EMPTY, NAT, f0, f1)
    cell = schema.lookup("wqcell")
    face = cell.boundary[0].body
    c = numeral(1)
    g0, g1 = Var(1, "g0"), Var(0, "g1")
    r0, r1 = Var(3, "r0"), Var(2, "r1")
    case_body = Intro(NAT_SCHEMA, "suc", args=(Var(2, "a"),))  # R_wqsup = suc(a), binding a, g, r
    cases = ElimList((("wqsup", ElimCase((), ("a",), ("g",), ("r",), case_body)), ("wqcell", ElimCase(("x",), ("c",), ("g0", "g1"), ("r0", "r1"), numeral(0)))))
    out = insttm_dep(instantiate(face, (c,)), schema, cases, 0, NAT, (g0, g1), (r0, r1))
    assert out == Intro(NAT_SCHEMA, "suc", args=(c,))


# -- func_action -------------------------------------------------------------


def test_func_action_on_self_applies_the_map():
    body = Intro(NAT_SCHEMA, "suc", args=(Var(0, "h"),))
    assert func_action(SelfAt(()), 0, body, M) == Intro(NAT_SCHEMA, "suc", args=(M,))


def test_func_action_on_a_function_argument():
    body = Intro(NAT_SCHEMA, "suc", args=(Var(0, "h"),))
    f = Var(0, "f")
    out = func_action(ArgPi("b", BOOL, SelfAt(())), 0, body, f)
    assert out == Lam("b", Intro(NAT_SCHEMA, "suc", args=(App(Var(1, "f"), Var(0, "b")),)))


def test_func_action_of_the_identity_eta_expands():
    f = Var(0, "f")
    out = func_action(ArgPi("b", BOOL, SelfAt(())), 0, Var(0, "h"), f)
    assert out == Lam("b", App(Var(1, "f"), Var(0, "b")))


def test_identity_cases_rebuild_every_constructor():
    for decl in CATALOG.values():
        cases = identity_cases(decl)
        assert list(cases) == list(decl.schema.labels)


# -- mcoe --------------------------------------------------------------------


def test_mcoe_on_the_empty_telescope():
    assert mcoe("z", Tele(), 0, 1, ()) == ()


def test_mcoe_on_a_singleton_telescope():
    (out,) = mcoe("z", Tele((Binding("a", NAT),)), 0, 1, (M,))
    assert isinstance(out, Coe) and out.type == NAT and (out.src, out.dst, out.body) == (0, 1, M)


@given(st.lists(st.integers(0, 4), max_size=3), st.sampled_from((0, 1)))
def test_mcoe_with_equal_endpoints_returns_its_inputs(values, r):
    tele = Tele(tuple(Binding(f"a{i}", NAT) for i in range(len(values))))
    out = mcoe("z", tele, r, r, tuple(numeral(v) for v in values))
    assert [observe(t).numeral() for t in out] == values
