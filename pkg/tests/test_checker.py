from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubind.checker import (
    CheckCtx,
    CheckError,
    Checker,
    check_constrs,
    check_constructor,
    check_elim_list,
    check_term,
    convert,
    infer_term,
    required_extensions,
)
from cubind.elaborate import load_source
from cubind.evaluator import EvalConfig
from cubind.prelude import CIRCLE, CIRCLE_SCHEMA, EMPTY, EMPTY_SCHEMA, NAT, numeral
from cubind.stdlib import CATALOG, STDLIB_FILES, derive_eliminator, identity_cases, identity_motive, read_file, w_type
from cubind.suites import stdlib_env, stdlib_term
from cubind.syntax import (
    UNSAT,
    App,
    BFace,
    BIntro,
    Coe,
    Constraint,
    Constructor,
    DimVar,
    ElimCase,
    ElimList,
    Face,
    Fhcom,
    Ind,
    Intro,
    Lam,
    Pi,
    Schema,
    Tele,
    Var,
    constraint_mgu,
    dim_subst,
)

x, y = DimVar("x"), DimVar("y")
BASE = Intro(CIRCLE_SCHEMA, "base")


def data(src: str) -> tuple[Tele, Schema]:
    env = load_source(src)
    _, tele, schema = env.types.types[-1]
    return tele, schema


def kind_of(fn, *args, **kw) -> str:
    with pytest.raises(CheckError) as info:
        fn(*args, **kw)
    return info.value.kind


# -- schemas -----------------------------------------------------------------


def test_torus_schema_is_accepted():
    check_constrs(Tele(), CATALOG["torus"].schema)


def test_duplicate_label_is_rejected():
    schema = Schema((("a", Constructor()), ("a", Constructor())))
    assert kind_of(check_constrs, Tele(), schema) == "LabelOrder"


def test_forward_reference_in_a_boundary_is_rejected():
    lp = Constructor(dims=("x",), boundary=(BFace(Constraint(x, 0), BIntro("base")), BFace(Constraint(x, 1), BIntro("base"))))
    schema = Schema((("lp", lp), ("base", Constructor())))
    assert kind_of(check_constrs, Tele(), schema) == "LabelOrder"


def test_circle_loop_is_accepted():
    check_constructor(Tele(), Schema(CIRCLE_SCHEMA.ctors[:1]), "lp", CIRCLE_SCHEMA.lookup("lp"))


def test_loop_with_one_endpoint_is_invalid():
    lp = Constructor(dims=("x",), boundary=(BFace(Constraint(x, 0), BIntro("base")),))
    assert kind_of(check_constructor, Tele(), Schema(CIRCLE_SCHEMA.ctors[:1]), "lp", lp) == "Validity"


def test_square_with_disagreeing_corners_is_rejected():
    _, schema = data(
        "data t = base | other | lpa(x) [x=0 -> base | x=1 -> base]"
        " | surf(x, y) [x=0 -> base | x=1 -> base | y=0 -> lpa(x) | y=1 -> other]"
    )
    assert kind_of(check_constrs, Tele(), schema) == "Conversion"


def test_every_stdlib_schema_is_accepted():
    for decl in CATALOG.values():
        check_constrs(decl.tele, decl.schema, decl.extensions)


# -- boundary terms ----------------------------------------------------------


def test_truncation_glue_boundary_is_accepted():
    decl = CATALOG["trunc"]
    prefix = Schema(decl.schema.ctors[:1])
    check_constructor(Tele(), prefix, "trglue", decl.schema.lookup("trglue"))


def test_localization_retraction_boundary_is_accepted():
    decl = CATALOG["loc"]
    pos = decl.schema.position("rtr")
    check_constructor(Tele(), Schema(decl.schema.ctors[:pos]), "rtr", decl.schema.lookup("rtr"))


# -- eliminators -------------------------------------------------------------


def torus_cases(lpa_body=None):
    zero = numeral(0)
    return {
        "base": ElimCase((), (), (), (), zero),
        "lpa": ElimCase(("x",), (), (), (), lpa_body or zero),
        "lpb": ElimCase(("y",), (), (), (), zero),
        "surf": ElimCase(("x", "y"), (), (), (), zero),
    }


def test_torus_eliminator_with_coherent_cases_is_accepted():
    e = derive_eliminator(CATALOG["torus"], ("h",), NAT, torus_cases(), BASE)
    check_elim_list(Tele(), CATALOG["torus"].schema, e.names, e.motive, e.cases)


def test_torus_eliminator_off_the_base_case_is_rejected():
    e = derive_eliminator(CATALOG["torus"], ("h",), NAT, torus_cases(numeral(1)), BASE)
    with pytest.raises(CheckError) as info:
        check_elim_list(Tele(), CATALOG["torus"].schema, e.names, e.motive, e.cases)
    assert info.value.kind == "Conversion" and info.value.rule == "elim-coherence"


def test_empty_schema_takes_an_empty_eliminator():
    check_elim_list(Tele(), EMPTY_SCHEMA, ("h",), NAT, ElimList(()))


def identity_elim(decl):
    names, motive = identity_motive(decl)
    return names, motive, ElimList(tuple(identity_cases(decl).items()))


def test_every_identity_eliminator_is_accepted():
    for decl in CATALOG.values():
        names, motive, cases = identity_elim(decl)
        ch = Checker(decl.extensions, cfg=EvalConfig(opt_closed=decl.identity_elim_needs_opt_closed))
        ch.check_tele(CheckCtx(), decl.tele)
        ch.check_elim_list(CheckCtx(), decl.tele, decl.schema, names, motive, cases)


def test_gtorus_identity_eliminator_needs_trivial_closed_coercion():
    decl = CATALOG["gtorus"]
    names, motive, cases = identity_elim(decl)
    with pytest.raises(CheckError):
        check_elim_list(decl.tele, decl.schema, names, motive, cases)


# -- terms -------------------------------------------------------------------


def test_w_node_with_a_function_argument():
    tele, schema = w_type(NAT, EMPTY)
    ty = Ind(tele, schema, ())
    g = Lam("b", App(Var(1, "k"), Var(0, "b")))
    ctx = CheckCtx().push("k", Pi("b", EMPTY, ty))
    check_term(Intro(schema, "wsup", (), (numeral(1),), (g,)), ty, ctx=ctx)


def test_fhcom_with_a_face_off_the_cap_is_rejected():
    t = Fhcom(0, 1, BASE, (Face(Constraint(1, 1), "y", Intro(CIRCLE_SCHEMA, "lp", (DimVar("y"),))), Face(Constraint(0, 0), "y", numeral(0))))
    assert kind_of(check_term, t, CIRCLE) == "Conversion"


def test_fhcom_with_a_coherent_tube_is_accepted():
    t = Fhcom(0, 1, BASE, (Face(Constraint(1, 1), "y", Intro(CIRCLE_SCHEMA, "lp", (DimVar("y"),))),))
    check_term(t, CIRCLE)


def test_path_to_identity_map_by_coercion():
    env = stdlib_env("id_paths.cit")
    path_to_id = env.defs["path_to_id"]
    assert isinstance(path_to_id.term.body.body.body, Coe)
    check_term(path_to_id.term, path_to_id.type, ("paths",))


def test_path_to_identity_needs_the_paths_extension():
    path_to_id = stdlib_env("id_paths.cit").defs["path_to_id"]
    assert kind_of(check_term, path_to_id.term, path_to_id.type) == "Unsupported"


def test_infer_a_closed_application():
    assert convert(infer_term(stdlib_term("nat.cit", "add 2 3")), NAT)


def test_required_extensions():
    assert required_extensions(stdlib_term("nat.cit", "add 2 3")) == frozenset()
    assert required_extensions(stdlib_term("natrec_ext.cit", "spt(1)")) == frozenset({"natrec"})
    assert "natrec" in required_extensions(CATALOG["strict"].schema)


def test_extension_gate():
    decl = CATALOG["strict"]
    assert kind_of(check_constrs, decl.tele, decl.schema) == "Unsupported"
    check_constrs(decl.tele, decl.schema, ("natrec",))


# -- conversion --------------------------------------------------------------


def test_degenerate_fhcom_converts_with_its_cap():
    t = Fhcom(1, 1, BASE, (Face(Constraint(x, 0), "y", BASE),))
    assert convert(t, BASE, ctx=CheckCtx(frozenset({"x"})))


def test_eta_for_functions():
    f_ty = Pi("a", NAT, NAT)
    ctx = CheckCtx().push("f", f_ty)
    assert convert(Lam("a", App(Var(1, "f"), Var(0, "a"))), Var(0, "f"), f_ty, ctx)


def test_distinct_constructors_do_not_convert():
    assert not convert(BASE, Intro(CIRCLE_SCHEMA, "lp", (x,)), ctx=CheckCtx(frozenset({"x"})))


CONVERSION_CORPUS = [
    BASE,
    Intro(CIRCLE_SCHEMA, "lp", (0,)),
    Intro(CIRCLE_SCHEMA, "lp", (x,)),
    Intro(CIRCLE_SCHEMA, "lp", (y,)),
    Fhcom(0, 0, BASE, ()),
    Fhcom(0, 1, Intro(CIRCLE_SCHEMA, "lp", (x,)), (Face(Constraint(x, 0), "z", BASE), Face(Constraint(x, 1), "z", BASE))),
    Coe("z", CIRCLE, 0, 1, BASE),
    Coe("z", CIRCLE, x, x, Intro(CIRCLE_SCHEMA, "lp", (x,))),
]
XY = CheckCtx(frozenset({"x", "y"}))


def test_conversion_is_symmetric_and_transitive_on_the_corpus():
    eq = {(i, j): convert(a, b, CIRCLE, XY) for (i, a), (j, b) in itertools.product(enumerate(CONVERSION_CORPUS), repeat=2)}
    n = len(CONVERSION_CORPUS)
    for i, j in itertools.product(range(n), repeat=2):
        assert eq[i, j] == eq[j, i]
    for i, j, k in itertools.product(range(n), repeat=3):
        if eq[i, j] and eq[j, k]:
            assert eq[i, k]


# -- restriction -------------------------------------------------------------


DIMS3 = ("x", "y", "w")
dim3 = st.one_of(st.sampled_from((0, 1)), st.sampled_from(DIMS3).map(DimVar))


def circle_at(r):
    return Intro(CIRCLE_SCHEMA, "lp", (r,))


@settings(max_examples=200, deadline=None)
@given(dim3, dim3, dim3, dim3)
def test_restricted_conversion_is_sound_for_every_closing_substitution(r, s, a, b):
    """Whatever is accepted under a constraint via its unifier holds at every endpoint satisfying it."""
    ctx = CheckCtx(frozenset(DIMS3))
    c = Constraint(a, b)
    psi = constraint_mgu(c, DIMS3)
    lhs, rhs = circle_at(r), circle_at(s)
    if psi is UNSAT:
        return
    restricted = convert(dim_subst(lhs, psi), dim_subst(rhs, psi), CIRCLE, ctx.restrict(psi))
    for values in itertools.product((0, 1), repeat=3):
        sigma = dict(zip(DIMS3, values))
        if c.subst(sigma).lhs != c.subst(sigma).rhs:
            continue
        closed = convert(dim_subst(lhs, sigma), dim_subst(rhs, sigma), CIRCLE, CheckCtx())
        if restricted:
            assert closed


# -- shipped files -----------------------------------------------------------


@pytest.mark.parametrize("name", sorted(STDLIB_FILES))
def test_shipped_declarations_check(name):
    from cubind.cli import Session

    session = Session(extensions=STDLIB_FILES[name])
    outcomes = session.load(read_file(name), run_directives=False)
    assert outcomes and all(o.ok for o in outcomes), [o.error for o in outcomes if not o.ok]
