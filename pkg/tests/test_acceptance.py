"""Acceptance criteria, one test each.  Every test prints a PASS or FAIL line."""

from __future__ import annotations

import itertools

import pytest

from cubind.checker import check_constrs
from cubind.cli import Session
from cubind.evaluator import EvalConfig, Obs, observe, trace
from cubind.interp import insttm
from cubind.pretty import show_term
from cubind.prelude import NAT, numeral
from cubind.stdlib import CATALOG, STDLIB_FILES, read_file
from cubind.suites import MUTATIONS, boundary_cases, run_suite, stdlib_env, stdlib_term
from cubind.syntax import Intro, instantiate

OPT = EvalConfig(opt_closed=True)


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return emit


def summary(res) -> str:
    out = f"{res.passed} passed, {res.failed} failed"
    if res.failures:
        out += "; first failure: " + res.failures[0]
    return out


# -- 1 -----------------------------------------------------------------------


def test_canonicity(report):
    res = run_suite("canonicity")
    report(1, "canonicity of 200 closed nat and bool terms", res.ok and res.passed == 200, summary(res))


# -- 2 -----------------------------------------------------------------------


def unary(k: int) -> tuple:
    return ("S",) * k


def unary_tree(u: tuple) -> Obs:
    tree = Obs("zero")
    for _ in u:
        tree = Obs("suc", args=(tree,))
    return tree


def unary_add(a: tuple, b: tuple) -> tuple:
    return a + b


def unary_mul(a: tuple, b: tuple) -> tuple:
    out: tuple = ()
    for _ in a:
        out = unary_add(out, b)
    return out


def arithmetic_observations(cfg: EvalConfig) -> tuple[list[str], list[str]]:
    mismatches, seen = [], []
    for op, oracle in (("add", unary_add), ("mul", unary_mul)):
        for m, n in itertools.product(range(6), repeat=2):
            t = stdlib_term("nat.cit", f"{op} {m} {n}")
            got = observe(t, NAT, cfg=cfg)
            seen.append(f"{op} {m} {n} = {got}")
            if got != unary_tree(oracle(unary(m), unary(n))):
                mismatches.append(seen[-1])
    return mismatches, seen


def test_arithmetic_oracle(report):
    mismatches, seen = arithmetic_observations(EvalConfig())
    ok = not mismatches and len(seen) == 72
    report(2, "add and mul agree with a unary oracle on 0..5", ok, f"{len(seen) - len(mismatches)}/72 agree")


# -- 3 -----------------------------------------------------------------------

REQUIRED_FACES = {"circle": 2, "torus": 8, "gtorus": 8, "trunc": 2, "wq": 2, "hs": 2, "loc": 4}


def test_boundary_adherence(report):
    counts = {name: len(boundary_cases(CATALOG[name])) for name in REQUIRED_FACES}
    res = run_suite("boundary")
    ok = res.ok and counts == REQUIRED_FACES
    report(3, "every constructor meets its boundary on every face", ok, summary(res) + f"; faces {counts}")


# -- 4 -----------------------------------------------------------------------


def test_kan_degeneracy(report):
    from cubind.suites import KAN_CORPUS

    res = run_suite("kan")
    ok = res.ok and len(KAN_CORPUS) >= 50
    report(4, f"degenerate Kan operations over {len(KAN_CORPUS)} terms", ok, summary(res))


# -- 5 -----------------------------------------------------------------------


def test_eliminator_beta(report):
    res = run_suite("beta")
    has_refl = any("Idelim" in o for o in res.observations)
    report(5, "eliminators step to the assembled right-hand side", res.ok and has_refl, summary(res))


# -- 6 -----------------------------------------------------------------------


def test_coherence(report):
    from cubind.suites import COHERENCE_CORPUS

    res = run_suite("coherence")
    ok = res.ok and len(COHERENCE_CORPUS) >= 50
    report(6, f"endpoint substitution commutes with evaluation over {len(COHERENCE_CORPUS)} terms", ok, summary(res))


# -- 7 -----------------------------------------------------------------------


def test_mutations(report):
    res = run_suite("mutation")
    kinds = {m.expected for m in MUTATIONS}
    ok = res.ok and len(MUTATIONS) >= 20 and {"Validity", "LabelOrder", "Conversion"} <= kinds
    report(7, f"{len(MUTATIONS)} mutants rejected and {len(STDLIB_FILES)} files accepted", ok, summary(res))


# -- 8 -----------------------------------------------------------------------


def test_validity_brute_force(report):
    res = run_suite("validity")
    report(8, "valid constraint lists cover every endpoint assignment", res.ok, summary(res) + "; " + "; ".join(res.notes))


# -- 9 -----------------------------------------------------------------------


def test_closed_type_optimization(report):
    differing = []
    for name in ("canonicity", "boundary", "kan", "beta", "coherence"):
        plain, fast = run_suite(name), run_suite(name, OPT)
        if not (fast.ok and plain.observations == fast.observations):
            differing.append(name)
    plain_arith, fast_arith = arithmetic_observations(EvalConfig()), arithmetic_observations(OPT)
    if fast_arith[0] or plain_arith[1] != fast_arith[1]:
        differing.append("arithmetic")
    report(9, "suites 1-6 observe the same with trivial closed coercion", not differing, ", ".join(differing))


# -- 10 ----------------------------------------------------------------------

NATREC_TRACE = (
    "scell(0, 1)",
    "natrec 1 spt(0) (a p. p)",
    "natrec 0 spt(0) (a p. p)",
    "spt(0)",
)


def natrec(n: int, zero, succ):
    return zero if n == 0 else succ(n - 1, natrec(n - 1, zero, succ))


def natrec_oracle(n: int) -> str:
    """The ``x=0`` face of ``scell(x, n)``: ``natrec n spt(0) (a p. p)``."""
    return natrec(n, "spt(0)", lambda a, p: p)


def test_natrec_extension(report):
    decl = CATALOG["strict"]
    check_constrs(decl.tele, decl.schema, ("natrec",))
    session = Session(extensions=frozenset({"natrec"}))
    outcomes = session.load(read_file("natrec_ext.cit"), run_directives=True)
    problems = [o.error for o in outcomes if not o.ok]
    face = decl.schema.lookup("scell").boundary[0].body
    for n in range(5):
        intro = Intro(decl.schema, "scell", (0,), (numeral(n),))
        interpreted = insttm(instantiate(face, (numeral(n),)), decl.schema, ())
        got, via_face = str(observe(intro)), str(observe(interpreted))
        if not got == via_face == natrec_oracle(n):
            problems.append(f"scell(0, {n}) gave {got}, face gave {via_face}")
    t = stdlib_term("natrec_ext.cit", "scell(0, 1)")
    lines = tuple(show_term(u, stdlib_env("natrec_ext.cit").types) for u in trace(t, 10).terms)
    if lines != NATREC_TRACE:
        problems.append(f"trace {lines}")
    report(10, "natrec boundaries check, reduce and trace as recorded", not problems, "; ".join(map(str, problems)))
