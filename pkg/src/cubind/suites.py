"""Generated test suites over the standard library.

Each suite returns a :class:`SuiteResult` with pass/fail counts and the list
of observations it made, so two runs (for instance with and without the
closed-type optimization) can be compared observation by observation.

Observational equality of closed or dimension-open values is checked on their
values: constructors must agree label by label, function-valued arguments
are compared at closed sample points of their domain, and formal
compositions or coercions that remain as values compare syntactically (up to
renaming of bound variables) after evaluating everything beneath them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .checker import CheckCtx, Checker
from .elaborate import Env, parse_term
from .evaluator import (
    DEFAULT_CONFIG,
    EvalConfig,
    EvalError,
    EvalStats,
    evaluate,
    observe,
    trace,
    whnf,
)
from .interp import insttm
from .prelude import BOOL, BOOL_SCHEMA, NAT, NAT_SCHEMA, numeral
from .pretty import show_term
from .syntax import (
    UNSAT,
    App,
    ArgPi,
    Coe,
    Com,
    Constraint,
    Dim,
    DimVar,
    Elim,
    ElimCase,
    ElimList,
    Face,
    Fcoe,
    Fcom,
    Fhcom,
    Hcom,
    Ind,
    Intro,
    Lam,
    Pi,
    SelfAt,
    Tcoe,
    Tele,
    Term,
    Var,
    alpha_eq,
    canon,
    constraint_mgu,
    ctx_valid,
    dim_subst,
    instantiate,
    shift,
    substitute,
)

CANONICITY_CASES = 200
CANONICITY_FUEL = 10**5
SUITE_FUEL = 10**6


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)
    observations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    steps: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def record(self, ok: bool, what: str, observation: str = "") -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(what)
        self.observations.append(f"{what} => {observation}")


# ---------------------------------------------------------------------------
# Deep values


def deep_value(t: Term, cfg: EvalConfig = DEFAULT_CONFIG, fuel: int = SUITE_FUEL) -> Term:
    """Evaluate ``t`` and then every subterm that can still compute."""
    v = whnf(t, fuel, cfg)
    match v:
        case Intro():
            return replace(
                v,
                params=tuple(deep_value(p, cfg, fuel) for p in v.params),
                args=tuple(deep_value(a, cfg, fuel) for a in v.args),
            )
        case Fhcom():
            return Fhcom(
                v.src,
                v.dst,
                deep_value(v.cap, cfg, fuel),
                tuple(Face(f.constraint, f.var, deep_value(f.body, cfg, fuel)) for f in v.tube),
            )
        case Fcoe():
            return replace(v, body=deep_value(v.body, cfg, fuel))
        case Lam():
            return Lam(v.name, deep_value(v.body, cfg, fuel))
    return v


def show_value(v: Term) -> str:
    try:
        return show_term(v)
    except Exception:  # printing is a convenience for reports
        return repr(v)


# ---------------------------------------------------------------------------
# Closed samples

SAMPLE_DEPTH = 2
MAX_SAMPLES = 6


def closed_samples(ty: Term, depth: int = SAMPLE_DEPTH, cfg: EvalConfig = DEFAULT_CONFIG) -> list[Term]:
    """A few closed elements of ``ty``, built from constructors without dimensions.

    Empty types have none; function types have none either, since the samples
    only serve as points at which to observe functions.
    """
    v = whnf(ty, SUITE_FUEL, cfg)
    if not isinstance(v, Ind):
        return []
    if v.schema == NAT_SCHEMA:
        return [numeral(k) for k in range(3)]
    out: list[Term] = []
    for label, ctor in v.schema.ctors:
        if ctor.dims:
            continue
        for params in _param_choices(ctor.params.entries, depth, cfg):
            args = []
            for j, a in enumerate(ctor.args):
                choices = arg_samples(instantiate(a.type, params), v, depth - 1, cfg)
                if not choices:
                    break
                args.append(choices[j % len(choices)])
            else:
                out.append(Intro(v.schema, label, (), params, tuple(args)))
            if len(out) >= MAX_SAMPLES:
                return out
    return out


def _param_choices(entries, depth: int, cfg: EvalConfig) -> list[tuple[Term, ...]]:
    combos: list[tuple[Term, ...]] = [()]
    for b in entries:
        nxt = []
        for prefix in combos:
            for s in closed_samples(instantiate(b.type, prefix), depth, cfg)[:3]:
                nxt.append(prefix + (s,))
        combos = nxt[:MAX_SAMPLES]
    return combos


def arg_samples(t, family: Ind, depth: int, cfg: EvalConfig = DEFAULT_CONFIG) -> list[Term]:
    """Closed values for a recursive argument of type ``t`` over ``family``."""
    if isinstance(t, SelfAt):
        if depth < 0:
            return []
        return closed_samples(Ind(family.tele, family.schema, t.indices), depth, cfg)
    assert isinstance(t, ArgPi)
    if not closed_samples(t.dom, depth, cfg):
        target = Ind(family.tele, family.schema, ())
        return [Lam(t.name, Elim(("h",), shift(target, 2), (), Var(0, t.name), ElimList(())))]
    return [Lam(t.name, shift(s, 1)) for s in arg_samples(t.cod, family, depth, cfg)]


# ---------------------------------------------------------------------------
# Observational equality


def observationally_equal(a: Term, b: Term, cfg: EvalConfig = DEFAULT_CONFIG) -> tuple[bool, str, str]:
    """Compare two closed (or dimension-open) inductive values by their observations."""
    oa, ob = observation(a, cfg), observation(b, cfg)
    return oa == ob, render_observation(oa), render_observation(ob)


def observation(t: Term, cfg: EvalConfig = DEFAULT_CONFIG) -> tuple:
    """The observation tree of an inductive value.

    Constructors are recorded with their dimensions, parameters and recursive
    arguments; function-valued components are recorded by their observations
    at every closed sample of the domain (none for an empty domain).  Values
    that are not constructors are recorded as their deep value, up to renaming
    of bound variables.
    """
    v = whnf(t, SUITE_FUEL, cfg)
    if not isinstance(v, Intro):
        return ("value", canon(deep_value(v, cfg)))
    ctor = v.schema.lookup(v.label).open(v.dims)
    params = tuple(
        _observe_at(p, instantiate(ctor.params.entries[i].type, v.params[:i]), cfg) for i, p in enumerate(v.params)
    )
    args = tuple(_observe_arg(n, instantiate(d.type, v.params), cfg) for d, n in zip(ctor.args, v.args))
    return ("intro", v.label, v.dims, params, args)


def _observe_at(t: Term, ty: Term, cfg: EvalConfig) -> tuple:
    pi = whnf(ty, SUITE_FUEL, cfg)
    if isinstance(pi, Pi):
        points = closed_samples(pi.dom, cfg=cfg)
        return ("fn", tuple((canon(s), _observe_at(App(t, s), instantiate(pi.cod, (s,)), cfg)) for s in points))
    return observation(t, cfg)


def _observe_arg(t: Term, ty, cfg: EvalConfig) -> tuple:
    if isinstance(ty, SelfAt):
        return observation(t, cfg)
    points = closed_samples(ty.dom, cfg=cfg)
    return ("fn", tuple((canon(s), _observe_arg(App(t, s), instantiate(ty.cod, (s,)), cfg)) for s in points))


def render_observation(o: tuple) -> str:
    match o:
        case ("value", v):
            return show_value(v)
        case ("fn", pairs):
            return "{" + ", ".join(f"{show_value(s)} |-> {render_observation(r)}" for s, r in pairs) + "}"
        case ("intro", label, dims, params, args):
            parts = [str(d) for d in dims] + [render_observation(x) for x in params + args]
            n = read_numeral_obs(o)
            if n is not None:
                return str(n)
            return f"{label}({', '.join(parts)})" if parts else label
    raise ValueError(f"not an observation: {o!r}")


def read_numeral_obs(o: tuple) -> Optional[int]:
    k = 0
    while o[0] == "intro" and o[1] == "suc" and len(o[4]) == 1:
        k, o = k + 1, o[4][0]
    if o[0] == "intro" and o[1] == "zero" and not o[4]:
        return k
    return None


# ---------------------------------------------------------------------------
# Stdlib environments

_ENV_CACHE: dict[str, Env] = {}


def stdlib_env(name: str) -> Env:
    from .stdlib import env_for

    if name not in _ENV_CACHE:
        _ENV_CACHE[name] = env_for(name)
    return _ENV_CACHE[name]


def stdlib_term(file: str, src: str, free_dims: bool = False) -> Term:
    return parse_term(src, stdlib_env(file), free_dims=free_dims)


# ---------------------------------------------------------------------------
# Canonicity

_DIMS = (0, 1)


def _closed_type(kind: str) -> Ind:
    return NAT if kind == "nat" else BOOL


class TermGenerator:
    """Random closed terms of ``nat`` or ``bool`` built from every former that can
    appear in a closed program: constructors, homogeneous composition with equal
    endpoints or constantly satisfied tubes, coercion, formal composition,
    and elimination."""

    def __init__(self, seed: int = 0, max_depth: int = 4) -> None:
        self.rng = random.Random(seed)
        self.max_depth = max_depth

    def dim(self) -> Dim:
        return self.rng.choice(_DIMS)

    def leaf(self, kind: str) -> Term:
        if kind == "nat":
            return numeral(self.rng.randrange(4))
        return Intro(BOOL_SCHEMA, self.rng.choice(("tt", "ff")))

    def tube(self, kind: str, src: Dim, cap: Term, depth: int) -> tuple[Face, ...]:
        """A tube whose only satisfiable face is constant, plus a vacuous face."""
        e = self.rng.choice(_DIMS)
        y = "y"
        body = Coe("z", _closed_type(kind), src, DimVar(y), cap)
        live = Face(Constraint(e, e), y, body)
        junk = Face(Constraint(0, 1), y, self.gen(kind, depth - 1))
        return (junk, live) if self.rng.random() < 0.5 else (live,)

    def gen(self, kind: str, depth: Optional[int] = None) -> Term:
        depth = self.max_depth if depth is None else depth
        if depth <= 0:
            return self.leaf(kind)
        ty = _closed_type(kind)
        d = depth - 1
        form = self.rng.choice(("intro", "hcom-eq", "hcom-tube", "coe", "elim", "fcom", "fhcom"))
        r, r2 = self.dim(), self.dim()
        match form:
            case "intro":
                if kind == "nat":
                    return Intro(NAT_SCHEMA, "suc", (), (), (self.gen("nat", d),))
                return self.leaf(kind)
            case "hcom-eq":
                cap = self.gen(kind, d)
                return Hcom(ty, r, r, cap, self.tube(kind, r, cap, d))
            case "hcom-tube":
                cap = self.gen(kind, d)
                return Hcom(ty, r, r2, cap, self.tube(kind, r, cap, d))
            case "coe":
                return Coe("z", ty, r, r2, self.gen(kind, d))
            case "fcom":
                cap = self.gen(kind, d)
                return Fcom("z", (), r, r2, cap, self.tube(kind, r, cap, d))
            case "fhcom":
                cap = self.gen(kind, d)
                return Fhcom(r, r2, cap, self.tube(kind, r, cap, d))
            case _:
                return self.elim(kind, d)

    def elim(self, kind: str, depth: int) -> Term:
        scrut_kind = self.rng.choice(("nat", "bool"))
        scrut = self.gen(scrut_kind, depth)
        motive = _closed_type(kind)
        if scrut_kind == "nat":
            choices = [self.gen(kind, depth - 1), Var(0, "r")]
            if kind == "nat":
                choices += [Var(1, "k"), Intro(NAT_SCHEMA, "suc", (), (), (Var(0, "r"),))]
            cases = ElimList(
                (
                    ("zero", ElimCase((), (), (), (), self.gen(kind, depth - 1))),
                    ("suc", ElimCase((), (), ("k",), ("r",), self.rng.choice(choices))),
                )
            )
        else:
            cases = ElimList(
                (
                    ("tt", ElimCase((), (), (), (), self.gen(kind, depth - 1))),
                    ("ff", ElimCase((), (), (), (), self.gen(kind, depth - 1))),
                )
            )
        return Elim(("h",), shift(motive, 1), (), scrut, cases)


def canonicity(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0, count: int = CANONICITY_CASES) -> SuiteResult:
    res = SuiteResult("canonicity")
    gen = TermGenerator(seed)
    checker = Checker()
    for i in range(count):
        kind = "nat" if i % 2 == 0 else "bool"
        t = gen.gen(kind)
        label = f"#{i} {kind}"
        try:
            checker.check(CheckCtx(), t, _closed_type(kind))
        except Exception as exc:  # a generator bug, reported as a failure
            res.record(False, f"{label}: ill-typed ({exc})")
            continue
        stats = EvalStats()
        try:
            v = evaluate(t, CANONICITY_FUEL, cfg, stats)
        except EvalError as exc:
            res.record(False, f"{label}: {type(exc).__name__}")
            continue
        res.steps += stats.steps
        ok = (
            isinstance(v, Intro)
            and not v.schema.lookup(v.label).boundary
            and not v.schema.lookup(v.label).dims
        )
        try:
            observe(v, _closed_type(kind), strict=True, fuel=CANONICITY_FUEL, cfg=cfg)
        except EvalError:
            ok = False
        res.record(ok, label, render_observation(observation(v, cfg)))
    return res


# ---------------------------------------------------------------------------
# Kan degeneracy

KAN_CORPUS: tuple[tuple[str, str, str], ...] = (
    ("nat.cit", "0", "nat"),
    ("nat.cit", "3", "nat"),
    ("nat.cit", "add 2 3", "nat"),
    ("nat.cit", "mul 2 2", "nat"),
    ("nat.cit", "pred 4", "nat"),
    ("nat.cit", "double 2", "nat"),
    ("nat.cit", "hcom {nat} 0~>1 2 [0=0 -> y. 2]", "nat"),
    ("nat.cit", "coe {z. nat} 0~>1 4", "nat"),
    ("bool.cit", "tt", "bool"),
    ("bool.cit", "ff", "bool"),
    ("bool.cit", "not tt", "bool"),
    ("bool.cit", "and tt ff", "bool"),
    ("bool.cit", "is_zero 0", "bool"),
    ("circle.cit", "base", "circle"),
    ("circle.cit", "lp(0)", "circle"),
    ("circle.cit", "lp(1)", "circle"),
    ("circle.cit", "hcom {circle} 0~>1 base [1=1 -> y. lp(y)]", "circle"),
    ("circle.cit", "fhcom 0~>1 base [0=0 -> y. lp(y)]", "circle"),
    ("torus.cit", "base", "torus"),
    ("torus.cit", "surf(0, 1)", "torus"),
    ("torus.cit", "lpa(1)", "torus"),
    ("torus.cit", "lpb(0)", "torus"),
    ("torus_globular.cit", "base", "gtorus"),
    ("torus_globular.cit", "surf(1, 0)", "gtorus"),
    ("torus_globular.cit", "lpa(0)", "gtorus"),
    ("sphere2.cit", "base2", "sphere2"),
    ("sphere2.cit", "surf2(0, 0)", "sphere2"),
    ("w.cit", "wsup(3, \\b. elim [h. wnat] b { })", "wnat"),
    ("w.cit", "wsup(0, \\b. elim [h. wnat] b { })", "wnat"),
    ("wq.cit", "wqsup(1, wq_empty)", "wq"),
    ("wq.cit", "wqcell(0, 2, wq_empty, wq_empty)", "wq"),
    ("wq.cit", "wqcell(1, 2, wq_empty, wq_empty)", "wq"),
    ("trunc.cit", "trpt(1)", "trunc"),
    ("trunc.cit", "trglue(0, trpt(1), trpt(2))", "trunc"),
    ("trunc.cit", "trglue(1, trpt(1), trpt(2))", "trunc"),
    ("trunc.cit", "trunc_map trpt(4)", "trunc"),
    ("hubspokes.cit", "hpt(2)", "hs"),
    ("hubspokes.cit", "hub(\\c. hpt(1))", "hs"),
    ("hubspokes.cit", "spoke(0, base, \\c. hpt(4))", "hs"),
    ("hubspokes.cit", "spoke(1, base, \\c. hpt(4))", "hs"),
    ("hubspokes.cit", "hs_map hpt(0)", "hs"),
    ("loc.cit", "inl(1)", "loc"),
    ("loc.cit", "ext(tt, 2, \\n. inl(n))", "loc"),
    ("loc.cit", "rtr(0, tt, 2, \\n. inl(n))", "loc"),
    ("loc.cit", "rtr(1, ff, 2, \\n. inl(n))", "loc"),
    ("loc.cit", "rtr'(1, tt, 3, \\n. inl(n))", "loc"),
    ("id.cit", "refl(2)", "Id(2, 2)"),
    ("id.cit", "id_sym 2 2 refl(2)", "Id(2, 2)"),
    ("natrec_ext.cit", "spt(1)", "strict"),
    ("natrec_ext.cit", "scell(0, 2)", "strict"),
    ("natrec_ext.cit", "scell(1, 2)", "strict"),
)


def kan_forms(m: Term, ty: Ind, r: Dim) -> list[tuple[str, Term]]:
    """Every Kan operation at ``ty`` with equal endpoints ``r``, applied to ``m``."""
    tube = (Face(Constraint(0, 0), "y", m),)
    line = ty.indices
    return [
        ("hcom", Hcom(ty, r, r, m, tube)),
        ("fhcom", Fhcom(r, r, m, tube)),
        ("com", Com("z", ty, r, r, m, tube)),
        ("fcom", Fcom("z", line, r, r, m, tube)),
        ("coe", Coe("z", ty, r, r, m)),
        ("fcoe", Fcoe("z", line, r, r, m)),
        ("tcoe", Tcoe("z", ty.tele, ty.schema, r, r, m)),
    ]


def kan(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    res = SuiteResult("kan")
    for file, src, ty_src in KAN_CORPUS:
        m = stdlib_term(file, src)
        ty = stdlib_term(file, ty_src)
        for r in _DIMS:
            for name, t in kan_forms(m, ty, r):
                what = f"{name} {r}~>{r} [{src}]"
                try:
                    ok, got, want = observationally_equal(t, m, cfg)
                except EvalError as exc:
                    res.record(False, f"{what}: {exc}")
                    continue
                res.record(ok, what if ok else f"{what}: {got} vs {want}", got)
    return res


# ---------------------------------------------------------------------------
# Coherence of one-dimensional terms

COHERENCE_CORPUS: tuple[tuple[str, str], ...] = (
    ("circle.cit", "lp(x)"),
    ("circle.cit", "winding_const lp(x)"),
    ("circle.cit", "to_bool lp(x)"),
    ("circle.cit", "fhcom 0~>1 base [x=0 -> y. lp(y) | x=1 -> y. base]"),
    ("circle.cit", "hcom {circle} 0~>1 lp(x) [x=0 -> y. lp(y) | x=1 -> y. base]"),
    ("circle.cit", "coe {z. circle} 0~>1 lp(x)"),
    ("circle.cit", "coe {z. circle} x~>1 base"),
    ("circle.cit", "coe {z. nat} 0~>x 3"),
    ("circle.cit", "coe {z. nat} x~>1 2"),
    ("circle.cit", "hcom {nat} x~>1 2 [x=0 -> y. 2 | x=1 -> y. 2]"),
    ("circle.cit", "com {z. nat} 0~>x 1 [x=0 -> y. 1 | x=1 -> y. 1]"),
    ("circle.cit", "elim [h. nat] lp(x) { base -> 3 | lp(y) -> hcom {nat} 0~>1 3 [y=0 -> z. 3 | y=1 -> z. 3] }"),
    ("circle.cit", "coe {z. bool} x~>0 tt"),
    ("nat.cit", "add (coe {z. nat} 0~>x 2) 3"),
    ("nat.cit", "mul 2 (coe {z. nat} x~>0 3)"),
    ("nat.cit", "pred (hcom {nat} 0~>x 4 [x=0 -> y. 4 | x=1 -> y. 4])"),
    ("nat.cit", "double (coe {z. nat} x~>1 1)"),
    ("torus.cit", "surf(x, 0)"),
    ("torus.cit", "surf(0, x)"),
    ("torus.cit", "surf(x, 1)"),
    ("torus.cit", "surf(1, x)"),
    ("torus.cit", "surf(x, x)"),
    ("torus.cit", "lpa(x)"),
    ("torus.cit", "lpb(x)"),
    ("torus.cit", "torus_count surf(x, x)"),
    ("torus.cit", "coe {z. torus} 0~>x surf(x, x)"),
    ("torus_globular.cit", "surf(x, 0)"),
    ("torus_globular.cit", "surf(x, 1)"),
    ("torus_globular.cit", "surf(0, x)"),
    ("torus_globular.cit", "surf(x, x)"),
    ("torus_globular.cit", "gtorus_count surf(x, 0)"),
    ("torus_globular.cit", "gtorus_count surf(x, x)"),
    ("sphere2.cit", "surf2(x, 0)"),
    ("sphere2.cit", "surf2(x, x)"),
    ("sphere2.cit", "sphere2_const surf2(x, x)"),
    ("trunc.cit", "trglue(x, trpt(1), trpt(2))"),
    ("trunc.cit", "trunc_map trglue(x, trpt(0), trpt(5))"),
    ("trunc.cit", "trglue(x, trglue(x, trpt(1), trpt(2)), trpt(3))"),
    ("hubspokes.cit", "spoke(x, base, \\c. hpt(4))"),
    ("hubspokes.cit", "hs_map spoke(x, base, \\c. hpt(1))"),
    ("hubspokes.cit", "spoke(x, lp(x), \\c. hpt(2))"),
    ("wq.cit", "wqcell(x, 2, wq_empty, wq_empty)"),
    ("wq.cit", "wq_trivial wqcell(x, 1, wq_empty, wq_empty)"),
    ("loc.cit", "rtr(x, tt, 2, \\n. inl(n))"),
    ("loc.cit", "rtr'(x, ff, 3, \\n. inl(n))"),
    ("loc.cit", "loc_map rtr(x, tt, 1, \\n. inl(n))"),
    ("loc.cit", "loc_map rtr'(x, tt, 1, \\n. inl(n))"),
    ("natrec_ext.cit", "scell(x, 2)"),
    ("natrec_ext.cit", "scell(x, 0)"),
    ("id_paths.cit", "id_to_path 3 3 refl(3) @ x"),
)


def coherence(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    """Substituting an endpoint before or after evaluating gives the same value."""
    res = SuiteResult("coherence")
    for file, src in COHERENCE_CORPUS:
        m = stdlib_term(file, src, free_dims=True)
        for e in _DIMS:
            what = f"{src} at x={e}"
            try:
                first = dim_subst(m, {"x": e})
                later = dim_subst(evaluate(m, SUITE_FUEL, cfg), {"x": e})
                ok, got, want = observationally_equal(first, later, cfg)
            except EvalError as exc:
                res.record(False, f"{what}: {exc}")
                continue
            res.record(ok, what if ok else f"{what}: {got} vs {want}", got)
    return res


# ---------------------------------------------------------------------------
# Boundary adherence


def constructor_instance(family: Ind, ctor) -> tuple[tuple[Term, ...], tuple[Term, ...]]:
    """Closed parameters and recursive arguments for ``ctor``, distinct where possible."""
    choices = _param_choices(ctor.params.entries, SAMPLE_DEPTH, DEFAULT_CONFIG)
    if not choices:
        raise ValueError("no closed parameters for constructor")
    params = choices[min(1, len(choices) - 1)]
    args = []
    for j, a in enumerate(ctor.args):
        samples = arg_samples(instantiate(a.type, params), family, SAMPLE_DEPTH - 1)
        if not samples:
            raise ValueError("no closed recursive argument for constructor")
        args.append(samples[j % len(samples)])
    return params, tuple(args)


def boundary_cases(decl) -> list[tuple[str, Term, Term]]:
    """For every boundary face: the constructor under the face's unifier and the interpreted face."""
    out = []
    ty = Ind(decl.tele, decl.schema, ())
    for label, ctor in decl.schema.ctors:
        for k, face in enumerate(ctor.boundary):
            psi = constraint_mgu(face.constraint, ctor.dims)
            if psi is UNSAT:
                continue
            dims = tuple(psi.get(x, DimVar(x)) for x in ctor.dims)
            params, args = constructor_instance(ty, ctor)
            intro = Intro(decl.schema, label, dims, params, args)
            opened = ctor.open(dims)
            body = instantiate(opened.boundary[k].body, params)
            out.append((f"{decl.name}.{label} face {k}", intro, insttm(body, decl.schema, args)))
    return out


def boundary(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    """Each constructor agrees with its boundary wherever a face holds."""
    from .stdlib import CATALOG

    res = SuiteResult("boundary")
    for decl in CATALOG.values():
        if decl.tele.entries:
            continue
        for what, intro, expected in boundary_cases(decl):
            try:
                ok, got, want = observationally_equal(intro, expected, cfg)
            except EvalError as exc:
                res.record(False, f"{what}: {exc}")
                continue
            res.record(ok, what if ok else f"{what}: {got} vs {want}", got)
    return res


# ---------------------------------------------------------------------------
# Eliminator beta


def expected_elim_step(elim: Elim) -> Term:
    """The right-hand side of eliminating a constructor, assembled directly.

    Each recursive argument ``η`` becomes the recursive result ``elim(η)``,
    or ``λb. elim(η b)`` for a function argument.
    """
    intro = elim.scrut
    assert isinstance(intro, Intro)
    ctor = intro.schema.lookup(intro.label).open(intro.dims)
    case = elim.cases.lookup(intro.label)
    n = len(elim.names) - 1
    rhos = []
    for decl, eta in zip(ctor.args, intro.args):
        t = instantiate(decl.type, intro.params)
        if isinstance(t, SelfAt):
            rhos.append(Elim(elim.names, elim.motive, t.indices, eta, elim.cases))
        else:
            inner = t.cod
            assert isinstance(inner, SelfAt), "stdlib recursive arguments are at most one arrow deep"
            body = Elim(
                elim.names,
                shift(elim.motive, 1, n + 1),
                inner.indices,
                App(shift(eta, 1), Var(0, t.name)),
                shift(elim.cases, 1),
            )
            rhos.append(Lam(t.name, body))
    psi = dict(zip(case.dims, intro.dims))
    return substitute(case.body, tuple(intro.params) + tuple(intro.args) + tuple(rhos), psi)


def constructor_forms(decl) -> list[Intro]:
    """One generic instance of every constructor, with its dimensions left free."""
    ty = Ind(decl.tele, decl.schema, ())
    out = []
    for label, ctor in decl.schema.ctors:
        params, args = constructor_instance(ty, ctor)
        out.append(Intro(decl.schema, label, tuple(DimVar(x) for x in ctor.dims), params, args))
    return out


def beta(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    """The identity eliminator of every non-indexed stdlib type takes one step
    to the assembled right-hand side, which rebuilds the constructor."""
    from .stdlib import CATALOG, derive_eliminator, identity_cases, identity_motive

    res = SuiteResult("beta")
    for decl in CATALOG.values():
        if decl.tele.entries:
            continue
        names, motive = identity_motive(decl)
        cases = identity_cases(decl)
        for intro in constructor_forms(decl):
            e = derive_eliminator(decl, names, motive, cases, intro)
            what = f"{decl.name}.{intro.label}"
            tr = trace(e, 1, cfg)
            stepped = len(tr.rules) == 1 and tr.rules[0] == "elim-intro"
            syntactic = stepped and alpha_eq(tr.terms[1], expected_elim_step(e))
            ok, got, want = observationally_equal(e, intro, cfg)
            res.record(syntactic and ok, what if syntactic and ok else f"{what}: {got} vs {want}", got)
    for what, e, expected in special_eliminators():
        tr = trace(e, 1, cfg)
        syntactic = tr.rules[:1] == ("elim-intro",) and alpha_eq(tr.terms[1], expected_elim_step(e))
        ok, got, want = observationally_equal(e, expected, cfg)
        res.record(syntactic and ok, what if syntactic and ok else f"{what}: {got} vs {want}", got)
    return res


def special_eliminators() -> list[tuple[str, Elim, Term]]:
    """``welim`` and ``Idelim`` on canonical arguments with their expected results."""
    from .prelude import EMPTY
    from .stdlib import identity, idelim, w_type, welim

    out = []
    _, wschema = w_type(NAT, EMPTY)
    no_branches = Lam("b", Elim(("h",), Ind(Tele(), wschema, ()), (), Var(0, "b"), ElimList(())))
    label_case = ElimCase((), ("a",), ("g",), ("r",), Var(2, "a"))
    for k in range(3):
        scrut = Intro(wschema, "wsup", (), (numeral(k),), (no_branches,))
        out.append((f"welim wsup({k})", welim(NAT, EMPTY, NAT, label_case, scrut), numeral(k)))
    _, id_schema = identity(NAT)
    for k in range(3):
        m = numeral(k)
        refl = Intro(id_schema, "refl", (), (m,), ())
        body = Intro(NAT_SCHEMA, "suc", (), (), (Var(0, "a"),))
        e = idelim(NAT, ("a", "b", "q"), NAT, m, m, refl, body)
        out.append((f"Idelim refl({k})", e, instantiate(body, (m,))))
    return out


# ---------------------------------------------------------------------------
# Validity brute force


def _all_constraints(names: tuple[str, ...]) -> list[Constraint]:
    dims: list[Dim] = [0, 1] + [DimVar(n) for n in names]
    return [Constraint(a, b) for a, b in itertools.combinations_with_replacement(dims, 2)]


def satisfied_everywhere(cs, names) -> bool:
    """Every endpoint assignment satisfies some constraint."""
    for values in itertools.product((0, 1), repeat=len(names)):
        psi = dict(zip(names, values))
        if not any(dim_subst_dim(c.lhs, psi) == dim_subst_dim(c.rhs, psi) for c in cs):
            return False
    return True


def dim_subst_dim(r: Dim, psi: dict) -> Dim:
    return psi.get(r.name, r) if isinstance(r, DimVar) else r


def validity(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0, max_vars: int = 3, max_constraints: int = 4) -> SuiteResult:
    """Every constraint list accepted as valid covers all endpoint assignments.

    Lists that cover every assignment but are rejected are counted in
    ``notes`` (the check is deliberately conservative) and do not fail.
    """
    res = SuiteResult("validity")
    names = tuple(f"v{i}" for i in range(max_vars))
    pool = _all_constraints(names)
    conservative = 0
    for k in range(1, max_constraints + 1):
        for cs in itertools.combinations(pool, k):
            valid = ctx_valid(cs)
            brute = satisfied_everywhere(cs, names)
            if valid:
                res.record(brute, f"{cs}", "valid")
            elif brute:
                conservative += 1
            else:
                res.passed += 1
    res.notes.append(f"{conservative} covering lists rejected conservatively")
    return res


# ---------------------------------------------------------------------------
# Mutations


@dataclass(frozen=True)
class Mutation:
    name: str
    file: str
    old: str
    new: str
    expected: str
    extensions: Optional[frozenset] = None


MUTATIONS: tuple[Mutation, ...] = (
    Mutation("missing endpoint face", "torus.cit", "lpa(x) [x=0 -> base | x=1 -> base]", "lpa(x) [x=0 -> base]", "Validity"),
    Mutation(
        "invalid square boundary",
        "sphere2.cit",
        "[x=0 -> base2 | x=1 -> base2 | y=0 -> base2 | y=1 -> base2]",
        "[x=0 -> base2 | y=0 -> base2]",
        "Validity",
    ),
    Mutation(
        "invalid composition tube",
        "torus_globular.cit",
        "fhcom 0~>1 lpa(x) [x=0 -> z. base | x=1 -> z. lpb(z)]",
        "fhcom 0~>1 lpa(x) [x=0 -> z. base]",
        "Validity",
    ),
    Mutation("forward label", "torus.cit", "lpa(x) [x=0 -> base |", "lpa(x) [x=0 -> lpb(x) |", "LabelOrder"),
    Mutation("self reference", "sphere2.cit", "y=1 -> base2]", "y=1 -> surf2(0, 0)]", "LabelOrder"),
    Mutation("duplicate label", "sphere2.cit", "base2\n  | surf2(x, y) [", "base2\n  | base2\n  | surf2(x, y) [", "LabelOrder"),
    Mutation(
        "cases out of order",
        "torus.cit",
        "lpa(x) -> 0 | lpb(y) -> 0",
        "lpb(y) -> 0 | lpa(x) -> 0",
        "LabelOrder",
    ),
    Mutation("missing case", "sphere2.cit", "base2 -> 0 | surf2(x, y) -> 0 }", "base2 -> 0 }", "Arity"),
    Mutation("case binds too few arguments", "w.cit", "wsup(a, g; r) -> a", "wsup(a; r) -> a", "Arity"),
    Mutation("index count", "id.cit", "refl(u : nat) : self(u, u)", "refl(u : nat) : self(u)", "Arity"),
    Mutation("wrong eliminator index", "id.cit", "elim [a b q. nat] m n p", "elim [a b q. nat] m m p", "Conversion"),
    Mutation("wrong constructor index", "id.cit", "refl(u) -> refl(u) }", "refl(u) -> refl(0) }", "Conversion"),
    Mutation("circle case off its endpoints", "circle.cit", "lp(x) -> 0 }", "lp(x) -> 1 }", "Conversion"),
    Mutation(
        "swapped recursive results",
        "trunc.cit",
        "trglue(x, r0, r1) }",
        "trglue(x, r1, r0) }",
        "Conversion",
    ),
    Mutation(
        "spoke case ignores its far end",
        "hubspokes.cit",
        "spoke(x, s, f; r) -> spoke(x, s, \\c. r c)",
        "spoke(x, s, f; r) -> hub(\\c. r c)",
        "Conversion",
    ),
    Mutation(
        "globular surface case not composed",
        "torus_globular.cit",
        "surf(x, y) -> hcom {nat} 0~>1 0 [x=0 -> z. 0 | x=1 -> z. 0]",
        "surf(x, y) -> 0",
        "Conversion",
    ),
    Mutation("function where a point is expected", "hubspokes.cit", "x=1 -> f s]", "x=1 -> f]", "Conversion"),
    Mutation("parameter of the wrong type", "wq.cit", "wqsup(suc(c), g1)", "wqsup(tt, g1)", "Conversion"),
    Mutation("boundary argument of the wrong type", "loc.cit", "x=0 -> h t", "x=0 -> h i", "Conversion"),
    Mutation(
        "overlapping faces disagree",
        "hubspokes.cit",
        "x=1 -> f s]",
        "x=1 -> f s | x=1 -> hub(f)]",
        "Conversion",
    ),
    Mutation("unbound dimension in boundary", "trunc.cit", "x=1 -> t1]", "x=1 -> t1 | y=0 -> t0]", "Scope"),
    Mutation("motive binds too few variables", "id.cit", "elim [a b q. nat] m n p", "elim [a q. nat] m n p", "Arity"),
    Mutation("natrec without the extension", "natrec_ext.cit", "", "", "Unsupported", frozenset()),
    Mutation("paths without the extension", "id_paths.cit", "", "", "Unsupported", frozenset()),
)


def apply_mutation(m: Mutation, text: str) -> str:
    if not m.old:
        return text
    if text.count(m.old) != 1:
        raise ValueError(f"mutation {m.name!r}: {m.old!r} occurs {text.count(m.old)} times in {m.file}")
    return text.replace(m.old, m.new)


def check_source(text: str, extensions: frozenset, cfg: EvalConfig = DEFAULT_CONFIG):
    """Check a whole file, returning its outcomes."""
    from .cli import Session

    session = Session(extensions=extensions, cfg=cfg, source="<mutant>")
    return session.load(text, run_directives=True)


def mutation(cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    """Every shipped file is accepted and every single-point mutant is rejected."""
    from .stdlib import STDLIB_FILES, read_file

    res = SuiteResult("mutation")
    for file, exts in STDLIB_FILES.items():
        outcomes = check_source(read_file(file), exts, cfg)
        bad = [o for o in outcomes if not o.ok]
        res.record(not bad, f"accept {file}" + (f": {bad[0].error}" if bad else ""), "accepted" if not bad else "rejected")
    for m in MUTATIONS:
        exts = STDLIB_FILES[m.file] if m.extensions is None else m.extensions
        text = apply_mutation(m, read_file(m.file))
        outcomes = check_source(text, exts, cfg)
        first = next((o for o in outcomes if not o.ok), None)
        if first is None:
            res.record(False, f"{m.name}: accepted")
            continue
        ok = first.kind == m.expected
        res.record(ok, m.name if ok else f"{m.name}: {first.kind} ({first.error})", first.kind or "")
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "canonicity": canonicity,
    "kan": kan,
    "coherence": coherence,
    "boundary": boundary,
    "beta": beta,
    "mutation": mutation,
    "validity": validity,
}


def run_suite(name: str, cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> SuiteResult:
    return SUITES[name](cfg, seed=seed)
