"""Deterministic small-step evaluation.

:func:`step` performs exactly one reduction and reports which rule fired.
Congruence rules descend into the principal argument of eager formers
(application heads, Kan type annotations, the scrutinee of ``tcoe``, ``elim``
and ``natrec``).  Everything else is driven by the head former.

Kan operations at function and path types are the standard ones:

* ``hcom{Π a:A.B} r r' M [ξ -> y.N]`` steps to ``λa. hcom{B} r r' (M a) [ξ -> y.N a]``;
* ``coe{z.Π a:A.B} r r' M`` steps to
  ``λa. coe{z.B[coe{z.A} r' z a / a]} r r' (M (coe{z.A} r' r a))``;
* ``hcom{path z.A P0 P1} r r' M [...]`` steps to a path abstraction whose body
  composes the applied tube with the two endpoints as extra faces;
* ``coe{z.path y.A P0 P1} r r' M`` steps to ``<w> com{z.A<w/y>} r r' (M @ w) [w=0 -> z.P0 | w=1 -> z.P1]``.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Union

from .interp import (
    case_body,
    elim_family,
    func_action,
    ind_family,
    insttm,
    mcoe,
    tyatty,
)
from .prelude import NAT_SCHEMA, nat_intro_kind
from .syntax import (
    App,
    Coe,
    Com,
    Constraint,
    Dim,
    DimVar,
    Elim,
    Face,
    Fcoe,
    Fcom,
    Fhcom,
    Hcom,
    Ind,
    Intro,
    Lam,
    NatRec,
    Node,
    PApp,
    PathTy,
    Pi,
    PLam,
    SelfAt,
    Tcoe,
    Term,
    Var,
    constraint_satisfied,
    dim_subst,
    fresh_dim,
    instantiate,
    shift,
)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

DEFAULT_FUEL = 10**6
FUEL_ENV = "CUBIND_FUEL"


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation switches.

    ``opt_closed`` makes coercion trivial at closed inductive types and
    composition trivial at closed zero-dimensional ones.
    """

    opt_closed: bool = False


DEFAULT_CONFIG = EvalConfig()


# ---------------------------------------------------------------------------
# Step results


class IsValue:
    _instance: Optional[IsValue] = None

    def __new__(cls) -> IsValue:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "IsValue"


IS_VALUE = IsValue()


@dataclass(frozen=True)
class Steps:
    next: Term
    rule: str


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Union[IsValue, Steps, Stuck]


class EvalError(Exception):
    """Base class of evaluation failures."""


class FuelExhausted(EvalError):
    def __init__(self, steps: int, term: Term) -> None:
        super().__init__(f"fuel exhausted after {steps} steps")
        self.steps = steps
        self.term = term


class StuckTerm(EvalError):
    def __init__(self, reason: str, term: Term, steps: int = 0) -> None:
        super().__init__(f"stuck: {reason}")
        self.reason = reason
        self.term = term
        self.steps = steps


class NotObservable(EvalError):
    """Raised when a value cannot be read back as a first-order tree."""


# ---------------------------------------------------------------------------
# Closed types


def is_closed_type(a: Term) -> bool:
    """No parameters, no indices, no free term or dimension variables."""
    return isinstance(a, Ind) and not a.tele.entries and not a.indices and a.fvb == 0 and not a.free_dims


def is_discrete_type(a: Term) -> bool:
    """Closed, no dimension parameters anywhere and only plain recursive arguments.

    Every constructor parameter must itself have a discrete type, so that the
    whole type is zero-dimensional.
    """
    if not is_closed_type(a):
        return False
    for _, ctor in a.schema.ctors:
        if ctor.dims or ctor.boundary:
            return False
        for arg in ctor.args:
            if not isinstance(arg.type, SelfAt) or arg.type.indices:
                return False
        for i, b in enumerate(ctor.params.entries):
            if b.type.fvb > 0 or not is_discrete_type(b.type):
                return False
    return True


# ---------------------------------------------------------------------------
# Helpers


def _first_satisfied(tube) -> Optional[int]:
    for i, f in enumerate(tube):
        if constraint_satisfied(f.constraint):
            return i
    return None


def _rebind(face: Face, avoid: frozenset) -> Face:
    """Rename the face binder if it clashes with dimensions we are about to push under it."""
    if face.var not in avoid:
        return face
    y = fresh_dim(face.var)
    return Face(face.constraint, y.name, dim_subst(face.body, {face.var: y}))


def _faces_dims(*nodes: Node) -> frozenset:
    out: frozenset = frozenset()
    for n in nodes:
        out |= n.free_dims
    return out


def _dims_of_list(rs) -> frozenset:
    return frozenset(r.name for r in rs if isinstance(r, DimVar))


def is_value(t: Term, cfg: EvalConfig = DEFAULT_CONFIG) -> bool:
    """Whether ``t`` is a value.  Agrees with ``step(t) is IS_VALUE``."""
    match t:
        case Lam() | Pi() | Ind() | PathTy() | PLam():
            return True
        case Intro(schema=schema, label=label, dims=dims):
            try:
                ctor = schema.lookup(label)
            except KeyError:
                return False
            if len(dims) != len(ctor.dims):
                return False
            psi = dict(zip(ctor.dims, dims))
            return not any(constraint_satisfied(f.constraint.subst(psi)) for f in ctor.boundary)
        case Fhcom(src=r, dst=r2, tube=tube):
            return r != r2 and _first_satisfied(tube) is None
        case Fcoe(line=line, src=r, dst=r2):
            return bool(line) and r != r2
    return False


# ---------------------------------------------------------------------------
# The step function


def step(t: Term, cfg: EvalConfig = DEFAULT_CONFIG) -> StepResult:
    """Perform one reduction step on a term-closed term."""
    match t:
        case Lam() | Pi() | Ind() | PathTy() | PLam():
            return IS_VALUE
        case Var(name=name):
            return Stuck(f"free variable {name}")
        case App(fn=fn, arg=arg):
            return _step_app(fn, arg, cfg)
        case PApp(path=p, dim=r):
            return _step_papp(p, r, cfg)
        case Intro():
            return _step_intro(t)
        case Fhcom(src=r, dst=r2, cap=cap, tube=tube):
            i = _first_satisfied(tube)
            if i is not None:
                f = tube[i]
                return Steps(dim_subst(f.body, {f.var: r2}), "fhcom-tube")
            if r == r2:
                return Steps(cap, "fhcom-cap")
            return IS_VALUE
        case Fcoe(line=line, src=r, dst=r2, body=body):
            if not line:
                return Steps(body, "fcoe-empty")
            if r == r2:
                return Steps(body, "fcoe-refl")
            return IS_VALUE
        case Fcom(var=z, line=line, src=r, dst=r2, cap=cap, tube=tube):
            avoid = _faces_dims(*line) | _dims_of_list((r2,)) | {z}
            faces = []
            for f in tube:
                f = _rebind(f, avoid)
                faces.append(Face(f.constraint, f.var, Fcoe(z, line, DimVar(f.var), r2, f.body)))
            return Steps(Fhcom(r, r2, Fcoe(z, line, r, r2, cap), tuple(faces)), "fcom")
        case Com(var=z, type=a, src=r, dst=r2, cap=cap, tube=tube):
            avoid = a.free_dims | _dims_of_list((r2,)) | {z}
            faces = []
            for f in tube:
                f = _rebind(f, avoid)
                faces.append(Face(f.constraint, f.var, Coe(z, a, DimVar(f.var), r2, f.body)))
            return Steps(Hcom(dim_subst(a, {z: r2}), r, r2, Coe(z, a, r, r2, cap), tuple(faces)), "com")
        case Hcom():
            return _step_hcom(t, cfg)
        case Coe():
            return _step_coe(t, cfg)
        case Tcoe():
            return _step_tcoe(t, cfg)
        case Elim():
            return _step_elim(t, cfg)
        case NatRec():
            return _step_natrec(t, cfg)
    return Stuck(f"no rule for {type(t).__name__}")


def _congruence(sub: Term, rebuild, what: str, cfg: EvalConfig) -> StepResult:
    res = step(sub, cfg)
    if isinstance(res, Steps):
        return Steps(rebuild(res.next), res.rule)
    if isinstance(res, Stuck):
        return res
    return Stuck(f"{what} is a value of the wrong form ({type(sub).__name__})")


def _step_app(fn: Term, arg: Term, cfg: EvalConfig) -> StepResult:
    if isinstance(fn, Lam):
        return Steps(instantiate(fn.body, (arg,)), "beta")
    return _congruence(fn, lambda f: App(f, arg), "function position", cfg)


def _step_papp(p: Term, r: Dim, cfg: EvalConfig) -> StepResult:
    if isinstance(p, PLam):
        return Steps(dim_subst(p.body, {p.var: r}), "path-beta")
    return _congruence(p, lambda q: PApp(q, r), "path position", cfg)


def _step_intro(t: Intro) -> StepResult:
    try:
        ctor = t.schema.lookup(t.label)
    except KeyError:
        return Stuck(f"unknown constructor {t.label}")
    if len(t.dims) != len(ctor.dims) or len(t.params) != len(ctor.params) or len(t.args) != len(ctor.args):
        return Stuck(f"constructor {t.label} applied to the wrong number of arguments")
    psi = dict(zip(ctor.dims, t.dims))
    for face in ctor.boundary:
        if constraint_satisfied(face.constraint.subst(psi)):
            opened = ctor.open(t.dims)
            k = ctor.boundary.index(face)
            body = instantiate(opened.boundary[k].body, t.params)
            return Steps(insttm(body, t.schema, t.args), "intro-boundary")
    return IS_VALUE


def _step_hcom(t: Hcom, cfg: EvalConfig) -> StepResult:
    a, r, r2, cap, tube = t.type, t.src, t.dst, t.cap, t.tube
    match a:
        case Ind():
            if cfg.opt_closed and is_discrete_type(a):
                return Steps(cap, "hcom-closed")
            return Steps(Fhcom(r, r2, cap, tube), "hcom-ind")
        case Pi(name=name, cod=cod):
            faces = tuple(Face(f.constraint, f.var, App(shift(f.body, 1), Var(0, name))) for f in tube)
            return Steps(Lam(name, Hcom(cod, r, r2, App(shift(cap, 1), Var(0, name)), faces)), "hcom-pi")
        case PathTy(var=z, type=line, left=p0, right=p1):
            w = fresh_dim(z)
            faces = [Face(f.constraint, f.var, PApp(f.body, w)) for f in tube]
            y0, y1 = fresh_dim("y"), fresh_dim("y")
            faces.append(Face(Constraint(w, 0), y0.name, p0))
            faces.append(Face(Constraint(w, 1), y1.name, p1))
            body = Hcom(dim_subst(line, {z: w}), r, r2, PApp(cap, w), tuple(faces))
            return Steps(PLam(w.name, body), "hcom-path")
    if is_value(a, cfg):
        return Stuck(f"hcom at a non-type {type(a).__name__}")
    return _congruence(a, lambda a2: Hcom(a2, r, r2, cap, tube), "hcom type", cfg)


def _step_coe(t: Coe, cfg: EvalConfig) -> StepResult:
    z, a, r, r2, body = t.var, t.type, t.src, t.dst, t.body
    match a:
        case Ind(tele=tele, schema=schema, indices=indices):
            if cfg.opt_closed and is_closed_type(a):
                return Steps(body, "coe-closed")
            u = fresh_dim(z)
            line = mcoe(z, tele, u, r2, tuple(dim_subst(i, {z: u}) for i in indices))
            return Steps(Fcoe(u.name, line, r, r2, Tcoe(z, tele, schema, r, r2, body)), "coe-ind")
        case Pi(name=name, dom=dom, cod=cod):
            w = fresh_dim(z)
            dom1 = shift(dom, 1)
            back = Coe(z, dom1, r2, r, Var(0, name))
            fwd = Coe(z, dom1, r2, w, Var(0, name))
            cod1 = dim_subst(shift(cod, 1, 1), {z: w})
            new_body = Coe(w.name, instantiate(cod1, (fwd,)), r, r2, App(shift(body, 1), back))
            return Steps(Lam(name, new_body), "coe-pi")
        case PathTy(var=y, type=line, left=p0, right=p1):
            w = fresh_dim(y)
            faces = (
                Face(Constraint(w, 0), z, p0),
                Face(Constraint(w, 1), z, p1),
            )
            com = Com(z, dim_subst(line, {y: w}), r, r2, PApp(body, w), faces)
            return Steps(PLam(w.name, com), "coe-path")
    if is_value(a, cfg):
        return Stuck(f"coe along a non-type {type(a).__name__}")
    return _congruence(a, lambda a2: Coe(z, a2, r, r2, body), "coe type line", cfg)


def _step_tcoe(t: Tcoe, cfg: EvalConfig) -> StepResult:
    body = t.body
    res = step(body, cfg)
    if isinstance(res, Steps):
        return Steps(Tcoe(t.var, t.tele, t.schema, t.src, t.dst, res.next), res.rule)
    if isinstance(res, Stuck):
        return res
    # Work with a fresh name for the line variable so nothing we build can capture it.
    w = fresh_dim(t.var)
    tele = dim_subst(t.tele, {t.var: w})
    schema = dim_subst(t.schema, {t.var: w})
    r, r2 = t.src, t.dst

    def tcoe(src: Dim, dst: Dim, m: Term) -> Tcoe:
        return Tcoe(w.name, tele, schema, src, dst, m)

    match body:
        case Fhcom(src=s, dst=s2, cap=cap, tube=tube):
            avoid = tele.free_dims | schema.free_dims | _dims_of_list((r, r2))
            faces = []
            for f in tube:
                f = _rebind(f, avoid)
                faces.append(Face(f.constraint, f.var, tcoe(r, r2, f.body)))
            return Steps(Fhcom(s, s2, tcoe(r, r2, cap), tuple(faces)), "tcoe-fhcom")
        case Fcoe(var=y, line=line, src=s, dst=s2, body=inner):
            y2 = fresh_dim(y)
            line2 = tuple(dim_subst(i, {y: y2}) for i in line)
            return Steps(Fcoe(y2.name, mcoe(w.name, tele, r, r2, line2), s, s2, tcoe(r, r2, inner)), "tcoe-fcoe")
        case Intro(label=label, dims=dims, params=params, args=args):
            return _tcoe_intro(w.name, tele, schema, r, r2, label, dims, params, args)
    return Stuck(f"tcoe on a non-inductive value {type(body).__name__}")


def _tcoe_intro(w, tele, schema, r, r2, label, dims, params, args) -> StepResult:
    try:
        ctor = schema.lookup(label).open(dims)
    except (KeyError, ValueError):
        return Stuck(f"tcoe: constructor {label} does not fit the schema line")
    n = len(tele)
    fam = ind_family(tele, schema)

    def params_at(s: Dim) -> tuple[Term, ...]:
        return mcoe(w, ctor.params, r, s, params)

    def args_at(s: Dim) -> tuple[Term, ...]:
        at_w = params_at(DimVar(w))
        out = []
        for decl, nj in zip(ctor.args, args):
            line = tyatty(instantiate(decl.type, at_w), n, fam)
            out.append(Coe(w, line, r, s, nj))
        return tuple(out)

    u = fresh_dim(w)
    idx_u = tuple(instantiate(dim_subst(i, {w: u}), params_at(u)) for i in ctor.indices)
    line = mcoe(w, tele, u, r2, idx_u)
    target = Intro(dim_subst(schema, {w: r2}), label, dims, params_at(r2), args_at(r2))
    if not ctor.boundary:
        return Steps(Fcoe(u.name, line, r2, r, target), "tcoe-intro")
    faces = []
    for face in ctor.boundary:
        v = fresh_dim("v")
        m = instantiate(dim_subst(face.body, {w: v}), params_at(v))
        at_v = insttm(m, dim_subst(schema, {w: v}), args_at(v))
        faces.append(Face(face.constraint, v.name, Tcoe(w, tele, schema, v, r2, at_v)))
    return Steps(Fcom(u.name, line, r2, r, target, tuple(faces)), "tcoe-intro-boundary")


def _step_elim(t: Elim, cfg: EvalConfig) -> StepResult:
    names, motive, indices, scrut, cases = t.names, t.motive, t.indices, t.scrut, t.cases
    res = step(scrut, cfg)
    if isinstance(res, Steps):
        return Steps(Elim(names, motive, indices, res.next, cases), res.rule)
    if isinstance(res, Stuck):
        return res

    def elim(idx, m: Term) -> Elim:
        return Elim(names, motive, tuple(idx), m, cases)

    match scrut:
        case Fhcom(src=r, dst=r2, cap=cap, tube=tube):
            y = fresh_dim("y")
            line = instantiate(motive, tuple(indices) + (Fhcom(r, y, cap, tube),))
            avoid = _faces_dims(motive, cases, *indices)
            faces = []
            for f in tube:
                f = _rebind(f, avoid)
                faces.append(Face(f.constraint, f.var, elim(indices, f.body)))
            return Steps(Com(y.name, line, r, r2, elim(indices, cap), tuple(faces)), "elim-fhcom")
        case Fcoe(var=z, line=line, src=r, dst=r2, body=body):
            w = fresh_dim(z)
            at_w = tuple(dim_subst(i, {z: w}) for i in line)
            ty = instantiate(motive, at_w + (Fcoe(z, line, r, w, body),))
            at_r = tuple(dim_subst(i, {z: r}) for i in line)
            return Steps(Coe(w.name, ty, r, r2, elim(at_r, body)), "elim-fcoe")
        case Intro(schema=schema, label=label, dims=dims, params=params, args=args):
            try:
                ctor = schema.lookup(label).open(dims)
                case = cases.lookup(label)
            except (KeyError, ValueError):
                return Stuck(f"elim: no case for constructor {label}")
            n = len(names) - 1
            fam = elim_family(n, names, motive, cases)
            rhos = tuple(
                func_action(instantiate(decl.type, params), n, fam, nj) for decl, nj in zip(ctor.args, args)
            )
            try:
                return Steps(case_body(case, dims, params, args, rhos), "elim-intro")
            except Exception as exc:  # arity mismatch between case and constructor
                return Stuck(f"elim: {exc}")
    return Stuck(f"elim on a non-inductive value {type(scrut).__name__}")


def _step_natrec(t: NatRec, cfg: EvalConfig) -> StepResult:
    res = step(t.scrut, cfg)
    if isinstance(res, Steps):
        return Steps(NatRec(res.next, t.zero, t.names, t.succ), res.rule)
    if isinstance(res, Stuck):
        return res
    kind = nat_intro_kind(t.scrut)
    if kind == "zero":
        return Steps(t.zero, "natrec-zero")
    if kind == "suc":
        pred = t.scrut.args[0]
        return Steps(instantiate(t.succ, (pred, NatRec(pred, t.zero, t.names, t.succ))), "natrec-suc")
    return Stuck(f"natrec on a non-numeral value {type(t.scrut).__name__}")


# ---------------------------------------------------------------------------
# Driving evaluation


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw:
        try:
            return max(0, int(raw))
        except ValueError:
            pass
    return DEFAULT_FUEL


@dataclass
class EvalStats:
    steps: int = 0


def evaluate(
    t: Term,
    fuel: Optional[int] = None,
    cfg: EvalConfig = DEFAULT_CONFIG,
    stats: Optional[EvalStats] = None,
) -> Term:
    """Run ``step`` to a value.

    Raises :class:`FuelExhausted` when the budget runs out and
    :class:`StuckTerm` when no rule applies.
    """
    budget = default_fuel() if fuel is None else fuel
    steps = 0
    while True:
        res = step(t, cfg)
        if res is IS_VALUE:
            if stats is not None:
                stats.steps += steps
            return t
        if isinstance(res, Stuck):
            if stats is not None:
                stats.steps += steps
            raise StuckTerm(res.reason, t, steps)
        if steps >= budget:
            if stats is not None:
                stats.steps += steps
            raise FuelExhausted(steps, t)
        steps += 1
        t = res.next


def whnf(t: Term, fuel: Optional[int] = None, cfg: EvalConfig = DEFAULT_CONFIG) -> Term:
    """Evaluate as far as possible; open terms stop at the blocking variable."""
    budget = default_fuel() if fuel is None else fuel
    for _ in range(budget):
        res = step(t, cfg)
        if not isinstance(res, Steps):
            return t
        t = res.next
    raise FuelExhausted(budget, t)


@dataclass(frozen=True)
class Trace:
    """A reduction sequence: ``terms[i+1]`` is obtained from ``terms[i]`` by ``rules[i]``."""

    terms: tuple[Term, ...]
    rules: tuple[str, ...]
    result: Union[IsValue, Stuck, str]

    @property
    def complete(self) -> bool:
        return self.result is IS_VALUE


def trace(t: Term, max_steps: int = 1000, cfg: EvalConfig = DEFAULT_CONFIG) -> Trace:
    terms = [t]
    rules: list[str] = []
    while True:
        res = step(t, cfg)
        if not isinstance(res, Steps):
            return Trace(tuple(terms), tuple(rules), res)
        if len(rules) >= max_steps:
            return Trace(tuple(terms), tuple(rules), "max-steps")
        t = res.next
        terms.append(t)
        rules.append(res.rule)


# ---------------------------------------------------------------------------
# Observation


@dataclass(frozen=True)
class Obs:
    """A constructor tree read back from a value."""

    label: str
    dims: tuple[str, ...] = ()
    params: tuple[Union[Obs, str], ...] = ()
    args: tuple[Union[Obs, str], ...] = ()
    nat: bool = field(default=False, compare=False)

    def numeral(self) -> Optional[int]:
        k = 0
        o: Union[Obs, str] = self
        while isinstance(o, Obs) and o.nat:
            if o.label == "zero":
                return k
            k += 1
            o = o.args[0]
        return None

    def __str__(self) -> str:
        k = self.numeral()
        if k is not None:
            return str(k)
        items = list(self.dims) + [str(p) for p in self.params] + [str(a) for a in self.args]
        return f"{self.label}({', '.join(items)})" if items else self.label


def check_observable_type(at: Term) -> None:
    """Raise :class:`NotObservable` unless ``at`` admits first-order readback."""
    if not isinstance(at, Ind):
        raise NotObservable("observation type must be an inductive type")
    if at.tele.entries or at.indices:
        raise NotObservable("observation type must not be indexed")
    for label, ctor in at.schema.ctors:
        if ctor.dims or ctor.boundary:
            raise NotObservable(f"constructor {label} is not zero-dimensional and boundaryless")
        for arg in ctor.args:
            if not isinstance(arg.type, SelfAt):
                raise NotObservable(f"constructor {label} has a higher-order recursive argument")


def observe(
    t: Term,
    at: Optional[Term] = None,
    strict: bool = True,
    fuel: Optional[int] = None,
    cfg: EvalConfig = DEFAULT_CONFIG,
    stats: Optional[EvalStats] = None,
) -> Obs:
    """Evaluate ``t`` and read the resulting constructor tree back.

    In strict mode any argument that is not itself an inductive value raises
    :class:`NotObservable`; otherwise such arguments are recorded as printed
    text, which is enough to compare values syntactically.
    """
    if at is not None:
        check_observable_type(at)
    from .pretty import show_term

    def go(u: Term) -> Union[Obs, str]:
        v = evaluate(u, fuel, cfg, stats)
        if isinstance(v, Intro):
            return Obs(
                v.label,
                tuple(str(r) for r in v.dims),
                tuple(go(p) for p in v.params),
                tuple(go(a) for a in v.args),
                nat=v.schema == NAT_SCHEMA,
            )
        if strict:
            raise NotObservable(f"value {type(v).__name__} is not a constructor")
        return show_term(v)

    out = go(t)
    if isinstance(out, str):
        raise NotObservable(f"top-level value is not a constructor: {out}")
    return out
