"""Algorithmic checking of schemas, boundary terms, eliminators and terms.

The checker is a sound but incomplete syntactic approximation of exact
equality: two terms are judged equal when their weak-head forms have the same
head and equal subterms, with eta for functions and paths.  Judgments under a
constraint are checked by applying the constraint's most general unifier to
the context and to both sides; an unsatisfiable constraint makes the premise
hold vacuously.

Boundary terms are compared by interpreting them as ordinary terms, with the
recursive arguments of the constructor standing as opaque variables, and then
running the same conversion check.  The boundary equations (a constructor at
a satisfied constraint, degenerate ``fhcom`` and ``fcoe``, beta) coincide
with the corresponding reduction rules, so nothing else is needed.

Every rejection is a :class:`CheckError` naming the failing rule.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Callable, Iterable, Optional, Sequence

from . import evaluator as ev
from .interp import InterpError, ind_family, insttm, insttm_dep, mcoe, tyatty, tyatty_dep
from .prelude import NAT
from .syntax import (
    UNSAT,
    App,
    ArgPi,
    ArgType,
    BApp,
    BFcoe,
    BFhcom,
    BIntro,
    BLam,
    BNatRec,
    BVar,
    BoundaryTerm,
    Coe,
    Com,
    Constraint,
    Constructor,
    Dim,
    DimVar,
    Elim,
    ElimList,
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
    Schema,
    SelfAt,
    Tcoe,
    Tele,
    Term,
    Var,
    alpha_eq,
    boundary_labels,
    constraint_mgu,
    constraints_dims,
    ctx_valid,
    dim_subst,
    fresh_name,
    instantiate,
    mgu_all,
    shift,
    shift_all,
)

KINDS = ("Scope", "Arity", "Validity", "LabelOrder", "Conversion", "Unsupported")
EXTENSIONS = ("natrec", "paths")
CHECK_FUEL = 200_000


class CheckError(Exception):
    """A rejected judgment.  ``rule`` names the premise that failed."""

    def __init__(self, kind: str, rule: str, message: str, path: Sequence[str] = ()) -> None:
        assert kind in KINDS, kind
        self.kind = kind
        self.rule = rule
        self.message = message
        self.path = tuple(path)
        where = " / ".join(self.path)
        super().__init__(f"{kind} [{rule}]" + (f" in {where}" if where else "") + f": {message}")


class _Blocked(Exception):
    """Conversion ran out of fuel."""


@dataclass(frozen=True)
class CheckCtx:
    """Dimension scope plus a de Bruijn list of typed term variables.

    ``types[i]`` is relative to the variables before it; ``None`` marks a
    variable whose type is not tracked (conversion under eta).
    """

    dims: frozenset = frozenset()
    types: tuple = ()
    names: tuple = ()
    path: tuple = ()

    @property
    def depth(self) -> int:
        return len(self.types)

    def push(self, name: str, ty: Optional[Term]) -> CheckCtx:
        return replace(self, types=self.types + (ty,), names=self.names + (name,))

    def push_dims(self, names: Iterable[str]) -> CheckCtx:
        return replace(self, dims=self.dims | frozenset(names))

    def lookup(self, index: int) -> Optional[Term]:
        ty = self.types[len(self.types) - 1 - index]
        return None if ty is None else shift(ty, index + 1)

    def restrict(self, psi: dict) -> CheckCtx:
        if not psi:
            return self
        types = tuple(None if t is None else dim_subst(t, psi) for t in self.types)
        dims = (self.dims - frozenset(psi)) | frozenset(r.name for r in psi.values() if isinstance(r, DimVar))
        return replace(self, types=types, dims=dims)

    def at(self, where: str) -> CheckCtx:
        return replace(self, path=self.path + (where,))


@dataclass(frozen=True)
class BoundaryCtx:
    """What boundary-term checking needs beyond the term context.

    ``tele`` and ``schema`` (the constructors defined so far) live at depth
    ``base``.  ``theta`` lists the argument types of the boundary variables,
    each with the depth it lives at; ``levels`` gives the absolute position of
    the term variable standing for each boundary variable (``None`` when it
    has none, as for the variable bound by a boundary ``natrec``).
    """

    base: int
    tele: Tele
    schema: Schema
    full_labels: tuple
    theta: tuple
    levels: tuple

    def restrict(self, psi: dict) -> BoundaryCtx:
        if not psi:
            return self
        return replace(
            self,
            tele=dim_subst(self.tele, psi),
            schema=dim_subst(self.schema, psi),
            theta=tuple((dim_subst(a, psi), d) for a, d in self.theta),
        )


def _fresh_for(name: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    return name if name not in avoid and name != "_" else fresh_name(name if name != "_" else "y")


class Checker:
    def __init__(
        self,
        extensions: Iterable[str] = (),
        families: Iterable[tuple[Tele, Schema]] = (),
        fuel: Optional[int] = None,
        cfg: ev.EvalConfig = ev.DEFAULT_CONFIG,
    ) -> None:
        self.ext = frozenset(extensions)
        unknown = self.ext - set(EXTENSIONS)
        if unknown:
            raise ValueError(f"unknown extensions: {sorted(unknown)}")
        self.families = list(families)
        self.fuel = CHECK_FUEL if fuel is None else fuel
        self.cfg = cfg
        self._families_ok: set = set()

    # -- errors and small helpers -------------------------------------------

    @staticmethod
    def fail(ctx: CheckCtx, kind: str, rule: str, message: str):
        raise CheckError(kind, rule, message, ctx.path)

    def need(self, ctx: CheckCtx, ext: str, rule: str) -> None:
        if ext not in self.ext:
            self.fail(ctx, "Unsupported", rule, f"requires the {ext} extension")

    def dim(self, ctx: CheckCtx, r: Dim, rule: str) -> None:
        if isinstance(r, DimVar) and r.name not in ctx.dims:
            self.fail(ctx, "Scope", rule, f"dimension {r.name} is not in scope")
        if isinstance(r, int) and r not in (0, 1):
            self.fail(ctx, "Scope", rule, f"{r} is not a dimension")

    def dims(self, ctx: CheckCtx, rs: Iterable[Dim], rule: str) -> None:
        for r in rs:
            self.dim(ctx, r, rule)

    def constraint(self, ctx: CheckCtx, c: Constraint, rule: str) -> None:
        self.dim(ctx, c.lhs, rule)
        self.dim(ctx, c.rhs, rule)

    def open_dim(self, ctx: CheckCtx, var: str, *nodes: Node) -> tuple[str, list]:
        """Choose a name for a bound dimension that does not clash with the scope."""
        y = _fresh_for(var, ctx.dims)
        if y == var:
            return y, list(nodes)
        return y, [dim_subst(n, {var: DimVar(y)}) for n in nodes]

    # -- weak-head evaluation and conversion --------------------------------

    def whnf(self, ctx: CheckCtx, t: Term) -> Term:
        for _ in range(256):
            try:
                t = ev.whnf(t, self.fuel, self.cfg)
            except ev.FuelExhausted as exc:
                raise _Blocked() from exc
            u = self._unblock(ctx, t)
            if u is None:
                return t
            t = u
        return t

    def _unblock(self, ctx: CheckCtx, t: Term) -> Optional[Term]:
        """Rewrite the blocking path application at a neutral path, if any."""
        match t:
            case App(fn=fn, arg=arg):
                u = self._unblock(ctx, fn)
                return None if u is None else App(u, arg)
            case PApp(path=p, dim=r):
                u = self._unblock(ctx, p)
                if u is not None:
                    return PApp(u, r)
                if r in (0, 1) and not isinstance(p, PLam):
                    try:
                        ty = ev.whnf(self.infer(ctx, p), self.fuel, self.cfg)
                    except (CheckError, ev.EvalError, InterpError):
                        return None
                    if isinstance(ty, PathTy):
                        return ty.left if r == 0 else ty.right
                return None
            case Elim(scrut=s):
                u = self._unblock(ctx, s)
                return None if u is None else replace(t, scrut=u)
            case NatRec(scrut=s):
                u = self._unblock(ctx, s)
                return None if u is None else replace(t, scrut=u)
            case Tcoe(body=b):
                u = self._unblock(ctx, b)
                return None if u is None else replace(t, body=u)
        return None

    def convert(self, ctx: CheckCtx, a: Term, b: Term, at: Optional[Term] = None) -> bool:
        """Algorithmic exact equality; ``False`` when undecided."""
        try:
            if at is not None:
                return self._conv_at(ctx, a, b, at)
            return self._conv(ctx, a, b)
        except (_Blocked, CheckError, ev.EvalError, InterpError, RecursionError):
            return False

    def _conv_at(self, ctx: CheckCtx, a: Term, b: Term, at: Term) -> bool:
        ty = self.whnf(ctx, at)
        if isinstance(ty, Pi):
            x = Var(0, ty.name)
            return self._conv_at(
                ctx.push(ty.name, ty.dom), App(shift(a, 1), x), App(shift(b, 1), x), ty.cod
            )
        if isinstance(ty, PathTy):
            w = fresh_name(ty.var)
            return self._conv_at(
                ctx.push_dims([w]), PApp(a, DimVar(w)), PApp(b, DimVar(w)), dim_subst(ty.type, {ty.var: DimVar(w)})
            )
        return self._conv(ctx, a, b)

    def _conv(self, ctx: CheckCtx, a: Term, b: Term) -> bool:
        if a == b or alpha_eq(a, b):
            return True
        a = self.whnf(ctx, a)
        b = self.whnf(ctx, b)
        if a == b or alpha_eq(a, b):
            return True
        if isinstance(a, Lam) or isinstance(b, Lam):
            name = a.name if isinstance(a, Lam) else b.name
            dom = a.dom if isinstance(a, Pi) else None
            ab = a.body if isinstance(a, Lam) else App(shift(a, 1), Var(0, name))
            bb = b.body if isinstance(b, Lam) else App(shift(b, 1), Var(0, name))
            return self._conv(ctx.push(name, dom), ab, bb)
        if isinstance(a, PLam) or isinstance(b, PLam):
            w = DimVar(fresh_name("w"))
            ab = dim_subst(a.body, {a.var: w}) if isinstance(a, PLam) else PApp(a, w)
            bb = dim_subst(b.body, {b.var: w}) if isinstance(b, PLam) else PApp(b, w)
            return self._conv(ctx.push_dims([w.name]), ab, bb)
        return self._conv_heads(ctx, a, b)

    def _conv_all(self, ctx: CheckCtx, xs: Sequence[Term], ys: Sequence[Term]) -> bool:
        return len(xs) == len(ys) and all(self._conv(ctx, x, y) for x, y in zip(xs, ys))

    def _conv_under_dim(self, ctx: CheckCtx, x: str, a: Node, y: str, b: Node, fn) -> bool:
        w = fresh_name("w")
        return fn(ctx.push_dims([w]), dim_subst(a, {x: DimVar(w)}), dim_subst(b, {y: DimVar(w)}))

    def _conv_tubes(self, ctx: CheckCtx, ta, tb) -> bool:
        if len(ta) != len(tb):
            return False
        for fa, fb in zip(ta, tb):
            if fa.constraint != fb.constraint:
                return False
            if not self._conv_under_dim(ctx, fa.var, fa.body, fb.var, fb.body, self._conv):
                return False
        return True

    def _conv_heads(self, ctx: CheckCtx, a: Term, b: Term) -> bool:
        match a, b:
            case Var(index=i), Var(index=j):
                return i == j
            case Pi(), Pi():
                return self._conv(ctx, a.dom, b.dom) and self._conv(ctx.push(a.name, a.dom), a.cod, b.cod)
            case PathTy(), PathTy():
                return (
                    self._conv_under_dim(ctx, a.var, a.type, b.var, b.type, self._conv)
                    and self._conv(ctx, a.left, b.left)
                    and self._conv(ctx, a.right, b.right)
                )
            case Ind(), Ind():
                return (
                    alpha_eq(a.tele, b.tele)
                    and alpha_eq(a.schema, b.schema)
                    and self._conv_all(ctx, a.indices, b.indices)
                )
            case Intro(), Intro():
                return (
                    a.label == b.label
                    and a.dims == b.dims
                    and alpha_eq(a.schema, b.schema)
                    and self._conv_all(ctx, a.params, b.params)
                    and self._conv_all(ctx, a.args, b.args)
                )
            case Fhcom(), Fhcom():
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and self._conv(ctx, a.cap, b.cap)
                    and self._conv_tubes(ctx, a.tube, b.tube)
                )
            case Fcoe(), Fcoe():
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and self._conv_under_dim(
                        ctx, a.var, Tele(tuple()), b.var, Tele(tuple()), lambda *_: True
                    )
                    and self._conv_lines(ctx, a.var, a.line, b.var, b.line)
                    and self._conv(ctx, a.body, b.body)
                )
            case App(), App():
                return self._conv(ctx, a.fn, b.fn) and self._conv(ctx, a.arg, b.arg)
            case PApp(), PApp():
                return a.dim == b.dim and self._conv(ctx, a.path, b.path)
            case Elim(), Elim():
                return self._conv_elim(ctx, a, b)
            case NatRec(), NatRec():
                return (
                    self._conv(ctx, a.scrut, b.scrut)
                    and self._conv(ctx, a.zero, b.zero)
                    and self._conv(ctx.push(a.names[0], NAT).push(a.names[1], None), a.succ, b.succ)
                )
            case Hcom(), Hcom():
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and self._conv(ctx, a.type, b.type)
                    and self._conv(ctx, a.cap, b.cap)
                    and self._conv_tubes(ctx, a.tube, b.tube)
                )
            case Coe(), Coe():
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and self._conv_under_dim(ctx, a.var, a.type, b.var, b.type, self._conv)
                    and self._conv(ctx, a.body, b.body)
                )
            case Com(), Com():
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and self._conv_under_dim(ctx, a.var, a.type, b.var, b.type, self._conv)
                    and self._conv(ctx, a.cap, b.cap)
                    and self._conv_tubes(ctx, a.tube, b.tube)
                )
            case Tcoe(), Tcoe():
                w = fresh_name("w")
                sa = {a.var: DimVar(w)}
                sb = {b.var: DimVar(w)}
                return (
                    a.src == b.src
                    and a.dst == b.dst
                    and alpha_eq(dim_subst(a.tele, sa), dim_subst(b.tele, sb))
                    and alpha_eq(dim_subst(a.schema, sa), dim_subst(b.schema, sb))
                    and self._conv(ctx, a.body, b.body)
                )
        return False

    def _conv_lines(self, ctx: CheckCtx, x: str, la, y: str, lb) -> bool:
        if len(la) != len(lb):
            return False
        w = fresh_name("w")
        inner = ctx.push_dims([w])
        return all(
            self._conv(inner, dim_subst(p, {x: DimVar(w)}), dim_subst(q, {y: DimVar(w)})) for p, q in zip(la, lb)
        )

    def _conv_elim(self, ctx: CheckCtx, a: Elim, b: Elim) -> bool:
        if len(a.names) != len(b.names) or a.cases.labels != b.cases.labels:
            return False
        if not (self._conv_all(ctx, a.indices, b.indices) and self._conv(ctx, a.scrut, b.scrut)):
            return False
        mctx = ctx
        for n in a.names:
            mctx = mctx.push(n, None)
        if not self._conv(mctx, a.motive, b.motive):
            return False
        for (_, ca), (_, cb) in zip(a.cases.cases, b.cases.cases):
            if ca.arity != cb.arity or len(ca.dims) != len(cb.dims):
                return False
            ws = [fresh_name("w") for _ in ca.dims]
            ba = dim_subst(ca.body, {x: DimVar(w) for x, w in zip(ca.dims, ws)})
            bb = dim_subst(cb.body, {x: DimVar(w) for x, w in zip(cb.dims, ws)})
            cctx = ctx.push_dims(ws)
            for n in ca.params + ca.args + ca.results:
                cctx = cctx.push(n, None)
            if not self._conv(cctx, ba, bb):
                return False
        return True

    def require_conv(self, ctx: CheckCtx, a: Term, b: Term, rule: str, what: str, at: Optional[Term] = None) -> None:
        if not self.convert(ctx, a, b, at):
            from .pretty import show_term

            names = ctx.names
            try:
                left, right = show_term(a, names=names), show_term(b, names=names)
            except Exception:  # printing is best effort inside an error message
                left, right = repr(a), repr(b)
            self.fail(ctx, "Conversion", rule, f"{what}: {left} is not equal to {right}")

    # -- types and telescopes ----------------------------------------------

    def check_type(self, ctx: CheckCtx, a: Term) -> None:
        match a:
            case Pi(name=name, dom=dom, cod=cod):
                self.check_type(ctx, dom)
                self.check_type(ctx.push(name, dom), cod)
            case Ind(tele=tele, schema=schema, indices=indices):
                self.check_family(ctx, tele, schema)
                if len(indices) != len(tele):
                    self.fail(ctx, "Arity", "formation", f"expected {len(tele)} indices, got {len(indices)}")
                self.check_args(ctx, indices, tele, "formation")
            case PathTy(var=x, type=line, left=l, right=r):
                self.need(ctx, "paths", "path-formation")
                y, (line_y,) = self.open_dim(ctx, x, line)
                self.check_type(ctx.push_dims([y]), line_y)
                self.check(ctx, l, dim_subst(line_y, {y: 0}))
                self.check(ctx, r, dim_subst(line_y, {y: 1}))
            case _:
                whnf = self.whnf(ctx, a)
                if whnf is a or isinstance(whnf, (Var, App, Elim, NatRec, PApp)):
                    self.fail(ctx, "Unsupported", "type", f"{type(a).__name__} is not a type former")
                self.check_type(ctx, whnf)

    def check_tele(self, ctx: CheckCtx, tele: Tele) -> CheckCtx:
        for b in tele.entries:
            self.check_type(ctx, b.type)
            ctx = ctx.push(b.name, b.type)
        return ctx

    def check_args(self, ctx: CheckCtx, ts: Sequence[Term], tele: Tele, rule: str) -> None:
        """Check ``ts`` against the telescope ``tele`` (which lives at ``ctx``)."""
        if len(ts) != len(tele):
            self.fail(ctx, "Arity", rule, f"expected {len(tele)} terms, got {len(ts)}")
        for i, (t, b) in enumerate(zip(ts, tele.entries)):
            self.check(ctx, t, instantiate(b.type, tuple(ts[:i])))

    def check_family(self, ctx: CheckCtx, tele: Tele, schema: Schema) -> None:
        key = None
        if tele.fvb == 0 and schema.fvb == 0:
            key = (tele, schema, frozenset(tele.free_dims | schema.free_dims))
            if key in self._families_ok:
                return
        for x in tele.free_dims | schema.free_dims:
            if x not in ctx.dims:
                self.fail(ctx, "Scope", "formation", f"dimension {x} is not in scope")
        self.check_tele(ctx, tele)
        self.check_constrs(ctx, tele, schema)
        if key is not None:
            self._families_ok.add(key)

    # -- schemas -------------------------------------------------------------

    def check_constrs(self, ctx: CheckCtx, tele: Tele, schema: Schema) -> None:
        """A list of constructors: distinct labels, each checked against its prefix."""
        seen: set[str] = set()
        for i, (label, ctor) in enumerate(schema.ctors):
            if label in seen:
                self.fail(ctx, "LabelOrder", "constrs", f"duplicate constructor label {label}")
            seen.add(label)
            self.check_constructor(
                ctx.at(f"constructor {label}"), tele, Schema(schema.ctors[:i]), label, ctor, schema.labels
            )

    def check_constructor(
        self,
        ctx: CheckCtx,
        tele: Tele,
        prefix: Schema,
        label: str,
        ctor: Constructor,
        full_labels: Sequence[str] = (),
    ) -> None:
        if len(set(ctor.dims)) != len(ctor.dims):
            self.fail(ctx, "Scope", "constructor", "repeated dimension parameter")
        xs = []
        for x in ctor.dims:
            xs.append(_fresh_for(x, ctx.dims | set(xs)) if x in ctx.dims else x)
        c = ctor.open(tuple(DimVar(x) for x in xs))
        cctx = ctx.push_dims(xs)
        # (a) parameters form a telescope of supported types
        gctx = cctx
        for b in c.params.entries:
            self.check_type(gctx.at(f"parameter {b.name}"), b.type)
            gctx = gctx.push(b.name, b.type)
        ng = len(c.params)
        tele_g = shift(tele, ng)
        # (b) indices
        if len(c.indices) != len(tele):
            self.fail(gctx, "Arity", "constructor-indices", f"expected {len(tele)} indices, got {len(c.indices)}")
        self.check_args(gctx.at("indices"), c.indices, tele_g, "constructor-indices")
        # (c) argument context
        for a in c.args:
            self.check_argtype(gctx.at(f"argument {a.name}"), tele_g, a.type)
        # (d) boundary shape
        cons = [f.constraint for f in c.boundary]
        for con in cons:
            stray = constraints_dims([con]) - set(xs)
            if stray:
                self.fail(gctx, "Validity", "constructor-boundary-dims", f"boundary mentions non-parameter {sorted(stray)}")
        if cons and not ctx_valid(cons):
            self.fail(gctx, "Validity", "constructor-boundary-valid", "boundary constraints are not valid")
        for k, f in enumerate(c.boundary):
            for lbl in boundary_labels(f.body):
                if lbl in prefix:
                    continue
                if lbl == label or lbl in full_labels:
                    self.fail(
                        gctx.at(f"boundary {k}"), "LabelOrder", "intro-I", f"{lbl} is not defined before {label}"
                    )
                self.fail(gctx.at(f"boundary {k}"), "Scope", "intro-I", f"unknown constructor {lbl}")
        if not c.boundary:
            return
        # (e) each face checks, and all faces agree pairwise
        bctx = gctx
        base = ctx.depth
        fam = ind_family(tele, prefix)
        n = len(tele)
        nt = len(c.args)
        for j, a in enumerate(c.args):
            bctx = bctx.push(a.name, tyatty(shift(a.type, j), n, shift(fam, ng + j, n)))
        b = BoundaryCtx(
            base=base,
            tele=tele,
            schema=prefix,
            full_labels=tuple(full_labels),
            theta=tuple((a.type, base + ng) for a in c.args),
            levels=tuple(base + ng + j for j in range(nt)),
        )
        goal = SelfAt(shift_all(c.indices, nt))
        bodies = [shift(f.body, nt) for f in c.boundary]
        for k, (con, m) in enumerate(zip(cons, bodies)):
            psi = constraint_mgu(con, xs)
            if psi is UNSAT:
                continue
            self.check_boundary_term(
                bctx.restrict(psi).at(f"boundary {k}"), b.restrict(psi), dim_subst(m, psi), dim_subst(goal, psi)
            )
        for k in range(len(cons)):
            for l in range(len(cons)):
                psi = mgu_all([cons[k], cons[l]], xs)
                if psi is UNSAT:
                    continue
                rctx = bctx.restrict(psi).at(f"boundary {k} against {l}")
                rb = b.restrict(psi)
                mk = self.boundary_to_term(rctx, rb, dim_subst(bodies[k], psi))
                ml = self.boundary_to_term(rctx, rb, dim_subst(bodies[l], psi))
                self.require_conv(rctx, mk, ml, "constructor-boundary-agree", f"faces {k} and {l} disagree")

    def check_argtype(self, ctx: CheckCtx, tele: Tele, a: ArgType) -> None:
        match a:
            case SelfAt(indices=indices):
                self.check_args(ctx, indices, tele, "argtype")
            case ArgPi(name=name, dom=dom, cod=cod):
                self.check_type(ctx, dom)
                self.check_argtype(ctx.push(name, dom), shift(tele, 1), cod)
            case _:
                self.fail(ctx, "Unsupported", "argtype", f"not an argument type: {type(a).__name__}")

    # -- boundary terms -----------------------------------------------------

    def boundary_to_term(self, ctx: CheckCtx, b: BoundaryCtx, m: BoundaryTerm) -> Term:
        ns = []
        for level in b.levels:
            if level is None:
                self.fail(ctx, "Unsupported", "boundary-equality", "comparison under a boundary natrec binder")
            ns.append(Var(ctx.depth - 1 - level))
        try:
            return insttm(m, shift(b.schema, ctx.depth - b.base), ns)
        except InterpError as exc:
            self.fail(ctx, "Scope", "boundary-term", str(exc))

    def argtype_eq(self, ctx: CheckCtx, a: ArgType, b: ArgType) -> bool:
        match a, b:
            case SelfAt(), SelfAt():
                return len(a.indices) == len(b.indices) and all(
                    self.convert(ctx, x, y) for x, y in zip(a.indices, b.indices)
                )
            case ArgPi(), ArgPi():
                return self.convert(ctx, a.dom, b.dom) and self.argtype_eq(ctx.push(a.name, a.dom), a.cod, b.cod)
        return False

    def check_boundary_term(self, ctx: CheckCtx, b: BoundaryCtx, m: BoundaryTerm, expected: ArgType) -> None:
        """Check a boundary term against an argument type."""
        match m:
            case BLam(name=name, body=body):
                if not isinstance(expected, ArgPi):
                    self.fail(ctx, "Conversion", "arrow-I", "a boundary lambda needs a function argument type")
                self.check_boundary_term(ctx.push(name, expected.dom), b, body, expected.cod)
            case BIntro():
                self._check_bintro(ctx, b, m, expected)
            case BFhcom():
                self._check_bfhcom(ctx, b, m, expected)
            case BFcoe():
                self._check_bfcoe(ctx, b, m, expected)
            case BNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                self.need(ctx, "natrec", "natrec")
                self.check(ctx, scrut, NAT)
                self.check_boundary_term(ctx, b, zero, expected)
                inner = replace(b, theta=b.theta + ((expected, ctx.depth),), levels=b.levels + (None,))
                self.check_boundary_term(ctx.push(names[0], NAT), inner, succ, shift(expected, 1))
            case _:
                got = self.infer_boundary_term(ctx, b, m)
                if not self.argtype_eq(ctx, got, expected):
                    rule = "hyp" if isinstance(m, BVar) else "arrow-E"
                    self.fail(ctx, "Conversion", rule, "boundary term has the wrong argument type")

    def infer_boundary_term(self, ctx: CheckCtx, b: BoundaryCtx, m: BoundaryTerm) -> ArgType:
        match m:
            case BVar(index=j):
                if not 0 <= j < len(b.theta):
                    self.fail(ctx, "Scope", "hyp", f"boundary variable {j} is not in scope")
                ty, depth = b.theta[j]
                return shift(ty, ctx.depth - depth)
            case BApp(fn=fn, arg=arg):
                f = self.infer_boundary_term(ctx, b, fn)
                if not isinstance(f, ArgPi):
                    self.fail(ctx, "Conversion", "arrow-E", "applying a boundary term that is not a function")
                self.check(ctx, arg, f.dom)
                return instantiate(f.cod, (arg,))
        self.fail(ctx, "Unsupported", "boundary-infer", f"cannot infer the argument type of {type(m).__name__}")

    def _check_bintro(self, ctx: CheckCtx, b: BoundaryCtx, m: BIntro, expected: ArgType) -> None:
        if m.label not in b.schema:
            if m.label in b.full_labels:
                self.fail(ctx, "LabelOrder", "intro-I", f"{m.label} is not defined yet")
            self.fail(ctx, "Scope", "intro-I", f"unknown constructor {m.label}")
        ctor = shift(b.schema.lookup(m.label), ctx.depth - b.base)
        if len(m.dims) != len(ctor.dims):
            self.fail(ctx, "Arity", "intro-I", f"{m.label} expects {len(ctor.dims)} dimensions")
        self.dims(ctx, m.dims, "intro-I")
        c = ctor.open(m.dims)
        self.check_args(ctx, m.params, c.params, "intro-I")
        if len(m.args) != len(c.args):
            self.fail(ctx, "Arity", "intro-I", f"{m.label} expects {len(c.args)} recursive arguments")
        for decl, n in zip(c.args, m.args):
            self.check_boundary_term(ctx, b, n, instantiate(decl.type, m.params))
        if not isinstance(expected, SelfAt):
            self.fail(ctx, "Conversion", "intro-I", "a constructor is not a function")
        got = tuple(instantiate(i, m.params) for i in c.indices)
        if not self.argtype_eq(ctx, SelfAt(got), expected):
            self.fail(ctx, "Conversion", "intro-I", f"{m.label} lands at the wrong index")

    def _check_bfhcom(self, ctx: CheckCtx, b: BoundaryCtx, m: BFhcom, expected: ArgType) -> None:
        if not isinstance(expected, SelfAt):
            self.fail(ctx, "Conversion", "fhcom-I", "fhcom is not a function")
        tele = shift(b.tele, ctx.depth - b.base)
        if m.indices:
            self.check_args(ctx, m.indices, tele, "fhcom-I")
            if not self.argtype_eq(ctx, SelfAt(m.indices), expected):
                self.fail(ctx, "Conversion", "fhcom-I", "index annotation disagrees with the expected index")
        self.dims(ctx, (m.src, m.dst), "fhcom-I")
        cons = [f.constraint for f in m.tube]
        for con in cons:
            self.constraint(ctx, con, "fhcom-I")
        if not ctx_valid(cons):
            self.fail(ctx, "Validity", "fhcom-I", "tube constraints are not valid")
        self.check_boundary_term(ctx, b, m.cap, expected)
        opened = []
        for f in m.tube:
            y, (body,) = self.open_dim(ctx, f.var, f.body)
            opened.append((f.constraint, y, body))
        for i, (con, y, body) in enumerate(opened):
            psi = constraint_mgu(con)
            if psi is UNSAT:
                continue
            rctx = ctx.restrict(psi).at(f"tube {i}")
            rb = b.restrict(psi)
            self.check_boundary_term(rctx.push_dims([y]), rb, dim_subst(body, psi), dim_subst(expected, psi))
            at_src = dim_subst(dim_subst(body, {y: m.src}), psi)
            self.require_conv(
                rctx,
                self.boundary_to_term(rctx, rb, at_src),
                self.boundary_to_term(rctx, rb, dim_subst(m.cap, psi)),
                "fhcom-I",
                f"tube face {i} does not start at the cap",
            )
        self._tube_pairs(ctx, b, opened)

    def _tube_pairs(self, ctx: CheckCtx, b: Optional[BoundaryCtx], opened) -> None:
        for i in range(len(opened)):
            for j in range(i + 1, len(opened)):
                ci, yi, bi = opened[i]
                cj, yj, bj = opened[j]
                psi = mgu_all([ci, cj])
                if psi is UNSAT:
                    continue
                w = fresh_name("y")
                rctx = ctx.restrict(psi).push_dims([w]).at(f"tube {i} against {j}")
                ti = dim_subst(dim_subst(bi, {yi: DimVar(w)}), psi)
                tj = dim_subst(dim_subst(bj, {yj: DimVar(w)}), psi)
                if b is not None:
                    rb = b.restrict(psi)
                    ti, tj = self.boundary_to_term(rctx, rb, ti), self.boundary_to_term(rctx, rb, tj)
                self.require_conv(rctx, ti, tj, "tube-agree", f"tube faces {i} and {j} disagree")

    def _check_bfcoe(self, ctx: CheckCtx, b: BoundaryCtx, m: BFcoe, expected: ArgType) -> None:
        if not isinstance(expected, SelfAt):
            self.fail(ctx, "Conversion", "fcoe-I", "fcoe is not a function")
        tele = shift(b.tele, ctx.depth - b.base)
        self.dims(ctx, (m.src, m.dst), "fcoe-I")
        z, line = self.open_dim(ctx, m.var, *m.indices)
        self.check_args(ctx.push_dims([z]), line, tele, "fcoe-I")
        at_dst = tuple(dim_subst(i, {z: m.dst}) for i in line)
        if not self.argtype_eq(ctx, SelfAt(at_dst), expected):
            self.fail(ctx, "Conversion", "fcoe-I", "the index line does not end at the expected index")
        at_src = tuple(dim_subst(i, {z: m.src}) for i in line)
        self.check_boundary_term(ctx, b, m.body, SelfAt(at_src))

    # -- eliminators ---------------------------------------------------------

    def check_elim_list(
        self, ctx: CheckCtx, tele: Tele, schema: Schema, names: Sequence[str], motive: Term, cases: ElimList
    ) -> None:
        n = len(tele)
        if len(cases) != len(schema):
            self.fail(ctx, "Arity", "elim-list", f"{len(schema)} constructors but {len(cases)} cases")
        fam = ind_family(tele, schema)
        for i, ((label, ctor), (clabel, case)) in enumerate(zip(schema.ctors, cases.cases)):
            cctx0 = ctx.at(f"case {label}")
            if clabel != label:
                self.fail(cctx0, "LabelOrder", "elim-list-height", f"case {i} is {clabel} but constructor {i} is {label}")
            nt = len(ctor.args)
            if len(case.dims) != len(ctor.dims) or case.arity != (len(ctor.params), nt, nt):
                self.fail(
                    cctx0,
                    "Arity",
                    "elim-list",
                    f"case binds {len(case.dims)} dimensions and {case.arity}; constructor needs "
                    f"{len(ctor.dims)} and {(len(ctor.params), nt, nt)}",
                )
            xs = []
            for x in case.dims:
                xs.append(_fresh_for(x, ctx.dims | set(xs)) if x in ctx.dims or x in xs else x)
            c = ctor.open(tuple(DimVar(x) for x in xs))
            body = dim_subst(case.body, {x: DimVar(y) for x, y in zip(case.dims, xs) if x != y})
            g = cctx0.push_dims(xs)
            ng = len(c.params)
            for b in c.params.entries:
                g = g.push(b.name, b.type)
            for j, decl in enumerate(c.args):
                g = g.push(case.args[j], tyatty(shift(decl.type, j), n, shift(fam, ng + j, n)))
            for j, decl in enumerate(c.args):
                g = g.push(
                    case.results[j],
                    tyatty_dep(shift(decl.type, nt + j), n, shift(motive, ng + nt + j, n + 1), Var(nt - 1)),
                )
            k = ng + 2 * nt
            gvars = tuple(Var(k - 1 - p, c.params.entries[p].name) for p in range(ng))
            evars = tuple(Var(2 * nt - 1 - j, case.args[j]) for j in range(nt))
            rvars = tuple(Var(nt - 1 - j, case.results[j]) for j in range(nt))
            intro = Intro(shift(schema, k), label, tuple(DimVar(x) for x in xs), gvars, evars)
            goal = instantiate(shift(motive, k, n + 1), shift_all(c.indices, 2 * nt) + (intro,))
            self.check(g, body, goal)
            prefix_cases = ElimList(cases.cases[:i])
            for kf, face in enumerate(c.boundary):
                psi = constraint_mgu(face.constraint, xs)
                if psi is UNSAT:
                    continue
                try:
                    rhs = insttm_dep(
                        shift(face.body, 2 * nt),
                        shift(schema, k),
                        shift(prefix_cases, k),
                        n,
                        shift(motive, k, n + 1),
                        evars,
                        rvars,
                    )
                except InterpError as exc:
                    self.fail(g, "LabelOrder", "elim-coherence", str(exc))
                rg = g.restrict(psi).at(f"boundary {kf}")
                self.require_conv(
                    rg,
                    dim_subst(body, psi),
                    dim_subst(rhs, psi),
                    "elim-coherence",
                    f"case disagrees with boundary {kf}",
                    dim_subst(goal, psi),
                )

    # -- terms ----------------------------------------------------------------

    def check(self, ctx: CheckCtx, t: Term, ty: Term) -> None:
        match t:
            case Lam(name=name, body=body):
                pi = self.whnf(ctx, ty)
                if not isinstance(pi, Pi):
                    self.fail(ctx, "Conversion", "lam", "a function is checked against a non-function type")
                self.check(ctx.push(name, pi.dom), body, pi.cod)
            case PLam(var=x, body=body):
                self.need(ctx, "paths", "path-I")
                pt = self.whnf(ctx, ty)
                if not isinstance(pt, PathTy):
                    self.fail(ctx, "Conversion", "path-I", "a path abstraction is checked against a non-path type")
                y = _fresh_for(x, ctx.dims)
                b = dim_subst(body, {x: DimVar(y)}) if y != x else body
                line = dim_subst(pt.type, {pt.var: DimVar(y)})
                self.check(ctx.push_dims([y]), b, line)
                self.require_conv(ctx, dim_subst(b, {y: 0}), pt.left, "path-I", "left endpoint")
                self.require_conv(ctx, dim_subst(b, {y: 1}), pt.right, "path-I", "right endpoint")
            case Intro():
                ind = self.whnf(ctx, ty)
                if not isinstance(ind, Ind):
                    self.fail(ctx, "Conversion", "intro", "a constructor is checked against a non-inductive type")
                self._check_intro(ctx, t, ind)
            case Fhcom():
                ind = self.whnf(ctx, ty)
                if not isinstance(ind, Ind):
                    self.fail(ctx, "Conversion", "fhcom", "fhcom is checked against a non-inductive type")
                self._check_fhcom(ctx, t, ind)
            case Fcoe() | Fcom():
                ind = self.whnf(ctx, ty)
                if not isinstance(ind, Ind):
                    self.fail(ctx, "Conversion", "fcoe", "fcoe is checked against a non-inductive type")
                self._check_fcoe(ctx, t, ind)
            case NatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                self.need(ctx, "natrec", "natrec")
                self.check(ctx, scrut, NAT)
                self.check(ctx, zero, ty)
                self.check(ctx.push(names[0], NAT).push(names[1], ty), succ, shift(ty, 2))
            case _:
                got = self.infer(ctx, t)
                self.require_conv(ctx, got, ty, "conv", "type mismatch")

    def infer(self, ctx: CheckCtx, t: Term) -> Term:
        match t:
            case Var(index=i):
                if not 0 <= i < ctx.depth:
                    self.fail(ctx, "Scope", "var", f"variable {i} is not in scope")
                ty = ctx.lookup(i)
                if ty is None:
                    self.fail(ctx, "Unsupported", "var", "variable type is not tracked here")
                return ty
            case App(fn=fn, arg=arg) if _redex_head(t) is not None:
                return self._infer_redex(ctx, t)
            case App(fn=fn, arg=arg):
                pi = self.whnf(ctx, self.infer(ctx, fn))
                if not isinstance(pi, Pi):
                    self.fail(ctx, "Conversion", "app", "applying a term that is not a function")
                self.check(ctx, arg, pi.dom)
                return instantiate(pi.cod, (arg,))
            case PApp(path=p, dim=r):
                self.need(ctx, "paths", "path-E")
                self.dim(ctx, r, "path-E")
                pt = self.whnf(ctx, self.infer(ctx, p))
                if not isinstance(pt, PathTy):
                    self.fail(ctx, "Conversion", "path-E", "applying a term that is not a path")
                return dim_subst(pt.type, {pt.var: r})
            case Intro():
                return self._infer_intro(ctx, t)
            case Fhcom(cap=cap):
                ind = self.whnf(ctx, self.infer(ctx, cap))
                if not isinstance(ind, Ind):
                    self.fail(ctx, "Conversion", "fhcom", "fhcom cap is not in an inductive type")
                self._check_fhcom(ctx, t, ind)
                return ind
            case Fcoe(body=body) | Fcom(cap=body):
                ind = self.whnf(ctx, self.infer(ctx, body))
                if not isinstance(ind, Ind):
                    self.fail(ctx, "Conversion", "fcoe", "fcoe argument is not in an inductive type")
                z, line = self.open_dim(ctx, t.var, *t.line)
                out = Ind(ind.tele, ind.schema, tuple(dim_subst(i, {z: t.dst}) for i in line))
                self._check_fcoe(ctx, t, out)
                return out
            case Hcom(type=a, src=r, dst=r2, cap=cap, tube=tube):
                self.check_type(ctx, a)
                self.dims(ctx, (r, r2), "hcom")
                self.check(ctx, cap, a)
                self._check_tube(ctx, "hcom", r, tube, cap, lambda y: a)
                return a
            case Coe(var=z, type=a, src=r, dst=r2, body=body):
                self.dims(ctx, (r, r2), "coe")
                y, (line,) = self.open_dim(ctx, z, a)
                self.check_type(ctx.push_dims([y]), line)
                self.check(ctx, body, dim_subst(line, {y: r}))
                return dim_subst(line, {y: r2})
            case Com(var=z, type=a, src=r, dst=r2, cap=cap, tube=tube):
                self.dims(ctx, (r, r2), "com")
                y, (line,) = self.open_dim(ctx, z, a)
                self.check_type(ctx.push_dims([y]), line)
                self.check(ctx, cap, dim_subst(line, {y: r}))
                self._check_tube(ctx, "com", r, tube, cap, lambda w: dim_subst(line, {y: w}))
                return dim_subst(line, {y: r2})
            case Tcoe(var=z, tele=tele, schema=schema, src=r, dst=r2, body=body):
                self.dims(ctx, (r, r2), "tcoe")
                y, (tl, sch) = self.open_dim(ctx, z, tele, schema)
                self.check_family(ctx.push_dims([y]), tl, sch)
                ind = self.whnf(ctx, self.infer(ctx, body))
                at_r = {y: r}
                if not (
                    isinstance(ind, Ind)
                    and alpha_eq(ind.tele, dim_subst(tl, at_r))
                    and alpha_eq(ind.schema, dim_subst(sch, at_r))
                ):
                    self.fail(ctx, "Conversion", "tcoe", "argument is not in the inductive type at the source")
                at_r2 = {y: r2}
                return Ind(dim_subst(tl, at_r2), dim_subst(sch, at_r2), mcoe(y, tl, r, r2, ind.indices))
            case Elim():
                return self._infer_elim(ctx, t)
            case NatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                self.need(ctx, "natrec", "natrec")
                self.check(ctx, scrut, NAT)
                ty = self.infer(ctx, zero)
                self.check(ctx.push(names[0], NAT).push(names[1], ty), succ, shift(ty, 2))
                return ty
            case Lam() | PLam():
                self.fail(ctx, "Unsupported", "infer", "cannot infer the type of an abstraction; annotate it")
            case Pi() | Ind() | PathTy():
                self.fail(ctx, "Unsupported", "infer", "types are not elements of a type (there are no universes)")
        self.fail(ctx, "Unsupported", "infer", f"no rule for {type(t).__name__}")

    def _infer_redex(self, ctx: CheckCtx, t: App) -> Term:
        """Infer ``(\\x y. B) a b``: type the arguments, then the substituted body."""
        lam, args = _redex_head(t)
        body = lam
        for a in args:
            self.infer(ctx, a)
            body = body.body
        return self.infer(ctx, instantiate(body, tuple(args)))

    def _check_tube(self, ctx: CheckCtx, rule: str, src: Dim, tube, cap: Term, line: Callable) -> None:
        cons = [f.constraint for f in tube]
        for con in cons:
            self.constraint(ctx, con, rule)
        if not ctx_valid(cons):
            self.fail(ctx, "Validity", rule, "tube constraints are not valid")
        opened = []
        for f in tube:
            y, (body,) = self.open_dim(ctx, f.var, f.body)
            opened.append((f.constraint, y, body))
        for i, (con, y, body) in enumerate(opened):
            psi = constraint_mgu(con)
            if psi is UNSAT:
                continue
            rctx = ctx.restrict(psi).at(f"tube {i}")
            ty_y = dim_subst(line(DimVar(y)), psi)
            self.check(rctx.push_dims([y]), dim_subst(body, psi), ty_y)
            at_src = dim_subst(dim_subst(body, {y: src}), psi)
            self.require_conv(
                rctx,
                at_src,
                dim_subst(cap, psi),
                rule,
                f"tube face {i} does not start at the cap",
                dim_subst(line(src), psi),
            )
        self._tube_pairs(ctx, None, opened)

    def _check_intro(self, ctx: CheckCtx, t: Intro, ind: Ind) -> None:
        if not alpha_eq(t.schema, ind.schema):
            self.fail(ctx, "Conversion", "intro", f"constructor {t.label} belongs to a different type")
        if t.label not in ind.schema:
            self.fail(ctx, "Scope", "intro", f"unknown constructor {t.label}")
        ctor = ind.schema.lookup(t.label)
        if len(t.dims) != len(ctor.dims):
            self.fail(ctx, "Arity", "intro", f"{t.label} expects {len(ctor.dims)} dimensions, got {len(t.dims)}")
        self.dims(ctx, t.dims, "intro")
        c = ctor.open(t.dims)
        self.check_args(ctx, t.params, c.params, "intro")
        if len(t.args) != len(c.args):
            self.fail(ctx, "Arity", "intro", f"{t.label} expects {len(c.args)} recursive arguments, got {len(t.args)}")
        n = len(ind.tele)
        fam = ind_family(ind.tele, ind.schema)
        for decl, a in zip(c.args, t.args):
            self.check(ctx, a, tyatty(instantiate(decl.type, t.params), n, fam))
        got = tuple(instantiate(i, t.params) for i in c.indices)
        if len(got) != len(ind.indices):
            self.fail(ctx, "Arity", "intro", "wrong number of indices")
        for i, (x, y) in enumerate(zip(got, ind.indices)):
            self.require_conv(ctx, x, y, "intro", f"{t.label} lands at index {i} that differs from the expected one")

    def _infer_intro(self, ctx: CheckCtx, t: Intro) -> Term:
        tele = None
        for ftele, fschema in reversed(self.families):
            if alpha_eq(fschema, t.schema):
                tele = ftele
                break
        if tele is None:
            if t.label in t.schema and not t.schema.lookup(t.label).indices:
                tele = Tele()
            else:
                self.fail(ctx, "Unsupported", "intro", f"cannot infer the index telescope of {t.label}; annotate it")
        self.check_family(ctx, tele, t.schema)
        if t.label not in t.schema:
            self.fail(ctx, "Scope", "intro", f"unknown constructor {t.label}")
        ctor = t.schema.lookup(t.label)
        if len(t.dims) != len(ctor.dims) or len(t.params) != len(ctor.params):
            self.fail(ctx, "Arity", "intro", f"{t.label} applied to the wrong number of items")
        c = ctor.open(t.dims)
        ind = Ind(tele, t.schema, tuple(instantiate(i, t.params) for i in c.indices))
        self._check_intro(ctx, t, ind)
        return ind

    def _check_fhcom(self, ctx: CheckCtx, t: Fhcom, ind: Ind) -> None:
        self.dims(ctx, (t.src, t.dst), "fhcom")
        self.check(ctx, t.cap, ind)
        self._check_tube(ctx, "fhcom", t.src, t.tube, t.cap, lambda y: ind)

    def _check_fcoe(self, ctx: CheckCtx, t, ind: Ind) -> None:
        rule = "fcoe" if isinstance(t, Fcoe) else "fcom"
        self.dims(ctx, (t.src, t.dst), rule)
        z, line = self.open_dim(ctx, t.var, *t.line)
        self.check_args(ctx.push_dims([z]), line, ind.tele, rule)
        if len(line) != len(ind.indices):
            self.fail(ctx, "Arity", rule, "index line has the wrong length")
        for i, (x, y) in enumerate(zip(line, ind.indices)):
            self.require_conv(ctx, dim_subst(x, {z: t.dst}), y, rule, f"index line ends away from index {i}")

        def at(r: Dim) -> Ind:
            return Ind(ind.tele, ind.schema, tuple(dim_subst(i, {z: r}) for i in line))

        if isinstance(t, Fcoe):
            self.check(ctx, t.body, at(t.src))
        else:
            self.check(ctx, t.cap, at(t.src))
            self._check_tube(ctx, rule, t.src, t.tube, t.cap, at)

    def _infer_elim(self, ctx: CheckCtx, t: Elim) -> Term:
        ind = self.whnf(ctx, self.infer(ctx, t.scrut))
        if not isinstance(ind, Ind):
            self.fail(ctx, "Conversion", "elim", "the scrutinee is not in an inductive type")
        n = len(ind.tele)
        if len(t.names) != n + 1:
            self.fail(ctx, "Arity", "elim", f"the motive must bind {n} indices and the scrutinee")
        self.check_args(ctx, t.indices, ind.tele, "elim")
        for i, (x, y) in enumerate(zip(t.indices, ind.indices)):
            self.require_conv(ctx, x, y, "elim", f"index {i} does not match the scrutinee's type")
        mctx = ctx
        for b, name in zip(ind.tele.entries, t.names):
            mctx = mctx.push(name, b.type)
        fam = ind_family(ind.tele, ind.schema)
        mctx = mctx.push(t.names[-1], fam)
        self.check_type(mctx.at("motive"), t.motive)
        self.check_elim_list(ctx, ind.tele, ind.schema, t.names, t.motive, t.cases)
        return instantiate(t.motive, tuple(t.indices) + (t.scrut,))


def _redex_head(t: Term) -> Optional[tuple[Lam, list]]:
    """A spine whose head is a lambda, with as many arguments as leading lambdas."""
    args: list = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    if not isinstance(t, Lam):
        return None
    args.reverse()
    lam, n = t, 0
    while isinstance(lam, Lam) and n < len(args):
        lam, n = lam.body, n + 1
    if n < len(args):
        return None
    return t, args


# ---------------------------------------------------------------------------
# Module-level entry points


def _checker(extensions: Iterable[str] = ()) -> Checker:
    return Checker(extensions)


def check_constrs(tele: Tele, schema: Schema, extensions: Iterable[str] = (), ctx: Optional[CheckCtx] = None) -> None:
    ch = _checker(extensions)
    ctx = ctx or CheckCtx()
    ch.check_tele(ctx, tele)
    ch.check_constrs(ctx, tele, schema)


def check_constructor(
    tele: Tele, prefix: Schema, label: str, ctor: Constructor, extensions: Iterable[str] = ()
) -> None:
    _checker(extensions).check_constructor(CheckCtx(), tele, prefix, label, ctor)


def check_elim_list(
    tele: Tele,
    schema: Schema,
    names: Sequence[str],
    motive: Term,
    cases: ElimList,
    extensions: Iterable[str] = (),
) -> None:
    _checker(extensions).check_elim_list(CheckCtx(), tele, schema, names, motive, cases)


def check_term(t: Term, ty: Term, extensions: Iterable[str] = (), ctx: Optional[CheckCtx] = None) -> None:
    ch = _checker(extensions)
    ctx = ctx or CheckCtx()
    ch.check_type(ctx, ty)
    ch.check(ctx, t, ty)


def infer_term(t: Term, extensions: Iterable[str] = (), ctx: Optional[CheckCtx] = None) -> Term:
    return _checker(extensions).infer(ctx or CheckCtx(), t)


def convert(a: Term, b: Term, at: Optional[Term] = None, ctx: Optional[CheckCtx] = None) -> bool:
    return _checker(EXTENSIONS).convert(ctx or CheckCtx(), a, b, at)


def required_extensions(node) -> frozenset:
    """The language extensions a piece of syntax uses."""
    found: set[str] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (NatRec, BNatRec)):
            found.add("natrec")
        elif isinstance(n, (PathTy, PLam, PApp)):
            found.add("paths")
        if isinstance(n, tuple):
            stack.extend(n)
        elif isinstance(n, Node):
            stack.extend(getattr(n, f.name) for f in fields(n))
    return frozenset(found)
