"""Meta-operations that turn schema data into ordinary terms.

A "family" ``δ.A`` is passed as a term ``A`` together with the number ``n`` of
index binders it sits under (``Var(0)`` is the last index).  A motive
``δ.h.D`` is a term under ``n + 1`` binders with ``h`` innermost.

Boundary terms refer to the recursive arguments of their constructor by
position (``BVar(j)``), so interpreting them only needs the list of terms
standing for those arguments.  Every function below takes its term inputs at
the current depth and shifts them when it goes under a binder.
"""

from __future__ import annotations

from typing import Sequence

from .syntax import (
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
    Constructor,
    Dim,
    DimVar,
    Elim,
    ElimList,
    Face,
    Fcoe,
    Fhcom,
    Ind,
    Intro,
    Lam,
    NatRec,
    Pi,
    Schema,
    SelfAt,
    Tele,
    Term,
    Var,
    dim_subst,
    fresh_dim,
    index_vars,
    instantiate,
    shift,
    shift_all,
    substitute,
)


class InterpError(Exception):
    """Raised on ill-scoped input to a meta-operation (a programming error)."""


# ---------------------------------------------------------------------------
# Argument types


def tyatty(b: ArgType, n: int, fam: Term) -> Term:
    """Interpret an argument type at the family ``δ.fam`` (``n`` index binders)."""
    match b:
        case SelfAt(indices=indices):
            if len(indices) != n:
                raise InterpError(f"tyatty: expected {n} indices, got {len(indices)}")
            return instantiate(fam, indices)
        case ArgPi(name=name, dom=dom, cod=cod):
            return Pi(name, dom, tyatty(cod, n, shift(fam, 1, n)))
    raise InterpError(f"tyatty: not an argument type: {b!r}")


def tyatty_all(bs: Sequence[ArgType], n: int, fam: Term) -> tuple[Term, ...]:
    return tuple(tyatty(b, n, fam) for b in bs)


def tyatty_dep(b: ArgType, n: int, motive: Term, m: Term) -> Term:
    """Dependent interpretation: the type of the recursive result for argument ``m``."""
    match b:
        case SelfAt(indices=indices):
            if len(indices) != n:
                raise InterpError(f"tyatty_dep: expected {n} indices, got {len(indices)}")
            return instantiate(motive, tuple(indices) + (m,))
        case ArgPi(name=name, dom=dom, cod=cod):
            inner = App(shift(m, 1), _var0(name))
            return Pi(name, dom, tyatty_dep(cod, n, shift(motive, 1, n + 1), inner))
    raise InterpError(f"tyatty_dep: not an argument type: {b!r}")


def func_action(b: ArgType, n: int, body: Term, m: Term) -> Term:
    """Push the map ``δ.h.body`` through the argument type ``b`` applied to ``m``."""
    match b:
        case SelfAt(indices=indices):
            if len(indices) != n:
                raise InterpError(f"func_action: expected {n} indices, got {len(indices)}")
            return instantiate(body, tuple(indices) + (m,))
        case ArgPi(name=name, cod=cod):
            inner = App(shift(m, 1), _var0(name))
            return Lam(name, func_action(cod, n, shift(body, 1, n + 1), inner))
    raise InterpError(f"func_action: not an argument type: {b!r}")


def _var0(name: str) -> Term:
    return Var(0, name)


def ind_family(tele: Tele, schema: Schema) -> Term:
    """The family ``δ.Ind(Δ, K, δ)`` under ``|Δ|`` binders."""
    n = len(tele)
    return Ind(shift(tele, n), shift(schema, n), index_vars(n, tele.names))


def elim_family(n: int, names: Sequence[str], motive: Term, cases: ElimList) -> Term:
    """The map ``δ.h.elim(δ.h.D, δ, h, E)`` under ``n + 1`` binders."""
    k = n + 1
    return Elim(
        tuple(names),
        shift(motive, k, k),
        index_vars(k)[:n],
        _var0(names[-1] if names else "h"),
        shift(cases, k),
    )


# ---------------------------------------------------------------------------
# Boundary interpretation


def _fresh_binder(name: str, avoid: frozenset) -> str:
    return fresh_dim(name).name if name in avoid else name


def _dims_of(ts: Sequence[Term]) -> frozenset:
    out: frozenset = frozenset()
    for t in ts:
        out |= t.free_dims
    return out


def insttm(m: BoundaryTerm, schema: Schema, ns: Sequence[Term]) -> Term:
    """Interpret a boundary term at schema ``schema`` with recursive arguments ``ns``."""
    ns = tuple(ns)
    match m:
        case BVar(index=j):
            if not 0 <= j < len(ns):
                raise InterpError(f"insttm: boundary variable {j} out of range ({len(ns)} arguments)")
            return ns[j]
        case BIntro(label=label, dims=dims, params=params, args=args):
            if label not in schema:
                raise InterpError(f"insttm: unknown label {label!r}")
            return Intro(schema, label, dims, params, tuple(insttm(a, schema, ns) for a in args))
        case BFhcom(src=src, dst=dst, cap=cap, tube=tube):
            avoid = _dims_of(ns) | schema.free_dims
            faces = []
            for f in tube:
                y = _fresh_binder(f.var, avoid)
                body = f.body if y == f.var else dim_subst(f.body, {f.var: DimVar(y)})
                faces.append(Face(f.constraint, y, insttm(body, schema, ns)))
            return Fhcom(src, dst, insttm(cap, schema, ns), tuple(faces))
        case BFcoe(var=z, indices=line, src=src, dst=dst, body=body):
            return Fcoe(z, line, src, dst, insttm(body, schema, ns))
        case BLam(name=name, body=body):
            return Lam(name, insttm(body, shift(schema, 1), shift_all(ns, 1)))
        case BApp(fn=fn, arg=arg):
            return App(insttm(fn, schema, ns), arg)
        case BNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
            inner_ns = shift_all(ns, 2) + (_var0(names[1]),)
            return NatRec(
                scrut,
                insttm(zero, schema, ns),
                names,
                insttm(shift(succ, 1), shift(schema, 2), inner_ns),
            )
    raise InterpError(f"insttm: not a boundary term: {m!r}")


def insttm_dep(
    m: BoundaryTerm,
    schema: Schema,
    cases: ElimList,
    n: int,
    motive: Term,
    ns: Sequence[Term],
    ss: Sequence[Term],
) -> Term:
    """Dependent interpretation: what the eliminator must produce on ``insttm(m)``.

    ``motive`` is ``δ.h.D`` under ``n + 1`` binders, ``ns`` interpret the
    boundary variables and ``ss`` are the corresponding recursive results.
    """
    ns, ss = tuple(ns), tuple(ss)

    def again(sub: BoundaryTerm) -> Term:
        return insttm_dep(sub, schema, cases, n, motive, ns, ss)

    match m:
        case BVar(index=j):
            if not 0 <= j < len(ss):
                raise InterpError(f"insttm_dep: boundary variable {j} out of range ({len(ss)} results)")
            return ss[j]
        case BIntro(label=label, dims=dims, params=params, args=args):
            try:
                case = cases.lookup(label)
            except KeyError:
                raise InterpError(f"insttm_dep: no eliminator case for {label!r}") from None
            etas = tuple(insttm(a, schema, ns) for a in args)
            rhos = tuple(again(a) for a in args)
            return case_body(case, dims, params, etas, rhos)
        case BFhcom(indices=indices, src=src, dst=dst, cap=cap, tube=tube):
            y = fresh_dim("y")
            filler = insttm(BFhcom(indices, src, y, cap, tube), schema, ns)
            line = instantiate(motive, tuple(indices) + (filler,))
            faces = []
            for f in tube:
                w = fresh_dim(f.var)
                body = dim_subst(f.body, {f.var: w})
                faces.append(Face(f.constraint, w.name, again(body)))
            return Com(y.name, line, src, dst, again(cap), tuple(faces))
        case BFcoe(var=z, indices=line_idx, src=src, dst=dst, body=body):
            w = fresh_dim(z)
            idx = tuple(dim_subst(i, {z: w}) for i in line_idx)
            filler = insttm(BFcoe(z, line_idx, src, w, body), schema, ns)
            line = instantiate(motive, idx + (filler,))
            return Coe(w.name, line, src, dst, again(body))
        case BLam(name=name, body=body):
            return Lam(
                name,
                insttm_dep(body, shift(schema, 1), shift(cases, 1), n, shift(motive, 1, n + 1),
                           shift_all(ns, 1), shift_all(ss, 1)),
            )
        case BApp(fn=fn, arg=arg):
            return App(again(fn), arg)
        case BNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
            a_name, r_name = names
            # Inside the successor case the context grows by the predecessor ``a``
            # and the recursive result ``r``; the boundary variable ``p`` stands for
            # the recursion on ``a``.
            sch2 = shift(schema, 2)
            ns2 = shift_all(ns, 2)
            rec_on_a = insttm(
                BNatRec(_var1(a_name), shift(zero, 2), names, shift(succ, 2, 1)),
                sch2,
                ns2,
            )
            return NatRec(
                scrut,
                again(zero),
                names,
                insttm_dep(
                    shift(succ, 1),
                    sch2,
                    shift(cases, 2),
                    n,
                    shift(motive, 2, n + 1),
                    ns2 + (rec_on_a,),
                    shift_all(ss, 2) + (_var0(r_name),),
                ),
            )
    raise InterpError(f"insttm_dep: not a boundary term: {m!r}")


def _var1(name: str) -> Term:
    return Var(1, name)


def case_body(case, dims: Sequence[Dim], params: Sequence[Term], etas: Sequence[Term], rhos: Sequence[Term]) -> Term:
    """``R⟨r⃗/x⃗⟩[P⃗/γ][η⃗][ρ⃗]`` for an eliminator case."""
    if len(dims) != len(case.dims):
        raise InterpError(f"eliminator case expects {len(case.dims)} dimensions, got {len(dims)}")
    if (len(params), len(etas), len(rhos)) != case.arity:
        raise InterpError(
            f"eliminator case arity {case.arity} does not match ({len(params)}, {len(etas)}, {len(rhos)})"
        )
    psi = {x: r for x, r in zip(case.dims, dims)}
    return substitute(case.body, tuple(params) + tuple(etas) + tuple(rhos), psi)


# ---------------------------------------------------------------------------
# Coercion through telescopes


def mcoe(z: str, tele: Tele, src: Dim, dst: Dim, ms: Sequence[Term]) -> tuple[Term, ...]:
    """Coerce a list of terms through the telescope line ``z.tele`` from ``src`` to ``dst``."""
    ms = tuple(ms)
    if len(ms) != len(tele):
        raise InterpError(f"mcoe: telescope has {len(tele)} entries but {len(ms)} terms were given")
    out: list[Term] = []
    for i, entry in enumerate(tele.entries):
        w = fresh_dim(z)
        prefix = Tele(tele.entries[:i])
        earlier = mcoe(z, prefix, src, w, ms[:i]) if i else ()
        line = instantiate(dim_subst(entry.type, {z: w}), earlier)
        out.append(Coe(w.name, line, src, dst, ms[i]))
    return tuple(out)


def open_constructor(schema: Schema, label: str, dims: Sequence[Dim]) -> Constructor:
    try:
        ctor = schema.lookup(label)
    except KeyError:
        raise InterpError(f"unknown constructor {label!r}") from None
    return ctor.open(tuple(dims))
