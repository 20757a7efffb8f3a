"""Turn core syntax back into the concrete syntax of :mod:`cubind.surface`.

Schemas are printed by name through a :class:`NameEnv`, closed numerals are
printed as digits, and binder names are chosen so that the output parses back
to the same term: a name never shadows another name in scope, a label or a
type name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import surface as S
from .prelude import BOOL, CIRCLE, EMPTY, NAT, NAT_SCHEMA, read_numeral
from .syntax import (
    App,
    ArgPi,
    BApp,
    BFcoe,
    BFhcom,
    BIntro,
    BLam,
    BNatRec,
    BVar,
    Coe,
    Com,
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
    Schema,
    SelfAt,
    Tcoe,
    Tele,
    Var,
    base_name,
    mentions_var,
)


@dataclass
class NameEnv:
    """Named inductive types, most recent last."""

    types: list[tuple[str, Tele, Schema]] = field(default_factory=list)

    def add(self, name: str, tele: Tele, schema: Schema) -> None:
        self.types.append((name, tele, schema))

    def copy(self) -> NameEnv:
        return NameEnv(list(self.types))

    def schema_name(self, schema: Schema) -> Optional[str]:
        for name, _, sch in reversed(self.types):
            if sch is schema or sch == schema:
                return name
        return None

    def lookup_type(self, name: str) -> Optional[tuple[Tele, Schema]]:
        for n, tele, sch in reversed(self.types):
            if n == name:
                return tele, sch
        return None

    def label_owner(self, label: str) -> Optional[Schema]:
        for _, _, sch in reversed(self.types):
            if label in sch:
                return sch
        return None

    def reserved(self) -> set[str]:
        out = set()
        for n, _, sch in self.types:
            out.add(n)
            out.update(sch.labels)
        return out


def prelude_env() -> NameEnv:
    env = NameEnv()
    for name, ty in (("nat", NAT), ("bool", BOOL), ("empty", EMPTY), ("circle", CIRCLE)):
        env.add(name, ty.tele, ty.schema)
    return env


_DEFAULT_ENV = prelude_env()


class _Namer:
    def __init__(self, env: NameEnv, free_dims: Sequence[str] = ()) -> None:
        self.env = env
        self.reserved = env.reserved() | set(S.KEYWORDS)
        self.terms: list[str] = []
        self.dims: dict[str, str] = {}
        self.used_dims: set[str] = set()
        for x in free_dims:
            shown = self._free_dim_name(x)
            self.dims[x] = shown
            self.used_dims.add(shown)

    @staticmethod
    def _free_dim_name(x: str) -> str:
        return x.replace("%", "_")

    # -- names -------------------------------------------------------------

    def pick_term(self, hint: str) -> str:
        base = base_name(hint or "a").rstrip("'")
        if base in ("_", "") or not base[0].isalpha() and base[0] != "_":
            base = "v"
        if base == "_":
            base = "v"
        taken = set(self.terms) | self.reserved | set(self.dims.values())
        name = base
        k = 1
        while name in taken:
            name = f"{base}{k}"
            k += 1
        return name

    def push_terms(self, hints: Sequence[str]) -> list[str]:
        out = []
        for h in hints:
            n = self.pick_term(h)
            self.terms.append(n)
            out.append(n)
        return out

    def pop_terms(self, k: int) -> None:
        if k:
            del self.terms[-k:]

    def push_dims(self, names: Sequence[str]) -> tuple[list[str], dict]:
        saved = dict(self.dims)
        out = []
        for x in names:
            base = base_name(x)
            taken = set(self.dims.values()) | self.reserved | set(self.terms)
            shown = base
            k = 1
            while shown in taken:
                shown = f"{base}{k}"
                k += 1
            self.dims[x] = shown
            out.append(shown)
        return out, saved

    def restore_dims(self, saved: dict) -> None:
        self.dims = saved

    def dim(self, r: Dim) -> S.SDim:
        if isinstance(r, DimVar):
            return self.dims.get(r.name, self._free_dim_name(r.name))
        return r

    def var(self, v: Var) -> str:
        if v.index < len(self.terms):
            return self.terms[-1 - v.index]
        return f"free{v.index - len(self.terms)}"


class _Delab:
    def __init__(self, env: NameEnv, namer: _Namer) -> None:
        self.env = env
        self.n = namer

    # -- helpers -----------------------------------------------------------

    def under_terms(self, hints: Sequence[str], fn):
        names = self.n.push_terms(hints)
        try:
            return names, fn()
        finally:
            self.n.pop_terms(len(hints))

    def under_dims(self, names: Sequence[str], fn):
        shown, saved = self.n.push_dims(names)
        try:
            return shown, fn()
        finally:
            self.n.restore_dims(saved)

    def faces(self, tube: Sequence[Face]) -> tuple:
        out = []
        for f in tube:
            (y,), body = self.under_dims((f.var,), lambda f=f: self.term(f.body))
            out.append(S.SFace(self.n.dim(f.constraint.lhs), self.n.dim(f.constraint.rhs), y, body))
        return tuple(out)

    def type_name(self, schema: Schema) -> str:
        name = self.env.schema_name(schema)
        if name is not None:
            return name
        return "data{" + "|".join(schema.labels) + "}"

    def label(self, schema: Schema, label: str) -> str:
        owner = self.env.label_owner(label)
        if owner is schema or owner == schema:
            return label
        return f"{self.type_name(schema)}::{label}"

    # -- terms -------------------------------------------------------------

    def term(self, t: Node):
        match t:
            case Var():
                return S.SName(self.n.var(t))
            case Lam():
                names: list[str] = []
                body = t
                while isinstance(body, Lam):
                    names.append(body.name)
                    body = body.body
                shown, inner = self.under_terms(names, lambda: self.term(body))
                return S.SLam(tuple(shown), inner)
            case App(fn=fn, arg=arg):
                return S.SApp(self.term(fn), self.term(arg))
            case Pi(name=name, dom=dom, cod=cod):
                d = self.term(dom)
                if not mentions_var(cod, 0):
                    _, c = self.under_terms(("_",), lambda: self.term(cod))
                    return S.SPi(None, d, c)
                (a,), c = self.under_terms((name,), lambda: self.term(cod))
                return S.SPi(a, d, c)
            case Ind(schema=schema, indices=indices):
                name = self.type_name(schema)
                if indices:
                    return S.SCall(name, tuple(self.term(i) for i in indices))
                return S.SName(name)
            case Intro(schema=schema, label=label, dims=dims, params=params, args=args):
                if schema == NAT_SCHEMA:
                    k = read_numeral(t)
                    if k is not None:
                        return S.SNum(k)
                items = (
                    tuple(self.dim_expr(r) for r in dims)
                    + tuple(self.term(p) for p in params)
                    + tuple(self.term(a) for a in args)
                )
                head = self.label(schema, label)
                if not items and "::" not in head:
                    return S.SName(head)
                return S.SCall(head, items)
            case Fhcom(src=r, dst=r2, cap=cap, tube=tube):
                return S.SFhcom(None, self.n.dim(r), self.n.dim(r2), self.term(cap), self.faces(tube))
            case Fcoe(var=z, line=line, src=r, dst=r2, body=body):
                (zz,), ln = self.under_dims((z,), lambda: tuple(self.term(i) for i in line))
                return S.SFcoe(zz, ln, self.n.dim(r), self.n.dim(r2), self.term(body))
            case Fcom(var=z, line=line, src=r, dst=r2, cap=cap, tube=tube):
                (zz,), ln = self.under_dims((z,), lambda: tuple(self.term(i) for i in line))
                return S.SFcom(zz, ln, self.n.dim(r), self.n.dim(r2), self.term(cap), self.faces(tube))
            case Hcom(type=a, src=r, dst=r2, cap=cap, tube=tube):
                return S.SHcom(self.term(a), self.n.dim(r), self.n.dim(r2), self.term(cap), self.faces(tube))
            case Coe(var=z, type=a, src=r, dst=r2, body=body):
                (zz,), ty = self.under_dims((z,), lambda: self.term(a))
                return S.SCoe(zz, ty, self.n.dim(r), self.n.dim(r2), self.term(body))
            case Com(var=z, type=a, src=r, dst=r2, cap=cap, tube=tube):
                (zz,), ty = self.under_dims((z,), lambda: self.term(a))
                return S.SCom(zz, ty, self.n.dim(r), self.n.dim(r2), self.term(cap), self.faces(tube))
            case Tcoe(var=z, schema=schema, src=r, dst=r2, body=body):
                (zz,), ty = self.under_dims((z,), lambda: S.SName(self.type_name(schema)))
                return S.STcoe(zz, ty, self.n.dim(r), self.n.dim(r2), self.term(body))
            case Elim(names=names, motive=motive, indices=indices, scrut=scrut, cases=cases):
                shown, mot = self.under_terms(names, lambda: self.term(motive))
                out_cases = []
                for label, case in cases.cases:
                    out_cases.append(self.case(label, case))
                return S.SElim(
                    tuple(shown),
                    mot,
                    tuple(self.term(i) for i in indices),
                    self.term(scrut),
                    tuple(out_cases),
                )
            case PathTy(var=x, type=a, left=l, right=r):
                (xx,), ty = self.under_dims((x,), lambda: self.term(a))
                return S.SPath(xx, ty, self.term(l), self.term(r))
            case PLam(var=x, body=body):
                (xx,), b = self.under_dims((x,), lambda: self.term(body))
                return S.SPLam(xx, b)
            case PApp(path=p, dim=r):
                return S.SPApp(self.term(p), self.n.dim(r))
            case NatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                shown, s = self.under_terms(names, lambda: self.term(succ))
                return S.SNatRec(self.term(scrut), self.term(zero), (shown[0], shown[1]), s)
        raise TypeError(f"cannot display {type(t).__name__}")

    def dim_expr(self, r: Dim):
        shown = self.n.dim(r)
        return S.SNum(shown) if isinstance(shown, int) else S.SName(shown)

    def case(self, label: str, case) -> S.SCase:
        def body():
            names = self.n.push_terms(case.params + case.args + case.results)
            try:
                return names, self.term(case.body)
            finally:
                self.n.pop_terms(len(names))

        dims, (names, b) = self.under_dims(case.dims, body)
        k = len(case.params) + len(case.args)
        return S.SCase(label, tuple(dims) + tuple(names[:k]), tuple(names[k:]), b)

    # -- schemas -----------------------------------------------------------

    def data(self, name: str, tele: Tele, schema: Schema) -> S.SData:
        tele_out = []
        names: list[str] = []
        for b in tele.entries:
            ty = self.term(b.type)
            (shown,) = self.n.push_terms((b.name,))
            names.append(shown)
            tele_out.append((shown, ty))
        self.n.pop_terms(len(names))
        ctors = [self.ctor(label, c, schema) for label, c in schema.ctors]
        return S.SData(name, tuple(tele_out), tuple(ctors))

    def ctor(self, label: str, c, schema: Schema) -> S.SCtor:
        def inside():
            items: list[S.SItem] = []
            pushed = 0
            for b in c.params.entries:
                ty = self.term(b.type)
                (shown,) = self.n.push_terms((b.name,))
                pushed += 1
                items.append(S.SItem(shown, ty))
            result = tuple(self.term(i) for i in c.indices)
            arg_names = []
            for a in c.args:
                ty = self.argtype(a.type)
                shown = self.n.pick_term(a.name)
                arg_names.append(shown)
                items.append(S.SItem(shown, ty))
            # Argument names are not term variables, but keep them distinct from everything else.
            self.n.reserved |= set(arg_names)
            try:
                faces = tuple(
                    S.SFace(self.n.dim(f.constraint.lhs), self.n.dim(f.constraint.rhs), None,
                            self.bterm(f.body, arg_names, schema))
                    for f in c.boundary
                )
            finally:
                self.n.reserved -= set(arg_names)
                self.n.pop_terms(pushed)
            return items, result, faces

        dims, (items, result, faces) = self.under_dims(c.dims, inside)
        all_items = tuple(S.SItem(d) for d in dims) + tuple(items)
        return S.SCtor(label, all_items, result, faces)

    def argtype(self, b):
        match b:
            case SelfAt(indices=indices):
                return S.SSelf(tuple(self.term(i) for i in indices))
            case ArgPi(name=name, dom=dom, cod=cod):
                d = self.term(dom)
                if not mentions_var(cod, 0):
                    _, c = self.under_terms(("_",), lambda: self.argtype(cod))
                    return S.SPi(None, d, c)
                (a,), c = self.under_terms((name,), lambda: self.argtype(cod))
                return S.SPi(a, d, c)
        raise TypeError(f"not an argument type: {b!r}")

    def bterm(self, m, args: list[str], schema: Schema):
        match m:
            case BVar(index=j):
                return S.SName(args[j] if j < len(args) else f"arg{j}")
            case BIntro(label=label, dims=dims, params=params, args=bargs):
                items = (
                    tuple(self.dim_expr(r) for r in dims)
                    + tuple(self.term(p) for p in params)
                    + tuple(self.bterm(a, args, schema) for a in bargs)
                )
                return S.SCall(label, items) if items else S.SName(label)
            case BFhcom(indices=indices, src=r, dst=r2, cap=cap, tube=tube):
                faces = []
                for f in tube:
                    (y,), body = self.under_dims((f.var,), lambda f=f: self.bterm(f.body, args, schema))
                    faces.append(S.SFace(self.n.dim(f.constraint.lhs), self.n.dim(f.constraint.rhs), y, body))
                ann = tuple(self.term(i) for i in indices) if indices else None
                return S.SFhcom(ann, self.n.dim(r), self.n.dim(r2), self.bterm(cap, args, schema), tuple(faces))
            case BFcoe(var=z, indices=line, src=r, dst=r2, body=body):
                (zz,), ln = self.under_dims((z,), lambda: tuple(self.term(i) for i in line))
                return S.SFcoe(zz, ln, self.n.dim(r), self.n.dim(r2), self.bterm(body, args, schema))
            case BLam(name=name, body=body):
                (a,), b = self.under_terms((name,), lambda: self.bterm(body, args, schema))
                return S.SLam((a,), b)
            case BApp(fn=fn, arg=arg):
                return S.SApp(self.bterm(fn, args, schema), self.term(arg))
            case BNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                scrut_e = self.term(scrut)
                zero_e = self.bterm(zero, args, schema)
                a_name = self.n.pick_term(names[0])
                self.n.terms.append(a_name)
                p_name = self.n.pick_term(names[1])
                self.n.reserved.add(p_name)
                try:
                    s = self.bterm(succ, args + [p_name], schema)
                finally:
                    self.n.reserved.discard(p_name)
                    self.n.pop_terms(1)
                return S.SNatRec(scrut_e, zero_e, (a_name, p_name), s)
        raise TypeError(f"not a boundary term: {m!r}")


def to_surface(t: Node, env: Optional[NameEnv] = None, names: Sequence[str] = ()):
    """Surface syntax for a core term; ``names`` are the free variables, outermost first."""
    env = env or _DEFAULT_ENV
    namer = _Namer(env, sorted(t.free_dims))
    namer.terms = list(names)
    return _Delab(env, namer).term(t)


def show_term(t: Node, env: Optional[NameEnv] = None, names: Sequence[str] = ()) -> str:
    return S.print_expr(to_surface(t, env, names))


def data_to_surface(name: str, tele: Tele, schema: Schema, env: Optional[NameEnv] = None) -> S.SData:
    env = env or _DEFAULT_ENV
    return _Delab(env, _Namer(env)).data(name, tele, schema)


def show_dim(r: Dim) -> str:
    return str(r) if not isinstance(r, DimVar) else r.name.replace("%", "_")
