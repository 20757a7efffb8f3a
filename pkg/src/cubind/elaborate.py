"""Turn parsed surface syntax into core terms and schemas.

Names are resolved in this order: term variables in scope, definitions, type
names, constructor labels.  Definitions are closed and are inlined.  The items
of a constructor call ``label(items)`` are split by the constructor's arity
into dimensions, parameters and recursive arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import surface as S
from .pretty import NameEnv, prelude_env
from .prelude import numeral
from .syntax import (
    ArgDecl,
    ArgPi,
    BApp,
    BFace,
    BFcoe,
    BFhcom,
    BIntro,
    BLam,
    BNatRec,
    BVar,
    Binding,
    Coe,
    Com,
    Constraint,
    Constructor,
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
    NatRec,
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
    App,
)


class ElabError(Exception):
    """A name or arity problem found while translating surface syntax."""

    def __init__(self, message: str, pos: S.Pos = (0, 0), kind: str = "Scope") -> None:
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")
        self.message = message
        self.pos = pos
        self.kind = kind


@dataclass
class Definition:
    name: str
    term: Term
    type: Optional[Term]


@dataclass
class Env:
    """Declarations seen so far: named types and closed definitions."""

    types: NameEnv = field(default_factory=prelude_env)
    defs: dict[str, Definition] = field(default_factory=dict)

    def copy(self) -> Env:
        return Env(self.types.copy(), dict(self.defs))

    def lookup_label(self, label: str) -> Optional[Schema]:
        if "::" in label:
            tname, lbl = label.split("::", 1)
            found = self.types.lookup_type(tname)
            if found is None or lbl not in found[1]:
                return None
            return found[1]
        return self.types.label_owner(label)


def _plain_label(label: str) -> str:
    return label.split("::", 1)[1] if "::" in label else label


def _ends_in_self(e) -> bool:
    while isinstance(e, S.SPi):
        e = e.cod
    return isinstance(e, S.SSelf)


@dataclass
class _Arity:
    dims: int
    params: int
    args: int


def _ctor_arity(c: Constructor) -> _Arity:
    return _Arity(len(c.dims), len(c.params), len(c.args))


def _surface_ctor_arity(c: S.SCtor) -> _Arity:
    nd = sum(1 for i in c.items if i.type is None)
    na = sum(1 for i in c.items if i.type is not None and _ends_in_self(i.type))
    return _Arity(nd, len(c.items) - nd - na, na)


class _Scope:
    """Term variables (innermost last), bound dimensions and boundary variables."""

    def __init__(self, free_dims: bool = False) -> None:
        self.terms: list[str] = []
        self.dims: list[str] = []
        self.bvars: list[str] = []
        self.free_dims = free_dims

    def term_index(self, name: str) -> Optional[int]:
        for i in range(len(self.terms) - 1, -1, -1):
            if self.terms[i] == name:
                return len(self.terms) - 1 - i
        return None

    def bvar_level(self, name: str) -> Optional[int]:
        for j in range(len(self.bvars) - 1, -1, -1):
            if self.bvars[j] == name:
                return j
        return None


class Elaborator:
    def __init__(self, env: Env, free_dims: bool = False) -> None:
        self.env = env
        self.scope = _Scope(free_dims)
        # Set while elaborating a data declaration.
        self.current: Optional[tuple[str, Schema, dict[str, _Arity]]] = None

    # -- scope helpers -----------------------------------------------------

    def with_terms(self, names: Sequence[str], fn):
        self.scope.terms.extend(names)
        try:
            return fn()
        finally:
            if names:
                del self.scope.terms[-len(names):]

    def with_dims(self, names: Sequence[str], fn):
        self.scope.dims.extend(names)
        try:
            return fn()
        finally:
            if names:
                del self.scope.dims[-len(names):]

    def dim(self, r: S.SDim, pos: S.Pos) -> Dim:
        if isinstance(r, int):
            if r not in (0, 1):
                raise ElabError(f"dimension constant must be 0 or 1, not {r}", pos)
            return r
        if r in self.scope.dims or self.scope.free_dims:
            return DimVar(r)
        raise ElabError(f"unbound dimension {r!r}", pos)

    def dim_item(self, e) -> Dim:
        match e:
            case S.SNum(value=v, pos=pos):
                return self.dim(v, pos)
            case S.SName(name=n, pos=pos):
                return self.dim(n, pos)
        raise ElabError("expected a dimension", getattr(e, "pos", (0, 0)))

    def faces(self, tube: Sequence[S.SFace], body_fn) -> tuple[Face, ...]:
        out = []
        for f in tube:
            c = Constraint(self.dim(f.lhs, f.pos), self.dim(f.rhs, f.pos))
            y = f.var or "_"
            out.append(Face(c, y, self.with_dims([y], lambda f=f: body_fn(f.body))))
        return tuple(out)

    # -- terms -------------------------------------------------------------

    def term(self, e) -> Term:
        match e:
            case S.SName(name=name, pos=pos):
                return self.name(name, pos)
            case S.SNum(value=v):
                return numeral(v)
            case S.SCall(head=head, items=items, pos=pos):
                return self.call(head, items, pos)
            case S.SApp(fn=fn, arg=arg):
                return App(self.term(fn), self.term(arg))
            case S.SPApp(fn=fn, dim=r, pos=pos):
                return PApp(self.term(fn), self.dim(r, pos))
            case S.SLam(names=names, body=body):
                inner = self.with_terms(names, lambda: self.term(body))
                for n in reversed(names):
                    inner = Lam(n, inner)
                return inner
            case S.SPLam(var=x, body=body):
                return PLam(x, self.with_dims([x], lambda: self.term(body)))
            case S.SPi(name=name, dom=dom, cod=cod):
                a = name or "_"
                return Pi(a, self.term(dom), self.with_terms([a], lambda: self.term(cod)))
            case S.SPath(var=x, type=ty, left=l, right=r):
                return PathTy(x, self.with_dims([x], lambda: self.term(ty)), self.term(l), self.term(r))
            case S.SHcom(type=ty, src=r, dst=r2, cap=cap, tube=tube, pos=pos):
                return Hcom(self.term(ty), self.dim(r, pos), self.dim(r2, pos), self.term(cap), self.faces(tube, self.term))
            case S.SCoe(var=z, type=ty, src=r, dst=r2, body=body, pos=pos):
                line = self.with_dims([z], lambda: self.term(ty))
                return Coe(z, line, self.dim(r, pos), self.dim(r2, pos), self.term(body))
            case S.SCom(var=z, type=ty, src=r, dst=r2, cap=cap, tube=tube, pos=pos):
                line = self.with_dims([z], lambda: self.term(ty))
                return Com(z, line, self.dim(r, pos), self.dim(r2, pos), self.term(cap), self.faces(tube, self.term))
            case S.SFhcom(src=r, dst=r2, cap=cap, tube=tube, pos=pos):
                return Fhcom(self.dim(r, pos), self.dim(r2, pos), self.term(cap), self.faces(tube, self.term))
            case S.SFcoe(var=z, line=line, src=r, dst=r2, body=body, pos=pos):
                ln = self.with_dims([z], lambda: tuple(self.term(i) for i in line))
                return Fcoe(z, ln, self.dim(r, pos), self.dim(r2, pos), self.term(body))
            case S.SFcom(var=z, line=line, src=r, dst=r2, cap=cap, tube=tube, pos=pos):
                ln = self.with_dims([z], lambda: tuple(self.term(i) for i in line))
                return Fcom(z, ln, self.dim(r, pos), self.dim(r2, pos), self.term(cap), self.faces(tube, self.term))
            case S.STcoe(var=z, type=ty, src=r, dst=r2, body=body, pos=pos):
                line = self.with_dims([z], lambda: self.term(ty))
                if not isinstance(line, Ind):
                    raise ElabError("tcoe needs an inductive type line", pos, "Arity")
                return Tcoe(z, line.tele, line.schema, self.dim(r, pos), self.dim(r2, pos), self.term(body))
            case S.SElim():
                return self.elim(e)
            case S.SNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                s = self.with_terms(list(names), lambda: self.term(succ))
                return NatRec(self.term(scrut), self.term(zero), tuple(names), s)
            case S.SSelf(pos=pos):
                raise ElabError("'self' may only appear in constructor argument types", pos)
        raise ElabError(f"cannot elaborate {type(e).__name__}", getattr(e, "pos", (0, 0)))

    def name(self, name: str, pos: S.Pos) -> Term:
        k = self.scope.term_index(name)
        if k is not None:
            return Var(k, name)
        if name in self.scope.dims:
            raise ElabError(f"dimension {name!r} used as a term", pos)
        d = self.env.defs.get(name)
        if d is not None:
            return d.term
        found = self.env.types.lookup_type(name)
        if found is not None:
            tele, schema = found
            if len(tele):
                raise ElabError(f"type {name} expects {len(tele)} indices", pos, "Arity")
            return Ind(tele, schema, ())
        return self.call(name, (), pos)

    def call(self, head: str, items: Sequence, pos: S.Pos) -> Term:
        if "::" not in head:
            found = self.env.types.lookup_type(head)
            if found is not None and self.scope.term_index(head) is None:
                tele, schema = found
                if len(items) != len(tele):
                    raise ElabError(f"type {head} expects {len(tele)} indices, got {len(items)}", pos, "Arity")
                return Ind(tele, schema, tuple(self.term(i) for i in items))
        schema = self.env.lookup_label(head)
        if schema is None:
            raise ElabError(f"unknown name {head!r}", pos)
        label = _plain_label(head)
        ctor = schema.lookup(label)
        ar = _ctor_arity(ctor)
        dims, params, args = self.split_items(items, ar, label, pos)
        return Intro(
            schema,
            label,
            tuple(self.dim_item(d) for d in dims),
            tuple(self.term(p) for p in params),
            tuple(self.term(a) for a in args),
        )

    @staticmethod
    def split_items(items: Sequence, ar: _Arity, label: str, pos: S.Pos):
        total = ar.dims + ar.params + ar.args
        if len(items) != total:
            raise ElabError(f"constructor {label} expects {total} items, got {len(items)}", pos, "Arity")
        items = tuple(items)
        return items[: ar.dims], items[ar.dims : ar.dims + ar.params], items[ar.dims + ar.params :]

    def elim(self, e: S.SElim) -> Elim:
        if not e.names:
            raise ElabError("the motive must bind the scrutinee", e.pos, "Arity")
        motive = self.with_terms(list(e.names), lambda: self.term(e.motive))
        indices = tuple(self.term(i) for i in e.indices)
        if len(indices) != len(e.names) - 1:
            raise ElabError(
                f"motive binds {len(e.names) - 1} indices but {len(indices)} were given", e.pos, "Arity"
            )
        scrut = self.term(e.scrut)
        cases = []
        for c in e.cases:
            schema = self.env.lookup_label(c.label)
            if schema is None:
                raise ElabError(f"unknown constructor {c.label!r}", c.pos)
            label = _plain_label(c.label)
            ar = _ctor_arity(schema.lookup(label))
            if len(c.binders) != ar.dims + ar.params + ar.args:
                raise ElabError(
                    f"case {label} binds {len(c.binders)} names; the constructor has "
                    f"{ar.dims} dimensions, {ar.params} parameters and {ar.args} arguments",
                    c.pos,
                    "Arity",
                )
            if len(c.results) not in (0, ar.args):
                raise ElabError(f"case {label} must bind {ar.args} recursive results", c.pos, "Arity")
            results = c.results if c.results else tuple("_" for _ in range(ar.args))
            dims = c.binders[: ar.dims]
            params = c.binders[ar.dims : ar.dims + ar.params]
            args = c.binders[ar.dims + ar.params :]
            body = self.with_dims(
                list(dims),
                lambda: self.with_terms(list(params) + list(args) + list(results), lambda: self.term(c.body)),
            )
            cases.append((label, ElimCase(tuple(dims), tuple(params), tuple(args), tuple(results), body)))
        return Elim(tuple(e.names), motive, indices, scrut, ElimList(tuple(cases)))

    # -- boundary terms ----------------------------------------------------

    def bterm(self, e):
        assert self.current is not None
        _, prefix, arities = self.current
        match e:
            case S.SName(name=name, pos=pos):
                j = self.scope.bvar_level(name)
                if j is not None and self.scope.term_index(name) is None:
                    return BVar(j, name)
                return self.bcall(name, (), pos)
            case S.SCall(head=head, items=items, pos=pos):
                return self.bcall(head, items, pos)
            case S.SApp(fn=fn, arg=arg):
                return BApp(self.bterm(fn), self.term(arg))
            case S.SLam(names=names, body=body):
                inner = self.with_terms(list(names), lambda: self.bterm(body))
                for n in reversed(names):
                    inner = BLam(n, inner)
                return inner
            case S.SFhcom(indices=indices, src=r, dst=r2, cap=cap, tube=tube, pos=pos):
                idx = tuple(self.term(i) for i in indices) if indices else ()
                return BFhcom(idx, self.dim(r, pos), self.dim(r2, pos), self.bterm(cap), self.faces(tube, self.bterm))
            case S.SFcoe(var=z, line=line, src=r, dst=r2, body=body, pos=pos):
                ln = self.with_dims([z], lambda: tuple(self.term(i) for i in line))
                return BFcoe(z, ln, self.dim(r, pos), self.dim(r2, pos), self.bterm(body))
            case S.SNatRec(scrut=scrut, zero=zero, names=names, succ=succ):
                a, p = names
                s_term = self.term(scrut)
                z = self.bterm(zero)
                self.scope.bvars.append(p)
                try:
                    s = self.with_terms([a], lambda: self.bterm(succ))
                finally:
                    self.scope.bvars.pop()
                return BNatRec(s_term, z, (a, p), s)
        raise ElabError(f"not a boundary term: {type(e).__name__}", getattr(e, "pos", (0, 0)))

    def bcall(self, head: str, items: Sequence, pos: S.Pos):
        assert self.current is not None
        tname, prefix, arities = self.current
        label = head
        if "::" in head:
            owner, label = head.split("::", 1)
            if owner != tname:
                raise ElabError(f"boundary terms may only use constructors of {tname}", pos)
        if label not in arities:
            raise ElabError(f"unknown constructor {label!r} in a boundary", pos)
        ar = arities[label]
        dims, params, args = self.split_items(items, ar, label, pos)
        return BIntro(
            label,
            tuple(self.dim_item(d) for d in dims),
            tuple(self.term(p) for p in params),
            tuple(self.bterm(a) for a in args),
        )

    # -- declarations ------------------------------------------------------

    def tele(self, entries: Sequence[tuple[str, object]]) -> Tele:
        out = []
        names = []
        try:
            for name, ty in entries:
                out.append(Binding(name, self.term(ty)))
                self.scope.terms.append(name)
                names.append(name)
        finally:
            if names:
                del self.scope.terms[-len(names):]
        return Tele(tuple(out))

    def data(self, d: S.SData) -> tuple[Tele, Schema]:
        tele = self.tele(d.tele)
        arities: dict[str, _Arity] = {}
        for c in d.ctors:
            arities.setdefault(c.label, _surface_ctor_arity(c))
        ctors: list[tuple[str, Constructor]] = []
        for c in d.ctors:
            self.current = (d.name, Schema(tuple(ctors)), arities)
            try:
                ctors.append((c.label, self.ctor(c, len(tele))))
            finally:
                self.current = None
        return tele, Schema(tuple(ctors))

    def ctor(self, c: S.SCtor, n_indices: int) -> Constructor:
        dims: list[str] = []
        params: list[S.SItem] = []
        args: list[S.SItem] = []
        stage = 0
        for item in c.items:
            if item.type is None:
                kind = 0
            elif _ends_in_self(item.type):
                kind = 2
            else:
                kind = 1
            if kind < stage:
                raise ElabError(
                    f"constructor {c.label}: dimensions come first, then parameters, then recursive arguments",
                    item.pos,
                    "Arity",
                )
            stage = kind
            (dims, params, args)[kind].append(item.name if kind == 0 else item)

        def inside() -> Constructor:
            ptele = []
            for p in params:
                ptele.append(Binding(p.name, self.term(p.type)))
                self.scope.terms.append(p.name)
            try:
                if not c.result and n_indices:
                    raise ElabError(f"constructor {c.label} must give {n_indices} indices", c.pos, "Arity")
                indices = tuple(self.term(i) for i in c.result)
                if len(indices) != n_indices:
                    raise ElabError(
                        f"constructor {c.label} gives {len(indices)} indices, expected {n_indices}", c.pos, "Arity"
                    )
                arg_decls = tuple(ArgDecl(a.name, self.argtype(a.type, n_indices)) for a in args)
                self.scope.bvars = [a.name for a in args]
                try:
                    boundary = tuple(
                        BFace(Constraint(self.dim(f.lhs, f.pos), self.dim(f.rhs, f.pos)), self.bterm(f.body))
                        for f in c.boundary
                    )
                finally:
                    self.scope.bvars = []
            finally:
                if ptele:
                    del self.scope.terms[-len(ptele):]
            return Constructor(tuple(dims), Tele(tuple(ptele)), indices, arg_decls, boundary)

        return self.with_dims(dims, inside)

    def argtype(self, e, n_indices: int):
        match e:
            case S.SSelf(indices=indices, pos=pos):
                if len(indices) != n_indices:
                    raise ElabError(f"self expects {n_indices} indices, got {len(indices)}", pos, "Arity")
                return SelfAt(tuple(self.term(i) for i in indices))
            case S.SPi(name=name, dom=dom, cod=cod):
                a = name or "_"
                return ArgPi(a, self.term(dom), self.with_terms([a], lambda: self.argtype(cod, n_indices)))
        raise ElabError("argument types are self or functions into self", getattr(e, "pos", (0, 0)), "Arity")


def elab_term(e, env: Optional[Env] = None, free_dims: bool = False, names: Sequence[str] = ()) -> Term:
    el = Elaborator(env or Env(), free_dims)
    el.scope.terms = list(names)
    return el.term(e)


def elab_data(d: S.SData, env: Optional[Env] = None) -> tuple[Tele, Schema]:
    return Elaborator(env or Env()).data(d)


def parse_term(src: str, env: Optional[Env] = None, free_dims: bool = False) -> Term:
    """Parse and elaborate a single expression."""
    return elab_term(S.parse_expr(src), env, free_dims)


def load_source(src: str, env: Optional[Env] = None) -> Env:
    """Elaborate the data and def declarations of a file into an environment.

    Directives are ignored here; the command-line driver runs them.
    """
    env = (env or Env()).copy()
    for d in S.parse(src).decls:
        declare(d, env)
    return env


def declare(d, env: Env) -> None:
    """Add one declaration to ``env`` in place."""
    match d:
        case S.SData():
            tele, schema = elab_data(d, env)
            env.types.add(d.name, tele, schema)
        case S.SDef(name=name, type=ty, body=body):
            core_ty = elab_term(ty, env) if ty is not None else None
            env.defs[name] = Definition(name, elab_term(body, env), core_ty)
