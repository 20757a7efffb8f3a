"""Abstract syntax for the cubical kernel.

Term variables are de Bruijn indices (``Var(0)`` is the innermost binder);
every binder keeps a name hint that is ignored by equality and only used for
printing.  Dimension variables are plain names drawn from a global fresh
supply, and dimension binders are renamed on demand when a substitution would
capture them.

All syntax objects are frozen dataclasses deriving from :class:`Node`.  A node
knows how to rebuild itself through a :class:`Walker`, which is the single
traversal used for shifting, substitution, free-variable metadata and
alpha-canonicalisation.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

# ---------------------------------------------------------------------------
# Dimensions and constraints


@dataclass(frozen=True, slots=True)
class DimVar:
    name: str

    def __str__(self) -> str:
        return self.name


Dim = Union[int, DimVar]
"""A dimension term: the constant ``0``, the constant ``1`` or a variable."""

DimSubst = Mapping[str, Dim]


def is_const(r: Dim) -> bool:
    return isinstance(r, int)


def dim_str(r: Dim) -> str:
    return str(r)


class _FreshSupply:
    """Thread-safe counter behind :func:`fresh_dim`."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counter = itertools.count()

    def take(self) -> int:
        with self._lock:
            return next(self._counter)


_SUPPLY = _FreshSupply()
FRESH_MARK = "%"


def base_name(name: str) -> str:
    """Strip the fresh-supply suffix from a name."""
    return name.split(FRESH_MARK, 1)[0] or "x"


def fresh_name(hint: str = "x") -> str:
    return f"{base_name(hint)}{FRESH_MARK}{_SUPPLY.take()}"


def fresh_dim(hint: str = "x") -> DimVar:
    """Return a dimension variable never issued before."""
    return DimVar(fresh_name(hint))


@dataclass(frozen=True, slots=True)
class Constraint:
    lhs: Dim
    rhs: Dim

    def __str__(self) -> str:
        return f"{self.lhs}={self.rhs}"

    def subst(self, psi: DimSubst) -> Constraint:
        return Constraint(apply_dim(psi, self.lhs), apply_dim(psi, self.rhs))


ConstraintCtx = Sequence[Constraint]


def apply_dim(psi: DimSubst, r: Dim) -> Dim:
    if isinstance(r, DimVar):
        return psi.get(r.name, r)
    return r


def constraint_satisfied(c: Constraint) -> bool:
    return c.lhs == c.rhs


def normalize_constraint(c: Constraint) -> Constraint:
    """Put a constant on the right-hand side whenever there is one."""
    if is_const(c.lhs) and not is_const(c.rhs):
        return Constraint(c.rhs, c.lhs)
    return c


def ctx_valid(xi: ConstraintCtx) -> bool:
    """Syntactic validity of a constraint context.

    Valid when some constraint already holds, or when some dimension is
    constrained to be both ``0`` and ``1``.  Either orientation of a constraint
    is accepted.
    """
    xi = [normalize_constraint(c) for c in xi]
    if any(constraint_satisfied(c) for c in xi):
        return True
    at_zero = {c.lhs for c in xi if c.rhs == 0}
    at_one = {c.lhs for c in xi if c.rhs == 1}
    return bool(at_zero & at_one)


class Unsatisfiable:
    """Marker returned by :func:`constraint_mgu` for ``0=1`` and ``1=0``."""

    _instance: Optional[Unsatisfiable] = None

    def __new__(cls) -> Unsatisfiable:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unsatisfiable"


UNSAT = Unsatisfiable()


def constraint_mgu(c: Constraint, order: Sequence[str] = ()) -> dict[str, Dim] | Unsatisfiable:
    """Most general dimension substitution making ``c`` hold.

    For a variable-variable equation the variable bound later in ``order`` is
    replaced by the earlier one; without an ordering the right-hand side is
    replaced.
    """
    lhs, rhs = c.lhs, c.rhs
    if lhs == rhs:
        return {}
    if is_const(lhs) and is_const(rhs):
        return UNSAT
    if is_const(rhs):
        return {lhs.name: rhs}
    if is_const(lhs):
        return {rhs.name: lhs}
    rank = {name: i for i, name in enumerate(order)}
    if rank.get(lhs.name, -1) > rank.get(rhs.name, -1):
        return {lhs.name: rhs}
    return {rhs.name: lhs}


def compose_dsubst(first: DimSubst, second: DimSubst) -> dict[str, Dim]:
    """The substitution that applies ``first`` and then ``second``."""
    out = {x: apply_dim(second, r) for x, r in first.items()}
    for x, r in second.items():
        out.setdefault(x, r)
    return {x: r for x, r in out.items() if r != DimVar(x)}


def mgu_all(cs: Iterable[Constraint], order: Sequence[str] = ()) -> dict[str, Dim] | Unsatisfiable:
    """Unify a conjunction of constraints, threading the substitution."""
    psi: dict[str, Dim] = {}
    for c in cs:
        step = constraint_mgu(c.subst(psi), order)
        if step is UNSAT:
            return UNSAT
        psi = compose_dsubst(psi, step)
    return psi


def constraints_dims(cs: Iterable[Constraint]) -> set[str]:
    out: set[str] = set()
    for c in cs:
        for r in (c.lhs, c.rhs):
            if isinstance(r, DimVar):
                out.add(r.name)
    return out


# ---------------------------------------------------------------------------
# Traversal machinery


class Walker:
    """Rebuilds nodes.  Subclasses decide what happens at each leaf."""

    def t(self, node: Node) -> Node:
        return node._walk(self)

    def ts(self, nodes: Sequence[Node]) -> tuple:
        return tuple(self.t(n) for n in nodes)

    def d(self, r: Dim) -> Dim:
        return r

    def ds(self, rs: Sequence[Dim]) -> tuple:
        return tuple(self.d(r) for r in rs)

    def c(self, con: Constraint) -> Constraint:
        return Constraint(self.d(con.lhs), self.d(con.rhs))

    def var(self, v: Var) -> Node:
        return v

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        raise NotImplementedError


class _MetaWalker(Walker):
    __slots__ = ("depth", "bound", "acc")

    def __init__(self, depth: int, bound: frozenset, acc: list) -> None:
        self.depth = depth
        self.bound = bound
        self.acc = acc

    def t(self, node: Node) -> Node:
        fvb = node.fvb - self.depth
        if fvb > self.acc[0]:
            self.acc[0] = fvb
        fd = node.free_dims
        if fd:
            self.acc[1].update(fd - self.bound)
        return node

    def d(self, r: Dim) -> Dim:
        if isinstance(r, DimVar) and r.name not in self.bound:
            self.acc[1].add(r.name)
        return r

    def var(self, v: Var) -> Node:
        if v.index + 1 - self.depth > self.acc[0]:
            self.acc[0] = v.index + 1 - self.depth
        return v

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        bound = self.bound | frozenset(dims) if dims else self.bound
        return _MetaWalker(self.depth + n_terms, bound, self.acc), tuple(dims)


class Node:
    """Base class of every syntax object.

    ``fvb`` is one more than the largest free de Bruijn index (0 when the node
    is closed for term variables) and ``free_dims`` the free dimension names.
    Both are computed once and cached on the instance.
    """

    def _walk(self, w: Walker) -> Node:  # pragma: no cover - abstract
        raise NotImplementedError

    def _meta(self) -> tuple[int, frozenset]:
        cached = self.__dict__.get("_meta_cache")
        if cached is None:
            acc = [0, set()]
            self._walk(_MetaWalker(0, frozenset(), acc))
            cached = (max(acc[0], 0), frozenset(acc[1]))
            object.__setattr__(self, "_meta_cache", cached)
        return cached

    @property
    def fvb(self) -> int:
        return self._meta()[0]

    @property
    def free_dims(self) -> frozenset:
        return self._meta()[1]

    @property
    def is_closed(self) -> bool:
        return self.fvb == 0


class Term(Node):
    """Marker base for the term language."""


class BoundaryTerm(Node):
    """Marker base for the restricted boundary language."""


class ArgType(Node):
    """Marker base for argument types of recursive constructor arguments."""


def _hint() -> str:
    return field(compare=False, default="_")


# ---------------------------------------------------------------------------
# Auxiliary structures


@dataclass(frozen=True, eq=True)
class Binding(Node):
    name: str = field(compare=False)
    type: Term

    def _walk(self, w: Walker) -> Node:
        return Binding(self.name, w.t(self.type))


@dataclass(frozen=True)
class Tele(Node):
    """A telescope: each entry's type may mention the earlier entries."""

    entries: tuple[Binding, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.entries)

    def _walk(self, w: Walker) -> Node:
        out = []
        cur = w
        for b in self.entries:
            out.append(cur.t(b))
            cur, _ = cur.under(1, ())
        return Tele(tuple(out))


@dataclass(frozen=True)
class Face(Node):
    """A tube face ``constraint -> var. body``; ``body`` may be a term or a boundary term."""

    constraint: Constraint
    var: str
    body: Node

    def _walk(self, w: Walker) -> Node:
        inner, (y,) = w.under(0, (self.var,))
        return Face(w.c(self.constraint), y, inner.t(self.body))


@dataclass(frozen=True)
class BFace(Node):
    """A constructor boundary entry ``constraint -> boundary term``."""

    constraint: Constraint
    body: BoundaryTerm

    def _walk(self, w: Walker) -> Node:
        return BFace(w.c(self.constraint), w.t(self.body))


@dataclass(frozen=True)
class ArgDecl(Node):
    name: str = field(compare=False)
    type: ArgType

    def _walk(self, w: Walker) -> Node:
        return ArgDecl(self.name, w.t(self.type))


@dataclass(frozen=True)
class Constructor(Node):
    """One constructor: dimension parameters, parameters, indices, arguments, boundary.

    ``params`` is a telescope.  ``indices``, the argument types and the
    boundary all live under the parameters.  The dimension parameters scope
    over everything.
    """

    dims: tuple[str, ...] = ()
    params: Tele = Tele()
    indices: tuple[Term, ...] = ()
    args: tuple[ArgDecl, ...] = ()
    boundary: tuple[BFace, ...] = ()

    def _walk(self, w: Walker) -> Node:
        wd, dims = w.under(0, self.dims)
        params = wd.t(self.params)
        wg, _ = wd.under(len(self.params), ())
        return Constructor(
            dims,
            params,
            wg.ts(self.indices),
            wg.ts(self.args),
            wg.ts(self.boundary),
        )

    def open(self, rs: Sequence[Dim]) -> Constructor:
        """Instantiate the dimension parameters, returning a constructor with no dims."""
        if len(rs) != len(self.dims):
            raise ValueError(f"constructor expects {len(self.dims)} dimensions, got {len(rs)}")
        psi = {x: r for x, r in zip(self.dims, rs) if DimVar(x) != r}
        body = Constructor((), self.params, self.indices, self.args, self.boundary)
        return dim_subst(body, psi) if psi else body

    @property
    def arg_types(self) -> tuple[ArgType, ...]:
        return tuple(a.type for a in self.args)


@dataclass(frozen=True)
class Schema(Node):
    """An ordered list of labelled constructors."""

    ctors: tuple[tuple[str, Constructor], ...] = ()

    def _walk(self, w: Walker) -> Node:
        return Schema(tuple((label, w.t(c)) for label, c in self.ctors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.ctors)

    def __len__(self) -> int:
        return len(self.ctors)

    def __contains__(self, label: str) -> bool:
        return any(lbl == label for lbl, _ in self.ctors)

    def lookup(self, label: str) -> Constructor:
        for lbl, c in self.ctors:
            if lbl == label:
                return c
        raise KeyError(label)

    def position(self, label: str) -> int:
        for i, (lbl, _) in enumerate(self.ctors):
            if lbl == label:
                return i
        raise KeyError(label)

    def prefix(self, label: str) -> Schema:
        return Schema(self.ctors[: self.position(label)])


@dataclass(frozen=True)
class ElimCase(Node):
    """Case body for one constructor, binding dims, parameters, arguments and results."""

    dims: tuple[str, ...] = ()
    params: tuple[str, ...] = field(compare=False, default=())
    args: tuple[str, ...] = field(compare=False, default=())
    results: tuple[str, ...] = field(compare=False, default=())
    body: Term = None  # type: ignore[assignment]
    arity: tuple[int, int, int] = field(init=False, compare=True, repr=False, default=(0, 0, 0))

    def __post_init__(self) -> None:
        object.__setattr__(self, "arity", (len(self.params), len(self.args), len(self.results)))

    @property
    def n_binders(self) -> int:
        return len(self.params) + len(self.args) + len(self.results)

    def _walk(self, w: Walker) -> Node:
        inner, dims = w.under(self.n_binders, self.dims)
        return ElimCase(dims, self.params, self.args, self.results, inner.t(self.body))


@dataclass(frozen=True)
class ElimList(Node):
    cases: tuple[tuple[str, ElimCase], ...] = ()

    def _walk(self, w: Walker) -> Node:
        return ElimList(tuple((label, w.t(c)) for label, c in self.cases))

    def __len__(self) -> int:
        return len(self.cases)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.cases)

    def lookup(self, label: str) -> ElimCase:
        for lbl, c in self.cases:
            if lbl == label:
                return c
        raise KeyError(label)


# ---------------------------------------------------------------------------
# Argument types


@dataclass(frozen=True)
class SelfAt(ArgType):
    """A recursive occurrence of the type being defined, at the given indices."""

    indices: tuple[Term, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return SelfAt(w.ts(self.indices))


@dataclass(frozen=True)
class ArgPi(ArgType):
    name: str = field(compare=False)
    dom: Term
    cod: ArgType

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(1, ())
        return ArgPi(self.name, w.t(self.dom), inner.t(self.cod))


# ---------------------------------------------------------------------------
# Boundary terms


@dataclass(frozen=True)
class BVar(BoundaryTerm):
    """Reference to a boundary variable by its position (level) in the argument context."""

    index: int
    name: str = field(compare=False, default="_")

    def _walk(self, w: Walker) -> Node:
        return self


@dataclass(frozen=True)
class BIntro(BoundaryTerm):
    label: str
    dims: tuple[Dim, ...] = ()
    params: tuple[Term, ...] = ()
    args: tuple[BoundaryTerm, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return BIntro(self.label, w.ds(self.dims), w.ts(self.params), w.ts(self.args))


@dataclass(frozen=True)
class BFhcom(BoundaryTerm):
    indices: tuple[Term, ...]
    src: Dim
    dst: Dim
    cap: BoundaryTerm
    tube: tuple[Face, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return BFhcom(w.ts(self.indices), w.d(self.src), w.d(self.dst), w.t(self.cap), w.ts(self.tube))


@dataclass(frozen=True)
class BFcoe(BoundaryTerm):
    var: str
    indices: tuple[Term, ...]
    src: Dim
    dst: Dim
    body: BoundaryTerm

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return BFcoe(z, inner.ts(self.indices), w.d(self.src), w.d(self.dst), w.t(self.body))


@dataclass(frozen=True)
class BLam(BoundaryTerm):
    name: str = field(compare=False)
    body: BoundaryTerm

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(1, ())
        return BLam(self.name, inner.t(self.body))


@dataclass(frozen=True)
class BApp(BoundaryTerm):
    fn: BoundaryTerm
    arg: Term

    def _walk(self, w: Walker) -> Node:
        return BApp(w.t(self.fn), w.t(self.arg))


@dataclass(frozen=True)
class BNatRec(BoundaryTerm):
    """Recursion on a natural number inside the boundary language.

    ``succ`` binds one term variable (the predecessor); the recursive result is
    the boundary variable at the next free level.
    """

    scrut: Term
    zero: BoundaryTerm
    names: tuple[str, str] = field(compare=False)
    succ: BoundaryTerm

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(1, ())
        return BNatRec(w.t(self.scrut), w.t(self.zero), self.names, inner.t(self.succ))


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var(Term):
    index: int
    name: str = field(compare=False, default="_")

    def _walk(self, w: Walker) -> Node:
        return w.var(self)


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    body: Term

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(1, ())
        return Lam(self.name, inner.t(self.body))


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

    def _walk(self, w: Walker) -> Node:
        return App(w.t(self.fn), w.t(self.arg))


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    dom: Term
    cod: Term

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(1, ())
        return Pi(self.name, w.t(self.dom), inner.t(self.cod))


@dataclass(frozen=True)
class Ind(Term):
    """An inductive type: index telescope, schema and index arguments."""

    tele: Tele
    schema: Schema
    indices: tuple[Term, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return Ind(w.t(self.tele), w.t(self.schema), w.ts(self.indices))


@dataclass(frozen=True)
class Intro(Term):
    schema: Schema
    label: str
    dims: tuple[Dim, ...] = ()
    params: tuple[Term, ...] = ()
    args: tuple[Term, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return Intro(w.t(self.schema), self.label, w.ds(self.dims), w.ts(self.params), w.ts(self.args))


@dataclass(frozen=True)
class Fhcom(Term):
    src: Dim
    dst: Dim
    cap: Term
    tube: tuple[Face, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return Fhcom(w.d(self.src), w.d(self.dst), w.t(self.cap), w.ts(self.tube))


@dataclass(frozen=True)
class Fcoe(Term):
    var: str
    line: tuple[Term, ...]
    src: Dim
    dst: Dim
    body: Term

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return Fcoe(z, inner.ts(self.line), w.d(self.src), w.d(self.dst), w.t(self.body))


@dataclass(frozen=True)
class Fcom(Term):
    var: str
    line: tuple[Term, ...]
    src: Dim
    dst: Dim
    cap: Term
    tube: tuple[Face, ...] = ()

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return Fcom(z, inner.ts(self.line), w.d(self.src), w.d(self.dst), w.t(self.cap), w.ts(self.tube))


@dataclass(frozen=True)
class Hcom(Term):
    type: Term
    src: Dim
    dst: Dim
    cap: Term
    tube: tuple[Face, ...] = ()

    def _walk(self, w: Walker) -> Node:
        return Hcom(w.t(self.type), w.d(self.src), w.d(self.dst), w.t(self.cap), w.ts(self.tube))


@dataclass(frozen=True)
class Coe(Term):
    var: str
    type: Term
    src: Dim
    dst: Dim
    body: Term

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return Coe(z, inner.t(self.type), w.d(self.src), w.d(self.dst), w.t(self.body))


@dataclass(frozen=True)
class Com(Term):
    var: str
    type: Term
    src: Dim
    dst: Dim
    cap: Term
    tube: tuple[Face, ...] = ()

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return Com(z, inner.t(self.type), w.d(self.src), w.d(self.dst), w.t(self.cap), w.ts(self.tube))


@dataclass(frozen=True)
class Tcoe(Term):
    var: str
    tele: Tele
    schema: Schema
    src: Dim
    dst: Dim
    body: Term

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return Tcoe(z, inner.t(self.tele), inner.t(self.schema), w.d(self.src), w.d(self.dst), w.t(self.body))


@dataclass(frozen=True)
class Elim(Term):
    """Dependent elimination.  ``motive`` binds the indices and then the scrutinee."""

    names: tuple[str, ...] = field(compare=False)
    motive: Term
    indices: tuple[Term, ...]
    scrut: Term
    cases: ElimList

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(len(self.names), ())
        return Elim(self.names, inner.t(self.motive), w.ts(self.indices), w.t(self.scrut), w.t(self.cases))

    @property
    def n_indices(self) -> int:
        return len(self.names) - 1


@dataclass(frozen=True)
class PathTy(Term):
    var: str
    type: Term
    left: Term
    right: Term

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return PathTy(z, inner.t(self.type), w.t(self.left), w.t(self.right))


@dataclass(frozen=True)
class PLam(Term):
    var: str
    body: Term

    def _walk(self, w: Walker) -> Node:
        inner, (z,) = w.under(0, (self.var,))
        return PLam(z, inner.t(self.body))


@dataclass(frozen=True)
class PApp(Term):
    path: Term
    dim: Dim

    def _walk(self, w: Walker) -> Node:
        return PApp(w.t(self.path), w.d(self.dim))


@dataclass(frozen=True)
class NatRec(Term):
    """Non-dependent recursion on natural numbers; ``succ`` binds the predecessor then the result."""

    scrut: Term
    zero: Term
    names: tuple[str, str] = field(compare=False)
    succ: Term

    def _walk(self, w: Walker) -> Node:
        inner, _ = w.under(2, ())
        return NatRec(w.t(self.scrut), w.t(self.zero), self.names, inner.t(self.succ))


# ---------------------------------------------------------------------------
# Substitution


class _SubstWalker(Walker):
    """Simultaneous term and dimension substitution.

    ``sub`` maps a free index (relative to the walk's starting point) to its
    replacement at depth zero, or is ``None`` to leave term variables alone.
    """

    __slots__ = ("depth", "sub", "dsub", "avoid")

    def __init__(self, depth, sub, dsub, avoid) -> None:
        self.depth = depth
        self.sub = sub
        self.dsub = dsub
        self.avoid = avoid

    def t(self, node: Node) -> Node:
        if (self.sub is None or node.fvb <= self.depth) and (
            not self.dsub or node.free_dims.isdisjoint(self.dsub)
        ):
            return node
        return node._walk(self)

    def d(self, r: Dim) -> Dim:
        if isinstance(r, DimVar):
            return self.dsub.get(r.name, r)
        return r

    def var(self, v: Var) -> Node:
        if self.sub is None or v.index < self.depth:
            return v
        return shift(self.sub(v.index - self.depth, v), self.depth)

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        if not dims:
            return _SubstWalker(self.depth + n_terms, self.sub, self.dsub, self.avoid), ()
        dsub = dict(self.dsub)
        names = []
        for y in dims:
            dsub.pop(y, None)
            if y in self.avoid:
                y2 = fresh_name(y)
                dsub[y] = DimVar(y2)
                names.append(y2)
            else:
                names.append(y)
        return _SubstWalker(self.depth + n_terms, self.sub, dsub, self.avoid), tuple(names)


class _ShiftWalker(Walker):
    __slots__ = ("depth", "amount")

    def __init__(self, depth: int, amount: int) -> None:
        self.depth = depth
        self.amount = amount

    def t(self, node: Node) -> Node:
        if node.fvb <= self.depth:
            return node
        return node._walk(self)

    def var(self, v: Var) -> Node:
        if v.index < self.depth:
            return v
        return Var(v.index + self.amount, v.name)

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        return _ShiftWalker(self.depth + n_terms, self.amount), tuple(dims)


def shift(t: Node, amount: int, cutoff: int = 0) -> Node:
    """Add ``amount`` to every free index at or above ``cutoff``."""
    if amount == 0 or t.fvb <= cutoff:
        return t
    return _ShiftWalker(cutoff, amount).t(t)


def shift_all(ts: Sequence[Node], amount: int, cutoff: int = 0) -> tuple:
    return tuple(shift(t, amount, cutoff) for t in ts)


def _avoid_of(nodes: Iterable[Node], dims: Iterable[Dim] = ()) -> frozenset:
    out: set[str] = set()
    for n in nodes:
        out |= n.free_dims
    for r in dims:
        if isinstance(r, DimVar):
            out.add(r.name)
    return frozenset(out)


def instantiate(body: Node, args: Sequence[Node], cutoff: int = 0) -> Node:
    """Eliminate ``len(args)`` binders: ``args[0]`` replaces the outermost one.

    With ``cutoff`` the binders sit below ``cutoff`` inner binders that are kept;
    the arguments are then expected to live at the level of those inner binders
    minus themselves, i.e. at depth zero relative to the eliminated binders.
    """
    n = len(args)
    if n == 0:
        return body
    if body.fvb <= cutoff:
        return body

    def sub(j: int, v: Var) -> Node:
        if j < n:
            return args[n - 1 - j]
        return Var(j - n, v.name)

    return _SubstWalker(cutoff, sub, {}, _avoid_of(args)).t(body)


def term_subst(t: Node, args: Sequence[Node], vars: Sequence[int]) -> Node:
    """Simultaneously replace the free variables ``vars`` of ``t`` by ``args``."""
    if len(args) != len(vars):
        raise ValueError("term_subst: argument and variable counts differ")
    table = dict(zip(vars, args))
    if not table:
        return t

    def sub(j: int, v: Var) -> Node:
        return table.get(j, Var(j, v.name))

    return _SubstWalker(0, sub, {}, _avoid_of(args)).t(t)


def dim_subst(t: Node, psi: DimSubst) -> Node:
    """Apply a dimension substitution, renaming dimension binders that would capture."""
    psi = {x: r for x, r in psi.items() if r != DimVar(x)}
    if not psi or t.free_dims.isdisjoint(psi):
        return t
    return _SubstWalker(0, None, psi, _avoid_of((), psi.values())).t(t)


def dim_subst_all(ts: Sequence[Node], psi: DimSubst) -> tuple:
    return tuple(dim_subst(t, psi) for t in ts)


def subst_dim_list(rs: Sequence[Dim], psi: DimSubst) -> tuple:
    return tuple(apply_dim(psi, r) for r in rs)


def rename_dim(t: Node, old: str, new: str) -> Node:
    return dim_subst(t, {old: DimVar(new)})


def substitute(t: Node, args: Sequence[Node], psi: DimSubst) -> Node:
    """Instantiate term binders and apply a dimension substitution in one pass."""
    psi = {x: r for x, r in psi.items() if r != DimVar(x)}
    n = len(args)

    def sub(j: int, v: Var) -> Node:
        if j < n:
            return args[n - 1 - j]
        return Var(j - n, v.name)

    if not psi:
        return instantiate(t, args)
    walker = _SubstWalker(0, sub if n else None, psi, _avoid_of(args, psi.values()))
    return walker.t(t)


class _OccursWalker(Walker):
    __slots__ = ("target", "found")

    def __init__(self, target: int, found: list) -> None:
        self.target = target
        self.found = found

    def t(self, node: Node) -> Node:
        if self.found[0] or node.fvb <= self.target:
            return node
        return node._walk(self)

    def var(self, v: Var) -> Node:
        if v.index == self.target:
            self.found[0] = True
        return v

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        return _OccursWalker(self.target + n_terms, self.found), tuple(dims)


def mentions_var(t: Node, index: int = 0) -> bool:
    """Whether the free variable ``index`` occurs in ``t``."""
    found = [False]
    _OccursWalker(index, found).t(t)
    return found[0]


# ---------------------------------------------------------------------------
# Alpha-equivalence


class _CanonWalker(Walker):
    __slots__ = ("dsub", "counter")

    def __init__(self, dsub: dict, counter: list) -> None:
        self.dsub = dsub
        self.counter = counter

    def d(self, r: Dim) -> Dim:
        if isinstance(r, DimVar):
            return self.dsub.get(r.name, r)
        return r

    def under(self, n_terms: int, dims: Sequence[str]) -> tuple[Walker, tuple[str, ...]]:
        if not dims:
            return self, ()
        dsub = dict(self.dsub)
        names = []
        for y in dims:
            canon = f"?{self.counter[0]}"
            self.counter[0] += 1
            dsub[y] = DimVar(canon)
            names.append(canon)
        return _CanonWalker(dsub, self.counter), tuple(names)


def canon(t: Node) -> Node:
    """Rename every bound dimension to a name determined by its position."""
    return _CanonWalker({}, [0]).t(t)


def alpha_eq(a: Node, b: Node) -> bool:
    if a == b:
        return True
    return canon(a) == canon(b)


# ---------------------------------------------------------------------------
# Heights and labels


def boundary_labels(m: BoundaryTerm) -> list[str]:
    out: list[str] = []

    def go(n: Node) -> None:
        match n:
            case BIntro(label=label, args=args):
                out.append(label)
                for a in args:
                    go(a)
            case BFhcom(cap=cap, tube=tube):
                go(cap)
                for f in tube:
                    go(f.body)
            case BFcoe(body=body) | BLam(body=body):
                go(body)
            case BApp(fn=fn):
                go(fn)
            case BNatRec(zero=z, succ=s):
                go(z)
                go(s)
            case _:
                pass

    go(m)
    return out


def height(schema: Schema, subject: Union[str, BoundaryTerm]) -> int:
    """Position of a label, or the largest position among the labels in a boundary term."""
    if isinstance(subject, str):
        try:
            return schema.position(subject)
        except KeyError:
            raise KeyError(f"unknown label {subject!r}") from None
    return max([-1] + [height(schema, label) for label in boundary_labels(subject)])


def intro_for(ind: Ind, label: str, dims=(), params=(), args=()) -> Intro:
    return Intro(ind.schema, label, tuple(dims), tuple(params), tuple(args))


def index_vars(n: int, names: Sequence[str] = ()) -> tuple[Var, ...]:
    """``Var(n-1), ..., Var(0)``: the innermost ``n`` binders, outermost first."""
    names = tuple(names) or ("_",) * n
    return tuple(Var(n - 1 - i, names[i]) for i in range(n))


DimFn = Callable[[Dim], Dim]
