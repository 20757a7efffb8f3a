"""Command-line driver: check declaration files, evaluate, trace and observe.

Every directive produces one :class:`Outcome`.  Outcomes print either as
aligned text lines or, with ``--json``, as one JSON object per line with the
keys ``directive``, ``status``, ``steps`` and then ``value`` and ``error`` when
present.  The exit code is 0 exactly when every outcome is ``ok``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import surface as S
from .checker import EXTENSIONS, CheckCtx, CheckError, Checker, required_extensions
from .elaborate import ElabError, Env, declare, elab_term
from .evaluator import (
    EvalConfig,
    EvalError,
    EvalStats,
    NotObservable,
    evaluate,
    observe,
    trace,
)
from .interp import InterpError
from .pretty import show_term
from .syntax import Ind, PathTy, Pi, Term, DimVar, alpha_eq, dim_subst, instantiate

DEFAULT_TRACE_MAX = 1000


@dataclass
class Outcome:
    directive: str
    status: str
    steps: int = 0
    value: Optional[str] = None
    error: Optional[str] = None
    trace: Optional[list[str]] = None
    kind: Optional[str] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> str:
        obj: dict = {"directive": self.directive, "status": self.status, "steps": self.steps}
        if self.value is not None:
            obj["value"] = self.value
        if self.error is not None:
            obj["error"] = self.error
        if self.trace is not None:
            obj["trace"] = self.trace
        return json.dumps(obj, ensure_ascii=False)

    def to_text(self) -> str:
        head = f"{'ok' if self.ok else 'FAIL':<5} {self.directive}"
        if self.error is not None:
            return f"{head}: {self.error}"
        if self.value is not None:
            head += f" ~> {self.value}"
        lines = [head]
        if self.trace is not None:
            lines.extend(f"      {t}" for t in self.trace)
        return "\n".join(lines)


@dataclass(frozen=True)
class _DimArg:
    dim: S.SDim


def _where(source: str, pos: S.Pos) -> str:
    return f"{source}:{pos[0]}:{pos[1]}" if pos != (0, 0) else source


@dataclass
class Session:
    """Declarations accumulated so far plus the evaluation and checking settings."""

    extensions: frozenset = frozenset()
    cfg: EvalConfig = field(default_factory=EvalConfig)
    fuel: Optional[int] = None
    source: str = "<input>"
    env: Env = field(default_factory=Env)

    def __post_init__(self) -> None:
        self.checker = Checker(self.extensions, cfg=self.cfg)
        self._sync_families()

    def _sync_families(self) -> None:
        self.checker.families = [(tele, schema) for _, tele, schema in self.env.types.types]

    # -- helpers ---------------------------------------------------------------

    def _gate(self, node) -> None:
        missing = required_extensions(node) - self.extensions
        if missing:
            raise CheckError("Unsupported", "extension", f"requires --ext {', --ext '.join(sorted(missing))}")

    def elaborate(self, e) -> Term:
        return elab_term(e, self.env)

    def infer(self, t: Term, e=None) -> Term:
        """Infer the type of ``t``, elaborated from the surface expression ``e``.

        Definitions are inlined, so an application headed by one would lose
        the definition's declared type.  When ``e`` is such a spine, its
        arguments are checked against that type instead.
        """
        self._gate(t)
        spine = self._def_spine(e)
        if spine is None:
            return self.checker.infer(CheckCtx(), t)
        defn, args = spine
        ctx = CheckCtx()
        ty = defn.type
        for a in args:
            ty = self.checker.whnf(ctx, ty)
            if isinstance(a, _DimArg):
                if not isinstance(ty, PathTy):
                    raise CheckError("Conversion", "path-E", f"{defn.name} is not a path here")
                ty = dim_subst(ty.type, {ty.var: a.dim if isinstance(a.dim, int) else DimVar(a.dim)})
                continue
            if not isinstance(ty, Pi):
                raise CheckError("Conversion", "app", f"{defn.name} is applied to too many arguments")
            arg = self.elaborate(a)
            if self._def_spine(a) is None:
                self.checker.check(ctx, arg, ty.dom)
            elif not self.checker.convert(ctx, self.infer(arg, a), ty.dom, None):
                raise CheckError("Conversion", "app", f"an argument of {defn.name} has the wrong type")
            ty = instantiate(ty.cod, (arg,))
        return ty

    def _def_spine(self, e):
        """``(definition, arguments)`` when ``e`` applies a typed definition."""
        args: list = []
        while True:
            match e:
                case S.SApp(fn=fn, arg=arg):
                    args.append(arg)
                    e = fn
                case S.SPApp(fn=fn, dim=r):
                    args.append(_DimArg(r))
                    e = fn
                case S.SName(name=name) if args and name in self.env.defs:
                    defn = self.env.defs[name]
                    return None if defn.type is None else (defn, args[::-1])
                case _:
                    return None

    def render(self, v: Term) -> str:
        """The constructor tree of a value when it has one, else the value itself."""
        try:
            return str(observe(v, strict=False, fuel=self.fuel, cfg=self.cfg))
        except NotObservable:
            return show_term(v, self.env.types)

    def _values_equal(self, a: Term, b: Term, steps: EvalStats) -> tuple[bool, str, str]:
        va = evaluate(a, self.fuel, self.cfg, steps)
        vb = evaluate(b, self.fuel, self.cfg)
        try:
            oa = observe(va, strict=False, fuel=self.fuel, cfg=self.cfg)
            ob = observe(vb, strict=False, fuel=self.fuel, cfg=self.cfg)
            return oa == ob, str(oa), str(ob)
        except NotObservable:
            return alpha_eq(va, vb), show_term(va, self.env.types), show_term(vb, self.env.types)

    def _guard(self, directive: str, pos: S.Pos, action) -> Outcome:
        try:
            return action()
        except (CheckError, ElabError, EvalError, InterpError) as exc:
            kind = getattr(exc, "kind", type(exc).__name__)
            msg = getattr(exc, "message", None) or str(exc)
            if isinstance(exc, CheckError):
                msg = str(exc)
            elif isinstance(exc, EvalError):
                msg = f"{type(exc).__name__}: {exc}"
            else:
                msg = f"{kind}: {msg}"
            where = _where(self.source, getattr(exc, "pos", pos))
            return Outcome(directive, "fail", error=f"{where}: {msg}", kind=kind)
        except RecursionError:
            return Outcome(directive, "fail", error=f"{_where(self.source, pos)}: term too deep", kind="RecursionError")

    # -- declarations and directives -----------------------------------------

    def run_decl(self, d) -> Outcome:
        match d:
            case S.SData(name=name, pos=pos):
                return self._guard(f"data {name}", pos, lambda: self._data(d))
            case S.SDef(name=name, pos=pos):
                return self._guard(f"def {name}", pos, lambda: self._def(d))
            case S.SEval(expr=e, expect=x, pos=pos):
                return self._guard(f"eval {S.print_expr(e)}", pos, lambda: self.eval_expr(e, x))
            case S.SObserve(expr=e, type=ty, expect=x, pos=pos):
                return self._guard(f"observe {S.print_expr(e)}", pos, lambda: self.observe_expr(e, ty, x))
            case S.STrace(expr=e, max=k, pos=pos):
                return self._guard(f"trace {S.print_expr(e)}", pos, lambda: self.trace_expr(e, k))
        raise TypeError(f"unknown declaration {d!r}")

    def _data(self, d: S.SData) -> Outcome:
        scratch = self.env.copy()
        declare(d, scratch)
        _, tele, schema = scratch.types.types[-1]
        self._gate((tele, schema))
        ctx = CheckCtx()
        self.checker.check_tele(ctx, tele)
        self.checker.check_constrs(ctx, tele, schema)
        self.env = scratch
        self._sync_families()
        return Outcome(f"data {d.name}", "ok")

    def _def(self, d: S.SDef) -> Outcome:
        scratch = self.env.copy()
        declare(d, scratch)
        defn = scratch.defs[d.name]
        self._gate((defn.term, defn.type))
        ctx = CheckCtx()
        if defn.type is not None:
            self.checker.check_type(ctx, defn.type)
            self.checker.check(ctx, defn.term, defn.type)
        elif isinstance(defn.term, (Pi, Ind, PathTy)):
            self.checker.check_type(ctx, defn.term)
        else:
            self.checker.infer(ctx, defn.term)
        self.env = scratch
        return Outcome(f"def {d.name}", "ok")

    def eval_expr(self, e, expect=None, check: bool = True) -> Outcome:
        t = self.elaborate(e)
        if check:
            self.infer(t, e)
        else:
            self._gate(t)
        directive = f"eval {S.print_expr(e)}"
        stats = EvalStats()
        if expect is None:
            v = evaluate(t, self.fuel, self.cfg, stats)
            return Outcome(directive, "ok", stats.steps, self.render(v))
        same, got, want = self._values_equal(t, self.elaborate(expect), stats)
        if not same:
            return Outcome(directive, "fail", stats.steps, got, f"expected {want}")
        return Outcome(directive, "ok", stats.steps, got)

    def observe_expr(self, e, ty, expect=None, check: bool = True) -> Outcome:
        t = self.elaborate(e)
        at = self.elaborate(ty)
        self._gate((t, at))
        if check:
            self.checker.check_type(CheckCtx(), at)
            self.checker.check(CheckCtx(), t, at)
        directive = f"observe {S.print_expr(e)}"
        stats = EvalStats()
        got = observe(t, at, strict=True, fuel=self.fuel, cfg=self.cfg, stats=stats)
        if expect is not None:
            want = observe(self.elaborate(expect), at, strict=True, fuel=self.fuel, cfg=self.cfg)
            if got != want:
                return Outcome(directive, "fail", stats.steps, str(got), f"expected {want}")
        return Outcome(directive, "ok", stats.steps, str(got))

    def trace_expr(self, e, max_steps: Optional[int] = None, check: bool = True) -> Outcome:
        t = self.elaborate(e)
        if check:
            self.infer(t, e)
        else:
            self._gate(t)
        directive = f"trace {S.print_expr(e)}"
        tr = trace(t, DEFAULT_TRACE_MAX if max_steps is None else max_steps, self.cfg)
        lines = [show_term(u, self.env.types) for u in tr.terms]
        steps = len(tr.rules)
        if isinstance(tr.result, str):
            return Outcome(directive, "ok", steps, lines[-1], None, lines)
        if not tr.complete:
            return Outcome(directive, "fail", steps, lines[-1], f"stuck: {tr.result.reason}", lines)
        return Outcome(directive, "ok", steps, lines[-1], None, lines)

    def load(self, text: str, run_directives: bool) -> list[Outcome]:
        """Process a file.  Without ``run_directives`` only declarations are checked."""
        out = []
        for d in S.parse(text).decls:
            if isinstance(d, S.SComment):
                continue
            if not run_directives and not isinstance(d, (S.SData, S.SDef)):
                continue
            out.append(self.run_decl(d))
        return out


# ---------------------------------------------------------------------------
# Argument handling


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--opt-closed", action="store_true", help="trivial Kan operations at closed types")
    p.add_argument("--ext", action="append", choices=EXTENSIONS, default=[], help="enable a language extension")
    p.add_argument("--json", action="store_true", help="emit JSON lines")
    p.add_argument("--fuel", type=int, default=None, help="evaluation step budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubind", description="Cubical inductive types kernel")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="check every declaration and directive of a file")
    p.add_argument("file")
    _common(p)
    for name, helptext in (("eval", "evaluate an expression"), ("trace", "show each reduction step")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file", nargs="?")
        p.add_argument("-e", "--expr", required=True)
        if name == "trace":
            p.add_argument("--max", type=int, default=DEFAULT_TRACE_MAX)
        _common(p)
    p = sub.add_parser("observe", help="evaluate and read back a constructor tree")
    p.add_argument("file", nargs="?")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--at", required=True, help="observation type")
    _common(p)
    p = sub.add_parser("test", help="run generated test suites")
    p.add_argument("--suite", action="append", default=[], help="suite name (repeatable; default all)")
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    return parser


def _emit(outcomes: Sequence[Outcome], as_json: bool, out: TextIO) -> None:
    for o in outcomes:
        print(o.to_json() if as_json else o.to_text(), file=out)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _run_test(args, out: TextIO) -> int:
    from .suites import SUITES, run_suite

    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        print(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return 2
    ok = True
    for name in names:
        res = run_suite(name, EvalConfig(opt_closed=args.opt_closed), seed=args.seed)
        ok = ok and res.ok
        o = Outcome(
            f"test {name}",
            "ok" if res.ok else "fail",
            res.steps,
            f"{res.passed} passed, {res.failed} failed",
            "; ".join(res.failures[:5]) or None,
        )
        _emit([o], args.json, out)
    return 0 if ok else 1


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "test":
        return _run_test(args, out)
    session = Session(
        extensions=frozenset(args.ext),
        cfg=EvalConfig(opt_closed=args.opt_closed),
        fuel=args.fuel,
        source=args.file or "<expr>",
    )
    outcomes: list[Outcome] = []
    try:
        if args.file:
            outcomes.extend(session.load(_read(args.file), run_directives=args.command == "check"))
        if args.command != "check":
            session.source = "<expr>"
            expr = S.parse_expr(args.expr)
            match args.command:
                case "eval":
                    o = session._guard(f"eval {args.expr}", (0, 0), lambda: session.eval_expr(expr, check=False))
                case "trace":
                    o = session._guard(
                        f"trace {args.expr}", (0, 0), lambda: session.trace_expr(expr, args.max, check=False)
                    )
                case _:
                    at = S.parse_expr(args.at)
                    o = session._guard(
                        f"observe {args.expr}", (0, 0), lambda: session.observe_expr(expr, at, check=False)
                    )
            failed_decls = [x for x in outcomes if not x.ok]
            if args.json:
                _emit(failed_decls + [o], True, out)
            else:
                _emit(failed_decls, False, out)
                if o.ok:
                    print("\n".join(o.trace) if o.trace is not None else o.value, file=out)
                else:
                    print(f"error: {o.error}", file=out)
            return 0 if o.ok and not failed_decls else 1
    except S.ParseError as exc:
        print(f"{session.source}: parse error: {exc}", file=out)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=out)
        return 1
    _emit(outcomes, args.json, out)
    return 0 if all(o.ok for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
