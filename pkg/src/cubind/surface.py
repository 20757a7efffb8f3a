"""Concrete syntax: tokens, a position-annotated AST, a parser and a printer.

The grammar is LL with every binder written out, so parsing needs no type
information.  Printing is canonical: ``print_file(parse(src))`` is a fixed
point of ``parse`` followed by ``print_file``.

Expressions::

    \\a b. M          (a : A) -> B       A -> B        f a       M @ r
    <x> M            path {x. A} M N    label(items)  T::label(items)
    hcom {A} r~>r' M [x=0 -> y. N | ...]
    coe {z. A} r~>r' M         com {z. A} r~>r' M [...]
    fhcom {I, ...} r~>r' M [...]   (index annotation optional)
    fcoe {z. I, ...} r~>r' M   fcom {z. I, ...} r~>r' M [...]
    tcoe {z. T} r~>r' M
    elim [d h. D] I... M { label(x, p, g; r) -> R | ... }
    natrec M Z (a p. S)

Declarations::

    data NAME (d : T) ... = ctor | ...
    ctor  ::= label(x, p : T, g : B -> self, ...) : self(I, ...) [x=0 -> m | ...]
    def NAME : T = M        eval M = N        observe M : T = N      trace M max K
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]


def _pos() -> Pos:
    return field(default=(0, 0), compare=False, repr=False)


# ---------------------------------------------------------------------------
# AST

SDim = Union[str, int]


@dataclass(frozen=True)
class SName:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class SNum:
    value: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class SCall:
    """``head(items)``: a constructor, an indexed type or ``self``."""

    head: str
    items: tuple
    intro: bool = False
    pos: Pos = _pos()


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SPApp:
    fn: object
    dim: SDim
    pos: Pos = _pos()


@dataclass(frozen=True)
class SLam:
    names: tuple[str, ...]
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SPLam:
    var: str
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SPi:
    name: Optional[str]
    dom: object
    cod: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SPath:
    var: str
    type: object
    left: object
    right: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SFace:
    lhs: SDim
    rhs: SDim
    var: Optional[str]
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SHcom:
    type: object
    src: SDim
    dst: SDim
    cap: object
    tube: tuple[SFace, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SCoe:
    var: str
    type: object
    src: SDim
    dst: SDim
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SCom:
    var: str
    type: object
    src: SDim
    dst: SDim
    cap: object
    tube: tuple[SFace, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SFhcom:
    indices: Optional[tuple]
    src: SDim
    dst: SDim
    cap: object
    tube: tuple[SFace, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SFcoe:
    var: str
    line: tuple
    src: SDim
    dst: SDim
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SFcom:
    var: str
    line: tuple
    src: SDim
    dst: SDim
    cap: object
    tube: tuple[SFace, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class STcoe:
    var: str
    type: object
    src: SDim
    dst: SDim
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SCase:
    label: str
    binders: tuple[str, ...]
    results: tuple[str, ...]
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SElim:
    names: tuple[str, ...]
    motive: object
    indices: tuple
    scrut: object
    cases: tuple[SCase, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SNatRec:
    scrut: object
    zero: object
    names: tuple[str, str]
    succ: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SSelf:
    indices: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class SItem:
    """A constructor binder: a dimension (no type), a parameter or a recursive argument."""

    name: str
    type: object = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class SCtor:
    label: str
    items: tuple[SItem, ...]
    result: tuple
    boundary: tuple[SFace, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SData:
    name: str
    tele: tuple[tuple[str, object], ...]
    ctors: tuple[SCtor, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class SDef:
    name: str
    type: object
    body: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class SEval:
    expr: object
    expect: object = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class SObserve:
    expr: object
    type: object
    expect: object = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class STrace:
    expr: object
    max: Optional[int] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class SComment:
    text: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class SourceFile:
    decls: tuple


# ---------------------------------------------------------------------------
# Lexer


class ParseError(Exception):
    def __init__(self, message: str, pos: Pos) -> None:
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUM, SYM, COMMENT, EOF
    text: str
    pos: Pos
    spaced: bool  # preceded by whitespace (or start of input)
    line_start: bool = False


KEYWORDS = frozenset(
    "data def eval observe trace max hcom coe com fhcom fcoe fcom tcoe elim natrec path intro self".split()
)
DECL_KEYWORDS = frozenset({"data", "def", "eval", "observe", "trace"})
SYMBOLS = ("::", "->", "~>", "\\", ".", "(", ")", "[", "]", "{", "}", "<", ">", ",", ";", ":", "=", "|", "@")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUM_RE = re.compile(r"[0-9]+")


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    spaced = True
    line_start = True
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            spaced = True
            line_start = True
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            spaced = True
            continue
        if src.startswith("--", i):
            j = src.find("\n", i)
            j = n if j < 0 else j
            toks.append(Token("COMMENT", src[i + 2 : j].strip(), (line, col), True, line_start))
            col += j - i
            i = j
            continue
        pos = (line, col)
        m = _NAME_RE.match(src, i)
        if m:
            text = m.group()
            toks.append(Token("NAME", text, pos, spaced, line_start))
        else:
            m = _NUM_RE.match(src, i)
            if m:
                text = m.group()
                toks.append(Token("NUM", text, pos, spaced, line_start))
            else:
                for sym in SYMBOLS:
                    if src.startswith(sym, i):
                        text = sym
                        toks.append(Token("SYM", sym, pos, spaced, line_start))
                        break
                else:
                    raise ParseError(f"unexpected character {ch!r}", pos)
        i += len(text)
        col += len(text)
        spaced = False
        line_start = False
    toks.append(Token("EOF", "", (line, col), True, True))
    return toks


# ---------------------------------------------------------------------------
# Parser


class Parser:
    def __init__(self, src: str) -> None:
        toks = tokenize(src)
        self.toks = [t for t in toks if t.kind != "COMMENT"]
        self.comments = [t for t in toks if t.kind == "COMMENT"]
        self.i = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("SYM", "NAME") and t.text == text

    def at_sym(self, text: str) -> bool:
        return self.tok.kind == "SYM" and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.advance()

    def name(self) -> str:
        t = self.tok
        if t.kind != "NAME" or t.text in KEYWORDS:
            raise ParseError(f"expected a name, found {t.text or 'end of input'!r}", t.pos)
        self.advance()
        return t.text

    # -- file level --------------------------------------------------------

    def parse_file(self) -> SourceFile:
        """Parse declarations; comments are kept as declarations in source order."""
        decls: list = []
        pending = list(self.comments)
        while True:
            here = self.tok.pos
            while pending and pending[0].pos < here:
                c = pending.pop(0)
                decls.append(SComment(c.text, c.pos))
            if self.tok.kind == "EOF":
                decls.extend(SComment(c.text, c.pos) for c in pending)
                return SourceFile(tuple(decls))
            decls.append(self.decl())

    def decl(self):
        t = self.tok
        if t.kind != "NAME" or t.text not in DECL_KEYWORDS:
            raise ParseError(f"expected a declaration, found {t.text!r}", t.pos)
        self.advance()
        match t.text:
            case "data":
                return self.data_decl(t.pos)
            case "def":
                name = self.name()
                ty = None
                if self.at_sym(":"):
                    self.advance()
                    ty = self.expr()
                self.expect("=")
                return SDef(name, ty, self.expr(), t.pos)
            case "eval":
                e = self.expr()
                expect = None
                if self.at_sym("="):
                    self.advance()
                    expect = self.expr()
                return SEval(e, expect, t.pos)
            case "observe":
                e = self.expr()
                self.expect(":")
                ty = self.expr()
                expect = None
                if self.at_sym("="):
                    self.advance()
                    expect = self.expr()
                return SObserve(e, ty, expect, t.pos)
            case "trace":
                e = self.expr()
                mx = None
                if self.at("max"):
                    self.advance()
                    mx = self.number()
                return STrace(e, mx, t.pos)
        raise AssertionError(t.text)

    def number(self) -> int:
        t = self.tok
        if t.kind != "NUM":
            raise ParseError(f"expected a number, found {t.text!r}", t.pos)
        self.advance()
        return int(t.text)

    def data_decl(self, pos: Pos) -> SData:
        name = self.name()
        tele = []
        while self.at_sym("("):
            self.advance()
            b = self.name()
            self.expect(":")
            tele.append((b, self.expr()))
            self.expect(")")
        self.expect("=")
        ctors = []
        if not (self.tok.kind == "EOF" or (self.tok.kind == "NAME" and self.tok.text in DECL_KEYWORDS)):
            ctors.append(self.ctor())
            while self.at_sym("|"):
                self.advance()
                ctors.append(self.ctor())
        return SData(name, tuple(tele), tuple(ctors), pos)

    def ctor(self) -> SCtor:
        pos = self.tok.pos
        label = self.name()
        items: list[SItem] = []
        if self.at_sym("(") and not self.tok.spaced:
            self.advance()
            if not self.at_sym(")"):
                items.append(self.item())
                while self.at_sym(","):
                    self.advance()
                    items.append(self.item())
            self.expect(")")
        result: tuple = ()
        if self.at_sym(":"):
            self.advance()
            self.expect("self")
            result = self.call_items() if self.at_sym("(") and not self.tok.spaced else ()
        boundary: tuple = ()
        if self.at_sym("["):
            boundary = self.tube(binders=False)
        return SCtor(label, tuple(items), result, boundary, pos)

    def item(self) -> SItem:
        pos = self.tok.pos
        name = self.name()
        if self.at_sym(":"):
            self.advance()
            return SItem(name, self.expr(), pos)
        return SItem(name, None, pos)

    # -- expressions -------------------------------------------------------

    def dim(self) -> SDim:
        t = self.tok
        if t.kind == "NUM" and t.text in ("0", "1"):
            self.advance()
            return int(t.text)
        if t.kind == "NAME" and t.text not in KEYWORDS:
            self.advance()
            return t.text
        raise ParseError(f"expected a dimension, found {t.text!r}", t.pos)

    def span(self) -> tuple[SDim, SDim]:
        r = self.dim()
        self.expect("~>")
        return r, self.dim()

    def binder_group(self) -> list[str]:
        """Names closed by a final ``.``: ``a b.`` or ``a.b.``."""
        j = self.i
        names: list[str] = []
        last_end = -1
        count_at_end = 0
        while self.toks[j].kind == "NAME" and self.toks[j].text not in KEYWORDS:
            names.append(self.toks[j].text)
            j += 1
            if self.toks[j].kind == "SYM" and self.toks[j].text == ".":
                last_end = j
                count_at_end = len(names)
                j += 1
        if last_end < 0:
            raise ParseError("expected binder names followed by '.'", self.tok.pos)
        self.i = last_end + 1
        return names[:count_at_end]

    def maybe_binder_group(self) -> list[str]:
        j = self.i
        while self.toks[j].kind == "NAME" and self.toks[j].text not in KEYWORDS:
            j += 1
            if self.toks[j].kind == "SYM" and self.toks[j].text == ".":
                return self.binder_group()
        return []

    def tube(self, binders: bool = True) -> tuple[SFace, ...]:
        self.expect("[")
        faces = []
        if not self.at_sym("]"):
            faces.append(self.face(binders))
            while self.at_sym("|"):
                self.advance()
                faces.append(self.face(binders))
        self.expect("]")
        return tuple(faces)

    def opt_tube(self) -> tuple[SFace, ...]:
        return self.tube() if self.at_sym("[") else ()

    def face(self, binders: bool) -> SFace:
        pos = self.tok.pos
        lhs = self.dim()
        self.expect("=")
        rhs = self.dim()
        self.expect("->")
        var = None
        if binders:
            names = self.binder_group()
            if len(names) != 1:
                raise ParseError("a tube face binds exactly one dimension", pos)
            var = names[0]
        return SFace(lhs, rhs, var, self.expr(), pos)

    def expr(self):
        t = self.tok
        pos = t.pos
        if self.at_sym("\\"):
            self.advance()
            names = self.binder_group()
            return SLam(tuple(names), self.expr(), pos)
        if self.at_sym("<"):
            self.advance()
            x = self.name()
            self.expect(">")
            return SPLam(x, self.expr(), pos)
        if (
            self.at_sym("(")
            and self.peek().kind == "NAME"
            and self.peek().text not in KEYWORDS
            and self.peek(2).kind == "SYM"
            and self.peek(2).text == ":"
        ):
            self.advance()
            a = self.name()
            self.expect(":")
            dom = self.expr()
            self.expect(")")
            self.expect("->")
            return SPi(a, dom, self.expr(), pos)
        lhs = self.app()
        if self.at_sym("->"):
            self.advance()
            return SPi(None, lhs, self.expr(), pos)
        return lhs

    def app(self):
        pos = self.tok.pos
        head = self.keyword_form()
        if head is None:
            head = self.atom()
            if head is None:
                raise ParseError(f"expected an expression, found {self.tok.text or 'end of input'!r}", pos)
        while True:
            if self.at_sym("@"):
                self.advance()
                head = SPApp(head, self.dim(), pos)
                continue
            a = self.atom()
            if a is None:
                return head
            head = SApp(head, a, pos)

    def keyword_form(self):
        t = self.tok
        if t.kind != "NAME":
            return None
        pos = t.pos
        match t.text:
            case "hcom":
                self.advance()
                self.expect("{")
                ty = self.expr()
                self.expect("}")
                r, r2 = self.span()
                cap = self.req_atom()
                return SHcom(ty, r, r2, cap, self.opt_tube(), pos)
            case "coe" | "com" | "tcoe":
                self.advance()
                self.expect("{")
                (z,) = self.one_binder()
                ty = self.expr()
                self.expect("}")
                r, r2 = self.span()
                body = self.req_atom()
                if t.text == "coe":
                    return SCoe(z, ty, r, r2, body, pos)
                if t.text == "tcoe":
                    return STcoe(z, ty, r, r2, body, pos)
                return SCom(z, ty, r, r2, body, self.opt_tube(), pos)
            case "fhcom":
                self.advance()
                indices = None
                if self.at_sym("{"):
                    indices = self.brace_list()
                r, r2 = self.span()
                cap = self.req_atom()
                return SFhcom(indices, r, r2, cap, self.opt_tube(), pos)
            case "fcoe" | "fcom":
                self.advance()
                self.expect("{")
                (z,) = self.one_binder()
                line = self.comma_exprs("}")
                self.expect("}")
                r, r2 = self.span()
                body = self.req_atom()
                if t.text == "fcoe":
                    return SFcoe(z, line, r, r2, body, pos)
                return SFcom(z, line, r, r2, body, self.opt_tube(), pos)
            case "path":
                self.advance()
                self.expect("{")
                (x,) = self.one_binder()
                ty = self.expr()
                self.expect("}")
                left = self.req_atom()
                right = self.req_atom()
                return SPath(x, ty, left, right, pos)
            case "elim":
                self.advance()
                self.expect("[")
                names = self.binder_group()
                motive = self.expr()
                self.expect("]")
                atoms = []
                while not self.at_sym("{"):
                    atoms.append(self.req_atom())
                if not atoms:
                    raise ParseError("elim needs a scrutinee", self.tok.pos)
                self.expect("{")
                cases = []
                if not self.at_sym("}"):
                    cases.append(self.case())
                    while self.at_sym("|"):
                        self.advance()
                        cases.append(self.case())
                self.expect("}")
                return SElim(tuple(names), motive, tuple(atoms[:-1]), atoms[-1], tuple(cases), pos)
            case "natrec":
                self.advance()
                scrut = self.req_atom()
                zero = self.req_atom()
                self.expect("(")
                names = self.binder_group()
                if len(names) != 2:
                    raise ParseError("natrec's successor case binds two names", pos)
                succ = self.expr()
                self.expect(")")
                return SNatRec(scrut, zero, (names[0], names[1]), succ, pos)
        return None

    def one_binder(self) -> list[str]:
        names = self.binder_group()
        if len(names) != 1:
            raise ParseError("expected a single dimension binder", self.tok.pos)
        return names

    def comma_exprs(self, close: str) -> tuple:
        out = []
        if not self.at_sym(close):
            out.append(self.expr())
            while self.at_sym(","):
                self.advance()
                out.append(self.expr())
        return tuple(out)

    def brace_list(self) -> tuple:
        self.expect("{")
        out = self.comma_exprs("}")
        self.expect("}")
        return out

    def call_items(self) -> tuple:
        self.expect("(")
        out = self.comma_exprs(")")
        self.expect(")")
        return out

    def case(self) -> SCase:
        pos = self.tok.pos
        label = self.qualified_name()
        binders: list[str] = []
        results: list[str] = []
        if self.at_sym("(") and not self.tok.spaced:
            self.advance()
            target = binders
            while not self.at_sym(")"):
                if self.at_sym(";"):
                    self.advance()
                    target = results
                    continue
                target.append(self.name())
                if self.at_sym(","):
                    self.advance()
            self.expect(")")
        self.expect("->")
        return SCase(label, tuple(binders), tuple(results), self.expr(), pos)

    def qualified_name(self) -> str:
        first = self.name()
        if self.at_sym("::"):
            self.advance()
            return f"{first}::{self.name()}"
        return first

    def req_atom(self):
        a = self.atom()
        if a is None:
            raise ParseError(f"expected an argument, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return a

    def atom(self):
        t = self.tok
        pos = t.pos
        if t.kind == "NUM":
            self.advance()
            return SNum(int(t.text), pos)
        if t.kind == "SYM" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "NAME":
            return None
        if t.text == "self":
            self.advance()
            items = self.call_items() if self.at_sym("(") and not self.tok.spaced else ()
            return SSelf(items, pos)
        intro = False
        if t.text == "intro":
            self.advance()
            intro = True
        elif t.text in KEYWORDS:
            return None
        name = self.qualified_name()
        if self.at_sym("(") and not self.tok.spaced:
            return SCall(name, self.call_items(), intro, pos)
        if intro or "::" in name:
            return SCall(name, (), intro, pos)
        return SName(name, pos)


def parse(src: str) -> SourceFile:
    return Parser(src).parse_file()


def parse_expr(src: str):
    p = Parser(src)
    e = p.expr()
    if p.tok.kind != "EOF":
        raise ParseError(f"unexpected {p.tok.text!r} after expression", p.tok.pos)
    return e


# ---------------------------------------------------------------------------
# Printer

ATOM, APP, TOP = 0, 1, 2


def print_dim(r: SDim) -> str:
    return str(r)


def _paren(s: str, needed: bool) -> str:
    return f"({s})" if needed else s


def print_tube(tube, binders: bool = True) -> str:
    parts = []
    for f in tube:
        head = f"{print_dim(f.lhs)}={print_dim(f.rhs)} -> "
        if binders:
            head += f"{f.var}. "
        parts.append(head + print_expr(f.body))
    return "[" + " | ".join(parts) + "]"


def print_expr(e, level: int = TOP) -> str:
    match e:
        case SName(name=name):
            return name
        case SNum(value=v):
            return str(v)
        case SSelf(indices=items):
            return "self(" + ", ".join(print_expr(i) for i in items) + ")" if items else "self"
        case SCall(head=head, items=items, intro=intro):
            prefix = "intro " if intro else ""
            args = "(" + ", ".join(print_expr(i) for i in items) + ")" if items else ""
            return f"{prefix}{head}{args}"
        case SApp(fn=fn, arg=arg):
            return _paren(f"{print_expr(fn, APP)} {print_expr(arg, ATOM)}", level < APP)
        case SPApp(fn=fn, dim=r):
            return _paren(f"{print_expr(fn, APP)} @ {print_dim(r)}", level < APP)
        case SLam(names=names, body=body):
            return _paren(f"\\{' '.join(names)}. {print_expr(body)}", level < TOP)
        case SPLam(var=x, body=body):
            return _paren(f"<{x}> {print_expr(body)}", level < TOP)
        case SPi(name=name, dom=dom, cod=cod):
            if name is None:
                return _paren(f"{print_expr(dom, APP)} -> {print_expr(cod)}", level < TOP)
            return _paren(f"({name} : {print_expr(dom)}) -> {print_expr(cod)}", level < TOP)
        case SPath(var=x, type=ty, left=l, right=r):
            return _paren(f"path {{{x}. {print_expr(ty)}}} {print_expr(l, ATOM)} {print_expr(r, ATOM)}", level < APP)
        case SHcom(type=ty, src=r, dst=r2, cap=cap, tube=tube):
            s = f"hcom {{{print_expr(ty)}}} {r}~>{r2} {print_expr(cap, ATOM)} {print_tube(tube)}"
            return _paren(s, level < APP)
        case SCoe(var=z, type=ty, src=r, dst=r2, body=body):
            return _paren(f"coe {{{z}. {print_expr(ty)}}} {r}~>{r2} {print_expr(body, ATOM)}", level < APP)
        case STcoe(var=z, type=ty, src=r, dst=r2, body=body):
            return _paren(f"tcoe {{{z}. {print_expr(ty)}}} {r}~>{r2} {print_expr(body, ATOM)}", level < APP)
        case SCom(var=z, type=ty, src=r, dst=r2, cap=cap, tube=tube):
            s = f"com {{{z}. {print_expr(ty)}}} {r}~>{r2} {print_expr(cap, ATOM)} {print_tube(tube)}"
            return _paren(s, level < APP)
        case SFhcom(indices=indices, src=r, dst=r2, cap=cap, tube=tube):
            ann = "" if indices is None else "{" + ", ".join(print_expr(i) for i in indices) + "} "
            return _paren(f"fhcom {ann}{r}~>{r2} {print_expr(cap, ATOM)} {print_tube(tube)}", level < APP)
        case SFcoe(var=z, line=line, src=r, dst=r2, body=body):
            ln = ", ".join(print_expr(i) for i in line)
            sep = " " if line else ""
            return _paren(f"fcoe {{{z}.{sep}{ln}}} {r}~>{r2} {print_expr(body, ATOM)}", level < APP)
        case SFcom(var=z, line=line, src=r, dst=r2, cap=cap, tube=tube):
            ln = ", ".join(print_expr(i) for i in line)
            sep = " " if line else ""
            s = f"fcom {{{z}.{sep}{ln}}} {r}~>{r2} {print_expr(cap, ATOM)} {print_tube(tube)}"
            return _paren(s, level < APP)
        case SElim(names=names, motive=motive, indices=indices, scrut=scrut, cases=cases):
            atoms = " ".join(print_expr(a, ATOM) for a in (*indices, scrut))
            body = " | ".join(print_case(c) for c in cases)
            s = f"elim [{' '.join(names)}. {print_expr(motive)}] {atoms} {{{' ' + body + ' ' if body else ''}}}"
            return _paren(s, level < APP)
        case SNatRec(scrut=scrut, zero=z, names=names, succ=s):
            text = f"natrec {print_expr(scrut, ATOM)} {print_expr(z, ATOM)} ({names[0]} {names[1]}. {print_expr(s)})"
            return _paren(text, level < APP)
    raise TypeError(f"cannot print {e!r}")


def print_case(c: SCase) -> str:
    head = c.label
    if c.binders or c.results:
        inner = ", ".join(c.binders)
        if c.results:
            inner += ("; " if c.binders else "; ") + ", ".join(c.results)
        head += f"({inner})"
    return f"{head} -> {print_expr(c.body)}"


def print_item(item: SItem) -> str:
    return item.name if item.type is None else f"{item.name} : {print_expr(item.type)}"


def print_ctor(c: SCtor) -> str:
    s = c.label
    if c.items:
        s += "(" + ", ".join(print_item(i) for i in c.items) + ")"
    if c.result:
        s += " : self(" + ", ".join(print_expr(i) for i in c.result) + ")"
    if c.boundary:
        s += " " + print_tube(c.boundary, binders=False)
    return s


def print_decl(d) -> str:
    match d:
        case SComment(text=text):
            return f"-- {text}" if text else "--"
        case SData(name=name, tele=tele, ctors=ctors):
            head = "data " + name + "".join(f" ({b} : {print_expr(t)})" for b, t in tele) + " ="
            if not ctors:
                return head
            if len(ctors) == 1 and len(print_ctor(ctors[0])) + len(head) < 90:
                return f"{head} {print_ctor(ctors[0])}"
            lines = [f"{head} {print_ctor(ctors[0])}"]
            lines += ["  | " + print_ctor(c) for c in ctors[1:]]
            return "\n".join(lines)
        case SDef(name=name, type=ty, body=body):
            ann = "" if ty is None else f" : {print_expr(ty)}"
            return f"def {name}{ann} = {print_expr(body)}"
        case SEval(expr=e, expect=x):
            return f"eval {print_expr(e)}" + ("" if x is None else f" = {print_expr(x)}")
        case SObserve(expr=e, type=ty, expect=x):
            return f"observe {print_expr(e)} : {print_expr(ty)}" + ("" if x is None else f" = {print_expr(x)}")
        case STrace(expr=e, max=mx):
            return f"trace {print_expr(e)}" + ("" if mx is None else f" max {mx}")
    raise TypeError(f"cannot print {d!r}")


def print_file(f: SourceFile) -> str:
    return "\n".join(print_decl(d) for d in f.decls) + "\n"
