"""Textual format: parenthesized s-expressions with bracketed vectors.

Vectors are printed "[a, b, c]" and accepted with or without commas (use
commas when a component is negative, otherwise "1 -0.5" reads as a
subtraction).  Set operators may be written variadically and desugar
left-associatively: (Union a b c) means (Union (Union a b) c).
"""

from __future__ import annotations

from typing import List as TList, Tuple

from .ast import (
    AFFINE_KINDS,
    BINOP_KINDS,
    Affine,
    BinNum,
    Binop,
    Concat,
    Cuboid,
    Cylinder,
    Expr,
    Fold,
    HexPrism,
    ListExpr,
    Map2,
    Num,
    Part,
    Partitioning,
    Permutation,
    Repeat,
    Sort,
    Sphere,
    Spherical,
    Tabulate,
    Unpart,
    Unsort,
    Unspherical,
    Var,
    Vec2,
    Vec3,
    children,
)
from .errors import ParseError

_PUNCT = {"(": "LP", ")": "RP", "[": "LB", "]": "RB", ",": "COMMA"}
_OPS = "+-*/"

_HEAD_WORDS = frozenset(
    ("Cuboid", "Sphere", "Cylinder", "HexPrism", "Fold", "List", "Concat",
     "Tabulate", "Map2", "Repeat", "Sort", "Unsort", "Part", "Unpart",
     "Spherical", "Unspherical") + AFFINE_KINDS + BINOP_KINDS
)


class _Tok:
    __slots__ = ("kind", "text", "value", "line", "col")

    def __init__(self, kind, text, value, line, col):
        self.kind = kind  # LP RP LB RB COMMA NUM SYM OP EOF
        self.text = text
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text: str) -> TList[_Tok]:
    toks: TList[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def prev_ends_operand() -> bool:
        if not toks:
            return False
        t = toks[-1]
        if t.kind in ("NUM", "RP", "RB"):
            return True
        # an operator name in head position starts a form, it is not an operand
        return t.kind == "SYM" and t.text not in _HEAD_WORDS

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == ";":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _PUNCT:
            toks.append(_Tok(_PUNCT[c], c, None, line, col))
            i += 1
            col += 1
            continue
        if c in _OPS:
            signed = (
                c in "+-"
                and i + 1 < n
                and (text[i + 1].isdigit() or text[i + 1] == ".")
                and not prev_ends_operand()
            )
            if not signed:
                toks.append(_Tok("OP", c, None, line, col))
                i += 1
                col += 1
                continue
            # fall through to number scanning, including the sign
        if c.isdigit() or c == "." or (c in "+-"):
            start, startcol = i, col
            if text[i] in "+-":
                i += 1
                col += 1
            while i < n and (text[i].isdigit() or text[i] == "."):
                i += 1
                col += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
                    col = startcol + (i - start)
            lit = text[start:i]
            try:
                val = float(lit)
            except ValueError:
                raise ParseError(f"bad number {lit!r}", line, startcol)
            toks.append(_Tok("NUM", lit, val, line, startcol))
            continue
        if c.isalpha() or c == "_":
            start, startcol = i, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            toks.append(_Tok("SYM", text[start:i], None, line, startcol))
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("EOF", "", None, line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {kind}, got {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # scalar (numeric) expressions with infix precedence

    def scalar(self, min_prec: int = 1) -> Expr:
        lhs = self.scalar_primary()
        while True:
            t = self.peek()
            if t.kind != "OP":
                return lhs
            prec = 2 if t.text in "*/" else 1
            if prec < min_prec:
                return lhs
            self.next()
            rhs = self.scalar(prec + 1)
            lhs = BinNum(t.text, lhs, rhs)

    def scalar_primary(self) -> Expr:
        t = self.next()
        if t.kind == "NUM":
            return Num(t.value)
        if t.kind == "SYM":
            return Var(t.text)
        if t.kind == "LP":
            e = self.scalar()
            self.expect("RP")
            return e
        raise ParseError(f"expected a number or variable, got {t.text!r}", t.line, t.col)

    def vector(self) -> Expr:
        open_tok = self.expect("LB")
        comps = [self.scalar()]
        while True:
            t = self.peek()
            if t.kind == "RB":
                self.next()
                break
            if t.kind == "COMMA":
                self.next()
                continue
            if t.kind == "EOF":
                self.fail("unterminated vector")
            comps.append(self.scalar())
        if len(comps) == 3:
            return Vec3(*comps)
        if len(comps) == 2:
            return Vec2(*comps)
        raise ParseError(
            f"vector must have 2 or 3 components, got {len(comps)}",
            open_tok.line,
            open_tok.col,
        )

    def int_tuple(self) -> Tuple[int, ...]:
        self.expect("LP")
        out = []
        while True:
            t = self.peek()
            if t.kind == "RP":
                self.next()
                break
            if t.kind == "COMMA":
                self.next()
                continue
            t = self.expect("NUM")
            if t.value != int(t.value):
                raise ParseError("expected an integer", t.line, t.col)
            out.append(int(t.value))
        return tuple(out)

    def posint(self) -> int:
        t = self.expect("NUM")
        if t.value != int(t.value) or t.value < 1:
            raise ParseError("expected a positive integer", t.line, t.col)
        return int(t.value)

    def expr(self) -> Expr:
        t = self.peek()
        if t.kind == "LB":
            return self.vector()
        if t.kind in ("NUM", "SYM") or t.kind == "OP":
            return self.scalar()
        if t.kind != "LP":
            self.fail(f"expected an expression, got {t.text!r}")
        self.next()
        head = self.expect("SYM")
        e = self.form(head)
        self.expect("RP")
        return e

    def exprs_until_rp(self, minimum: int) -> TList[Expr]:
        out = []
        while self.peek().kind != "RP":
            if self.peek().kind == "EOF":
                self.fail("unterminated expression")
            out.append(self.expr())
        if len(out) < minimum:
            self.fail(f"expected at least {minimum} argument(s)")
        return out

    def form(self, head: _Tok) -> Expr:
        name = head.text
        if name == "Cuboid":
            v = self.vector()
            if not isinstance(v, Vec3):
                raise ParseError("Cuboid takes a 3-vector", head.line, head.col)
            return Cuboid(v)
        if name == "Sphere":
            return Sphere(self.scalar())
        if name in ("Cylinder", "HexPrism"):
            v = self.vector()
            if not isinstance(v, Vec2):
                raise ParseError(f"{name} takes a 2-vector", head.line, head.col)
            return (Cylinder if name == "Cylinder" else HexPrism)(v)
        if name in AFFINE_KINDS:
            v = self.vector()
            if not isinstance(v, Vec3):
                raise ParseError(f"{name} takes a 3-vector", head.line, head.col)
            return Affine(name, v, self.expr())
        if name in BINOP_KINDS:
            args = self.exprs_until_rp(2)
            e = Binop(name, args[0], args[1])
            for a in args[2:]:
                e = Binop(name, e, a)
            return e
        if name == "Fold":
            kind = self.expect("SYM")
            if kind.text not in BINOP_KINDS:
                raise ParseError(f"unknown set operator {kind.text!r}", kind.line, kind.col)
            return Fold(kind.text, self.expr())
        if name == "List":
            return ListExpr(tuple(self.exprs_until_rp(1)))
        if name == "Concat":
            return Concat(tuple(self.exprs_until_rp(1)))
        if name == "Tabulate":
            bindings = []
            while (
                self.peek().kind == "LP"
                and self.peek(1).kind == "SYM"
                and self.peek(1).text not in _HEAD_WORDS
                and self.peek(2).kind == "NUM"
                and self.peek(3).kind == "RP"
            ):
                self.next()
                var = self.next().text
                bound = self.posint()
                self.expect("RP")
                bindings.append((var, bound))
            if not bindings:
                self.fail("Tabulate needs at least one (var bound) binding")
            return Tabulate(tuple(bindings), self.expr())
        if name == "Map2":
            kind = self.expect("SYM")
            if kind.text not in AFFINE_KINDS:
                raise ParseError(f"unknown affine kind {kind.text!r}", kind.line, kind.col)
            return Map2(kind.text, self.expr(), self.expr())
        if name == "Repeat":
            return Repeat(self.posint(), self.expr())
        if name in ("Sort", "Unsort"):
            perm = Permutation(self.int_tuple())
            return (Sort if name == "Sort" else Unsort)(perm, self.expr())
        if name == "Part":
            return Part(Partitioning(self.int_tuple()), self.expr())
        if name == "Unpart":
            part = Partitioning(self.int_tuple())
            return Unpart(part, tuple(self.exprs_until_rp(1)))
        if name in ("Spherical", "Unspherical"):
            count = self.posint()
            center = self.vector()
            if not isinstance(center, Vec3):
                raise ParseError(f"{name} center must be a 3-vector", head.line, head.col)
            return (Spherical if name == "Spherical" else Unspherical)(count, center, self.expr())
        raise ParseError(f"unknown operator {name!r}", head.line, head.col)


def parse(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    t = p.peek()
    if t.kind != "EOF":
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    return e


# printing


def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _scalar_prec(e: Expr) -> int:
    if isinstance(e, BinNum):
        return 2 if e.op in "*/" else 1
    return 3


def _fmt_scalar(e: Expr) -> str:
    if isinstance(e, Num):
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinNum):
        prec = 2 if e.op in "*/" else 1
        lhs = _fmt_scalar(e.lhs)
        if _scalar_prec(e.lhs) < prec:
            lhs = f"({lhs})"
        rhs = _fmt_scalar(e.rhs)
        # parsing is left-associative, so equal-precedence right children
        # need parens to round-trip structurally
        if _scalar_prec(e.rhs) <= prec:
            rhs = f"({rhs})"
        return f"{lhs}{e.op}{rhs}"
    raise TypeError(f"not a scalar expression: {e!r}")


def _chain(e: Binop) -> TList[Expr]:
    """Flatten the maximal left spine of a same-kind set operator."""
    items = [e.rhs]
    cur = e.lhs
    while isinstance(cur, Binop) and cur.kind == e.kind:
        items.append(cur.rhs)
        cur = cur.lhs
    items.append(cur)
    items.reverse()
    return items


def _parts(e: Expr) -> TList[str]:
    if isinstance(e, Vec3):
        return [f"[{_fmt_scalar(e.x)}, {_fmt_scalar(e.y)}, {_fmt_scalar(e.z)}]"]
    if isinstance(e, Vec2):
        return [f"[{_fmt_scalar(e.a)}, {_fmt_scalar(e.b)}]"]
    if isinstance(e, (Num, Var, BinNum)):
        return [_fmt_scalar(e)]
    if isinstance(e, Cuboid):
        return ["Cuboid"] + _parts(e.dims)
    if isinstance(e, Sphere):
        return ["Sphere"] + _parts(e.radius)
    if isinstance(e, Cylinder):
        return ["Cylinder"] + _parts(e.params)
    if isinstance(e, HexPrism):
        return ["HexPrism"] + _parts(e.params)
    if isinstance(e, Affine):
        return [e.kind] + _parts(e.params) + [to_text(e.child)]
    if isinstance(e, Binop):
        return [e.kind] + [to_text(c) for c in _chain(e)]
    if isinstance(e, Fold):
        return ["Fold", e.kind, to_text(e.arg)]
    if isinstance(e, ListExpr):
        return ["List"] + [to_text(c) for c in e.items]
    if isinstance(e, Concat):
        return ["Concat"] + [to_text(c) for c in e.lists]
    if isinstance(e, Tabulate):
        binds = [f"({v} {b})" for v, b in e.bindings]
        return ["Tabulate"] + binds + [to_text(e.body)]
    if isinstance(e, Map2):
        return ["Map2", e.kind, to_text(e.params), to_text(e.cads)]
    if isinstance(e, Repeat):
        return ["Repeat", str(e.count), to_text(e.item)]
    if isinstance(e, (Sort, Unsort)):
        head = "Sort" if isinstance(e, Sort) else "Unsort"
        perm = " ".join(str(i) for i in e.perm.indices)
        return [head, f"({perm})", to_text(e.arg)]
    if isinstance(e, Part):
        lens = " ".join(str(i) for i in e.part.lengths)
        return ["Part", f"({lens})", to_text(e.arg)]
    if isinstance(e, Unpart):
        lens = " ".join(str(i) for i in e.part.lengths)
        return ["Unpart", f"({lens})"] + [to_text(c) for c in e.lists]
    if isinstance(e, (Spherical, Unspherical)):
        head = "Spherical" if isinstance(e, Spherical) else "Unspherical"
        return [head, str(e.count)] + _parts(e.center) + [to_text(e.arg)]
    raise TypeError(f"not an Expr: {e!r}")


def to_text(e: Expr) -> str:
    """Single-line deterministic form; parse(to_text(e)) == e."""
    if isinstance(e, (Num, Var, BinNum, Vec3, Vec2)):
        return _parts(e)[0]
    return "(" + " ".join(_parts(e)) + ")"


def pretty(e: Expr, indent: int = 0, width: int = 90) -> str:
    """Multi-line form for human eyes; still re-parseable."""
    flat = to_text(e)
    if len(flat) + indent <= width or isinstance(e, (Num, Var, BinNum, Vec3, Vec2)):
        return flat
    parts = _parts(e)
    kids = _chain(e) if isinstance(e, Binop) else list(children(e))
    # leading tokens (head, kinds, counts, perms) stay on the first line
    head = parts[: max(1, len(parts) - len(kids))]
    pad = " " * (indent + 2)
    body = [pad + pretty(kid, indent + 2, width) for kid in kids]
    return "(" + " ".join(head) + "\n" + "\n".join(body) + ")"
