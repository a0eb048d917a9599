"""Coefficient expressions: a small recursive-descent grammar over ``x``.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right associative
    atom   := NUMBER ["i"] | "x" | "pi" | FUNC "(" expr ")" | "(" expr ")"

``FUNC`` is one of sin cos tan exp log sqrt sinh cosh abs sgn.  There is
no implicit multiplication and no unary plus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from .errors import EvalError, ExprSyntaxError
from .grid import Grid, SampledFunction

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "abs", "sgn")


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Pi, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z_]))?"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            if src[pos:].strip() == "":
                break
            off = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(off, ["number", "name", "operator"], src[off])
        start = m.start(m.lastgroup) if m.lastgroup != "imag" else m.start("num")
        if m.group("num") is not None:
            kind = "imag" if m.group("imag") else "num"
            toks.append((kind, m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            toks.append(("name", m.group("name"), start))
        else:
            toks.append(("op", m.group("op"), start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, text, off = self.peek()
        raise ExprSyntaxError(off, expected, text if kind != "end" else "end of input")

    def expect(self, text: str):
        if self.peek()[1] != text or self.peek()[0] != "op":
            self.fail([repr(text)])
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(["operator", "end of input"])
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "num":
            self.advance()
            return Num(complex(float(text)))
        if kind == "imag":
            self.advance()
            return Num(complex(0.0, float(text)))
        if kind == "name":
            if text == "x":
                self.advance()
                return Var()
            if text == "pi":
                self.advance()
                return Pi()
            if text in FUNCTIONS:
                self.advance()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            self.fail(["x", "pi", "function name"])
        if (kind, text) == ("op", "("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(["number", "x", "pi", "function", "'('", "'-'"])


def parse(src: str) -> Expr:
    """Parse an expression string.

    Raises:
        ExprSyntaxError: with the byte offset of the offending token.
    """
    return _Parser(src).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _fmt_num(v: complex) -> str:
    if v.imag == 0.0:
        return repr(v.real)
    return repr(v.imag) + "i"


def to_source(e: Expr) -> str:
    """Render an AST so that ``parse(to_source(e)) == e``."""
    return _render(e, 0)


def _render(e: Expr, outer: int) -> str:
    if isinstance(e, Num):
        s = _fmt_num(e.value)
        return s if outer < _PREC["^"] else f"({s})"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Call):
        return f"{e.fn}({_render(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _render(e.arg, _PREC["neg"])
        return s if outer <= _PREC["neg"] else f"({s})"
    prec = _PREC[e.op]
    if e.op == "^":
        s = f"{_render(e.left, prec + 1)}^{_render(e.right, _PREC['neg'])}"
    else:
        s = f"{_render(e.left, prec)}{e.op}{_render(e.right, prec + 1)}"
    return s if outer <= prec else f"({s})"


def _sgn(z: np.ndarray) -> np.ndarray:
    out = np.sign(z.real).astype(complex)
    cplx = z.imag != 0
    if np.any(cplx):
        out[cplx] = z[cplx] / np.abs(z[cplx])
    return out


_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "abs": lambda z: np.abs(z).astype(complex),
    "sgn": _sgn,
}


def _first_bad(mask: np.ndarray, xs: np.ndarray) -> float:
    return float(xs[np.argmax(mask)]) if xs.ndim else float(xs)


def evaluate(e: Expr, x) -> np.ndarray:
    """Evaluate at an array of real abscissae; returns complex values."""
    xs = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return _eval(e, xs)


def _eval(e: Expr, xs: np.ndarray) -> np.ndarray:
    if isinstance(e, Num):
        return np.full(xs.shape, e.value, dtype=complex)
    if isinstance(e, Var):
        return xs.astype(complex)
    if isinstance(e, Pi):
        return np.full(xs.shape, np.pi, dtype=complex)
    if isinstance(e, Neg):
        return -_eval(e.arg, xs)
    if isinstance(e, Call):
        a = _eval(e.arg, xs)
        if e.fn == "log":
            bad = (a.imag == 0) & (a.real <= 0)
            if np.any(bad):
                raise EvalError(_first_bad(bad, xs), "log of nonpositive value")
            return np.log(a)
        out = _UNARY[e.fn](a)
    else:
        a, b = _eval(e.left, xs), _eval(e.right, xs)
        if e.op == "+":
            out = a + b
        elif e.op == "-":
            out = a - b
        elif e.op == "*":
            out = a * b
        elif e.op == "/":
            bad = b == 0
            if np.any(bad):
                raise EvalError(_first_bad(bad, xs), "division by zero")
            out = a / b
        else:
            out = _power(a, b)
    if not np.all(np.isfinite(out)):
        raise EvalError(_first_bad(~np.isfinite(out), xs), "non-finite value")
    return out


def _power(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # integer exponents of real bases stay on the real axis exactly
    if np.all(a.imag == 0) and np.all(b.imag == 0) and np.all(b.real == np.round(b.real)):
        return np.power(a.real, b.real).astype(complex)
    return a**b


def sample(e: Expr, grid: Grid) -> SampledFunction:
    """Pointwise evaluation at the mesh nodes."""
    return SampledFunction(grid, evaluate(e, grid.x))


def constant_value(src: Union[str, float, int, complex]) -> complex:
    """Value of a closed expression such as ``"pi"`` or ``"-2*pi"``."""
    if not isinstance(src, str):
        return complex(src)
    e = parse(src)
    return complex(evaluate(e, np.zeros(1))[0])
