"""Arithmetic expressions in the variables ``t``, ``x``, ``v``.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = ("-" | "+") , unary | power ;
    power   = primary , [ ("^" | "**") , unary ] ;
    primary = number | variable | func , "(" , expr , ")" | "(" , expr , ")" ;
    number  = digits , [ "." , [ digits ] ] , [ exponent ]
            | "." , digits , [ exponent ] ;
    exponent = ("e" | "E") , [ "+" | "-" ] , digits ;
    variable = "t" | "x" | "v" ;
    func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "sign" ;

Power binds tighter than unary minus and is right-associative, so
``-2^2 == -4`` and ``2^3^2 == 512``.  Evaluation is vectorized over numpy
arrays; points where the expression is undefined raise :class:`DomainError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParseError

VARIABLES = ("t", "x", "v")
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs", "sign")
BINARY_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow", "**": "pow"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Number:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    child: "Node"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(default=0, compare=False)


Node = Number | Var | Unary | Binary


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int  # byte offset


def _tokenize(src):
    toks = []
    i = 0
    byte = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            ch = src[i]
            raise ParseError(byte, f"unexpected character {ch!r}", ch)
        text = m.group()
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, text, byte))
        byte += len(text.encode("utf-8"))
        i = m.end()
    toks.append(_Tok("eof", "", byte))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.k = 0

    @property
    def tok(self):
        return self.toks[self.k]

    def advance(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, text):
        tok = self.tok
        if tok.text != text or tok.kind not in ("op",):
            raise ParseError(tok.pos, f"expected {text!r}", tok.text)
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(self.tok.pos, "expected operator or end of input", self.tok.text)
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            node = Binary(BINARY_OPS[op.text], node, self.term(), op.pos)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.advance()
            node = Binary(BINARY_OPS[op.text], node, self.unary(), op.pos)
        return node

    def unary(self):
        tok = self.tok
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Unary("neg", self.unary(), tok.pos)
        if tok.kind == "op" and tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text in ("^", "**"):
            op = self.advance()
            return Binary("pow", base, self.unary(), op.pos)
        return base

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if not np.isfinite(value):
                raise ParseError(tok.pos, "number out of range", tok.text)
            return Number(value, tok.pos)
        if tok.kind == "name":
            self.advance()
            if tok.text in VARIABLES:
                return Var(tok.text, tok.pos)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg, tok.pos)
            raise ParseError(
                tok.pos,
                f"unknown identifier; expected one of {', '.join(VARIABLES + FUNCTIONS)}",
                tok.text,
            )
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if tok.kind == "eof" else "operator"
        raise ParseError(tok.pos, f"expected number, variable, function or '(' but got {what}", tok.text)


def parse(src: str) -> Node:
    """Parse ``src`` into an expression tree.

    Raises:
        ParseError: with the byte offset of the offending token.
    """
    return _Parser(src).parse()


_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def to_source(node: Node) -> str:
    """Render a tree as text that parses back to an equal tree.

    Binary operations are always parenthesized; that costs readability but
    makes the round trip independent of precedence subtleties.
    """
    if isinstance(node, Number):
        text = repr(float(node.value))
        return f"({text})" if text.startswith("-") else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        # the outer parentheses keep a negated base under "^"
        if node.op == "neg":
            return f"(-({to_source(node.child)}))"
        return f"{node.op}({to_source(node.child)})"
    return f"({to_source(node.left)} {_SYMBOL[node.op]} {to_source(node.right)})"


def variables(node: Node) -> set[str]:
    """Names of the variables referenced by ``node``."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Unary):
        return variables(node.child)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    return set()


_UNARY = {
    "neg": np.negative,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sign": np.sign,
}


def _check_pow(node, a, b):
    if np.any((a < 0) & (b != np.round(b))):
        raise DomainError(node.pos, "negative base raised to a non-integer power")
    if np.any((a == 0) & (b < 0)):
        raise DomainError(node.pos, "zero raised to a negative power")


def _compile(node):
    """Turn a tree into a closure over an environment dict of arrays."""
    if isinstance(node, Number):
        value = node.value
        return lambda env: value
    if isinstance(node, Var):
        name = node.name
        return lambda env: env[name]
    if isinstance(node, Unary):
        child = _compile(node.child)
        if node.op == "log":

            def f(env):
                c = child(env)
                if np.any(np.asarray(c) <= 0):
                    raise DomainError(node.pos, "log of a non-positive number")
                return np.log(c)

            return f
        if node.op == "sqrt":

            def f(env):
                c = child(env)
                if np.any(np.asarray(c) < 0):
                    raise DomainError(node.pos, "sqrt of a negative number")
                return np.sqrt(c)

            return f
        ufunc = _UNARY[node.op]
        return lambda env: ufunc(child(env))
    left, right = _compile(node.left), _compile(node.right)
    op = node.op
    if op == "add":
        return lambda env: left(env) + right(env)
    if op == "sub":
        return lambda env: left(env) - right(env)
    if op == "mul":
        return lambda env: left(env) * right(env)
    if op == "div":

        def f(env):
            b = right(env)
            if np.any(np.asarray(b) == 0):
                raise DomainError(node.pos, "division by zero")
            return left(env) / b

        return f
    if isinstance(node.right, Number):
        k = node.right.value
        if k == int(k) and k >= 0:
            ik = int(k)
            return lambda env: np.power(left(env), ik)

        def f(env):
            a = np.asarray(left(env))
            if k != int(k) and np.any(a < 0):
                raise DomainError(node.pos, "negative base raised to a non-integer power")
            if k < 0 and np.any(a == 0):
                raise DomainError(node.pos, "zero raised to a negative power")
            return np.power(a, k)

        return f

    def f(env):
        a, b = np.broadcast_arrays(np.asarray(left(env), dtype=float), np.asarray(right(env), dtype=float))
        _check_pow(node, a, b)
        return np.power(a, b)

    return f


def compile_expr(node: Node):
    """Vectorized evaluator ``fn(t, x, v)`` for ``node``."""
    body = _compile(node)

    def fn(t=0.0, x=0.0, v=0.0):
        env = {"t": np.asarray(t, dtype=float), "x": np.asarray(x, dtype=float), "v": np.asarray(v, dtype=float)}
        with np.errstate(over="ignore", invalid="ignore"):
            out = body(env)
        shape = np.broadcast_shapes(env["t"].shape, env["x"].shape, env["v"].shape)
        out = np.asarray(out, dtype=float)
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        return float(out) if out.ndim == 0 else out

    return fn


def evaluate(node: Node, t=0.0, x=0.0, v=0.0):
    """Evaluate ``node`` at ``(t, x, v)``; arguments may be numpy arrays.

    Returns a float for scalar input and an array broadcast against all
    three arguments otherwise.
    """
    return compile_expr(node)(t, x, v)


class Expression:
    """A parsed expression that remembers its source text."""

    def __init__(self, source: str):
        self.source = source
        self.ast = parse(source)
        self._fn = compile_expr(self.ast)

    def __call__(self, t, x, v):
        return self._fn(t, x, v)

    def __repr__(self):
        return f"Expression({self.source!r})"
