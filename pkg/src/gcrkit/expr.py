"""Minimal expression language for surface components and profile functions.

Grammar (EBNF, whitespace insignificant):

    expression = term { ("+" | "-") term } ;
    term       = unary { ("*" | "/") unary } ;
    unary      = "-" unary | power ;
    power      = atom [ "^" unary ] ;            (* right associative *)
    atom       = NUMBER | IDENT | IDENT "(" expression ")" | "(" expression ")" ;
    NUMBER     = DIGIT+ ["." DIGIT*] [EXPONENT] | "." DIGIT+ [EXPONENT] ;
    EXPONENT   = ("e" | "E") ["+" | "-"] DIGIT+ ;

"^" binds tighter than unary minus, which binds tighter than "*" and "/",
so ``-s^2`` parses as ``-(s^2)``.  There is no implicit multiplication.
Identifiers must either be declared chart variables or one of the built-in
unary functions: sin, cos, tan, exp, log, sqrt, abs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Mapping, Sequence

from .jet import Jet, JetDomainError, jet_constant
from . import jet as _jet

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprError",
    "ExprSyntaxError",
    "ExprEvalError",
    "FUNCTIONS",
    "parse_expr",
    "eval_expr",
    "eval_real",
    "to_text",
    "variables_of",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")

_REAL_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}

_JET_FUNCTIONS = {
    "sin": _jet.sin,
    "cos": _jet.cos,
    "tan": _jet.tan,
    "exp": _jet.exp,
    "log": _jet.log,
    "sqrt": _jet.sqrt,
    "abs": abs,
}


class ExprError(Exception):
    """Base class for expression failures."""


class ExprSyntaxError(ExprError):
    """Malformed source text; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExprEvalError(ExprError):
    """Evaluation failed (domain error or missing variable binding)."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Const | Var | Neg | BinOp | Call


# -- tokenizer -------------------------------------------------------------------

_OPERATOR_CHARS = "+-*/^(),"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    size = len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < size and text[i + 1].isdigit()):
            start = i
            while i < size and text[i].isdigit():
                i += 1
            if i < size and text[i] == ".":
                i += 1
                while i < size and text[i].isdigit():
                    i += 1
            if i < size and text[i] in "eE":
                j = i + 1
                if j < size and text[j] in "+-":
                    j += 1
                if j < size and text[j].isdigit():
                    i = j
                    while i < size and text[i].isdigit():
                        i += 1
            tokens.append(("number", text[start:i], start))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < size and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(("ident", text[start:i], start))
            continue
        if ch in _OPERATOR_CHARS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", size))
    return tokens


# -- parser ----------------------------------------------------------------------

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_UNARY = 3
_PREC_POW = 4

_BINARY_PREC = {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL,
                "^": _PREC_POW}


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = tuple(variables)
        seen = set()
        for name in self.variables:
            if not name.isidentifier():
                raise ValueError(f"invalid variable name {name!r}")
            if name in FUNCTIONS:
                raise ValueError(f"variable name {name!r} shadows a function")
            if name in seen:
                raise ValueError(f"duplicate variable name {name!r}")
            seen.add(name)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol: str) -> None:
        kind, text, offset = self.peek()
        if kind != "op" or text != symbol:
            raise ExprSyntaxError(f"expected {symbol!r}", offset)
        self.advance()

    def parse(self) -> Expr:
        node = self.parse_expression(0)
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", offset)
        return node

    def parse_expression(self, min_prec: int) -> Expr:
        node = self.parse_atom()
        while True:
            kind, text, offset = self.peek()
            if kind != "op" or text not in _BINARY_PREC:
                break
            prec = _BINARY_PREC[text]
            if prec < min_prec:
                break
            self.advance()
            if text == "^":
                right = self.parse_expression(_PREC_POW)  # right associative
            else:
                right = self.parse_expression(prec + 1)
            node = BinOp(text, node, right)
        return node

    def parse_atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "op" and text == "-":
            # unary minus: tighter than * and /, looser than ^
            return Neg(self.parse_expression(_PREC_POW))
        if kind == "op" and text == "(":
            node = self.parse_expression(0)
            self.expect_op(")")
            return node
        if kind == "ident":
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "(":
                if text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {text!r}", offset)
                self.advance()
                args = [self.parse_expression(0)]
                while True:
                    kind2, text2, offset2 = self.peek()
                    if kind2 == "op" and text2 == ",":
                        self.advance()
                        args.append(self.parse_expression(0))
                        continue
                    break
                self.expect_op(")")
                if len(args) != 1:
                    raise ExprSyntaxError(
                        f"function {text!r} expects 1 argument, got {len(args)}",
                        offset,
                    )
                return Call(text, args[0])
            if text not in self.variables:
                raise ExprSyntaxError(f"unknown identifier {text!r}", offset)
            return Var(text)
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", offset)
        raise ExprSyntaxError(f"unexpected token {text!r}", offset)


def parse_expr(text: str, variables: Sequence[str]) -> Expr:
    """Parse ``text`` into an expression tree over the declared variables."""
    return _Parser(text, variables).parse()


def variables_of(expr: Expr) -> frozenset[str]:
    """Names of the variables that actually occur in ``expr``."""
    match expr:
        case Const():
            return frozenset()
        case Var(name):
            return frozenset((name,))
        case Neg(operand):
            return variables_of(operand)
        case BinOp(_, left, right):
            return variables_of(left) | variables_of(right)
        case Call(_, arg):
            return variables_of(arg)
    raise TypeError(f"not an expression node: {expr!r}")


# -- evaluation -------------------------------------------------------------------


def _pow_real(base: float, expo: float) -> float:
    if float(expo).is_integer():
        return _int_pow_real(base, int(expo))
    if base <= 0.0:
        raise ExprEvalError(
            f"'^' with non-integer exponent needs a positive base, got {base!r}"
        )
    return base**expo


def _int_pow_real(base: float, p: int) -> float:
    if p == 0:
        return 1.0
    invert = p < 0
    k = abs(p)
    result = None
    acc = base
    while k:
        if k & 1:
            result = acc if result is None else result * acc
        k >>= 1
        if k:
            acc = acc * acc
    if invert:
        if result == 0.0:
            raise ExprEvalError("division by zero in negative power")
        return 1.0 / result
    return result


def _is_constant_jet(x: Jet) -> bool:
    return (
        not x.grad.any()
        and not x.hess.any()
        and not x.third.any()
    )


def eval_expr(expr: Expr, env: Mapping[str, Jet]) -> Jet:
    """Evaluate over jets.  ``env`` must bind every variable of the chart."""
    if not env:
        raise ExprEvalError("empty environment: jet arity and order are unknown")
    probe = next(iter(env.values()))
    n, order = probe.n, probe.order

    def rec(node: Expr) -> Jet:
        match node:
            case Const(value):
                return jet_constant(value, n, order)
            case Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise ExprEvalError(f"unbound variable {name!r}") from None
            case Neg(operand):
                return -rec(operand)
            case BinOp("^", left, right):
                b = rec(left)
                e = rec(right)
                if _is_constant_jet(e):
                    if float(e.value).is_integer():
                        return b ** int(e.value)
                    if b.value <= 0.0:
                        raise ExprEvalError(
                            "'^' with non-integer exponent needs a positive base, "
                            f"got {b.value!r}"
                        )
                    return b ** float(e.value)
                if b.value <= 0.0:
                    raise ExprEvalError(
                        "'^' with non-constant exponent needs a positive base, "
                        f"got {b.value!r}"
                    )
                return _jet.exp(e * _jet.log(b))
            case BinOp(op, left, right):
                a, b = rec(left), rec(right)
                try:
                    if op == "+":
                        return a + b
                    if op == "-":
                        return a - b
                    if op == "*":
                        return a * b
                    return a / b
                except JetDomainError as exc:
                    raise ExprEvalError(str(exc)) from exc
            case Call(fn, arg):
                try:
                    return _JET_FUNCTIONS[fn](rec(arg))
                except JetDomainError as exc:
                    raise ExprEvalError(str(exc)) from exc
        raise TypeError(f"not an expression node: {node!r}")

    return rec(expr)


def eval_real(expr: Expr, env: Mapping[str, float]) -> float:
    """Plain-float evaluation along the same operation sequence as eval_expr."""

    def rec(node: Expr) -> float:
        match node:
            case Const(value):
                return value
            case Var(name):
                try:
                    return float(env[name])
                except KeyError:
                    raise ExprEvalError(f"unbound variable {name!r}") from None
            case Neg(operand):
                return -rec(operand)
            case BinOp("^", left, right):
                return _pow_real(rec(left), rec(right))
            case BinOp(op, left, right):
                a, b = rec(left), rec(right)
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                if op == "*":
                    return a * b
                if b == 0.0:
                    raise ExprEvalError("division by zero")
                # reciprocal-multiply, matching the jet code path bit for bit
                return a * (1.0 / b)
            case Call(fn, arg):
                v = rec(arg)
                if fn == "log" and v <= 0.0:
                    raise ExprEvalError(f"log is undefined at {v!r}")
                if fn == "sqrt" and v < 0.0:
                    raise ExprEvalError(f"sqrt is undefined at {v!r}")
                return float(_REAL_FUNCTIONS[fn](v))
        raise TypeError(f"not an expression node: {node!r}")

    return rec(expr)


# -- pretty printer ----------------------------------------------------------------


def to_text(expr: Expr) -> str:
    """Render an expression; parse_expr(to_text(e)) reproduces ``e``."""

    def rec(node: Expr, parent_prec: int) -> str:
        match node:
            case Const(value):
                return repr(value)
            case Var(name):
                return name
            case Neg(operand):
                body = f"-{rec(operand, _PREC_POW)}"
                return f"({body})" if parent_prec > _PREC_UNARY else body
            case BinOp(op, left, right):
                prec = _BINARY_PREC[op]
                if op == "^":
                    body = f"{rec(left, prec + 1)}^{rec(right, prec)}"
                else:
                    body = f"{rec(left, prec)}{op}{rec(right, prec + 1)}"
                return f"({body})" if parent_prec > prec else body
            case Call(fn, arg):
                return f"{fn}({rec(arg, 0)})"
        raise TypeError(f"not an expression node: {node!r}")

    return rec(expr, 0)
