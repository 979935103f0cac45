"""Small deterministic expression language for Lagrangians, potentials and densities.

Grammar (EBNF, also documented in the README):

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;
    atom    = number | name | name "(" expr { "," expr } ")" | "(" expr ")" ;

"+"/"-" and "*"/"/" associate to the left, "^" to the right and binds tighter
than unary minus (so "-x^2" is "-(x^2)").  Variables are x1..xn, v1..vn plus
any user-declared parameter names.  Known functions: sin cos sinh cosh exp log
sqrt abs atan2 pow.

Evaluation is plain IEEE double arithmetic via the math module and is
deterministic.  Any operation that would produce a non-finite value (log of a
non-positive number, division by zero, 0^negative, overflow) raises
ExprDomainError rather than returning inf/nan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)


class ExprDomainError(ExprError):
    pass


class ExprEvalError(ExprError):
    pass


FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "sinh": 1,
    "cosh": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "atan2": 2,
    "pow": 2,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expression = Num | Var | Neg | BinOp | Call


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_OPS = set("+-*/^(),")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    line: int
    column: int


def _tokenize(source):
    tokens = []
    line = 1
    col = 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in _TOKEN_OPS:
            tokens.append(_Token("op", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                if source[j] == ".":
                    seen_dot = True
                j += 1
            # exponent part
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    while k < n and source[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("num", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("name", source[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.advance()
        raise ExprSyntaxError(
            f"unexpected {tok.text!r}" if tok.kind != "end" else "unexpected end of input",
            tok.line,
            tok.column,
            expected=(repr(op),),
        )

    def parse_expr(self):
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                node = BinOp(tok.text, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                node = BinOp(tok.text, node, self.parse_unary())
            else:
                return node

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise ExprSyntaxError(
                        f"unknown function {tok.text!r}", tok.line, tok.column
                    )
                self.advance()
                args = [self.parse_expr()]
                while self.peek().kind == "op" and self.peek().text == ",":
                    self.advance()
                    args.append(self.parse_expr())
                self.expect_op(")")
                arity = FUNCTIONS[tok.text]
                if len(args) != arity:
                    raise ExprSyntaxError(
                        f"{tok.text} takes {arity} argument(s), got {len(args)}",
                        tok.line,
                        tok.column,
                    )
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"unexpected {tok.text!r}" if tok.kind != "end" else "unexpected end of input",
            tok.line,
            tok.column,
            expected=("expression",),
        )


def parse(source):
    """Parse source text into an Expression AST."""
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprSyntaxError(
            f"unexpected trailing {tok.text!r}", tok.line, tok.column,
            expected=("end of input",),
        )
    return node


# ---------------------------------------------------------------------------
# rendering

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def render(e):
    """Render an AST back to source text; parse(render(e)) == e."""
    return _render(e, 0)


def _render(e, parent_prec):
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return e.func + "(" + ", ".join(_render(a, 0) for a in e.args) + ")"
    if isinstance(e, Neg):
        text = "-" + _render(e.arg, _PREC["neg"])
        return "(" + text + ")" if parent_prec > _PREC["neg"] else text
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        if e.op == "^":
            # right-associative: parenthesize a left child of equal precedence
            left = _render(e.left, prec + 1)
            right = _render(e.right, prec)
        else:
            left = _render(e.left, prec)
            right = _render(e.right, prec + 1)
        text = left + e.op + right
        return "(" + text + ")" if parent_prec > prec else text
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation

def _check_finite(value, what):
    if not math.isfinite(value):
        raise ExprDomainError(f"non-finite result in {what}")
    return value


def evaluate(e, ctx):
    """Evaluate the expression with variables bound by the ctx mapping."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return ctx[e.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, ctx)
    if isinstance(e, BinOp):
        a = evaluate(e.left, ctx)
        b = evaluate(e.right, ctx)
        if e.op == "+":
            return _check_finite(a + b, "addition")
        if e.op == "-":
            return _check_finite(a - b, "subtraction")
        if e.op == "*":
            return _check_finite(a * b, "multiplication")
        if e.op == "/":
            if b == 0.0:
                raise ExprDomainError("division by zero")
            return _check_finite(a / b, "division")
        if e.op == "^":
            return _power(a, b)
        raise TypeError(f"bad operator {e.op!r}")
    if isinstance(e, Call):
        args = [evaluate(a, ctx) for a in e.args]
        return _call(e.func, args)
    raise TypeError(f"not an expression node: {e!r}")


def _power(a, b):
    if a == 0.0 and b < 0.0:
        raise ExprDomainError("zero raised to a negative power")
    if a < 0.0 and b != math.floor(b):
        raise ExprDomainError("negative base with non-integer exponent")
    try:
        value = math.pow(a, b)
    except (OverflowError, ValueError) as err:
        raise ExprDomainError(f"power: {err}") from None
    return _check_finite(value, "power")


def _call(func, args):
    try:
        if func == "sin":
            return _check_finite(math.sin(args[0]), func)
        if func == "cos":
            return _check_finite(math.cos(args[0]), func)
        if func == "sinh":
            return _check_finite(math.sinh(args[0]), func)
        if func == "cosh":
            return _check_finite(math.cosh(args[0]), func)
        if func == "exp":
            return _check_finite(math.exp(args[0]), func)
        if func == "log":
            if args[0] <= 0.0:
                raise ExprDomainError("log of a non-positive number")
            return _check_finite(math.log(args[0]), func)
        if func == "sqrt":
            if args[0] < 0.0:
                raise ExprDomainError("sqrt of a negative number")
            return _check_finite(math.sqrt(args[0]), func)
        if func == "abs":
            return abs(args[0])
        if func == "atan2":
            return _check_finite(math.atan2(args[0], args[1]), func)
        if func == "pow":
            return _power(args[0], args[1])
    except OverflowError:
        raise ExprDomainError(f"overflow in {func}") from None
    raise ExprEvalError(f"unknown function {func!r}")


def free_vars(e):
    """Set of free variable names."""
    if isinstance(e, Num):
        return set()
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        out = set()
        for a in e.args:
            out |= free_vars(a)
        return out
    raise TypeError(f"not an expression node: {e!r}")


def to_sympy(e, symbols):
    """Convert an AST to a sympy expression; symbols maps names to sympy symbols."""
    import sympy as sp

    if isinstance(e, Num):
        return sp.Float(e.value)
    if isinstance(e, Var):
        try:
            return symbols[e.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -to_sympy(e.arg, symbols)
    if isinstance(e, BinOp):
        a = to_sympy(e.left, symbols)
        b = to_sympy(e.right, symbols)
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b, "^": a ** b}[e.op]
    if isinstance(e, Call):
        args = [to_sympy(a, symbols) for a in e.args]
        import sympy as sp

        table = {
            "sin": sp.sin, "cos": sp.cos, "sinh": sp.sinh, "cosh": sp.cosh,
            "exp": sp.exp, "log": sp.log, "sqrt": sp.sqrt, "abs": sp.Abs,
            "atan2": sp.atan2, "pow": lambda a, b: a ** b,
        }
        return table[e.func](*args)
    raise TypeError(f"not an expression node: {e!r}")
