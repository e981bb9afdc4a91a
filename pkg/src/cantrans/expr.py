"""Math DSL: parsing, pretty-printing and compilation to stack programs.

Grammar (no implicit multiplication, ``^`` binds tightest and associates
right, then unary minus, then ``* /``, then ``+ -``)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

Variables are 1-indexed ``q1..qn`` and ``p1..pn`` plus ``t`` and the group
parameter ``s``.  Any other identifier must be a declared parameter or one
of the functions ``sin cos exp ln sqrt tan abs``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ExprSyntaxError, IndexOutOfRange, MissingBinding, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "tan", "abs")

# Opcodes for the stack programs run by the backends. Instructions are
# encoded as (op, arg) int32 pairs; arg is 0 when unused.
OP_CONST = 0   # push consts[arg]
OP_VAR = 1     # push slots[arg]
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_POW = 7     # dynamic: integer exponents by repeated multiplication
OP_SIN = 8
OP_COS = 9
OP_EXP = 10
OP_LN = 11
OP_SQRT = 12
OP_TAN = 13
OP_ABS = 14
OP_POWI = 15   # arg holds a literal integer exponent

_FUNC_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "exp": OP_EXP,
    "ln": OP_LN,
    "sqrt": OP_SQRT,
    "tan": OP_TAN,
    "abs": OP_ABS,
}

_BIN_OPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str   # 'q', 'p', 't' or 's'
    index: int  # 1-based for q/p, 0 for t/s


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/', '^'
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Fun:
    name: str
    arg: object


@dataclass(frozen=True)
class Expr:
    """Parsed expression tied to a dimension and a parameter list."""

    root: object
    n: int
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "_program", None)

    @property
    def program(self) -> "Program":
        if self._program is None:
            object.__setattr__(self, "_program", compile_expr(self))
        return self._program

    @property
    def uses_t(self) -> bool:
        return _uses(self.root, "t")

    @property
    def uses_s(self) -> bool:
        return _uses(self.root, "s")

    def __str__(self):
        return to_source(self.root)


def _uses(node, kind):
    if isinstance(node, Var):
        return node.kind == kind
    if isinstance(node, Bin):
        return _uses(node.left, kind) or _uses(node.right, kind)
    if isinstance(node, Neg):
        return _uses(node.operand, kind)
    if isinstance(node, Fun):
        return _uses(node.arg, kind)
    return False


def referenced_params(node, acc=None):
    if acc is None:
        acc = set()
    if isinstance(node, Param):
        acc.add(node.name)
    elif isinstance(node, Bin):
        referenced_params(node.left, acc)
        referenced_params(node.right, acc)
    elif isinstance(node, Neg):
        referenced_params(node.operand, acc)
    elif isinstance(node, Fun):
        referenced_params(node.arg, acc)
    return acc


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_VAR_RE = re.compile(r"^([qp])([0-9]+)$")


@dataclass
class _Token:
    kind: str  # 'num', 'ident', one of '+-*/^()', or 'end'
    text: str
    pos: int


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            bad = len(source) - len(stripped)
            raise ExprSyntaxError(
                f"unexpected character {source[bad]!r}", bad,
                expected=("number", "identifier", "operator", "parenthesis"),
            )
        if m.group("num") is not None:
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(_Token(m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_ATOM_EXPECTED = ("number", "identifier", "'('", "'-'")


class _Parser:
    def __init__(self, tokens, n, params):
        self.tokens = tokens
        self.i = 0
        self.n = n
        self.params = params

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "^":
            self.advance()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "(":
            node = self.expr()
            closing = self.advance()
            if closing.kind != ")":
                raise ExprSyntaxError(
                    f"expected ')', found {closing.text or 'end of input'!r}",
                    closing.pos, expected=("')'",),
                )
            return node
        if tok.kind == "ident":
            return self.identifier(tok)
        raise ExprSyntaxError(
            f"expected a value, found {tok.text or 'end of input'!r}",
            tok.pos, expected=_ATOM_EXPECTED,
        )

    def identifier(self, tok):
        name = tok.text
        if name in _FUNC_OPS:
            opening = self.advance()
            if opening.kind != "(":
                raise ExprSyntaxError(
                    f"function {name!r} must be followed by '('",
                    opening.pos, expected=("'('",),
                )
            node = self.expr()
            closing = self.advance()
            if closing.kind != ")":
                raise ExprSyntaxError(
                    f"expected ')', found {closing.text or 'end of input'!r}",
                    closing.pos, expected=("')'",),
                )
            return Fun(name, node)
        if name == "t":
            return Var("t", 0)
        if name == "s":
            return Var("s", 0)
        m = _VAR_RE.match(name)
        if m:
            index = int(m.group(2))
            if not 1 <= index <= self.n:
                raise IndexOutOfRange(name, index, self.n, tok.pos)
            return Var(m.group(1), index)
        if name in self.params:
            return Param(name)
        raise UnknownIdentifier(name, tok.pos)


def parse(source: str, n: int, params=()) -> Expr:
    """Parse DSL source into an :class:`Expr` over an n-dimensional chart.

    ``params`` lists the symbolic parameter names the expression may use.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("dimension n must be a positive integer")
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, expected=_ATOM_EXPECTED)
    params = tuple(params)
    for name in params:
        if name in FUNCTIONS or name in ("t", "s") or _VAR_RE.match(name):
            raise ValueError(f"parameter name {name!r} collides with a reserved name")
        if not re.match(r"^[A-Za-z_][A-Za-z_0-9]*$", name):
            raise ValueError(f"invalid parameter name {name!r}")
    parser = _Parser(_tokenize(source), n, params)
    root = parser.expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ExprSyntaxError(
            f"unexpected {trailing.text!r} after expression",
            trailing.pos, expected=("operator", "end of input"),
        )
    return Expr(root, n, params)


# ---------------------------------------------------------------------------
# Pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def to_source(node) -> str:
    """Render an AST back to DSL source; parse(to_source(e)) evaluates
    identically to e."""
    text, _ = _render(node)
    return text


def _render(node):
    if isinstance(node, Num):
        if node.value < 0 or (node.value == 0 and math.copysign(1, node.value) < 0):
            return f"-{-node.value!r}", _PREC["neg"]
        return repr(node.value), _PREC["atom"]
    if isinstance(node, Var):
        if node.kind in ("t", "s"):
            return node.kind, _PREC["atom"]
        return f"{node.kind}{node.index}", _PREC["atom"]
    if isinstance(node, Param):
        return node.name, _PREC["atom"]
    if isinstance(node, Fun):
        return f"{node.name}({to_source(node.arg)})", _PREC["atom"]
    if isinstance(node, Neg):
        inner, prec = _render(node.operand)
        if prec < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PREC["neg"]
    if isinstance(node, Bin):
        my = _PREC[node.op]
        left, lp = _render(node.left)
        right, rp = _render(node.right)
        if node.op == "^":
            # right-associative; parenthesize a lower-or-equal left side
            if lp <= my:
                left = f"({left})"
            if rp < _PREC["neg"]:
                right = f"({right})"
        else:
            if lp < my:
                left = f"({left})"
            # left-associative; equal precedence on the right needs parens
            # for - and /, and is harmless-but-kept for + and * to preserve
            # the tree shape exactly
            if rp < my or (rp == my and node.op in ("-", "/", "+", "*")):
                right = f"({right})"
        return f"{left} {node.op} {right}", my
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Slot layout and bindings


@dataclass(frozen=True)
class SlotLayout:
    """Maps q/p/t/s/parameters to indices of a flat input vector.

    Layout: ``[q1..qn, p1..pn, t, s, params...]``.
    """

    n: int
    params: tuple

    @property
    def t_slot(self):
        return 2 * self.n

    @property
    def s_slot(self):
        return 2 * self.n + 1

    @property
    def nslots(self):
        return 2 * self.n + 2 + len(self.params)

    def param_slot(self, name):
        return 2 * self.n + 2 + self.params.index(name)

    def slot_of(self, node):
        if node.kind == "q":
            return node.index - 1
        if node.kind == "p":
            return self.n + node.index - 1
        if node.kind == "t":
            return self.t_slot
        return self.s_slot


@dataclass(frozen=True)
class Bindings:
    """Concrete values for one evaluation: coordinates, time, optional
    group parameter and the parameter table."""

    n: int
    q: tuple
    p: tuple
    t: float = 0.0
    s: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.q) != self.n or len(self.p) != self.n:
            raise ValueError(f"q and p must each have length n={self.n}")

    def to_slots(self, layout: SlotLayout) -> np.ndarray:
        slots = np.zeros(layout.nslots)
        slots[: self.n] = self.q
        slots[self.n : 2 * self.n] = self.p
        slots[layout.t_slot] = self.t
        slots[layout.s_slot] = 0.0 if self.s is None else self.s
        for name in layout.params:
            if name not in self.params:
                raise MissingBinding(f"parameter {name!r} has no bound value")
            slots[layout.param_slot(name)] = self.params[name]
        return slots


# ---------------------------------------------------------------------------
# Compilation


@dataclass(frozen=True)
class Program:
    """Flat stack program plus the input layout it expects."""

    code: np.ndarray    # int32, (op, arg) pairs
    consts: np.ndarray  # float64
    stack_need: int
    layout: SlotLayout
    uses_s: bool
    uses_t: bool

    @property
    def nslots(self):
        return self.layout.nslots


MAX_STACK = 256


def compile_expr(expr: Expr) -> Program:
    layout = SlotLayout(expr.n, expr.params)
    code = []
    consts = []

    def emit(op, arg=0):
        code.append(op)
        code.append(arg)

    def const_index(value):
        consts.append(float(value))
        return len(consts) - 1

    def walk(node):
        if isinstance(node, Num):
            emit(OP_CONST, const_index(node.value))
            return 1
        if isinstance(node, Var):
            emit(OP_VAR, layout.slot_of(node))
            return 1
        if isinstance(node, Param):
            emit(OP_VAR, layout.param_slot(node.name))
            return 1
        if isinstance(node, Neg):
            depth = walk(node.operand)
            emit(OP_NEG)
            return depth
        if isinstance(node, Fun):
            depth = walk(node.arg)
            emit(_FUNC_OPS[node.name])
            return depth
        if isinstance(node, Bin):
            if node.op == "^" and _literal_int(node.right) is not None:
                depth = walk(node.left)
                emit(OP_POWI, _literal_int(node.right))
                return depth
            dl = walk(node.left)
            dr = walk(node.right)
            emit(_BIN_OPS[node.op] if node.op != "^" else OP_POW)
            return max(dl, 1 + dr)
        raise TypeError(f"not an AST node: {node!r}")

    depth = walk(expr.root)
    if depth > MAX_STACK:
        raise ValueError("expression too deep")
    return Program(
        code=np.asarray(code, dtype=np.int32),
        consts=np.asarray(consts, dtype=np.float64),
        stack_need=depth,
        layout=layout,
        uses_s=expr.uses_s,
        uses_t=expr.uses_t,
    )


def _literal_int(node):
    """Integer value of a literal (possibly negated) exponent, else None."""
    sign = 1
    while isinstance(node, Neg):
        sign = -sign
        node = node.operand
    if isinstance(node, Num) and float(node.value).is_integer():
        v = int(node.value)
        if abs(v) <= 2**20:
            return sign * v
    return None


def evaluate(expr: Expr, bindings: Bindings) -> float:
    """Evaluate over plain reals through the active backend."""
    from . import backend

    if expr.n != bindings.n:
        raise ValueError("expression and bindings disagree on dimension n")
    prog = expr.program
    return backend.eval_value(prog, bindings.to_slots(prog.layout))
