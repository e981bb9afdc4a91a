"""Pure-Python backend: stack-program interpreter and flow kernels.

This is the fallback twin of the compiled extension ``cantrans._core``.
The interpreter is generic over the scalar type: fed floats it evaluates
plainly, fed :class:`~cantrans.dual.Dual` inputs it propagates first (or,
nested, second) derivatives.  The compiled core implements the same
operation sequences, so the two backends agree bit-for-bit on values and
first derivatives.
"""

from __future__ import annotations

import numpy as np

from .dual import Dual, gabs, gcos, gexp, gln, gpow, gpow_int, gsin, gsqrt, gtan
from .errors import DomainError, NonFinite
from .expr import (
    OP_ABS,
    OP_ADD,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LN,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_POWI,
    OP_SIN,
    OP_SQRT,
    OP_SUB,
    OP_TAN,
    OP_VAR,
)

name = "pure"


def _run(code, consts, inputs):
    """Interpret a stack program over arbitrary scalars."""
    stack = []
    push = stack.append
    pop = stack.pop
    for i in range(0, len(code), 2):
        op = code[i]
        arg = code[i + 1]
        if op == OP_CONST:
            push(consts[arg])
        elif op == OP_VAR:
            push(inputs[arg])
        elif op == OP_ADD:
            b = pop()
            push(pop() + b)
        elif op == OP_SUB:
            b = pop()
            push(pop() - b)
        elif op == OP_MUL:
            b = pop()
            push(pop() * b)
        elif op == OP_DIV:
            b = pop()
            a = pop()
            if isinstance(b, Dual) or isinstance(a, Dual):
                push(a / b)
            else:
                if b == 0.0:
                    raise DomainError("division by zero")
                push(a / b)
        elif op == OP_NEG:
            push(-pop())
        elif op == OP_POWI:
            push(gpow_int(pop(), arg))
        elif op == OP_POW:
            b = pop()
            push(gpow(pop(), b))
        elif op == OP_SIN:
            push(gsin(pop()))
        elif op == OP_COS:
            push(gcos(pop()))
        elif op == OP_EXP:
            push(gexp(pop()))
        elif op == OP_LN:
            push(gln(pop()))
        elif op == OP_SQRT:
            push(gsqrt(pop()))
        elif op == OP_TAN:
            push(gtan(pop()))
        elif op == OP_ABS:
            push(gabs(pop()))
        else:
            raise ValueError(f"bad opcode {op}")
    return stack[-1]


def _seed_row(seed, i, j, k):
    if seed is None:
        return 1.0 if i == j and j < k else 0.0
    return seed[i, j]


def eval_value(prog, slots):
    out = _run(prog.code, prog.consts, [float(x) for x in slots])
    return float(out)


def eval_grad(prog, slots, k, seed=None):
    inputs = []
    for j, x in enumerate(slots):
        parts = tuple(_seed_row(seed, i, j, k) for i in range(k))
        if any(p != 0.0 for p in parts):
            inputs.append(Dual(float(x), parts))
        else:
            inputs.append(float(x))
    out = _run(prog.code, prog.consts, inputs)
    if isinstance(out, Dual):
        return float(out.value), np.asarray(out.parts, dtype=np.float64)
    return float(out), np.zeros(k)


def eval_hess(prog, slots, k, seed=None):
    zeros = (0.0,) * k
    inputs = []
    for j, x in enumerate(slots):
        row = tuple(_seed_row(seed, i, j, k) for i in range(k))
        if any(p != 0.0 for p in row):
            inner = Dual(float(x), row)
            outer_parts = tuple(Dual(row[i], zeros) for i in range(k))
            inputs.append(Dual(inner, outer_parts))
        else:
            inputs.append(float(x))
    out = _run(prog.code, prog.consts, inputs)
    grad = np.zeros(k)
    hess = np.zeros((k, k))
    if isinstance(out, Dual):
        inner = out.value
        value = float(inner.value) if isinstance(inner, Dual) else float(inner)
        if isinstance(inner, Dual):
            grad[:] = [float(p) if not isinstance(p, Dual) else float(p.value)
                       for p in inner.parts]
        for i, po in enumerate(out.parts):
            if isinstance(po, Dual):
                hess[i, :] = [float(pp) if not isinstance(pp, Dual)
                              else float(pp.value) for pp in po.parts]
        return value, grad, hess
    return float(out), grad, hess


def _field(prog, work, n, y):
    """Hamiltonian vector field (df/dp, -df/dq) at state y, via one
    first-order dual pass seeded on the 2n phase slots."""
    work[: 2 * n] = y
    _, g = eval_grad(prog, work, 2 * n)
    f = np.empty(2 * n)
    f[:n] = g[n:]
    f[n:] = -g[:n]
    return f


def rk4_flow(prog, n, slots, s, steps):
    work = np.array(slots, dtype=np.float64)
    y = work[: 2 * n].copy()
    h = s / steps
    for _ in range(steps):
        k1 = _field(prog, work, n, y)
        k2 = _field(prog, work, n, y + (0.5 * h) * k1)
        k3 = _field(prog, work, n, y + (0.5 * h) * k2)
        k4 = _field(prog, work, n, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            raise NonFinite("flow state overflowed")
    return y


def rk4_flow_tangent(prog, n, slots, s, steps):
    """Flow plus tangent propagation.

    Integrates dM/ds = B(y) M alongside the state, with directions
    (q, p, t); returns the endpoint and the (2n)x(2n+1) jacobian of the
    endpoint with respect to the start point and t.
    """
    work = np.array(slots, dtype=np.float64)
    m = 2 * n + 1
    y = work[: 2 * n].copy()
    M = np.eye(m)
    h = s / steps

    def field_and_b(state):
        work[: 2 * n] = state
        _, g, hess = eval_hess(prog, work, m)
        f = np.empty(2 * n)
        f[:n] = g[n : 2 * n]
        f[n:] = -g[:n]
        B = np.zeros((m, m))
        B[:n, :] = hess[n : 2 * n, :]
        B[n : 2 * n, :] = -hess[:n, :]
        return f, B

    for _ in range(steps):
        k1, B1 = field_and_b(y)
        m1 = B1 @ M
        k2, B2 = field_and_b(y + (0.5 * h) * k1)
        m2 = B2 @ (M + (0.5 * h) * m1)
        k3, B3 = field_and_b(y + (0.5 * h) * k2)
        m3 = B3 @ (M + (0.5 * h) * m2)
        k4, B4 = field_and_b(y + h * k3)
        m4 = B4 @ (M + h * m3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        M = M + (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4)
        if not np.isfinite(y).all():
            raise NonFinite("flow state overflowed")
    return y, M[: 2 * n, :]
