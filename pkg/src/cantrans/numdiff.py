"""Derivatives of scalar fields and phase maps.

Dual numbers (through the active backend) are the primary engine and are
exact up to rounding; central finite differences exist as an independent
oracle, with the relative step ``h * max(1, |x_i|)`` per component.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .dual import Dual
from .phase import PhaseMap, PhasePoint, ScalarField, _shift

__all__ = [
    "Dual", "gradient", "hessian", "jacobian",
    "fd_gradient", "fd_jacobian", "fd_hessian",
]

DEFAULT_FD_STEP = 1e-5


def gradient(f: ScalarField, x: PhasePoint, s: float | None = None) -> np.ndarray:
    """Covector (df/dq, df/dp, df/dt) from one dual-number pass."""
    _, g = backend.eval_grad(f.program, f.slots(x, s), 2 * f.n + 1)
    return g


def hessian(f: ScalarField, x: PhasePoint, s: float | None = None) -> np.ndarray:
    """Second derivatives of f over (q, p, t), from nested duals."""
    _, _, h = backend.eval_hess(f.program, f.slots(x, s), 2 * f.n + 1)
    return h


def jacobian(phi: PhaseMap, x: PhasePoint) -> np.ndarray:
    """Rows are gradients of Q1..Qn, P1..Pn; columns ordered (q, p, t)."""
    return phi.jacobian(x)


def fd_gradient(f: ScalarField, x: PhasePoint, h: float = DEFAULT_FD_STEP,
                s: float | None = None) -> np.ndarray:
    """Central-difference gradient over (q, p, t); the oracle for
    :func:`gradient`."""
    if h <= 0:
        raise ValueError("step h must be positive")
    m = 2 * f.n + 1
    coords = np.append(x.z(), x.t)
    out = np.empty(m)
    for a in range(m):
        step = h * max(1.0, abs(coords[a]))
        out[a] = (f.value(_shift(x, a, step), s)
                  - f.value(_shift(x, a, -step), s)) / (2.0 * step)
    return out


def fd_jacobian(phi: PhaseMap, x: PhasePoint, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference jacobian of a map; the oracle for map jacobians."""
    if h <= 0:
        raise ValueError("step h must be positive")
    m = 2 * phi.n + 1
    coords = np.append(x.z(), x.t)
    out = np.empty((2 * phi.n, m))
    for a in range(m):
        step = h * max(1.0, abs(coords[a]))
        plus = phi(_shift(x, a, step))
        minus = phi(_shift(x, a, -step))
        out[:, a] = (np.append(plus.q, plus.p)
                     - np.append(minus.q, minus.p)) / (2.0 * step)
    return out


def fd_hessian(f: ScalarField, x: PhasePoint, h: float = DEFAULT_FD_STEP,
               s: float | None = None) -> np.ndarray:
    """Finite differences of the dual-number gradient; the oracle for
    :func:`hessian`."""
    if h <= 0:
        raise ValueError("step h must be positive")
    m = 2 * f.n + 1
    coords = np.append(x.z(), x.t)
    out = np.empty((m, m))
    for a in range(m):
        step = h * max(1.0, abs(coords[a]))
        out[:, a] = (gradient(f, _shift(x, a, step), s)
                     - gradient(f, _shift(x, a, -step), s)) / (2.0 * step)
    return out
