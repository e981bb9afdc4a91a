"""Backend selection: compiled extension when available, pure Python otherwise.

Set ``CANTRANS_BACKEND=pure`` (or ``compiled``) to force a choice; the
default ``auto`` prefers the compiled core.  Both backends implement the
same operation sequences, so results agree (bitwise for values and first
derivatives).
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure

_choice = os.environ.get("CANTRANS_BACKEND", "auto")
_compiled = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as _compiled
    except ImportError:
        _compiled = None
        if _choice == "compiled":
            raise ImportError(
                "CANTRANS_BACKEND=compiled but the cantrans._core extension "
                "is not built; install with the extension or use the pure backend"
            )


class Handle:
    """Uniform call surface over one backend implementation."""

    def __init__(self, impl):
        self._impl = impl
        self.name = impl.name

    def eval_value(self, prog, slots) -> float:
        if self._impl is _pure:
            return _pure.eval_value(prog, slots)
        return self._impl.eval_value(
            prog.code, prog.consts,
            np.ascontiguousarray(slots, dtype=np.float64), prog.stack_need)

    def eval_grad(self, prog, slots, k: int, seed=None):
        """Value and k directional derivatives.

        ``seed=None`` seeds unit directions on the first k slots; otherwise
        ``seed`` is a (k, nslots) matrix of directions.
        """
        if self._impl is _pure:
            return _pure.eval_grad(prog, slots, k, seed)
        grad = np.empty(k)
        if seed is not None:
            seed = np.ascontiguousarray(seed, dtype=np.float64)
        value = self._impl.eval_grad(
            prog.code, prog.consts,
            np.ascontiguousarray(slots, dtype=np.float64),
            k, seed, prog.stack_need, grad)
        return value, grad

    def eval_hess(self, prog, slots, k: int, seed=None):
        """Value, gradient and second-derivative matrix over k directions."""
        if self._impl is _pure:
            return _pure.eval_hess(prog, slots, k, seed)
        grad = np.empty(k)
        hess = np.empty(k * k)
        if seed is not None:
            seed = np.ascontiguousarray(seed, dtype=np.float64)
        value = self._impl.eval_hess(
            prog.code, prog.consts,
            np.ascontiguousarray(slots, dtype=np.float64),
            k, seed, prog.stack_need, grad, hess)
        return value, grad, hess.reshape(k, k)

    def rk4_flow(self, prog, n: int, slots, s: float, steps: int):
        """Endpoint of the RK4-integrated Hamiltonian flow of the program."""
        if self._impl is _pure:
            return _pure.rk4_flow(prog, n, slots, s, steps)
        out = np.empty(2 * n)
        self._impl.rk4_flow(
            prog.code, prog.consts,
            n, np.ascontiguousarray(slots, dtype=np.float64),
            s, steps, prog.stack_need, out)
        return out

    def rk4_flow_tangent(self, prog, n: int, slots, s: float, steps: int):
        """Endpoint plus the (2n)x(2n+1) jacobian w.r.t. (q, p, t)."""
        if self._impl is _pure:
            return _pure.rk4_flow_tangent(prog, n, slots, s, steps)
        out = np.empty(2 * n)
        M = np.empty((2 * n, 2 * n + 1))
        self._impl.rk4_flow_tangent(
            prog.code, prog.consts,
            n, np.ascontiguousarray(slots, dtype=np.float64),
            s, steps, prog.stack_need, out, M)
        return out, M


_active = Handle(_compiled if _compiled is not None else _pure)

#: Name of the active backend ("compiled" or "pure").
active = _active.name


def has_compiled() -> bool:
    return _compiled is not None


def handle(which: str = "active") -> Handle:
    """A backend handle by name; used by the parity tests and the benchmark."""
    if which in ("active", _active.name):
        return _active
    if which == "pure":
        return Handle(_pure)
    if which == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend not available")
        return Handle(_compiled)
    raise ValueError(f"unknown backend {which!r}")


# module-level shortcuts bound to the active backend
eval_value = _active.eval_value
eval_grad = _active.eval_grad
eval_hess = _active.eval_hess
rk4_flow = _active.rk4_flow
rk4_flow_tangent = _active.rk4_flow_tangent
