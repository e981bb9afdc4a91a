"""Core domain types over a single global canonical chart on R^2n (x R).

All computations happen in canonical coordinates (q, p) with the
standard symplectic structure, used only through the fixed matrix
J = [[0, I], [-I, 0]].  Time t rides along as a preserved coordinate on
the extended space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .expr import Bindings, Expr, parse


@dataclass(frozen=True)
class Chart:
    """Canonical chart: n degrees of freedom, optionally time-extended."""

    n: int
    time_extended: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")


def standard_symplectic_matrix(n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]]; satisfies J^2 = -I and J^T J = I."""
    if n < 1:
        raise ValueError("n must be >= 1")
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


@dataclass(frozen=True)
class PhasePoint:
    """A point (q, p) of the chart, with the time coordinate riding along.

    ``t`` defaults to 0 for plain phase-space work; extended-space
    operations read it.
    """

    q: tuple
    p: tuple
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "t", float(self.t))
        if len(self.q) != len(self.p):
            raise ValueError("q and p must have equal length")
        if not all(np.isfinite(self.q)) or not all(np.isfinite(self.p)) \
                or not np.isfinite(self.t):
            raise ValueError("phase point entries must be finite")

    @property
    def n(self) -> int:
        return len(self.q)

    def z(self) -> np.ndarray:
        """Phase part as a flat vector (q, p)."""
        return np.array(self.q + self.p)

    def with_z(self, z) -> "PhasePoint":
        n = self.n
        return PhasePoint(tuple(z[:n]), tuple(z[n:]), self.t)


# alias for call sites that emphasize the time coordinate
ExtendedPoint = PhasePoint


@dataclass(frozen=True)
class TangentVector:
    """A direction (dq, dp, dt) at a point; dt is 0 for Hamiltonian fields
    and 1 for the evolution field."""

    dq: tuple
    dp: tuple
    dt: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dq", tuple(float(v) for v in self.dq))
        object.__setattr__(self, "dp", tuple(float(v) for v in self.dp))

    def z(self) -> np.ndarray:
        return np.array(self.dq + self.dp)


@dataclass(frozen=True)
class ScalarField:
    """A real function of (q, p, t): a parsed expression bound to
    parameter values on a chart.

    Evaluable over plain reals and over dual numbers through the active
    backend, so exact derivatives come from the same AST.
    """

    expr: Expr
    params: dict = field(default_factory=dict)
    chart: Chart | None = None

    def __post_init__(self):
        chart = self.chart if self.chart is not None else Chart(self.expr.n)
        object.__setattr__(self, "chart", chart)
        if chart.n != self.expr.n:
            raise ValueError("chart and expression disagree on n")
        layout = self.expr.program.layout
        template = np.zeros(layout.nslots)
        for name in layout.params:
            if name not in self.params:
                from .errors import MissingBinding

                raise MissingBinding(f"parameter {name!r} has no bound value")
            template[layout.param_slot(name)] = float(self.params[name])
        object.__setattr__(self, "_template", template)

    @classmethod
    def from_source(cls, source: str, n: int, params: dict | None = None,
                    chart: Chart | None = None) -> "ScalarField":
        params = dict(params or {})
        expr = parse(source, n, tuple(params))
        return cls(expr, params, chart)

    def with_params(self, **updates) -> "ScalarField":
        """Same expression bound to updated parameter values; the parsed
        program is shared, so parameter sweeps reuse one AST."""
        params = dict(self.params)
        params.update(updates)
        return ScalarField(self.expr, params, self.chart)

    @property
    def n(self) -> int:
        return self.expr.n

    @property
    def time_independent(self) -> bool:
        return not self.expr.uses_t

    @property
    def program(self):
        return self.expr.program

    def slots(self, point: PhasePoint, s: float | None = None) -> np.ndarray:
        layout = self.expr.program.layout
        slots = self._template.copy()
        slots[: self.n] = point.q
        slots[self.n : 2 * self.n] = point.p
        slots[layout.t_slot] = point.t
        if s is not None:
            slots[layout.s_slot] = s
        return slots

    def value(self, point: PhasePoint, s: float | None = None) -> float:
        return backend.eval_value(self.program, self.slots(point, s))

    def __call__(self, point: PhasePoint, s: float | None = None) -> float:
        return self.value(point, s)

    def bindings(self, point: PhasePoint, s: float | None = None) -> Bindings:
        return Bindings(self.n, point.q, point.p, point.t, s, dict(self.params))


class PhaseMap:
    """Time-preserving transformation (q, p, t) -> (Q, P, t).

    Concrete maps implement ``__call__`` and ``jacobian``; second
    derivatives default to central differences of the jacobian, which
    analytic maps override with exact dual-number values.
    """

    n: int
    time_independent: bool = False
    fd_step: float = 1e-5

    def __call__(self, point: PhasePoint) -> PhasePoint:
        raise NotImplementedError

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        """Rows are gradients of Q1..Qn, P1..Pn; columns ordered (q, p, t)."""
        raise NotImplementedError

    def z_block(self, point: PhasePoint) -> np.ndarray:
        """The 2n x 2n fixed-t block d(Q,P)/d(q,p)."""
        return self.jacobian(point)[:, : 2 * self.n]

    def second_derivatives(self, point: PhasePoint) -> np.ndarray:
        """Tensor D[i, a, b] = d^2(component i)/dx_a dx_b, x = (q, p, t)."""
        m = 2 * self.n + 1
        out = np.empty((2 * self.n, m, m))
        x = np.append(point.z(), point.t)
        for a in range(m):
            h = self.fd_step * max(1.0, abs(x[a]))
            out[:, :, a] = (self.jacobian(_shift(point, a, h))
                            - self.jacobian(_shift(point, a, -h))) / (2.0 * h)
        return out


def _shift(point: PhasePoint, axis: int, h: float) -> PhasePoint:
    n = point.n
    if axis < 2 * n:
        z = point.z()
        z[axis] += h
        return point.with_z(z)
    return PhasePoint(point.q, point.p, point.t + h)


class ExprPhaseMap(PhaseMap):
    """Map whose 2n components are DSL expressions of (q, p, t)."""

    def __init__(self, q_fields, p_fields, s: float | None = None):
        if len(q_fields) != len(p_fields):
            raise ValueError("need as many Q components as P components")
        self.n = len(q_fields)
        self.components = tuple(q_fields) + tuple(p_fields)
        for c in self.components:
            if c.n != self.n:
                raise ValueError("component dimension mismatch")
        self.s = s
        self.time_independent = all(c.time_independent for c in self.components)

    @classmethod
    def from_sources(cls, q_sources, p_sources, n: int, params=None,
                     s: float | None = None) -> "ExprPhaseMap":
        params = dict(params or {})
        qf = [ScalarField.from_source(src, n, params) for src in q_sources]
        pf = [ScalarField.from_source(src, n, params) for src in p_sources]
        return cls(qf, pf, s)

    @classmethod
    def identity(cls, n: int) -> "ExprPhaseMap":
        return cls.from_sources([f"q{i+1}" for i in range(n)],
                                [f"p{i+1}" for i in range(n)], n)

    def __call__(self, point: PhasePoint) -> PhasePoint:
        vals = [c.value(point, self.s) for c in self.components]
        return PhasePoint(tuple(vals[: self.n]), tuple(vals[self.n :]), point.t)

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        m = 2 * self.n + 1
        out = np.empty((2 * self.n, m))
        for i, c in enumerate(self.components):
            _, out[i] = backend.eval_grad(c.program, c.slots(point, self.s), m)
        return out

    def second_derivatives(self, point: PhasePoint) -> np.ndarray:
        m = 2 * self.n + 1
        out = np.empty((2 * self.n, m, m))
        for i, c in enumerate(self.components):
            _, _, out[i] = backend.eval_hess(c.program, c.slots(point, self.s), m)
        return out


class MapFamily:
    """One-parameter family of expression maps; components may reference s."""

    def __init__(self, q_fields, p_fields):
        if len(q_fields) != len(p_fields):
            raise ValueError("need as many Q components as P components")
        self.n = len(q_fields)
        self.components = tuple(q_fields) + tuple(p_fields)

    @classmethod
    def from_sources(cls, q_sources, p_sources, n: int, params=None) -> "MapFamily":
        params = dict(params or {})
        qf = [ScalarField.from_source(src, n, params) for src in q_sources]
        pf = [ScalarField.from_source(src, n, params) for src in p_sources]
        return cls(qf, pf)

    def at(self, s: float) -> ExprPhaseMap:
        return ExprPhaseMap(self.components[: self.n],
                            self.components[self.n :], s=s)

    def value(self, point: PhasePoint, s: float) -> np.ndarray:
        return np.array([c.value(point, s) for c in self.components])

    def identity_defect(self, point: PhasePoint) -> float:
        """Max deviation of the s=0 member from the identity at the point."""
        image = self.value(point, 0.0)
        return float(np.max(np.abs(image - np.append(point.q, point.p))))
