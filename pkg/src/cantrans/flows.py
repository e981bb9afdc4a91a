"""Flows of Hamiltonian vector fields: numerical one-parameter groups.

The flow parameter s is never the physical time; t is carried as a frozen
parameter through the integration because X_f has no time component.
Fixed-step classic RK4 keeps residuals reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from . import backend
from .errors import NotAGroupAtZero, NotClosed
from .phase import MapFamily, PhaseMap, PhasePoint, ScalarField, TangentVector
from .reports import CheckReport

GROUP_ZERO_TOL = 1e-9
CLOSEDNESS_TOL = 1e-7


def default_steps(s: float) -> int:
    return max(1000, math.ceil(1000 * abs(s)))


def integrate_flow(f: ScalarField, x0: PhasePoint, s: float,
                   steps: int | None = None) -> PhasePoint:
    """Endpoint of the integral curve of X_f from x0 after parameter s."""
    if steps is None:
        steps = default_steps(s)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if s == 0.0:
        return x0
    z = backend.rk4_flow(f.program, f.n, f.slots(x0), s, steps)
    return x0.with_z(z)


class FlowPhaseMap(PhaseMap):
    """The time-s flow of X_f, usable by every canonicity check.

    The jacobian is differentiated through the integrator: central finite
    differences by default, or exact tangent (variational) propagation
    with ``jacobian_method="tangent"``.
    """

    def __init__(self, f: ScalarField, s: float, steps: int | None = None,
                 jacobian_method: str = "fd"):
        if jacobian_method not in ("fd", "tangent"):
            raise ValueError("jacobian_method must be 'fd' or 'tangent'")
        self.f = f
        self.n = f.n
        self.s = s
        self.steps = default_steps(s) if steps is None else steps
        self.jacobian_method = jacobian_method
        self.time_independent = f.time_independent

    def __call__(self, point: PhasePoint) -> PhasePoint:
        return integrate_flow(self.f, point, self.s, self.steps)

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        if self.jacobian_method == "tangent":
            return self.tangent_jacobian(point)
        from .numdiff import fd_jacobian

        return fd_jacobian(self, point)

    def tangent_jacobian(self, point: PhasePoint) -> np.ndarray:
        """Jacobian by integrating the variational equation alongside the
        state (dual numbers through the integrator)."""
        if self.s == 0.0:
            out = np.zeros((2 * self.n, 2 * self.n + 1))
            out[:, : 2 * self.n] = np.eye(2 * self.n)
            return out
        _, M = backend.rk4_flow_tangent(self.f.program, self.n,
                                        self.f.slots(point), self.s, self.steps)
        return M


def flow_map(f: ScalarField, s: float, steps: int | None = None,
             jacobian_method: str = "fd") -> FlowPhaseMap:
    return FlowPhaseMap(f, s, steps, jacobian_method)


class FlowFamily:
    """The flow of X_f seen as a one-parameter family of maps."""

    def __init__(self, f: ScalarField, steps: int | None = None,
                 jacobian_method: str = "fd"):
        self.f = f
        self.n = f.n
        self.steps = steps
        self.jacobian_method = jacobian_method

    def at(self, s: float) -> FlowPhaseMap:
        return FlowPhaseMap(self.f, s, self.steps, self.jacobian_method)

    def value(self, point: PhasePoint, s: float) -> np.ndarray:
        return integrate_flow(self.f, point, s, self.steps).z()

    def identity_defect(self, point: PhasePoint) -> float:
        return 0.0  # the s=0 flow is the identity by construction


def check_group_law(f: ScalarField, x0: PhasePoint, s1: float, s2: float,
                    steps: int | None = None, tol: float = 1e-7) -> CheckReport:
    """Residual of Psi_s1(Psi_s2(x)) = Psi_{s1+s2}(x)."""
    two_leg = integrate_flow(f, integrate_flow(f, x0, s2, steps), s1, steps)
    one_leg = integrate_flow(f, x0, s1 + s2, steps)
    residual = float(np.max(np.abs(two_leg.z() - one_leg.z())))
    return CheckReport(name="group-law", max_residual=residual, tolerance=tol,
                       passed=residual < tol, samples=1)


def infinitesimal_generator(family, x: PhasePoint,
                            tol: float = GROUP_ZERO_TOL,
                            fd_eps: float = 1e-6) -> TangentVector:
    """d/ds at s=0 of the family.

    Expression families are differentiated exactly through a dual number
    seeded in s; numerically defined families (flows) fall back to a
    central difference in s.  The family must evaluate to the identity at
    s=0.
    """
    defect = family.identity_defect(x)
    if defect > tol:
        raise NotAGroupAtZero(defect, tol)
    n = family.n
    out = np.empty(2 * n)
    if hasattr(family, "components"):
        for i, c in enumerate(family.components):
            layout = c.program.layout
            seed = np.zeros((1, layout.nslots))
            seed[0, layout.s_slot] = 1.0
            _, g = backend.eval_grad(c.program, c.slots(x, 0.0), 1, seed)
            out[i] = g[0]
    else:
        out = (family.value(x, fd_eps) - family.value(x, -fd_eps)) / (2 * fd_eps)
    return TangentVector(tuple(out[:n]), tuple(out[n:]), 0.0)


def _generator_covector(family: MapFamily, x: PhasePoint) -> np.ndarray:
    """Components of V . Omega over z = (q, p): (-v_p, v_q) for V = (v_q, v_p)."""
    v = infinitesimal_generator(family, x)
    n = family.n
    return np.concatenate([-np.asarray(v.dp), np.asarray(v.dq)])


def _covector_asymmetry(family: MapFamily, x: PhasePoint) -> float:
    """Max |d alpha_a/dz_b - d alpha_b/dz_a| of the contracted covector,
    from exact mixed (s, z) second derivatives of the family."""
    n = family.n
    m = 2 * n + 1
    dv = np.empty((2 * n, 2 * n))  # dV_i/dz_b
    for i, c in enumerate(family.components):
        layout = c.program.layout
        seed = np.zeros((m + 1, layout.nslots))
        for a in range(m):
            seed[a, a] = 1.0  # q, p, t directions
        seed[m, layout.s_slot] = 1.0
        _, _, h = backend.eval_hess(c.program, c.slots(x, 0.0), m + 1, seed)
        dv[i, :] = h[m, : 2 * n]
    # alpha = (-v_p, v_q): dalpha rows
    dalpha = np.vstack([-dv[n:, :], dv[:n, :]])
    return float(np.max(np.abs(dalpha - dalpha.T)))


def recover_generator_function(family: MapFamily, x: PhasePoint,
                               ref: PhasePoint, tol: float = CLOSEDNESS_TOL,
                               quad_nodes: int = 40) -> float:
    """f(x) - f(ref) for the generator f of the family, by Gauss-Legendre
    integration of V . Omega along the straight segment ref -> x at fixed t.

    The result is unique up to a constant (and up to a function of t when
    the generator is time-dependent).  Raises NotClosed when the
    contracted covector fails the symmetry test at the segment's sample
    points, i.e. when no local generator exists.
    """
    if x.t != ref.t:
        raise ValueError("recovery path must stay at fixed t")
    delta = x.z() - ref.z()
    for u in (0.0, 0.5, 1.0):
        probe = ref.with_z(ref.z() + u * delta)
        asym = _covector_asymmetry(family, probe)
        if asym > tol:
            raise NotClosed(asym, tol)
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    total = 0.0
    for u, w in zip(nodes, weights):
        point = ref.with_z(ref.z() + 0.5 * (u + 1.0) * delta)
        alpha = _generator_covector(family, point)
        total += float(w) * float(alpha @ delta)
    return 0.5 * total
