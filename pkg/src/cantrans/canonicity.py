"""Canonicity checks: bracket conditions, symplectic jacobian condition,
the time-dependent two-form condition, and recovery of the new Hamiltonian.

A time-preserving map Phi is canonical when its fixed-t jacobian block M
satisfies M^T J M = J and the mixed covector

    w_j = sum_i (dQ^i/dz_j dP_i/dt - dQ^i/dt dP_i/dz_j),   z = (q, p),

is closed in z.  Closedness is exactly the statement that the pullback
defect of the symplectic form is dJ ^ dt for some local function J; the
new Hamiltonian is then K = H - J.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotCanonical
from .numdiff import gradient
from .phase import PhaseMap, PhasePoint, ScalarField, standard_symplectic_matrix

DEFAULT_TOL = 1e-9
CLOSEDNESS_TOL = 1e-7


@dataclass
class CanonicityReport:
    """Residuals of one canonicity test at one point."""

    bracket_qp: float | None = None   # max |{Q^i, P_j} - delta^i_j|
    bracket_qq: float | None = None   # max |{Q^i, Q^j}|
    bracket_pp: float | None = None   # max |{P_i, P_j}|
    symplectic: float | None = None   # max |M^T J M - J|
    asymmetry: float | None = None    # max |dw_j/dz_k - dw_k/dz_j|
    tolerance: float = DEFAULT_TOL
    notes: list = field(default_factory=list)

    @property
    def residuals(self):
        return [r for r in (self.bracket_qp, self.bracket_qq, self.bracket_pp,
                            self.symplectic, self.asymmetry) if r is not None]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return all(r < self.tolerance for r in self.residuals)


def bracket_canonicity(phi: PhaseMap, x: PhasePoint,
                       tol: float = DEFAULT_TOL) -> CanonicityReport:
    """All pairwise brackets of the new coordinates at x.

    Canonical iff {Q^i, P_j} = delta^i_j and {Q^i, Q^j} = {P_i, P_j} = 0.
    """
    n = phi.n
    M = phi.z_block(x)
    J = standard_symplectic_matrix(n)
    B = M @ J @ M.T  # B[i, j] = {component_i, component_j}
    qp = B[:n, n:]
    return CanonicityReport(
        bracket_qp=float(np.max(np.abs(qp - np.eye(n)))),
        bracket_qq=float(np.max(np.abs(B[:n, :n]))),
        bracket_pp=float(np.max(np.abs(B[n:, n:]))),
        tolerance=tol,
    )


def symplectic_defect(phi: PhaseMap, x: PhasePoint) -> float:
    """Max-entry norm of M^T J M - J for the fixed-t block M."""
    n = phi.n
    M = phi.z_block(x)
    J = standard_symplectic_matrix(n)
    return float(np.max(np.abs(M.T @ J @ M - J)))


def mixed_covector(phi: PhaseMap, x: PhasePoint) -> np.ndarray:
    """The dz_j ^ dt coefficients w_j of the pullback defect of Omega."""
    n = phi.n
    Jac = phi.jacobian(x)
    t = 2 * n
    Q, P = Jac[:n], Jac[n:]
    return Q[:, :t].T @ P[:, t] - P[:, :t].T @ Q[:, t]


def mixed_covector_asymmetry(phi: PhaseMap, x: PhasePoint) -> float:
    """Max |dw_j/dz_k - dw_k/dz_j|; zero iff the defect is d(local J) ^ dt."""
    n = phi.n
    t = 2 * n
    Jac = phi.jacobian(x)
    D2 = phi.second_derivatives(x)
    dw = np.zeros((t, t))
    for i in range(n):
        dQ, dP = Jac[i], Jac[n + i]
        hQ, hP = D2[i], D2[n + i]
        # d/dz_k of (Q_i,zj P_i,t - Q_i,t P_i,zj)
        dw += (hQ[:t, :t] * dP[t]
               + np.outer(dQ[:t], hP[t, :t])
               - np.outer(dP[:t], hQ[t, :t])
               - dQ[t] * hP[:t, :t])
    return float(np.max(np.abs(dw - dw.T)))


def time_dependent_canonicity(phi: PhaseMap, x: PhasePoint,
                              tol: float = CLOSEDNESS_TOL) -> CanonicityReport:
    """Two tests: the fixed-t symplectic defect must vanish and the mixed
    covector must be closed in z.  Together these say the pullback defect
    equals dJ ^ dt for some local J."""
    report = CanonicityReport(
        symplectic=symplectic_defect(phi, x),
        asymmetry=mixed_covector_asymmetry(phi, x),
        tolerance=tol,
    )
    if phi.time_independent:
        report.notes.append("time-independent map: mixed covector vanishes identically")
    return report


@dataclass
class RecoveredHamiltonian:
    """K at a point, defined up to an additive function of (t, s); compare
    through the phase-space gradient, never raw values."""

    value: float
    grad_z: np.ndarray
    j_value: float
    notes: list = field(default_factory=list)


def recover_new_hamiltonian(phi: PhaseMap, H: ScalarField, x: PhasePoint,
                            ref: PhasePoint, tol: float = CLOSEDNESS_TOL,
                            quad_nodes: int = 40) -> RecoveredHamiltonian:
    """K(x) = H(x) - J(x) with J line-integrated from ref along a straight
    segment at fixed t (J(ref) = 0 by convention).

    Requires time-dependent canonicity at sampled points of the segment.
    """
    if x.t != ref.t:
        raise ValueError("recovery path must stay at fixed t")
    delta = x.z() - ref.z()
    for u in (0.0, 0.5, 1.0):
        probe = ref.with_z(ref.z() + u * delta)
        rep = time_dependent_canonicity(phi, probe, tol)
        if not rep.passed:
            raise NotCanonical(
                f"map is not canonical near the recovery path "
                f"(defect {rep.symplectic:.3e}, asymmetry {rep.asymmetry:.3e})"
            )
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    total = 0.0
    for u, wgt in zip(nodes, weights):
        point = ref.with_z(ref.z() + 0.5 * (u + 1.0) * delta)
        total += float(wgt) * float(mixed_covector(phi, point) @ delta)
    j_value = 0.5 * total
    n = phi.n
    grad_z = gradient(H, x)[: 2 * n] - mixed_covector(phi, x)
    notes = ["K is unique up to an additive function of t (and s)"]
    return RecoveredHamiltonian(value=H.value(x) - j_value, grad_z=grad_z,
                                j_value=j_value, notes=notes)
