"""Invariance of Hamiltonians and the Noether correspondence.

The symmetry defect of a generator f against H is the phase-space
gradient of the constancy residual {f,H} + df/dt: the Lie derivative of
the full system form along X_f equals minus the differential of that
residual wedged with dt, so the defect vanishes exactly when X_f is an
infinitesimal symmetry.  An independent finite-difference pullback of the
form along the eps-flow of X_f serves as the oracle.
"""

from __future__ import annotations

import numpy as np

from .brackets import constancy_residual
from .canonicity import mixed_covector, time_dependent_canonicity
from .errors import NotCanonical
from .expr import Bin, Expr, Num, Var
from .flows import flow_map
from .genfun import infinitesimal_map
from .numdiff import gradient, hessian
from .phase import (PhaseMap, PhasePoint, ScalarField,
                    standard_symplectic_matrix)
from .reports import CheckReport


def invariance_defect(phi: PhaseMap, H: ScalarField, x: PhasePoint,
                      canonicity_tol: float = 1e-7,
                      check_canonicity: bool = True) -> float:
    """How far phi is from leaving H invariant.

    Time-independent maps: |H(phi(x)) - H(x)|.  Time-dependent maps: the
    max-norm gap between the phase-space gradients of the recovered new
    Hamiltonian K = H - J and of H composed with the map (K carries an
    additive function of t, so raw values are never compared).
    """
    if check_canonicity:
        rep = time_dependent_canonicity(phi, x, canonicity_tol)
        if not rep.passed:
            raise NotCanonical(
                f"map is not canonical at the sample point "
                f"(defect {rep.symplectic:.3e}, asymmetry {rep.asymmetry:.3e})"
            )
    image = phi(x)
    if phi.time_independent:
        return abs(H.value(image) - H.value(x))
    n = phi.n
    grad_k = gradient(H, x)[: 2 * n] - mixed_covector(phi, x)
    jac_z = phi.z_block(x)
    grad_pullback = jac_z.T @ gradient(H, image)[: 2 * n]
    return float(np.max(np.abs(grad_pullback - grad_k)))


def symmetry_defect(f: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """Max-norm of the phase-space gradient of {f,H} + df/dt at x."""
    n = f.n
    z = slice(0, 2 * n)
    gf, gH = gradient(f, x), gradient(H, x)
    hf, hH = hessian(f, x), hessian(H, x)
    grad_r = (hf[:n, z].T @ gH[n : 2 * n] + hH[n : 2 * n, z].T @ gf[:n]
              - hf[n : 2 * n, z].T @ gH[:n] - hH[:n, z].T @ gf[n : 2 * n]
              + hf[2 * n, z])
    return float(np.max(np.abs(grad_r)))


def _form_matrix(H: ScalarField, x: PhasePoint) -> np.ndarray:
    """Coefficient matrix of Omega + dH ^ dt in the (q, p, t) basis."""
    n = H.n
    m = 2 * n + 1
    B = np.zeros((m, m))
    B[: 2 * n, : 2 * n] = standard_symplectic_matrix(n)
    gz = gradient(H, x)[: 2 * n]
    B[: 2 * n, 2 * n] = gz
    B[2 * n, : 2 * n] = -gz
    return B


def _pullback_form(f: ScalarField, H: ScalarField, x: PhasePoint,
                   s: float, steps: int) -> np.ndarray:
    phi = flow_map(f, s, steps, jacobian_method="tangent")
    image = phi(x)
    n = f.n
    m = 2 * n + 1
    D = np.zeros((m, m))
    D[: 2 * n, :] = phi.jacobian(x)
    D[2 * n, 2 * n] = 1.0  # t -> t
    return D.T @ _form_matrix(H, image) @ D


def symmetry_defect_pullback(f: ScalarField, H: ScalarField, x: PhasePoint,
                             eps: float = 1e-4, steps: int = 64) -> float:
    """Oracle: finite-difference Lie derivative of Omega + dH ^ dt along
    the eps-flow of X_f, central differenced in eps."""
    plus = _pullback_form(f, H, x, eps, steps)
    minus = _pullback_form(f, H, x, -eps, steps)
    lie = (plus - minus) / (2.0 * eps)
    return float(np.max(np.abs(lie)))


def shifted_by_ct(f: ScalarField, c: float) -> ScalarField:
    """The field f - c*t (same parameters and chart)."""
    root = Bin("-", f.expr.root, Bin("*", Num(float(c)), Var("t", 0)))
    return ScalarField(Expr(root, f.expr.n, f.expr.params), dict(f.params),
                       f.chart)


def noether_forward(f: ScalarField, H: ScalarField, sample, tol: float,
                    defect_factor: float = 10.0) -> CheckReport:
    """Constant of motion -> infinitesimal symmetry, over a sample.

    When the hypothesis holds (max constancy residual < tol) the report
    passes iff the max symmetry defect stays below defect_factor * tol.
    When the hypothesis fails the implication is vacuous: the report
    passes with a "not applicable" note and carries both residuals.
    """
    sample = list(sample)
    max_constancy = max(abs(constancy_residual(f, H, x)) for x in sample)
    max_defect = max(symmetry_defect(f, H, x) for x in sample)
    notes = [f"max constancy residual = {max_constancy:.3e}",
             f"max symmetry defect = {max_defect:.3e}"]
    if max_constancy < tol:
        passed = max_defect < defect_factor * tol
    else:
        passed = True
        notes.append("not applicable: f is not a constant of motion on the sample")
    return CheckReport(name="noether-forward", max_residual=max_defect,
                       tolerance=defect_factor * tol, passed=passed,
                       samples=len(sample), notes=notes)


def noether_reverse(f: ScalarField, H: ScalarField, sample,
                    tol: float) -> CheckReport:
    """Infinitesimal symmetry -> constant of motion after a c*t shift.

    Estimates c as the sample mean of {f,H} + df/dt, requires the sample
    deviation below tol, and verifies that f - c*t has constancy residual
    below tol pointwise.
    """
    sample = list(sample)
    defects = [symmetry_defect(f, H, x) for x in sample]
    residuals = np.array([constancy_residual(f, H, x) for x in sample])
    c_hat = float(np.mean(residuals))
    spread = float(np.std(residuals))
    shifted = shifted_by_ct(f, c_hat)
    shifted_resid = max(abs(constancy_residual(shifted, H, x)) for x in sample)
    notes = [f"c_hat = {c_hat!r}",
             f"sample std of residual = {spread:.3e}",
             f"max symmetry defect = {max(defects):.3e}",
             f"max shifted constancy residual = {shifted_resid:.3e}"]
    passed = max(defects) < tol and spread < tol and shifted_resid < tol
    return CheckReport(name="noether-reverse", max_residual=shifted_resid,
                       tolerance=tol, passed=passed, samples=len(sample),
                       notes=notes)


def equivalence_chain(f: ScalarField, H: ScalarField, sample, s_values,
                      tol: float = 1e-6, eps: float = 1e-2,
                      flow_steps: int | None = None) -> dict:
    """The four equivalent predicates for one generator, each as a bool.

    1. f is a constant of motion; 2. X_f is an infinitesimal symmetry;
    3. the flow of X_f leaves H invariant for the sampled s; 4. the
    explicit infinitesimal map is invariant to second order in eps.
    """
    sample = list(sample)
    constancy = max(abs(constancy_residual(f, H, x)) for x in sample)
    defect = max(symmetry_defect(f, H, x) for x in sample)

    group = 0.0
    for s in s_values:
        phi = flow_map(f, s, flow_steps, jacobian_method="tangent")
        for x in sample:
            group = max(group, invariance_defect(phi, H, x,
                                                 check_canonicity=False))

    def inf_residual(e):
        phi = infinitesimal_map(f, e)
        worst = 0.0
        for x in sample:
            drift = H.value(phi(x)) - H.value(x) - e * gradient(f, x)[2 * f.n]
            worst = max(worst, abs(drift))
        return worst

    r1, r2 = inf_residual(eps), inf_residual(eps / 2.0)
    # quadratic decay: halving eps must cut the residual by clearly more
    # than the linear factor 2 (or the residual is already negligible)
    infinitesimal_ok = bool(r1 < 1e-12 or r2 <= r1 / 3.0)

    return {
        "constant_of_motion": bool(constancy < tol),
        "infinitesimal_symmetry": bool(defect < tol),
        "group_invariance": bool(group < tol),
        "infinitesimal_invariance": infinitesimal_ok,
        "residuals": {
            "constancy": constancy,
            "symmetry_defect": defect,
            "group_invariance": group,
            "infinitesimal_pair": (r1, r2),
        },
    }
