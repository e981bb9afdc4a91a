"""Poisson brackets, Hamiltonian and evolution vector fields, constancy.

Everything is computed from dual-number gradients in the canonical chart,
where the bracket is {f,g} = df/dq . dg/dp - df/dp . dg/dq.
"""

from __future__ import annotations

import numpy as np

from .numdiff import gradient
from .phase import PhasePoint, ScalarField, TangentVector


def poisson_bracket(f: ScalarField, g: ScalarField, x: PhasePoint) -> float:
    n = f.n
    gf = gradient(f, x)
    gg = gradient(g, x)
    return float(gf[:n] @ gg[n : 2 * n] - gf[n : 2 * n] @ gg[:n])


def hamiltonian_vector_field(f: ScalarField, x: PhasePoint) -> TangentVector:
    """X_f with components (df/dp, -df/dq) and no time part."""
    n = f.n
    g = gradient(f, x)
    return TangentVector(tuple(g[n : 2 * n]), tuple(-g[:n]), 0.0)


def evolution_vector_field(H: ScalarField, x: PhasePoint) -> TangentVector:
    """X_H plus the unit time direction; generates physical time evolution."""
    n = H.n
    g = gradient(H, x)
    return TangentVector(tuple(g[n : 2 * n]), tuple(-g[:n]), 1.0)


def constancy_residual(f: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """{f,H} + df/dt; zero along a sample marks f as a constant of motion."""
    n = f.n
    gf = gradient(f, x)
    gH = gradient(H, x)
    bracket = float(gf[:n] @ gH[n : 2 * n] - gf[n : 2 * n] @ gH[:n])
    return bracket + float(gf[2 * n])


def apply_covector(df: np.ndarray, v: TangentVector) -> float:
    """Pairing df(v) over (q, p, t) components."""
    n = len(v.dq)
    return float(df[:n] @ np.asarray(v.dq) + df[n : 2 * n] @ np.asarray(v.dp)
                 + df[2 * n] * v.dt)
