"""Generating functions of types 1 and 2, and infinitesimal canonical
transformations.

Generating functions are written in the DSL as functions of (q, y, t)
where the ``p`` variables stand for the second argument family: the new
momenta P for type 2, the new coordinates Q for type 1.  The induced
transformation comes from an implicit Newton solve; its jacobian is exact
via the implicit function theorem on dual-number second derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, SingularJacobian
from .numdiff import gradient, hessian
from .phase import PhaseMap, PhasePoint, ScalarField

COND_LIMIT = 1e12


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 50
    max_halvings: int = 30


def _newton(residual, jac, y0, opts: NewtonOptions):
    """Damped Newton iteration; halves the step while the residual grows."""
    y = np.array(y0, dtype=float)
    r = residual(y)
    rnorm = float(np.max(np.abs(r)))
    for it in range(opts.max_iter):
        if rnorm < opts.tol:
            return y
        A = jac(y)
        if not np.all(np.isfinite(A)) or np.linalg.cond(A) > COND_LIMIT:
            raise SingularJacobian(
                "second-derivative block is singular near the solution"
            )
        step = np.linalg.solve(A, r)
        lam = 1.0
        for _ in range(opts.max_halvings):
            y_try = y - lam * step
            r_try = residual(y_try)
            rnorm_try = float(np.max(np.abs(r_try)))
            if rnorm_try <= rnorm or not np.isfinite(rnorm_try):
                break
            lam *= 0.5
        y, r, rnorm = y_try, r_try, rnorm_try
    if rnorm < opts.tol:
        return y
    raise NoConvergence(rnorm, opts.max_iter)


def _check_nondegenerate(A):
    if not np.all(np.isfinite(A)) or np.linalg.cond(A) > COND_LIMIT:
        raise SingularJacobian(
            "second-derivative block is singular near the solution"
        )


class Type2GeneratingMap(PhaseMap):
    """Map induced by F2(q, P, t): solve p = dF2/dq for P, then
    Q = dF2/dP.  The built-in initial guess is P = p (identity-proximal
    use is the normal case)."""

    def __init__(self, f2: ScalarField, newton: NewtonOptions | None = None):
        self.f2 = f2
        self.n = f2.n
        self.newton = newton or NewtonOptions()
        self.time_independent = f2.time_independent

    def _solve(self, point: PhasePoint) -> np.ndarray:
        n = self.n
        p = np.asarray(point.p)

        def residual(P):
            y = PhasePoint(point.q, tuple(P), point.t)
            return gradient(self.f2, y)[:n] - p

        def jac(P):
            y = PhasePoint(point.q, tuple(P), point.t)
            return hessian(self.f2, y)[:n, n : 2 * n]

        P = _newton(residual, jac, p, self.newton)
        _check_nondegenerate(jac(P))
        return P

    def __call__(self, point: PhasePoint) -> PhasePoint:
        n = self.n
        P = self._solve(point)
        y = PhasePoint(point.q, tuple(P), point.t)
        Q = gradient(self.f2, y)[n : 2 * n]
        return PhasePoint(tuple(Q), tuple(P), point.t)

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        n = self.n
        P = self._solve(point)
        y = PhasePoint(point.q, tuple(P), point.t)
        h = hessian(self.f2, y)
        f_qq = h[:n, :n]
        f_qP = h[:n, n : 2 * n]
        f_qt = h[:n, 2 * n]
        f_PP = h[n : 2 * n, n : 2 * n]
        f_Pq = h[n : 2 * n, :n]
        f_Pt = h[n : 2 * n, 2 * n]
        _check_nondegenerate(f_qP)
        # p = F2_q(q, P, t)  =>  dP = f_qP^{-1} (dp - f_qq dq - f_qt dt)
        inv = np.linalg.inv(f_qP)
        dP = np.hstack([-inv @ f_qq, inv, (-inv @ f_qt)[:, None]])
        # Q = F2_P(q, P, t)  =>  dQ = f_Pq dq + f_PP dP + f_Pt dt
        dQ = np.hstack([f_Pq, np.zeros((n, n)), f_Pt[:, None]]) + f_PP @ dP
        return np.vstack([dQ, dP])


class Type1GeneratingMap(PhaseMap):
    """Map induced by F1(q, Q, t): solve p = dF1/dq for Q, then
    P = -dF1/dQ.  A user-supplied initial guess is required; the identity
    is not representable in type 1, so no canonical default exists."""

    def __init__(self, f1: ScalarField, guess, newton: NewtonOptions | None = None):
        self.f1 = f1
        self.n = f1.n
        self.guess = np.array(guess, dtype=float)
        if self.guess.shape != (self.n,):
            raise ValueError("guess must supply one value per new coordinate")
        self.newton = newton or NewtonOptions()
        self.time_independent = f1.time_independent

    def _solve(self, point: PhasePoint) -> np.ndarray:
        n = self.n
        p = np.asarray(point.p)

        def residual(Q):
            y = PhasePoint(point.q, tuple(Q), point.t)
            return gradient(self.f1, y)[:n] - p

        def jac(Q):
            y = PhasePoint(point.q, tuple(Q), point.t)
            return hessian(self.f1, y)[:n, n : 2 * n]

        Q = _newton(residual, jac, self.guess, self.newton)
        _check_nondegenerate(jac(Q))
        return Q

    def __call__(self, point: PhasePoint) -> PhasePoint:
        n = self.n
        Q = self._solve(point)
        y = PhasePoint(point.q, tuple(Q), point.t)
        P = -gradient(self.f1, y)[n : 2 * n]
        return PhasePoint(tuple(Q), tuple(P), point.t)

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        n = self.n
        Q = self._solve(point)
        y = PhasePoint(point.q, tuple(Q), point.t)
        h = hessian(self.f1, y)
        f_qq = h[:n, :n]
        f_qQ = h[:n, n : 2 * n]
        f_qt = h[:n, 2 * n]
        f_QQ = h[n : 2 * n, n : 2 * n]
        f_Qq = h[n : 2 * n, :n]
        f_Qt = h[n : 2 * n, 2 * n]
        _check_nondegenerate(f_qQ)
        inv = np.linalg.inv(f_qQ)
        dQ = np.hstack([-inv @ f_qq, inv, (-inv @ f_qt)[:, None]])
        dP = -(np.hstack([f_Qq, np.zeros((n, n)), f_Qt[:, None]]) + f_QQ @ dQ)
        return np.vstack([dQ, dP])


class InfinitesimalMap(PhaseMap):
    """Explicit first-order map Q = q + eps dG/dp, P = p - eps dG/dq."""

    def __init__(self, G: ScalarField, eps: float):
        self.G = G
        self.n = G.n
        self.eps = float(eps)
        self.time_independent = G.time_independent

    def __call__(self, point: PhasePoint) -> PhasePoint:
        n = self.n
        g = gradient(self.G, point)
        Q = np.asarray(point.q) + self.eps * g[n : 2 * n]
        P = np.asarray(point.p) - self.eps * g[:n]
        return PhasePoint(tuple(Q), tuple(P), point.t)

    def jacobian(self, point: PhasePoint) -> np.ndarray:
        n = self.n
        h = hessian(self.G, point)
        out = np.zeros((2 * n, 2 * n + 1))
        out[:n, :n] = np.eye(n)
        out[n:, n : 2 * n] = np.eye(n)
        out[:n, :] += self.eps * h[n : 2 * n, :]
        out[n:, :] -= self.eps * h[:n, :]
        return out


def map_from_f2(f2: ScalarField, x: PhasePoint,
                newton: NewtonOptions | None = None) -> PhasePoint:
    """Transformed point (Q, P) under the type-2 generating function."""
    return Type2GeneratingMap(f2, newton)(x)


def map_from_f1(f1: ScalarField, x: PhasePoint, guess,
                newton: NewtonOptions | None = None) -> PhasePoint:
    """Transformed point (Q, P) under the type-1 generating function."""
    return Type1GeneratingMap(f1, guess, newton)(x)


def infinitesimal_map(G: ScalarField, eps: float) -> InfinitesimalMap:
    return InfinitesimalMap(G, eps)
