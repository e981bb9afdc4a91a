"""Poisson bracket, Hamiltonian/evolution fields, constancy residual."""

import numpy as np
import pytest

from cantrans import (PhasePoint, ScalarField, constancy_residual,
                      evolution_vector_field, gradient,
                      hamiltonian_vector_field, poisson_bracket)
from cantrans.brackets import apply_covector
from conftest import random_points


class TestPoissonBracket:
    def test_canonical_pair(self, rng):
        q = ScalarField.from_source("q1", 1)
        p = ScalarField.from_source("p1", 1)
        for x in random_points(rng, 1, 10):
            assert poisson_bracket(q, p, x) == 1.0

    def test_angular_momentum_conserved(self, rng, oscillator_2d,
                                        angular_momentum):
        worst = max(abs(poisson_bracket(angular_momentum, oscillator_2d, x))
                    for x in random_points(rng, 2, 30))
        assert worst < 1e-14

    def test_hand_evaluated_bracket(self):
        # {q p, p^2} = 2 p^2 = 18 at p = 3
        f = ScalarField.from_source("q1*p1", 1)
        g = ScalarField.from_source("p1^2", 1)
        assert poisson_bracket(f, g, PhasePoint((2.0,), (3.0,))) == 18.0


class TestHamiltonianVectorField:
    def test_scaling_generator_field(self, scaling_generator, rng):
        # X_f = (q - 2tp/m) d/dq - p d/dp
        for x in random_points(rng, 1, 10):
            v = hamiltonian_vector_field(scaling_generator, x)
            q, p, t = x.q[0], x.p[0], x.t
            assert v.dq[0] == pytest.approx(q - 2 * t * p, rel=1e-15)
            assert v.dp[0] == -p
            assert v.dt == 0.0

    def test_translation_generator(self):
        f = ScalarField.from_source("p1", 1)
        v = hamiltonian_vector_field(f, PhasePoint((0.0,), (0.0,)))
        assert (v.dq, v.dp) == ((1.0,), (0.0,))

    def test_rotation_generator(self, angular_momentum):
        # (-y, x, -p_y, p_x) at (x, y, p_x, p_y)
        x = PhasePoint((0.4, -1.2), (0.9, 0.3))
        v = hamiltonian_vector_field(angular_momentum, x)
        assert v.dq == (1.2, 0.4)
        assert v.dp == (-0.3, 0.9)


class TestEvolutionField:
    def test_free_particle(self):
        H = ScalarField.from_source("p1^2/2", 1)
        v = evolution_vector_field(H, PhasePoint((0.0,), (2.0,), 0.0))
        assert (v.dq, v.dp, v.dt) == ((2.0,), (-0.0,), 1.0)

    def test_driven_particle(self):
        H = ScalarField.from_source("p1^2/(2*m) - k*t*q1", 1,
                                    {"m": 1.0, "k": 1.0})
        v = evolution_vector_field(H, PhasePoint((1.0,), (1.0,), 2.0))
        assert v.dq == (1.0,)
        assert v.dp == (2.0,)  # -dH/dq = k t
        assert v.dt == 1.0

    def test_time_independent_h_gives_autonomous_field(self, rng,
                                                       free_particle):
        points = random_points(rng, 1, 5)
        for x in points:
            shifted = PhasePoint(x.q, x.p, x.t + 0.7)
            v0 = evolution_vector_field(free_particle, x)
            v1 = evolution_vector_field(free_particle, shifted)
            assert v0 == v1
            assert v0.dt == 1.0


class TestConstancyResidual:
    def test_time_independent_h_conserves_itself(self, rng, oscillator_2d):
        for x in random_points(rng, 2, 10):
            assert abs(constancy_residual(oscillator_2d, oscillator_2d, x)) < 1e-15

    def test_driven_particle_constant(self, rng):
        H = ScalarField.from_source("p1^2/(2*m) - k*t*q1", 1,
                                    {"m": 1.0, "k": 1.0})
        g = ScalarField.from_source("q1 - t*p1/m + k*t^3/(3*m)", 1,
                                    {"m": 1.0, "k": 1.0})
        worst = max(abs(constancy_residual(g, H, x))
                    for x in random_points(rng, 1, 30))
        assert worst < 1e-14

    def test_coordinate_is_not_conserved(self):
        f = ScalarField.from_source("q1", 1)
        H = ScalarField.from_source("p1^2/2", 1)
        assert constancy_residual(f, H, PhasePoint((0.0,), (3.0,))) == 3.0


class TestBracketProperties:
    """Algebraic properties over seeded random points."""

    FIELDS = [
        ("sin(q1)*p1 + t*q1", {}),
        ("q1^2*p1 - cos(p1)", {}),
        ("exp(q1/3) + q1*p1^2 + t^2*p1", {}),
    ]

    def _fields(self):
        return [ScalarField.from_source(src, 1, prm) for src, prm in self.FIELDS]

    def test_antisymmetry_exact(self, rng):
        f, g, _ = self._fields()
        for x in random_points(rng, 1, 100):
            assert poisson_bracket(f, g, x) + poisson_bracket(g, f, x) == 0.0

    def test_leibniz(self, rng):
        f = ScalarField.from_source("sin(q1)*p1 + t*q1", 1)
        g = ScalarField.from_source("q1^2*p1 - cos(p1)", 1)
        h = ScalarField.from_source("exp(q1/3) + q1*p1^2 + t^2*p1", 1)
        gh = ScalarField.from_source(
            "(q1^2*p1 - cos(p1)) * (exp(q1/3) + q1*p1^2 + t^2*p1)", 1)
        for x in random_points(rng, 1, 100):
            lhs = poisson_bracket(f, gh, x)
            rhs = (poisson_bracket(f, g, x) * h.value(x)
                   + g.value(x) * poisson_bracket(f, h, x))
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)

    def test_jacobi(self, rng):
        f, g, h = self._fields()

        def nested(a, b, c, x):
            """{a, {b, c}}(x) via second derivatives of b and c."""
            n = a.n
            ga = gradient(a, x)
            gb, gc = gradient(b, x), gradient(c, x)
            hb = np.asarray(_hess(b, x))
            hc = np.asarray(_hess(c, x))
            # grad of {b, c} over (q, p): products of first and second derivs
            z = slice(0, 2 * n)
            grad_bc = (hb[:n, z].T @ gc[n:2 * n] + hc[n:2 * n, z].T @ gb[:n]
                       - hb[n:2 * n, z].T @ gc[:n] - hc[:n, z].T @ gb[n:2 * n])
            return float(ga[:n] @ grad_bc[n:2 * n] - ga[n:2 * n] @ grad_bc[:n])

        from cantrans import hessian as _hess

        for x in random_points(rng, 1, 100):
            total = (nested(f, g, h, x) + nested(g, h, f, x)
                     + nested(h, f, g, x))
            assert abs(total) < 1e-8

    def test_bracket_field_coherence(self, rng):
        f, g, _ = self._fields()
        for x in random_points(rng, 1, 100):
            pb = poisson_bracket(f, g, x)
            df = gradient(f, x)
            xg = hamiltonian_vector_field(g, x)
            assert abs(pb - apply_covector(df, xg)) < 1e-12
