"""Compiled extension versus pure-Python fallback.

Values, first derivatives and flow trajectories must agree bitwise (the
extension is compiled without FMA contraction); second derivatives are
assembled in a different association order and agree to rounding.
"""

import numpy as np
import pytest

from cantrans import PhasePoint, ScalarField, backend
from cantrans.errors import DomainError, NonFinite
from conftest import random_points

pure = backend.handle("pure")

needs_compiled = pytest.mark.skipif(not backend.has_compiled(),
                                    reason="compiled core not built")

MESSY = ("sin(q1)*exp(p1/3) + sqrt(q1^2 + 1) + ln(p1^2 + 2)/(q1 + 5)"
         " + abs(p1) - t*p1^2/m + q1^3 + 2^q1 + (q1 + 3)^p1 + tan(t/4)")


@pytest.fixture(scope="module")
def field():
    return ScalarField.from_source(MESSY, 1, {"m": 1.0})


@needs_compiled
class TestParity:
    def test_values_bitwise(self, rng, field):
        comp = backend.handle("compiled")
        for x in random_points(rng, 1, 50):
            slots = field.slots(x)
            assert pure.eval_value(field.program, slots) == \
                comp.eval_value(field.program, slots)

    def test_gradients_bitwise(self, rng, field):
        comp = backend.handle("compiled")
        for x in random_points(rng, 1, 50):
            slots = field.slots(x)
            pv, pg = pure.eval_grad(field.program, slots, 3)
            cv, cg = comp.eval_grad(field.program, slots, 3)
            assert pv == cv
            assert np.array_equal(pg, cg)

    def test_hessians_to_rounding(self, rng, field):
        comp = backend.handle("compiled")
        for x in random_points(rng, 1, 20):
            slots = field.slots(x)
            _, _, ph = pure.eval_hess(field.program, slots, 3)
            _, _, ch = comp.eval_hess(field.program, slots, 3)
            scale = max(1.0, np.max(np.abs(ph)))
            assert np.max(np.abs(ph - ch)) < 1e-13 * scale

    def test_flow_bitwise(self, rng, scaling_generator):
        comp = backend.handle("compiled")
        prog = scaling_generator.program
        for x in random_points(rng, 1, 10):
            slots = scaling_generator.slots(x)
            pz = pure.rk4_flow(prog, 1, slots, 0.8, 100)
            cz = comp.rk4_flow(prog, 1, slots, 0.8, 100)
            assert np.array_equal(pz, cz)

    def test_flow_tangent_to_rounding(self, rng, scaling_generator):
        comp = backend.handle("compiled")
        prog = scaling_generator.program
        for x in random_points(rng, 1, 5):
            slots = scaling_generator.slots(x)
            _, pm = pure.rk4_flow_tangent(prog, 1, slots, 0.6, 100)
            _, cm = comp.rk4_flow_tangent(prog, 1, slots, 0.6, 100)
            assert np.max(np.abs(pm - cm)) < 1e-12

    def test_seeded_directions(self, field):
        comp = backend.handle("compiled")
        x = PhasePoint((0.7,), (-0.4,), 1.1)
        slots = field.slots(x)
        seed = np.zeros((2, field.program.nslots))
        seed[0, 0] = 1.0
        seed[0, 1] = 2.0   # mixed direction
        seed[1, 2] = -1.0  # time direction
        pv, pg = pure.eval_grad(field.program, slots, 2, seed)
        cv, cg = comp.eval_grad(field.program, slots, 2, seed)
        assert pv == cv and np.array_equal(pg, cg)

    @pytest.mark.parametrize("source,q", [
        ("ln(q1)", -0.5),
        ("sqrt(q1)", -0.5),
        ("1/(q1 + 0.5)", -0.5),
        ("q1^-2", 0.0),
        ("(q1)^0.5", -0.5),
    ])
    def test_error_parity(self, source, q):
        comp = backend.handle("compiled")
        f = ScalarField.from_source(source, 1)
        slots = f.slots(PhasePoint((q,), (0.0,)))
        for impl in (pure, comp):
            with pytest.raises(DomainError):
                impl.eval_value(f.program, slots)
            with pytest.raises(DomainError):
                impl.eval_grad(f.program, slots, 2)

    def test_nonfinite_parity(self, scaling_generator):
        comp = backend.handle("compiled")
        f = ScalarField.from_source("q1^2*p1^2", 1)
        slots = f.slots(PhasePoint((3.0,), (3.0,)))
        for impl in (pure, comp):
            with pytest.raises(NonFinite):
                impl.rk4_flow(f.program, 1, slots, 5.0, 50)


class TestSelection:
    def test_active_backend_is_named(self):
        assert backend.active in ("compiled", "pure")

    def test_pure_handle_always_available(self):
        assert backend.handle("pure").name == "pure"

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            backend.handle("fortran")


class TestPureDetails:
    def test_sqrt_derivative_at_zero_is_domain_error(self):
        f = ScalarField.from_source("sqrt(q1)", 1)
        x = PhasePoint((0.0,), (0.0,))
        assert pure.eval_value(f.program, f.slots(x)) == 0.0
        with pytest.raises(DomainError):
            pure.eval_grad(f.program, f.slots(x), 1)

    def test_integer_power_of_negative_base(self):
        f = ScalarField.from_source("q1^3", 1)
        x = PhasePoint((-2.0,), (0.0,))
        v, g = pure.eval_grad(f.program, f.slots(x), 1)
        assert v == -8.0
        assert g[0] == 12.0

    def test_dynamic_integer_exponent(self):
        # exponent is an expression that evaluates to a constant integer
        f = ScalarField.from_source("q1^(1 + 1)", 1)
        x = PhasePoint((-1.5,), (0.0,))
        v, g = pure.eval_grad(f.program, f.slots(x), 1)
        assert v == 2.25
        assert g[0] == -3.0
