import numpy as np
import pytest

from cantrans import PhasePoint, ScalarField


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_points(rng, n, count, t_range=(0.0, 2.0), box=2.0):
    """Seeded sample of phase points in [-box, box]^2n with t in t_range."""
    out = []
    for _ in range(count):
        z = rng.uniform(-box, box, size=2 * n)
        t = rng.uniform(*t_range)
        out.append(PhasePoint(tuple(z[:n]), tuple(z[n:]), t))
    return out


@pytest.fixture(scope="session")
def scaling_generator():
    """f = qp - tp^2/m with m = 1; generates the scaling group."""
    return ScalarField.from_source("q1*p1 - t*p1^2/m", 1, {"m": 1.0})


@pytest.fixture(scope="session")
def free_particle():
    return ScalarField.from_source("p1^2/(2*m)", 1, {"m": 1.0})


@pytest.fixture(scope="session")
def oscillator_2d():
    """Isotropic oscillator in 2 degrees of freedom, m = w = 1."""
    return ScalarField.from_source(
        "(p1^2 + p2^2)/(2*m) + m*w^2*(q1^2 + q2^2)/2", 2, {"m": 1.0, "w": 1.0})


@pytest.fixture(scope="session")
def angular_momentum():
    return ScalarField.from_source("q1*p2 - q2*p1", 2, {})
