"""Chart types and the standard symplectic matrix."""

import numpy as np
import pytest

from cantrans import (Chart, ExprPhaseMap, MapFamily, PhasePoint, ScalarField,
                      TangentVector, jacobian, standard_symplectic_matrix)
from conftest import random_points


def test_j_matrix_n1():
    assert np.array_equal(standard_symplectic_matrix(1), [[0.0, 1.0], [-1.0, 0.0]])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_j_matrix_identities(n):
    J = standard_symplectic_matrix(n)
    assert np.array_equal(J @ J, -np.eye(2 * n))
    assert np.array_equal(J.T @ J, np.eye(2 * n))
    assert np.array_equal(J.T, -J)


def test_chart_requires_positive_n():
    with pytest.raises(ValueError):
        Chart(0)
    with pytest.raises(ValueError):
        standard_symplectic_matrix(0)


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint((1.0,), (2.0, 3.0))
    with pytest.raises(ValueError):
        PhasePoint((float("nan"),), (0.0,))
    x = PhasePoint((1.0, 2.0), (3.0, 4.0), 0.5)
    assert x.n == 2
    assert np.array_equal(x.z(), [1.0, 2.0, 3.0, 4.0])
    assert x.with_z([5, 6, 7, 8]).q == (5.0, 6.0)


def test_tangent_vector_z():
    v = TangentVector((1.0,), (-2.0,), 1.0)
    assert np.array_equal(v.z(), [1.0, -2.0])


def test_scalar_field_time_independence_detection():
    assert ScalarField.from_source("q1*p1", 1).time_independent
    assert not ScalarField.from_source("q1*p1 - t", 1).time_independent


def test_scalar_field_missing_parameter():
    from cantrans.errors import MissingBinding, UnknownIdentifier
    from cantrans.expr import parse

    # undeclared names fail at parse time
    with pytest.raises(UnknownIdentifier):
        ScalarField.from_source("m*q1", 1)
    # declared but unbound parameters fail at field construction
    with pytest.raises(MissingBinding):
        ScalarField(parse("m*q1", 1, ("m",)), params={})


def test_identity_map_jacobian_everywhere(rng):
    phi = ExprPhaseMap.identity(2)
    expected = np.hstack([np.eye(4), np.zeros((4, 1))])
    for x in random_points(rng, 2, 20):
        assert np.array_equal(jacobian(phi, x), expected)


def test_map_preserves_time(rng):
    fam = MapFamily.from_sources(["q1 - t*s"], ["p1 - s"], 1)
    phi = fam.at(0.7)
    for x in random_points(rng, 1, 5):
        assert phi(x).t == x.t


def test_map_family_identity_defect():
    fam = MapFamily.from_sources(["q1 + s"], ["p1"], 1)
    assert fam.identity_defect(PhasePoint((0.5,), (0.2,))) == 0.0
    shifted = MapFamily.from_sources(["q1 + 1 + s"], ["p1"], 1)
    assert shifted.identity_defect(PhasePoint((0.5,), (0.2,))) == 1.0
