import math
import random
from fractions import Fraction

import numpy as np
import pytest

from loggas import (
    ChargeVector,
    charge_bounds,
    critical_interval,
    eig_bounds,
    from_charges,
    from_graph,
    from_matrix,
    GraphSpec,
    symmetric_eigs,
)
from loggas.errors import InstanceTooLarge

from conftest import random_exact_matrix, random_float_matrix


def test_two_by_two_closed_form():
    spec = symmetric_eigs(from_matrix([[0, 2.5], [2.5, 0]]))
    assert np.allclose(spec.eigenvalues, [-2.5, 2.5])


def test_mixed_charge_spectrum():
    # C = kk' - I for k = (1,1,-1,-1); kk' has eigenvalues {4,0,0,0}
    spec = symmetric_eigs(from_charges(ChargeVector((1, 1, -1, -1))))
    assert np.allclose(spec.eigenvalues, [-1, -1, -1, 3], atol=1e-10)


def test_zero_matrix_spectrum():
    spec = symmetric_eigs(from_matrix([[0, 0], [0, 0]]))
    assert np.array_equal(spec.eigenvalues, [0.0, 0.0])
    assert spec.residual == 0.0


def test_agrees_with_numpy_eigensolver():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(2, 12)
        c = random_float_matrix(rng, n)
        spec = symmetric_eigs(c)
        reference = np.linalg.eigvalsh(c.entries)
        assert np.max(np.abs(spec.eigenvalues - reference)) < 1e-9


def test_residual_and_trace_invariants():
    rng = random.Random(9)
    for _ in range(20):
        n = rng.randint(2, 10)
        c = random_float_matrix(rng, n)
        spec = symmetric_eigs(c)
        norm = float(np.linalg.norm(c.entries))
        assert spec.residual <= 1e-8 * max(1.0, norm)
        max_abs = float(np.max(np.abs(c.entries))) or 1.0
        assert abs(np.sum(spec.eigenvalues)) <= 1e-8 * n * max_abs
        # eigenvectors are kept and orthonormal
        gram = spec.eigenvectors.T @ spec.eigenvectors
        assert np.max(np.abs(gram - np.eye(n))) < 1e-10


def test_size_cap():
    with pytest.raises(InstanceTooLarge):
        symmetric_eigs(
            from_matrix(np.zeros((2049, 2049)))
        )


def test_eig_bounds_mixed_charges():
    c = from_charges(ChargeVector((1, 1, -1, -1)))
    report = eig_bounds(c)
    assert abs(report.beta_plus_lower - 1.0) < 1e-10  # tight: true beta+ = 1
    assert abs(report.beta_minus_upper - (-1.0 / 3.0)) < 1e-10


def test_eig_bounds_vacuous_for_zero_matrix():
    report = eig_bounds(from_matrix([[0, 0], [0, 0]]))
    assert report.beta_plus_lower == math.inf
    assert report.beta_minus_upper == -math.inf


def test_eig_bounds_k4():
    g = GraphSpec(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    c = from_graph(g)
    report = eig_bounds(c)
    assert abs(report.beta_minus_upper - (-1.0 / 3.0)) < 1e-10
    true_beta_minus = float(critical_interval(c).beta_minus)
    assert true_beta_minus == -0.5  # T- = -2 from the densest subgraph
    assert true_beta_minus <= report.beta_minus_upper


def test_charge_bounds_examples():
    report = charge_bounds(ChargeVector((1, 1, -1, -1)))
    assert report.beta_plus_lower == 1
    assert report.beta_minus_upper == Fraction(-1, 3)

    tc = charge_bounds(ChargeVector((Fraction(3), Fraction(3), Fraction(-2), Fraction(-2), Fraction(-2))))
    assert tc.beta_plus_lower == Fraction(1, 9)  # 1/max(z1^2, z2^2), weaker than 1/(z1 z2)

    n2 = charge_bounds(ChargeVector((2.0, 2.0)))
    assert abs(n2.beta_minus_upper - (-1.0 / 4.0)) < 1e-12  # tight at N=2


def test_bound_validity_against_solver():
    rng = random.Random(41)
    for _ in range(50):
        n = rng.randint(3, 8)
        c = random_exact_matrix(rng, n)
        report = critical_interval(c)
        bounds = eig_bounds(c)
        slack = 1e-9
        if math.isfinite(float(report.beta_plus)):
            assert float(report.beta_plus) >= float(bounds.beta_plus_lower) - slack
        if math.isfinite(float(report.beta_minus)):
            assert float(report.beta_minus) <= float(bounds.beta_minus_upper) + slack


def test_charge_bounds_never_beat_eig_bounds():
    rng = random.Random(43)
    for _ in range(50):
        n = rng.randint(3, 8)
        values = []
        while not (any(v > 0 for v in values) and any(v < 0 for v in values)):
            values = [rng.choice([-1, 1]) * rng.uniform(0.2, 2.0) for _ in range(n)]
        k = ChargeVector(tuple(values))
        eig = eig_bounds(from_charges(k))
        charge = charge_bounds(k)
        assert float(charge.beta_plus_lower) <= float(eig.beta_plus_lower) + 1e-9
        assert float(charge.beta_minus_upper) >= float(eig.beta_minus_upper) - 1e-9
