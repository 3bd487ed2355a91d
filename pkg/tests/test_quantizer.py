import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quantspline.exceptions import ConfigurationError, DegenerateRangeError
from quantspline.quantizer import (
    Quantizer,
    apply,
    data_range_thresholds,
    empirical_optimal_marks,
    log_bit_testing_quantizer,
    mesh_C_k,
    midpoint_marks,
    population_optimal_marks,
    quantize_sample,
    uniform_symmetric_quantizer,
)


def test_apply_ties_go_left():
    q = Quantizer([0.0], [-1.0, 1.0])
    np.testing.assert_array_equal(q([-0.5, 0.0, 0.3]), [-1, -1, 1])


def test_apply_two_cell_example():
    q = Quantizer([5.0], [2.0, 10.0])
    np.testing.assert_array_equal(apply(q, [1, 2, 3, 10]), [2, 2, 2, 10])


def test_dense_quantizer_is_near_identity():
    y = np.random.default_rng(0).uniform(-1, 1, 50)
    t = np.arange(-1 - 1e-9, 1 + 2e-9, 1e-9 * 2**16)
    q = Quantizer(t, midpoint_marks(t))
    assert np.max(np.abs(q(y) - y)) <= 2**16 * 1e-9


def test_quantizer_validation():
    with pytest.raises(ConfigurationError):
        Quantizer([1.0, 0.0], [0, 0, 0])
    with pytest.raises(ConfigurationError):
        Quantizer([0.0], [1.0])
    with pytest.raises(ConfigurationError):
        Quantizer([], [1.0])


def test_bits_and_serialization():
    q = uniform_symmetric_quantizer(1.0, 1)
    assert q.k == 4 and q.b == 2
    back = Quantizer.from_dict(q.to_dict())
    np.testing.assert_array_equal(back.t, q.t)
    np.testing.assert_array_equal(back.mu, q.mu)
    assert back.scheme == q.scheme
    assert uniform_symmetric_quantizer(0.5, 2).b == 3  # k = 6


def test_data_range_thresholds():
    y = np.array([0.0, 0.3, 1.0])
    np.testing.assert_allclose(data_range_thresholds(y, 2), [0, 0.5, 1])
    np.testing.assert_allclose(data_range_thresholds(y, 1), [0.5])
    t = data_range_thresholds(np.array([-2.0, 2.0]), 3)
    assert t.size == 7
    np.testing.assert_allclose(np.diff(t), 4 / 6)
    with pytest.raises(DegenerateRangeError):
        data_range_thresholds(np.ones(5), 2)
    with pytest.raises(DegenerateRangeError):
        data_range_thresholds(np.array([]), 2)
    with pytest.raises(ConfigurationError):
        data_range_thresholds(y, 0)


def test_midpoint_marks():
    np.testing.assert_allclose(midpoint_marks([0, 0.5, 1]), [0, 0.25, 0.75, 1])
    np.testing.assert_allclose(midpoint_marks([0.7]), [0.7, 0.7])
    t = np.sort(np.random.default_rng(1).uniform(-3, 3, 9))
    assert Quantizer(t, midpoint_marks(t)).satisfies_condition_b()


def test_empirical_marks_examples():
    np.testing.assert_allclose(empirical_optimal_marks([1, 2, 3, 10], [5.0]), [2, 10])
    y = np.array([-3.0, -2.0, -1.0])
    np.testing.assert_allclose(empirical_optimal_marks(y, [0.0, 1.0, 2.0]), [-2, 0, 0, 0])
    y = np.linspace(-1, 1, 2001)
    mu = empirical_optimal_marks(y, [1e-12])
    assert mu[0] == pytest.approx(-mu[1], rel=1e-3)


@given(
    arrays(np.float64, st.integers(5, 60), elements=st.floats(-10, 10)),
    st.integers(1, 3),
    st.sampled_from([-1e-3, 1e-3]),
)
@settings(max_examples=60, deadline=None)
def test_empirical_marks_minimize_cell_error(y, b, step):
    if np.ptp(y) <= 1e-6:
        return
    t = data_range_thresholds(y, b)
    mu = empirical_optimal_marks(y, t)
    idx = np.searchsorted(t, y, side="left")
    base = np.sum((mu[idx] - y) ** 2)
    for j in np.unique(idx):
        pert = mu.copy()
        pert[j] += step
        assert np.sum((pert[idx] - y) ** 2) > base


@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-5, 5)))
@settings(max_examples=40, deadline=None)
def test_apply_idempotent_when_all_marks_in_cells(y):
    t = np.array([-1.0, 0.0, 1.0])
    q = Quantizer(t, [-2.0, -0.5, 0.5, 2.0])
    assert q.satisfies_condition_b(include_ends=True)
    np.testing.assert_array_equal(q(q(y)), q(y))


def test_population_marks():
    s = 1.3
    mu = population_optimal_marks(np.zeros(10), s, [0.0])
    np.testing.assert_allclose(mu, [-s * math.sqrt(2 / math.pi), s * math.sqrt(2 / math.pi)], rtol=1e-12)
    mu = population_optimal_marks(np.zeros(4), 1.0, [-1.0, 0.0, 1.0])
    assert mu[0] == pytest.approx(-1.5251, abs=5e-5)
    np.testing.assert_allclose(mu, -mu[::-1], rtol=1e-12)
    with pytest.raises(ConfigurationError):
        population_optimal_marks(np.zeros(3), 1.0, [0.0], density="laplace")
    with pytest.raises(ConfigurationError):
        population_optimal_marks(np.zeros(3), 0.0, [0.0])


def test_population_marks_match_monte_carlo():
    rng = np.random.default_rng(11)
    f = np.array([-0.5, 0.2, 1.0])
    t = np.array([-1.0, 0.0, 0.5, 1.5])
    y = (f[:, None] + 0.8 * rng.standard_normal((3, 400_000))).ravel()
    np.testing.assert_allclose(population_optimal_marks(f, 0.8, t), empirical_optimal_marks(y, t), atol=5e-3)


def test_uniform_symmetric():
    np.testing.assert_allclose(uniform_symmetric_quantizer(1.0, 1).t, [-1, 0, 1])
    q = uniform_symmetric_quantizer(0.5, 2)
    np.testing.assert_allclose(q.t, [-1, -0.5, 0, 0.5, 1])
    assert q.k == 6
    for l in range(5):
        assert uniform_symmetric_quantizer(0.3, l).k % 2 == 0
    with pytest.raises(ConfigurationError):
        uniform_symmetric_quantizer(-1.0, 1)


def test_log_bit_testing_quantizer():
    q = log_bit_testing_quantizer(1.0, math.e, 2)
    assert abs(q.t[0]) == pytest.approx(4.0) and abs(q.t[-1]) == pytest.approx(4.0)
    small, large = log_bit_testing_quantizer(1.0, 100, 2), log_bit_testing_quantizer(1.0, 10_000, 2)
    assert 1 <= large.b - small.b <= 8
    for n in (100, 1000, 10_000):
        assert mesh_C_k(log_bit_testing_quantizer(1.0, n, 2).t) <= n ** (-4 / 9) + 1e-12
    with pytest.raises(ConfigurationError):
        log_bit_testing_quantizer(0.0, 100, 2)


def test_mesh():
    assert mesh_C_k([0, 0.5, 1]) == 0.5
    assert mesh_C_k(np.linspace(0, 1, 11)) == pytest.approx(0.1)
    assert mesh_C_k([0.3]) == 0.0


def test_quantize_sample():
    y = np.random.default_rng(2).standard_normal(100)
    z, q = quantize_sample(y, 3)
    assert q.k == 8 and np.unique(z).size <= 8
    z2, q2 = quantize_sample(y, 3, marks="midpoint")
    assert q2.satisfies_condition_b()
    with pytest.raises(ConfigurationError):
        quantize_sample(y, 3, marks="lloyd")
