import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import baseline_matrix, power_iteration_rate, stationary_by_powers
from reserve_spacing.errors import DegenerateEigenvectorError, IrreducibilityError, StructureError
from reserve_spacing.model import ModelParams, compose
from reserve_spacing.spectral import (
    decay_rate,
    distribution_path,
    second_eigenvalue,
    stationary_distribution,
    survival_probability,
)

REFERENCE = ModelParams(r=0.5, mu=5.0, alpha=0.1)


class TestSecondEigenvalue:
    def test_zero_distance(self):
        s = second_eigenvalue(compose("baseline", REFERENCE, 0.0))
        assert s.lambda2 == 0.5
        np.testing.assert_array_equal(s.qsd, [0.0, 1.0])

    def test_decoupled_limit(self):
        # d -> infinity: no shared catastrophes and no colonisation.
        A = np.array([[1, 0, 0], [0.25, 0.75, 0], [0, 0.5, 0.5]])
        assert second_eigenvalue(A).lambda2 == 0.75

    def test_against_power_iteration(self):
        A = compose("baseline", REFERENCE, 20.0)
        assert second_eigenvalue(A).lambda2 == pytest.approx(power_iteration_rate(A[1:, 1:]), abs=1e-10)

    def test_qsd_is_left_eigenvector(self):
        A = compose("baseline", REFERENCE, 12.0)
        s = second_eigenvalue(A)
        B = A[1:, 1:]
        assert np.max(np.abs(s.qsd @ B - s.lambda2 * s.qsd)) < 1e-10
        assert s.qsd.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(s.qsd > 0)

    def test_requires_absorbing_row(self):
        with pytest.raises(StructureError):
            second_eigenvalue(compose("recruitment", REFERENCE.replace(a=0.1), 5.0))

    def test_zero_block_is_degenerate(self):
        A = compose("baseline", ModelParams(1.0, 5.0, 0.1), 0.0)
        assert decay_rate(A) == 0.0
        with pytest.raises(DegenerateEigenvectorError):
            second_eigenvalue(A)

    def test_upper_triangular_block(self):
        # r = 0: nothing is ever lost, the block is ((1-c, c), (0, 1)).
        A = compose("baseline", ModelParams(0.0, 5.0, 0.1), 10.0)
        s = second_eigenvalue(A)
        assert s.lambda2 == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(s.qsd, [0.0, 1.0], atol=1e-15)

    def test_matches_numpy_eigvals(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            A = baseline_matrix(rng.uniform(), rng.uniform(0.5, 50), rng.uniform(0.01, 1), rng.uniform(0, 100))
            expected = np.sort(np.linalg.eigvals(A).real)[-2]
            assert decay_rate(A) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    r=st.floats(0.05, 0.95),
    mu=st.floats(0.5, 50),
    alpha=st.floats(0.01, 1.0),
    d=st.floats(0.0, 150.0),
)
def test_closed_form_matches_power_iteration(r, mu, alpha, d):
    A = compose("baseline", ModelParams(r, mu, alpha), d)
    assert decay_rate(A) == pytest.approx(power_iteration_rate(A[1:, 1:]), abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.0, 1.0, exclude_min=True, exclude_max=True), mu=st.floats(0.1, 100), alpha=st.floats(0.001, 10))
def test_zero_distance_rate_is_one_minus_r(r, mu, alpha):
    assert decay_rate(compose("baseline", ModelParams(r, mu, alpha), 0.0)) == pytest.approx(1 - r, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.01, 0.99), mu=st.floats(0.1, 100), alpha=st.floats(0.001, 10))
def test_far_distance_rate_approaches_one_minus_half_r(r, mu, alpha):
    d = 50 * max(mu, 1 / alpha)
    assert decay_rate(compose("baseline", ModelParams(r, mu, alpha), d)) == pytest.approx(1 - r / 2, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.01, 0.99), mu=st.floats(0.5, 50), alpha=st.floats(0.01, 1), d=st.floats(0.01, 200))
def test_qsd_positive_when_block_irreducible(r, mu, alpha, d):
    A = compose("baseline", ModelParams(r, mu, alpha), d)
    B = A[1:, 1:]
    s = second_eigenvalue(A)
    if B[0, 1] > 0 and B[1, 0] > 0:
        assert np.all(s.qsd > 0)
    assert np.max(np.abs(s.qsd @ B - s.lambda2 * s.qsd)) < 1e-10
    assert 0.0 <= s.lambda2 <= 1.0


class TestStationary:
    def test_certain_recruitment(self):
        st_ = stationary_distribution(compose("recruitment", REFERENCE.replace(a=1.0), 30.0))
        np.testing.assert_allclose(st_.pi, [0, 0, 1], atol=1e-15)
        assert st_.persistence == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("a", [0.05, 0.3, 0.9])
    def test_certain_local_extinction(self, a):
        st_ = stationary_distribution(compose("full", REFERENCE.replace(a=a, b=1.0), 10.0))
        np.testing.assert_allclose(st_.pi, [(1 - a) ** 2, 2 * a * (1 - a), a * a], atol=1e-14)

    def test_absorbing_rejected(self):
        with pytest.raises(IrreducibilityError):
            stationary_distribution(compose("baseline", REFERENCE, 10.0))
        with pytest.raises(IrreducibilityError):
            stationary_distribution(compose("full", REFERENCE.replace(b=0.2), 10.0))

    def test_matches_matrix_powers(self):
        A = compose("recruitment", REFERENCE.replace(a=0.05), 10.0)
        np.testing.assert_allclose(stationary_distribution(A).pi, stationary_by_powers(A), atol=1e-12)

    def test_tiny_recruitment_still_solved(self):
        A = compose("recruitment", REFERENCE.replace(a=1e-15), 10.0)
        pi = stationary_distribution(A).pi
        assert pi[0] == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(pi @ A - pi)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(
    r=st.floats(0, 1),
    mu=st.floats(0.1, 100),
    alpha=st.floats(0.001, 10),
    a=st.floats(1e-4, 1),
    b=st.floats(0, 1),
    d=st.floats(0, 500),
    variant=st.sampled_from(["recruitment", "full"]),
)
def test_stationary_residual(r, mu, alpha, a, b, d, variant):
    A = compose(variant, ModelParams(r, mu, alpha, a, b), d)
    s = stationary_distribution(A)
    assert np.max(np.abs(s.pi @ A - s.pi)) < 1e-10
    assert abs(s.pi.sum() - 1.0) <= 1e-12
    assert 0.0 <= s.persistence <= 1.0


class TestSurvival:
    def test_initially_extant(self):
        assert survival_probability("baseline", REFERENCE, 10.0, t=0) == 1.0

    def test_zero_distance_one_step(self):
        assert survival_probability("baseline", REFERENCE, 0.0, t=1) == 0.5

    def test_path_shape_and_start(self):
        path = distribution_path("full", REFERENCE.replace(a=0.1, b=0.05), 10.0, 7, [0.2, 0.3, 0.5])
        assert path.shape == (8, 3)
        np.testing.assert_array_equal(path[0], [0.2, 0.3, 0.5])

    def test_geometric_decay_rate(self):
        lam = decay_rate(compose("baseline", REFERENCE, 10.0))
        s199 = survival_probability("baseline", REFERENCE, 10.0, t=199)
        s200 = survival_probability("baseline", REFERENCE, 10.0, t=200)
        assert s200 > 0
        assert math.log(s200) - math.log(s199) == pytest.approx(math.log(lam), abs=1e-6)

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            survival_probability("baseline", REFERENCE, 10.0, t=-1)
