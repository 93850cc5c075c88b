import math

import numpy as np
import pytest
from scipy.linalg import expm

from config.config import Tolerances
from src.exceptions import ComplexEigenvalues, DimensionError, NotLiftable
from src.smallmat import rel_error
from src.two_by_two import (
    D_R, SignSymmetricMap, eig_from_invariants, exp2x2_closed, real_lift_log, sign_map_det,
    sign_map_eigenvalues, sign_map_trace
)


def _random_omegas(rng, count=25, bound=1.0):
    return [rng.uniform(-bound, bound, (2, 2)) for _ in range(count)]


def test_closed_form_exponential(rng):
    for Omega in _random_omegas(rng, count=1000, bound=5.0):
        assert rel_error(exp2x2_closed(Omega), expm(Omega)) < 1e-11


def _exp_with_delta_sq(c):
    # [[mu, 1], [c, mu]] has Delta^2 = c
    return exp2x2_closed(np.array([[0.3, 1.0], [c, 0.3]]))


def test_closed_form_is_continuous_at_zero_delta():
    values = [_exp_with_delta_sq(c) for c in (-1e-16, 0.0, 1e-16)]
    for first in values:
        for second in values:
            assert np.abs(first - second).max() <= 1e-10


@pytest.mark.parametrize('sign', [1.0, -1.0])
def test_closed_form_is_continuous_at_series_cutoff(sign):
    cutoff = sign * Tolerances.DELTA_SERIES_THRESHOLD
    inside = _exp_with_delta_sq(cutoff * (1.0 - 1e-12))
    outside = _exp_with_delta_sq(cutoff * (1.0 + 1e-12))
    assert np.abs(inside - outside).max() <= 1e-10


@pytest.mark.parametrize('Omega', [
    np.array([[0.3, 1e-5], [0.0, 0.3]]),        # Delta^2 ~ 0, series branch
    np.array([[0.1, -2.0], [2.0, 0.1]]),        # rotation, Delta^2 < 0
    np.array([[-0.5, 1.0], [1.0, -0.5]]),       # Delta^2 > 0
    np.zeros((2, 2)),
])
def test_closed_form_exponential_branches(Omega):
    assert rel_error(exp2x2_closed(Omega), expm(Omega)) < 1e-12


def test_closed_form_rejects_non_2x2():
    with pytest.raises(DimensionError):
        exp2x2_closed(np.eye(3))


def test_sign_map_invariants(rng):
    # det/trace of the assembled map carry their own ~1e-12 round-off
    for Omega in _random_omegas(rng, count=1000, bound=5.0):
        m = SignSymmetricMap(Omega)
        Phi = m.Phi
        assert rel_error(Phi, D_R @ expm(Omega)) < 1e-11
        scale = np.linalg.norm(Phi)
        assert sign_map_det(m) == pytest.approx(np.linalg.det(Phi), rel=1e-11,
                                                abs=1e-13 * scale ** 2)
        assert sign_map_det(m) < 0
        assert sign_map_trace(m) == pytest.approx(np.trace(Phi), rel=1e-11,
                                                  abs=1e-11 * scale)


def test_sign_map_generator_flows_to_exponential():
    Omega = np.array([[-0.2, 0.3], [-0.1, -0.4]])
    m = SignSymmetricMap(Omega, Ts=1e-5)
    np.testing.assert_allclose(m.generator, Omega / 1e-5)
    assert rel_error(D_R @ expm(m.generator * m.Ts), m.Phi) < 1e-12


def test_sign_map_eigenvalues_straddle_zero(rng):
    for Omega in _random_omegas(rng):
        m = SignSymmetricMap(Omega)
        pair = sign_map_eigenvalues(m)
        reference = np.sort(np.linalg.eigvals(m.Phi).real)
        assert pair.straddles_zero
        assert pair.lambda_plus == pytest.approx(reference[1], rel=1e-10, abs=1e-14)
        assert pair.lambda_minus == pytest.approx(reference[0], rel=1e-10, abs=1e-14)


def test_eig_from_invariants_cases():
    pair = eig_from_invariants(3.0, 2.0)
    assert (pair.lambda_plus, pair.lambda_minus) == (pytest.approx(2.0), pytest.approx(1.0))

    repeated = eig_from_invariants(2.0, 1.0)
    assert repeated.lambda_plus == pytest.approx(1.0)
    assert repeated.lambda_minus == pytest.approx(1.0)
    assert not repeated.straddles_zero

    with pytest.raises(ComplexEigenvalues):
        eig_from_invariants(0.0, 1.0)


def test_eig_from_invariants_avoids_cancellation():
    # Roots 1e8 and 1e-8: the small one must keep full relative accuracy
    pair = eig_from_invariants(1e8 + 1e-8, 1.0)
    assert pair.lambda_minus == pytest.approx(1e-8, rel=1e-12)


@pytest.mark.parametrize('Ts', [1.0, 2e-3])
def test_real_lift_reproduces_extended_map(rng, Ts):
    for Omega in _random_omegas(rng, 10):
        Phi = SignSymmetricMap(Omega).Phi
        lift = real_lift_log(Phi, Ts)
        assert lift.A_c.shape == (3, 3)
        assert lift.A_c.dtype == np.float64
        assert rel_error(expm(lift.A_c * Ts), lift.S_ext) < 1e-10
        np.testing.assert_array_equal(lift.S_ext[:2, :2], Phi)
        assert lift.S_ext[2, 2] == lift.eigenpair.lambda_minus
        np.testing.assert_array_equal(lift.project_state @ lift.embed_state, np.eye(2))


def test_real_lift_rotation_block_trace():
    Phi = np.diag([-0.5, 0.8])
    lift = real_lift_log(Phi, 1.0)
    expected = math.log(0.8) + 2.0 * math.log(0.5)
    assert np.trace(lift.A_c) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize('Phi', [
    np.diag([2.0, 3.0]),                        # both positive
    np.diag([-2.0, -3.0]),                      # both negative
    np.array([[0.0, -1.0], [1.0, 0.0]]),        # complex pair
])
def test_real_lift_rejects_unsuitable_spectra(Phi):
    with pytest.raises(NotLiftable):
        real_lift_log(Phi, 1.0)
