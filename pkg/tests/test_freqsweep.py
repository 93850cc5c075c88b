import math

import numpy as np
import pytest

from src.exceptions import DimensionError, DomainError, PoleHit, ProbeInfeasible
from src.freqsweep import (
    FrequencyGrid, _model_labels, _unwrap_deg, bode_compare, discrete_transfer, geometric_ts_list,
    order_probe, rows_to_frame
)
from src.pipeline import ConverterModel
from src.reconstruct import (
    ContinuousSurrogate, DiscreteBaseline, SurrogateMethod, continuous_transfer, reconstruct_exact,
    synthesize_baseline
)


def test_grid_validation():
    with pytest.raises(DomainError):
        FrequencyGrid([], 1.0)
    with pytest.raises(DomainError):
        FrequencyGrid([1.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        FrequencyGrid([0.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        FrequencyGrid([1.0, math.pi], 1.0)


def test_grid_default_spans_nyquist_fraction():
    grid = FrequencyGrid.default(1e-5, 200)
    assert len(grid.points) == 200
    assert grid.points[0] == pytest.approx(1e-3 * grid.nyquist)
    assert grid.points[-1] == pytest.approx(0.99 * grid.nyquist)
    assert np.all(np.diff(grid.points) > 0)


def test_grid_from_hz():
    grid = FrequencyGrid.from_hz(10.0, 1000.0, 3, 1e-4)
    np.testing.assert_allclose(grid.points, 2 * math.pi * np.array([10.0, 100.0, 1000.0]))
    single = FrequencyGrid.from_hz(50.0, 50.0, 1, 1e-4)
    assert single.points.tolist() == [pytest.approx(2 * math.pi * 50.0)]
    with pytest.raises(DomainError):
        FrequencyGrid.from_hz(10.0, 1000.0, 0, 1e-4)
    for fmin, fmax in ((0.0, 1000.0), (-10.0, 1000.0), (10.0, -1.0), (2000.0, 1000.0)):
        with pytest.raises(DomainError):
            FrequencyGrid.from_hz(fmin, fmax, 3, 1e-4)


def test_discrete_transfer_scalar():
    a, b, c, d, Ts = 0.5, 2.0, 3.0, 0.1, 0.2
    baseline = DiscreteBaseline([[a]], [[b]], [[c]], [[d]], Ts)
    omega = 4.0
    z = np.exp(1j * omega * Ts)
    assert discrete_transfer(baseline, omega)[0, 0] == pytest.approx(c * b / (z - a) + d, rel=1e-14)


def test_discrete_transfer_pole_hit():
    baseline = DiscreteBaseline([[-1.0]], [[1.0]], [[1.0]], [[0.0]], 1.0)
    with pytest.raises(PoleHit):
        discrete_transfer(baseline, math.pi)


def test_discrete_transfer_conjugate_symmetry(boost_spec):
    baseline = ConverterModel(boost_spec).baseline
    for omega in (2 * math.pi * 100.0, 2 * math.pi * 1e4, 0.9 * math.pi / baseline.Ts):
        g_pos = discrete_transfer(baseline, omega)
        g_neg = discrete_transfer(baseline, -omega)
        np.testing.assert_allclose(g_neg, np.conj(g_pos), rtol=1e-13)


def test_discrete_transfer_matches_impulse_response_sum(boost_spec):
    baseline = ConverterModel(boost_spec).baseline
    omega = 2 * math.pi * 1000.0
    samples = 2 ** 14

    # h[0] = D_z, h[k] = C_z A_z^(k-1) B_z
    impulse = np.empty((samples,) + baseline.shape)
    impulse[0] = baseline.D_z
    state = baseline.B_z.copy()
    for k in range(1, samples):
        impulse[k] = baseline.C_z @ state
        state = baseline.A_z @ state
    weights = np.exp(-1j * omega * baseline.Ts * np.arange(samples))
    expected = np.tensordot(weights, impulse, axes=1)

    np.testing.assert_allclose(discrete_transfer(baseline, omega), expected, rtol=1e-6)


def test_exact_log_matches_baseline_at_dc():
    Ts = 1e-4
    baseline = synthesize_baseline([[-1.0, 0.5], [0.2, -2.0]], [[1.0], [0.5]], [[1.0, -1.0]],
                                   [[0.25]], Ts)
    surrogate = reconstruct_exact(baseline)
    omega = 1e-6 / Ts
    g_base = discrete_transfer(baseline, omega)[0, 0]
    g_model = continuous_transfer(surrogate, 1j * omega)[0, 0]
    assert abs(g_model - g_base) <= 1e-6 * abs(g_base)


def test_unwrap_is_cumulative():
    assert _unwrap_deg([170.0, -170.0, -10.0]) == pytest.approx([170.0, 190.0, 350.0])
    unwrapped = _unwrap_deg([10.0, math.nan, -350.0])
    assert unwrapped[0] == 10.0 and math.isnan(unwrapped[1])
    assert unwrapped[2] == pytest.approx(10.0)


def test_model_labels_disambiguate():
    surrogate = ContinuousSurrogate([[-1.0]], [[1.0]], [[1.0]], [[0.0]], 1.0, 'ssa')
    assert _model_labels([surrogate, surrogate]) == ['ssa', 'ssa_2']


def test_boost_exact_log_fidelity(boost_spec):
    model = ConverterModel(boost_spec)
    surrogate = reconstruct_exact(model.baseline)
    Ts = model.cycle.Ts
    grid = FrequencyGrid(np.geomspace(1e-3 * math.pi / Ts, 0.02 * 2 * math.pi / Ts, 40), Ts)
    rows = bode_compare(model.baseline, [surrogate], grid)
    assert [row.omega for row in rows] == pytest.approx(list(grid.points))
    for row in rows:
        assert row.models['exact-log'].rel_err < 1e-2
        assert not row.baseline_pole_hit


def test_threaded_compare_keeps_order(boost_spec):
    model = ConverterModel(boost_spec)
    models = [model.surrogate('exact-log'), model.surrogate('ssa')]
    grid = FrequencyGrid.default(model.cycle.Ts, 25)
    sequential = rows_to_frame(bode_compare(model.baseline, models, grid))
    threaded = rows_to_frame(bode_compare(model.baseline, models, grid, max_workers=4))
    assert sequential.equals(threaded)


def test_model_pole_is_marked_not_raised():
    Ts = 1.0
    baseline = synthesize_baseline([[-1.0, 0.0], [0.0, -2.0]], [[1.0], [1.0]], [[1.0, 1.0]],
                                   [[0.0]], Ts)
    oscillator = ContinuousSurrogate([[0.0, -1.0], [1.0, 0.0]], [[1.0], [0.0]], [[1.0, 0.0]],
                                     [[0.0]], Ts, SurrogateMethod.SSA)
    grid = FrequencyGrid([0.5, 1.0, 2.0], Ts)
    rows = bode_compare(baseline, [oscillator], grid)
    hit = rows[1].models['ssa']
    assert hit.pole_hit and math.isnan(hit.mag_db) and math.isnan(hit.rel_err)
    assert not rows[0].models['ssa'].pole_hit
    assert all(math.isfinite(row.baseline_mag_db) for row in rows)


def test_compare_rejects_shape_mismatch(boost_spec):
    model = ConverterModel(boost_spec)
    wide = ContinuousSurrogate(np.eye(2) * -1.0, np.ones((2, 2)), np.ones((1, 2)), np.zeros((1, 2)),
                               model.cycle.Ts, 'ssa')
    with pytest.raises(DomainError):
        bode_compare(model.baseline, [wide], FrequencyGrid.default(model.cycle.Ts, 5))


@pytest.mark.parametrize('channel', [(1, 0), (0, 1), (-1, 0)])
def test_compare_rejects_channel_outside_shape(boost_spec, channel):
    model = ConverterModel(boost_spec)
    with pytest.raises(DimensionError):
        bode_compare(model.baseline, [], FrequencyGrid.default(model.cycle.Ts, 5), channel=channel)


def test_frame_columns(boost_spec):
    model = ConverterModel(boost_spec)
    rows = model.compare(['exact-log', 'bch2'], FrequencyGrid.default(model.cycle.Ts, 5))
    frame = rows_to_frame(rows)
    assert list(frame.columns) == [
        'omega_rad_s', 'baseline_mag_db', 'baseline_phase_deg',
        'exact-log_mag_db', 'exact-log_phase_deg', 'exact-log_rel_err',
        'bch2_mag_db', 'bch2_phase_deg', 'bch2_rel_err',
    ]
    assert len(frame) == 5
    assert list(rows_to_frame([]).columns) == ['omega_rad_s', 'baseline_mag_db', 'baseline_phase_deg']


def test_geometric_ts_list():
    ts = geometric_ts_list(1e-5, 4, 3)
    np.testing.assert_allclose(ts, [1e-5, 5e-6, 2.5e-6, 1.25e-6])


def test_probe_step_size_validation(boost_spec):
    first, second = boost_spec.cycle.subintervals
    args = (first.A, second.A, first.B, second.B, [12.0], 0.4)
    with pytest.raises(DomainError):
        order_probe(*args, [1e-5, 5e-6, 2.5e-6])
    with pytest.raises(DomainError):
        order_probe(*args, [1e-5, 2e-5, 2.5e-6, 1.25e-6])
    with pytest.raises(DomainError):
        order_probe(*args, [1e-5, 8e-6, 6e-6, 4e-6])


@pytest.mark.parametrize('order, expected', [(1, 1.0), (2, 2.0)])
def test_probe_boost_slope(boost_spec, order, expected):
    first, second = boost_spec.cycle.subintervals
    result = order_probe(first.A, second.A, first.B, second.B, [12.0], 0.4,
                         geometric_ts_list(1e-5, 4, 3), order)
    assert not result.exact
    assert result.slope == pytest.approx(expected, abs=0.15)
    assert np.all(np.diff(result.residuals) < 0)


def test_probe_direction_gap_shrinks_with_ts(boost_spec):
    first, second = boost_spec.cycle.subintervals
    result = order_probe(first.A, second.A, first.B, second.B, [12.0], 0.4,
                         geometric_ts_list(1e-5, 4, 3), 2)
    assert result.direction_residuals[-1] < result.direction_residuals[0]


def test_probe_commuting_cycle_is_exact(buck_spec):
    first, second = buck_spec.cycle.subintervals
    result = order_probe(first.A, second.A, first.B, second.B, [12.0], 0.5,
                         geometric_ts_list(1e-5, 4, 3), 2)
    assert result.exact
    assert math.isnan(result.slope)


def test_probe_negative_eigenvalue_is_infeasible():
    rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    with pytest.raises(ProbeInfeasible):
        order_probe(rotation, rotation, B, B, [1.0], 0.5, geometric_ts_list(math.pi, 4, 3), 2)


def test_error_ordering_at_fifth_of_nyquist(boost_spec):
    model = ConverterModel(boost_spec)
    Ts = model.cycle.Ts
    omega = 0.2 * math.pi / Ts
    s = 1j * omega

    g_exact = continuous_transfer(model.surrogate('exact-log'), s)[0, 0]
    g_bch2 = continuous_transfer(model.surrogate('bch2'), s)[0, 0]
    g_ssa = continuous_transfer(model.surrogate('ssa'), s)[0, 0]
    assert abs(g_bch2 - g_exact) <= abs(g_ssa - g_exact)
