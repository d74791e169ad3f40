import numpy as np
import pytest

from oscavg.accel import NUMBA_ENABLED
from oscavg.averaging import PERIODIC, SamplingPlan, trapezoid_average
from oscavg.cput import (REFERENCE, SINK, CputParams, averaged_field,
                         basin_scan, cartesian_field, desk_grid,
                         detuned_averaged_field, excitation_threshold,
                         fixed_point_numeric, leading_order_sigma, mean_shift,
                         nondimensionalize, perturbative_fixed_point,
                         polar_rates, polar_to_cartesian, rho2_detuned,
                         truth_trajectory)
from oscavg.errors import (NonPositiveParameter, NoRealSolution, PlateContact,
                           RadiusZero)


def test_reference_parameters_positive():
    p = REFERENCE
    assert p.epsilon > 0 and p.period == pytest.approx(2 * np.pi / p.omega)


def test_nonpositive_parameters_rejected():
    with pytest.raises(NonPositiveParameter):
        CputParams(epsilon=0.0, D=1, omega=1, F=1, alpha=1, beta=1, gamma=1)
    with pytest.raises(NonPositiveParameter):
        nondimensionalize({"R": 0, "L": 1, "A": 1, "eps0": 1, "m": 1,
                           "b": 1, "F0": 1, "d": 1, "omega0": 1}, 1.0, 1.0)


def test_plate_contact_raised():
    p = REFERENCE
    with pytest.raises(PlateContact):
        cartesian_field(p, np.array([1.0, 0.0, p.D, 0.0]), 0.0)


def test_radius_zero_raised():
    with pytest.raises(RadiusZero):
        polar_rates(REFERENCE, np.array([1.0, 0.0, 0.0, 0.0]), 0.0)
    with pytest.raises(RadiusZero):
        averaged_field(REFERENCE, np.array([1.0, 0.0, 0.0, 0.0]))


def test_polar_to_cartesian_consistency():
    p = REFERENCE
    polar = np.array([10.0, 0.3, 1.2, -0.4])
    s = polar_to_cartesian(p, polar, 0.7, improved=True)
    # V, U and y - mean_shift, z lie on the stated circles
    assert np.isclose(np.hypot(s[0], s[1] / p.omega), polar[0])
    yc = s[2] - mean_shift(p, polar[0])
    assert np.isclose(np.hypot(yc, s[3] / (2 * p.omega)), polar[2])
    # improved=False drops the mean shift only
    s_hat = polar_to_cartesian(p, polar, 0.7, improved=False)
    assert np.isclose(s[2] - s_hat[2], mean_shift(p, polar[0]))
    assert np.allclose(s[[0, 1, 3]], s_hat[[0, 1, 3]])


def test_closed_form_equals_period_average_of_rates():
    # the closed-form averaged drift is the trapezoid mean of the unaveraged
    # polar rates over one slow period — machine-precision identity
    p = REFERENCE
    plan = SamplingPlan(PERIODIC, 64, period=p.period)
    rng = np.random.default_rng(0)
    for _ in range(5):
        s = np.array([rng.uniform(5, 30), rng.uniform(0, 2),
                      rng.uniform(0.2, 2), rng.uniform(0, 2)])
        avg = trapezoid_average(lambda t: polar_rates(p, s, t, improved=True),
                                plan)
        assert np.max(np.abs(avg - averaged_field(p, s))) < 1e-13


def test_detuned_field_reduces_at_zero_detuning():
    p = REFERENCE
    s = np.array([12.0, 0.5, 0.8, 1.1])
    assert np.allclose(detuned_averaged_field(p, s), averaged_field(p, s))
    pd = p.with_delta(0.1)
    diff = detuned_averaged_field(pd, s) - averaged_field(pd, s)
    # detuning shifts both phase rates by -eps*delta and nothing else
    assert np.isclose(diff[1], -p.epsilon * 0.1)
    assert np.isclose(diff[3], -p.epsilon * 0.1)
    assert np.allclose(diff[[0, 2]], 0.0)


def test_perturbative_fixed_point_frozen_digits():
    fp = perturbative_fixed_point(REFERENCE)
    assert fp.sigma == pytest.approx(593.536092669037, rel=1e-12)
    assert fp.rho == pytest.approx(24.362596180806285, rel=1e-12)
    assert fp.r == pytest.approx(0.5854740357569083, rel=1e-12)
    assert fp.y_mean == pytest.approx(0.09123519044431966, rel=1e-12)
    assert fp.leading_order_sigma == pytest.approx(617.6588287156513, rel=1e-12)
    assert fp.rho ** 2 == pytest.approx(fp.sigma)


def test_below_threshold_raises():
    p = REFERENCE.with_forcing(1e-3)
    with pytest.raises(NoRealSolution):
        leading_order_sigma(p)
    with pytest.raises(NoRealSolution):
        perturbative_fixed_point(p)


def test_excitation_threshold_resonant_value():
    p = REFERENCE
    expected = 4.0 * p.omega ** 2 * p.gamma * p.beta / p.alpha
    assert excitation_threshold(p, 0.0) == pytest.approx(expected, rel=1e-15)
    assert excitation_threshold(p, 0.0) == pytest.approx(2.3687050562614504)
    assert excitation_threshold(p, 0.2) > excitation_threshold(p, 0.0)
    assert excitation_threshold(p, -0.2) == pytest.approx(
        excitation_threshold(p, 0.2))


def test_rho2_detuned_resonant_matches_leading_order():
    p = REFERENCE
    res = rho2_detuned(p, 0.0)
    assert not res.below_threshold
    assert res.value == pytest.approx(leading_order_sigma(p), rel=1e-12)
    assert res.value == res.raw


def test_rho2_detuned_clamps_below_threshold():
    p = REFERENCE.with_forcing(0.5)   # well below F* = 2.37 at delta=0
    res = rho2_detuned(p, 0.0)
    assert res.below_threshold
    assert res.value == 0.0


def test_rho2_grows_with_forcing():
    p = REFERENCE
    assert rho2_detuned(p.with_forcing(8.0), 0.0).value > rho2_detuned(p, 0.0).value


def test_sink_newton_and_stability():
    res = fixed_point_numeric(REFERENCE, np.array([24.0, 1.0, 0.6, -2.4]))
    assert np.max(np.abs(res.state - SINK)) < 1e-6
    assert res.residual < 1e-12
    assert np.max(res.eigenvalues.real) < 0.0
    assert np.min(res.eigenvalues.real) > -0.2


def test_mean_shift_formula():
    p = REFERENCE
    assert mean_shift(p, SINK[0]) == pytest.approx(0.09183548397841224, rel=1e-12)
    assert mean_shift(p, 2.0) == pytest.approx(
        p.epsilon * 4.0 / (8.0 * p.D ** 2 * p.omega ** 2))


def test_small_basin_scan_converges_to_sink():
    vals = basin_scan(REFERENCE,
                      rho_values=np.array([10.0, 30.0]),
                      r_values=np.array([0.5, 1.5]),
                      phi_values=np.array([0.0, 3.0]),
                      theta_values=np.array([0.0, 3.0]))
    assert vals.count == 16
    assert vals.failures == 0
    assert vals.max_residual < 1e-10
    assert vals.max_distance < 1e-8


def test_desk_grid_shape():
    rho, r, phi, th = desk_grid()
    assert rho.size == 10 and r.size == 10
    assert phi.size == 10 and th.size == 10


def test_truth_trajectory_reaches_steady_amplitude():
    p = REFERENCE
    traj = truth_trajectory(p, T=1500.0, stride=100)
    tail = traj.states[traj.times > 1200.0]
    rho_est = np.hypot(tail[:, 0], tail[:, 1] / p.omega).max()
    assert abs(rho_est - SINK[0]) / SINK[0] < 5e-3


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend disabled")
def test_basin_kernel_matches_numpy_fallback():
    from oscavg.cput import _basin_kernel, _basin_numpy
    p = REFERENCE
    rng = np.random.default_rng(9)
    states = np.column_stack([rng.uniform(5, 30, 8), rng.uniform(0, 2, 8),
                              rng.uniform(0.2, 2, 8), rng.uniform(0, 2, 8)])
    args = (p.epsilon, p.D, p.omega, p.F, p.alpha, p.beta, p.gamma,
            0.05, 200, SINK, np.pi / p.omega)
    r_jit, d_jit = _basin_kernel(np.ascontiguousarray(states), *args)
    r_np, d_np = _basin_numpy(states.copy(), *args)
    assert np.allclose(r_jit, r_np, rtol=1e-12, atol=1e-14)
    assert np.allclose(d_jit, d_np, rtol=1e-12, atol=1e-12)
