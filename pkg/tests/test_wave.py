import numpy as np
import pytest

from oscavg.averaging import BIRKHOFF, PERIODIC, SamplingPlan
from oscavg.errors import DomainError, GridMismatch
from oscavg.harness import error_metrics
from oscavg.wave import (QUASIPERIODIC_COEFFICIENT, AdvectionParams, Grid2D,
                         SpectralField, advection_flow,
                         classical_coefficient_average, elliptic_K, l_pinv,
                         pde_averaged_run, pde_benchmark, pde_classical_field,
                         pde_corrector, pde_exp_integrator,
                         pde_improved_field, quasiperiodic_classical_oracle,
                         reference_initial_condition,
                         resonant_classical_oracle,
                         smallest_retained_frequency)


def small_grid(L1=2.0 * np.sqrt(3.0), L2=np.sqrt(3.0), M1=16, M2=8):
    return Grid2D(L1, L2, M1, M2)


def test_grid_rejects_odd_mode_counts():
    with pytest.raises(GridMismatch):
        Grid2D(1.0, 1.0, 15, 8)
    with pytest.raises(GridMismatch):
        Grid2D(1.0, 1.0, 16, 9)


def test_omega_layout_matches_fftfreq():
    g = small_grid()
    om = g.omega()
    j = np.fft.fftfreq(g.M1, d=1.0 / g.M1)
    k = np.fft.fftfreq(g.M2, d=1.0 / g.M2)
    assert np.allclose(om, 2 * np.pi * (j[:, None] / g.L1 + k[None, :] / g.L2))


def test_spectral_field_roundtrip_and_grid_check():
    g = small_grid()
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(g.shape)
    f = SpectralField(g, vals)
    assert np.allclose(np.fft.ifft2(f.coeffs).real, vals)
    with pytest.raises(GridMismatch):
        SpectralField(g, rng.standard_normal((4, 4)))
    other = Grid2D(1.0, 1.0, g.M1, g.M2)
    with pytest.raises(GridMismatch):
        advection_flow(other, f, 0.1)


def test_advection_flow_is_translation():
    # e^{Lt} shifts the profile along the (1,1) characteristic: a plane wave
    # e^{2 pi i (x/L1 + y/L2)} picks up the phase of the shifted argument
    g = small_grid()
    X, Y = g.points()
    f = SpectralField(g, np.cos(2 * np.pi * (X / g.L1 + Y / g.L2)))
    t = 0.37
    got = advection_flow(g, f, t).values
    want = np.cos(2 * np.pi * ((X + t) / g.L1 + (Y + t) / g.L2))
    assert np.max(np.abs(got - want)) < 1e-12
    # flow by -t inverts
    back = advection_flow(g, advection_flow(g, f, t), -t).values
    assert np.max(np.abs(back - f.values)) < 1e-12


def test_l_pinv_inverts_off_kernel():
    g = small_grid()
    rng = np.random.default_rng(1)
    f = SpectralField(g, rng.standard_normal(g.shape))
    p = l_pinv(g, f)
    om = g.omega()
    keep = np.abs(om) > 1e-10 * np.max(np.abs(om))
    # L applied back recovers the off-kernel part and kernel modes are zeroed
    lp = 1j * om * p.coeffs
    assert np.allclose(lp[keep], f.coeffs[keep], atol=1e-9)
    assert np.allclose(p.coeffs[~keep], 0.0)


def test_smallest_retained_frequency_resonant_lattice():
    # on an L1 = 2*L2 lattice the retained frequencies are multiples of 2pi/L1
    g = small_grid()
    assert smallest_retained_frequency(g) == pytest.approx(2 * np.pi / g.L1)


def test_elliptic_K_values():
    assert elliptic_K(0.0) == pytest.approx(np.pi / 2, rel=1e-15)
    assert elliptic_K(-1.0 / 3.0) == pytest.approx(1.4599026317063393, rel=1e-14)
    # quadrature oracle for a generic parameter
    theta = np.linspace(0.0, np.pi / 2, 20001)
    m = 0.73
    quad = np.trapezoid(1.0 / np.sqrt(1.0 - m * np.sin(theta) ** 2), theta)
    assert elliptic_K(m) == pytest.approx(quad, abs=1e-10)
    with pytest.raises(DomainError):
        elliptic_K(1.0)


def test_resonant_oracle_matches_quadrature():
    g = small_grid()
    plan = SamplingPlan(PERIODIC, 200, period=g.L1)
    avg = classical_coefficient_average(AdvectionParams(), g, plan)
    assert np.max(np.abs(avg - resonant_classical_oracle(g))) < 1e-12
    with pytest.raises(DomainError):
        resonant_classical_oracle(Grid2D(1.0, 1.0, 8, 8))


def test_quasiperiodic_oracle_matches_birkhoff():
    g = Grid2D(2.0 * np.pi, 1.0, 16, 8)
    plan = SamplingPlan(BIRKHOFF, 1000, stride=0.17321)
    avg = classical_coefficient_average(AdvectionParams(), g, plan)
    oracle = quasiperiodic_classical_oracle()
    assert oracle == pytest.approx(1.0731820071493645, rel=1e-14)
    assert oracle == pytest.approx(QUASIPERIODIC_COEFFICIENT * elliptic_K(-1.0 / 3.0))
    assert np.max(np.abs(avg - oracle)) < 1e-4


def test_classical_field_factorizes():
    # the averaged reaction is cos(w) times the coefficient average
    g = small_grid()
    plan = SamplingPlan(PERIODIC, 32, period=g.L1)
    rng = np.random.default_rng(2)
    w = SpectralField(g, rng.standard_normal(g.shape))
    got = pde_classical_field(AdvectionParams(), g, plan, w).values
    want = np.cos(w.values) * classical_coefficient_average(AdvectionParams(), g, plan)
    assert np.max(np.abs(got - want)) < 1e-14


def test_corrector_of_constant_field():
    # e^{Lt} of a constant is the constant, so C[v] = cos(v0)*c(x,y)
    g = small_grid()
    plan = SamplingPlan(PERIODIC, 16, period=g.L1)
    v = SpectralField(g, np.full(g.shape, 0.4))
    X, Y = g.points()
    c = AdvectionParams.coefficient(X, Y, g.L1, g.L2)
    got = pde_corrector(AdvectionParams(), g, plan, v).values
    assert np.max(np.abs(got - np.cos(0.4) * c)) < 1e-13


def test_improved_field_matches_classical_at_zero_eps():
    # at eps=0 both constructions average the same pullback; the pointwise
    # (classical) and spectral (improved) translations differ only through
    # spatial aliasing, which must decay spectrally with grid refinement
    params = AdvectionParams(epsilon=0.0)
    diffs = []
    for M1, M2 in ((16, 8), (32, 16), (64, 32)):
        g = Grid2D(2.0 * np.sqrt(3.0), np.sqrt(3.0), M1, M2)
        v = reference_initial_condition(g)
        plan = SamplingPlan(PERIODIC, 4 * M1, period=g.L1)
        cls = pde_classical_field(params, g, plan, v).values
        imp = pde_improved_field(params, g, plan, v).values
        diffs.append(np.max(np.abs(imp - cls)))
    assert diffs[1] < 1e-3 * diffs[0]
    assert diffs[2] < 1e-10


def test_benchmark_and_exp_integrator_agree():
    # fine enough grid that the spectral tail (which the two schemes damp
    # differently at the Nyquist rows) sits below the comparison tolerance
    g = small_grid(M1=48, M2=24)
    params = AdvectionParams(epsilon=0.01)
    u0 = reference_initial_condition(g)
    bench = pde_benchmark(params, g, u0, h=2e-4, T=1.0, stride=5000)
    strang = pde_exp_integrator(params, g, u0, h=1e-3, T=1.0, stride=1000)
    assert np.allclose(bench.times, strang.times)
    diff = np.max(np.abs(bench.states[-1] - strang.states[-1]))
    assert diff < 1e-7


def test_benchmark_warns_on_unstable_step():
    g = small_grid()
    u0 = reference_initial_condition(g)
    with pytest.warns(UserWarning):
        pde_benchmark(AdvectionParams(), g, u0, h=1.0, T=1.0)


def test_averaged_runs_track_benchmark():
    # coarse resonant case: both averaged methods track the truth and the
    # corrector-shifted one tracks it strictly better
    g = small_grid(M1=16, M2=8)
    params = AdvectionParams(epsilon=0.01)
    u0 = reference_initial_condition(g)
    T, step = 20.0, 5.0
    bench = pde_benchmark(params, g, u0, h=1e-3, T=T, stride=5000)
    plan = SamplingPlan(PERIODIC, 10, period=g.L1)
    errs = {}
    for kind in ("classical", "improved"):
        traj = pde_averaged_run(kind, params, g, u0, plan, h=step, T=T)
        rep = error_metrics(traj, bench)
        # 2-norm over grid points, normalized to an rms amplitude
        errs[kind] = rep.worst() / np.sqrt(g.M1 * g.M2)
    assert errs["improved"] < errs["classical"] / 3.0
    assert errs["classical"] < 1e-2


def test_averaged_run_unknown_kind():
    g = small_grid()
    with pytest.raises(ValueError):
        pde_averaged_run("midpoint", AdvectionParams(), g,
                         reference_initial_condition(g),
                         SamplingPlan(PERIODIC, 10, period=g.L1), h=1.0, T=1.0)
