import numpy as np
import pytest

from oscavg.averaging import PERIODIC, SamplingPlan
from oscavg.harness import random_trig_system
from oscavg.linear import block_rotation_operator
from oscavg.systems import (CLASSICAL, IMPROVED, OscillatorySystem,
                            averaged_trajectory, classical_field, corrector,
                            corrector_shift, fluctuation_diagnostic,
                            fluctuation_moments, improved_field, lift_initial,
                            reconstruct, reconstruct_trajectory)

PLAN = SamplingPlan(PERIODIC, 32, period=2 * np.pi)


def constant_forcing_system(eps=1e-3):
    op = block_rotation_operator([1.0])
    return OscillatorySystem(op=op, epsilon=eps,
                             nonlinearity=lambda x, t: np.array([1.0, 0.0]),
                             plan=PLAN)


def test_classical_field_of_constant_forcing_is_zero():
    # e^{-Omega t} c averages to zero over a full period
    sys = constant_forcing_system()
    assert np.allclose(classical_field(sys, PLAN, np.array([0.3, -0.2])),
                       0.0, atol=1e-14)


def test_corrector_of_constant_forcing_is_the_constant():
    sys = constant_forcing_system()
    c = corrector(sys, PLAN, np.array([1.0, 1.0]))
    assert np.allclose(c, [1.0, 0.0], atol=1e-14)
    p = corrector_shift(sys, PLAN, np.array([1.0, 1.0]))
    assert np.allclose(sys.op.apply(p), [1.0, 0.0], atol=1e-13)


def test_corrector_of_zero_mean_forcing_vanishes():
    op = block_rotation_operator([1.0])
    sys = OscillatorySystem(op=op, epsilon=0.01,
                            nonlinearity=lambda x, t: np.cos(3 * t) * np.ones(2))
    assert np.allclose(corrector(sys, PLAN, np.zeros(2)), 0.0, atol=1e-14)


def test_constant_forcing_exact_solution():
    # x' = Omega x + eps c has exact solution through the shifted center
    # -eps Omega^{-1} c; the improved construction reproduces it to roundoff.
    sys = constant_forcing_system(eps=1e-3)
    x0 = np.array([1.0, 0.0])
    shift = sys.epsilon * sys.op.pinv_apply(np.array([1.0, 0.0]))
    traj = averaged_trajectory(IMPROVED, sys, PLAN, x0, h=1.0, T=50.0)
    rec = reconstruct_trajectory(IMPROVED, sys, PLAN, traj)
    exact = np.array([sys.op.flow(t, x0 + shift) - shift for t in rec.times])
    assert np.max(np.abs(rec.states - exact)) < 1e-12


def test_improved_reduces_to_classical_as_eps_vanishes():
    op = block_rotation_operator([1.0, 2.0])
    rng = np.random.default_rng(5)
    lin = rng.standard_normal((4, 4))

    def F(x, t):
        return lin @ x + np.array([np.cos(t), 0.0, np.sin(2 * t), 0.0])

    z = rng.standard_normal(4)
    plan = SamplingPlan(PERIODIC, 64, period=2 * np.pi)
    f_cls = None
    for eps in (1e-2, 1e-4, 1e-6):
        sys = OscillatorySystem(op=op, epsilon=eps, nonlinearity=F)
        f_imp = improved_field(sys, plan, z)
        f_cls = classical_field(sys, plan, z)
        assert np.max(np.abs(f_imp - f_cls)) < 10.0 * eps


def test_field_method_assembles_full_rhs():
    sys = constant_forcing_system(eps=0.5)
    x = np.array([2.0, -1.0])
    got = sys.field(x, 0.0)
    assert np.allclose(got, sys.op.apply(x) + 0.5 * np.array([1.0, 0.0]))


def test_lift_initial_first_order():
    sys = constant_forcing_system(eps=1e-3)
    x0 = np.array([1.0, 2.0])
    z0 = lift_initial(sys, PLAN, x0)
    assert np.allclose(z0 - x0,
                       sys.epsilon * corrector_shift(sys, PLAN, x0))


def test_reconstruct_kinds():
    sys = constant_forcing_system()
    s = np.array([0.1, 0.7])
    assert np.allclose(reconstruct(CLASSICAL, sys, PLAN, 1.3, s),
                       sys.op.flow(1.3, s))
    imp = reconstruct(IMPROVED, sys, PLAN, 1.3, s)
    assert np.allclose(imp, sys.op.flow(1.3, s)
                       - sys.epsilon * corrector_shift(sys, PLAN, s))
    with pytest.raises(ValueError):
        reconstruct("midpoint", sys, PLAN, 0.0, s)


def test_averaged_trajectory_unknown_kind():
    sys = constant_forcing_system()
    with pytest.raises(ValueError):
        averaged_trajectory("midpoint", sys, PLAN, np.zeros(2), h=1.0, T=1.0)


def test_fluctuation_moments_pythagoras_and_orthogonality():
    rng = np.random.default_rng(11)
    for _ in range(5):
        sys, lam, freqs = random_trig_system(rng)
        max_harm = max(np.max(np.abs(lam)), np.max(freqs))
        n = 1 << int(np.ceil(np.log2(4 * max_harm + 8)))
        plan = SamplingPlan(PERIODIC, n, period=2 * np.pi)
        x = rng.standard_normal(sys.dimension)
        m = fluctuation_moments(sys, plan, x)
        assert abs(m[2]) / (1.0 + m[0]) < 1e-10            # cross term
        assert m[1] <= m[0] + 1e-10 * (1.0 + m[0])         # variance drop
        assert abs(m[0] - (m[1] + m[3])) < 1e-8 * (1.0 + m[0])


def test_fluctuation_diagnostic_consistency():
    rng = np.random.default_rng(2)
    sys, _, _ = random_trig_system(rng)
    plan = SamplingPlan(PERIODIC, 64, period=2 * np.pi)
    x = rng.standard_normal(sys.dimension)
    normf, normg, cross = fluctuation_diagnostic(sys, plan, x)
    m = fluctuation_moments(sys, plan, x)
    assert np.isclose(normf, np.sqrt(m[0]))
    assert np.isclose(normg, np.sqrt(m[1]))
    assert np.isclose(cross, m[2])
    assert normg <= normf + 1e-12
