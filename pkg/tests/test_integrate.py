import numpy as np
import pytest

from oscavg.errors import NonFiniteState
from oscavg.integrate import exp_symmetric2, rk4, symplectic4
from oscavg.linear import block_rotation_operator
from oscavg.systems import OscillatorySystem


def test_rk4_exponential_decay():
    traj = rk4(lambda x, t: -x, np.array([1.0]), h=0.01, T=2.0)
    assert np.isclose(traj.final_state[0], np.exp(-2.0), atol=1e-10)


def test_rk4_fourth_order():
    def err(h):
        traj = rk4(lambda x, t: -x, np.array([1.0]), h=h, T=1.0)
        return abs(traj.final_state[0] - np.exp(-1.0))

    ratio = err(0.1) / err(0.05)
    assert 14.0 < ratio < 18.0


def test_partial_last_step_lands_on_T():
    traj = rk4(lambda x, t: np.zeros_like(x), np.array([1.0]), h=0.3, T=1.0)
    assert np.isclose(traj.final_time, 1.0, atol=1e-12)
    assert np.isclose(traj.times[-1] - traj.times[-2], 0.1, atol=1e-10)


def test_rk4_time_dependent_field():
    traj = rk4(lambda x, t: np.array([np.cos(t)]), np.array([0.0]), h=0.01, T=3.0)
    assert np.isclose(traj.final_state[0], np.sin(3.0), atol=1e-9)


def test_exp_symmetric2_exact_for_linear_system():
    op = block_rotation_operator([50.0])
    sys = OscillatorySystem(op=op, epsilon=0.0,
                            nonlinearity=lambda x, t: np.zeros(2))
    traj = exp_symmetric2(sys, np.array([1.0, 0.0]), h=0.5, T=10.0)
    # the stiff linear part is integrated exactly regardless of h
    assert np.allclose(traj.final_state,
                       [np.cos(500.0), np.sin(500.0)], atol=1e-10)


def test_exp_symmetric2_second_order():
    op = block_rotation_operator([1.0])
    sys = OscillatorySystem(op=op, epsilon=0.1,
                            nonlinearity=lambda x, t: -x)
    ref = exp_symmetric2(sys, np.array([1.0, 0.0]), h=1e-4, T=2.0).final_state

    def err(h):
        traj = exp_symmetric2(sys, np.array([1.0, 0.0]), h=h, T=2.0)
        return np.linalg.norm(traj.final_state - ref)

    ratio = err(0.4) / err(0.2)
    assert 3.5 < ratio < 4.5


def test_symplectic4_energy_bounded():
    # harmonic oscillator: V = q^2 / 2
    traj = symplectic4(lambda q: q, np.array([1.0, 0.0]), h=0.1, T=200.0)
    energy = 0.5 * (traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2)
    assert np.max(np.abs(energy - 0.5)) < 1e-5


def test_symplectic4_fourth_order():
    def err(h):
        traj = symplectic4(lambda q: q, np.array([1.0, 0.0]), h=h, T=1.0)
        return np.linalg.norm(traj.final_state - [np.cos(1.0), -np.sin(1.0)])

    ratio = err(0.1) / err(0.05)
    assert 12.0 < ratio < 20.0


def test_nonfinite_state_carries_truncated_trajectory():
    def blowup(x, t):
        return x ** 3

    with pytest.raises(NonFiniteState) as exc:
        rk4(blowup, np.array([10.0]), h=0.5, T=10.0)
    traj = exc.value.trajectory
    assert traj is not None
    assert traj.times.size >= 1
    assert np.all(np.isfinite(traj.states))


def test_trajectory_properties():
    traj = rk4(lambda x, t: np.zeros_like(x), np.array([3.0, -1.0]), h=0.5, T=2.0)
    assert traj.method == "rk4"
    assert traj.h == 0.5
    assert traj.states.shape == (len(traj.times), 2)
    assert np.allclose(traj.final_state, [3.0, -1.0])
