"""Time steppers: RK4 for smooth (averaged) fields, a symmetric exponential
scheme for the stiff unaveraged system, and a 4th-order symplectic benchmark
for separable Hamiltonians."""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState

# Yoshida triple-jump coefficient for composing velocity Verlet to 4th order
_YOSH_C = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))


@dataclass
class Trajectory:
    times: np.ndarray       # strictly increasing, shape (n,)
    states: np.ndarray      # shape (n, d)
    method: str
    h: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _step_sizes(h: float, T: float):
    """Full steps of size h, with the last step shortened to land on T."""
    n_full = int(np.floor(T / h + 1e-12))
    rem = T - n_full * h
    steps = [h] * n_full
    if rem > 1e-12 * max(1.0, T):
        steps.append(rem)
    return steps


def _check_finite(x, t, times, states, method, h):
    if not np.all(np.isfinite(x)):
        raise NonFiniteState(
            f"{method}: non-finite state at t={t:.6g}",
            trajectory=Trajectory(np.array(times), np.array(states), method, h))


def rk4(field, x0, h: float, T: float, t0: float = 0.0) -> Trajectory:
    """Classical 4-stage Runge-Kutta for x' = field(x, t)."""
    x = np.array(x0, dtype=float)
    t = t0
    times = [t]
    states = [x.copy()]
    for dt in _step_sizes(h, T):
        k1 = np.asarray(field(x, t))
        k2 = np.asarray(field(x + 0.5 * dt * k1, t + 0.5 * dt))
        k3 = np.asarray(field(x + 0.5 * dt * k2, t + 0.5 * dt))
        k4 = np.asarray(field(x + dt * k3, t + dt))
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        _check_finite(x, t, times, states, "rk4", h)
        times.append(t)
        states.append(x.copy())
    return Trajectory(np.array(times), np.array(states), "rk4", h)


def exp_symmetric2(sys, x0, h: float, T: float, t0: float = 0.0) -> Trajectory:
    """Symmetric 2nd-order exponential stepper for x' = Omega x + eps F(x,t).

    Per step: half linear flow, midpoint-RK2 nonlinear kick at the midpoint
    time, half linear flow.  A plain Euler kick would drop the composition to
    first order whenever F depends on the kicked components, so the kick is
    taken through an explicit midpoint stage instead.
    """
    op, eps, F = sys.op, sys.epsilon, sys.nonlinearity
    x = np.array(x0, dtype=float)
    t = t0
    times = [t]
    states = [x.copy()]
    for dt in _step_sizes(h, T):
        x = op.flow(0.5 * dt, x)
        tm = t + 0.5 * dt
        mid = x + 0.5 * dt * eps * np.asarray(F(x, tm))
        x = x + dt * eps * np.asarray(F(mid, tm))
        x = op.flow(0.5 * dt, x)
        t += dt
        _check_finite(x, t, times, states, "exp_symmetric2", h)
        times.append(t)
        states.append(x.copy())
    return Trajectory(np.array(times), np.array(states), "exp_symmetric2", h)


def _verlet(grad_potential, q, p, dt):
    p = p - 0.5 * dt * np.asarray(grad_potential(q))
    q = q + dt * p
    p = p - 0.5 * dt * np.asarray(grad_potential(q))
    return q, p


def symplectic4(grad_potential, x0, h: float, T: float, t0: float = 0.0) -> Trajectory:
    """Yoshida triple-jump over velocity Verlet for H = |p|^2/2 + V(q).

    ``x0`` packs (q, p) as one vector of even length.
    """
    x = np.array(x0, dtype=float)
    nq = x.size // 2
    q, p = x[:nq].copy(), x[nq:].copy()
    t = t0
    times = [t]
    states = [x.copy()]
    c = _YOSH_C
    for dt in _step_sizes(h, T):
        q, p = _verlet(grad_potential, q, p, c * dt)
        q, p = _verlet(grad_potential, q, p, (1.0 - 2.0 * c) * dt)
        q, p = _verlet(grad_potential, q, p, c * dt)
        t += dt
        x = np.concatenate([q, p])
        _check_finite(x, t, times, states, "symplectic4", h)
        times.append(t)
        states.append(x)
    return Trajectory(np.array(times), np.array(states), "symplectic4", h)
