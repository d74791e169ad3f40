"""Time-averaging quadratures over oscillatory flows.

Two sampling modes:

* ``periodic`` — composite trapezoid over one period T with N equal steps; the
  endpoint coincides with the start, so the rule reduces to a plain mean of N
  left endpoints.  Spectrally accurate for T-periodic integrands.
* ``birkhoff`` — weighted Birkhoff mean with the exponential bump weights
  w_i = exp(-1/(tau(1-tau))), tau=(i+1)/(N+1), for quasiperiodic integrands
  sampled at a fixed stride.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import BudgetExceeded, WrongPlanMode

PERIODIC = "periodic"
BIRKHOFF = "birkhoff"


@dataclass(frozen=True)
class SamplingPlan:
    """Where and how to sample a time average.

    mode="periodic": samples t0 + i*period/n_samples, i=0..n-1, equal weights.
    mode="birkhoff": samples t0 + i*stride, i=0..n-1, bump weights.
    """

    mode: str
    n_samples: int
    period: float = 0.0     # periodic mode only
    stride: float = 0.0     # birkhoff mode only
    t0: float = 0.0

    def __post_init__(self):
        if self.mode not in (PERIODIC, BIRKHOFF):
            raise WrongPlanMode(f"unknown plan mode {self.mode!r}")
        if self.mode == PERIODIC and self.period <= 0:
            raise WrongPlanMode("periodic plan requires a positive period")
        if self.mode == BIRKHOFF and self.stride <= 0:
            raise WrongPlanMode("birkhoff plan requires a positive stride")
        if self.n_samples < 1:
            raise WrongPlanMode("plan needs at least one sample")

    def sample_times(self) -> np.ndarray:
        i = np.arange(self.n_samples)
        if self.mode == PERIODIC:
            return self.t0 + i * (self.period / self.n_samples)
        return self.t0 + i * self.stride

    def weights(self) -> np.ndarray:
        if self.mode == PERIODIC:
            return np.full(self.n_samples, 1.0 / self.n_samples)
        tau = (np.arange(self.n_samples) + 1.0) / (self.n_samples + 1.0)
        w = np.exp(-1.0 / (tau * (1.0 - tau)))
        return w / w.sum()

    def doubled(self) -> "SamplingPlan":
        return replace(self, n_samples=2 * self.n_samples)

    def at(self, t0: float) -> "SamplingPlan":
        """Same plan re-anchored at a new origin (averaging inside a stepper)."""
        return replace(self, t0=t0)


def plan_average(g, plan: SamplingPlan):
    """Weighted mean of g(t) over the plan's sample times."""
    times = plan.sample_times()
    w = plan.weights()
    acc = None
    for ti, wi in zip(times, w):
        v = wi * np.asarray(g(ti))
        acc = v if acc is None else acc + v
    return acc


def trapezoid_average(g, plan: SamplingPlan):
    """Composite-trapezoid mean of a period-T function: (1/N) sum g(t0+iT/N).

    The periodic endpoint identification makes trapezoid weights uniform.
    """
    if plan.mode != PERIODIC:
        raise WrongPlanMode("trapezoid_average needs a periodic plan")
    return plan_average(g, plan)


def birkhoff_average(g, plan: SamplingPlan):
    """Weighted Birkhoff mean of a quasiperiodic function."""
    if plan.mode != BIRKHOFF:
        raise WrongPlanMode("birkhoff_average needs a birkhoff plan")
    return plan_average(g, plan)


def plan_phase_error(plan: SamplingPlan, eigenphases, zero_tolerance: float = 1e-12) -> float:
    """How badly the plan fails to annihilate the pure modes e^{i lambda t}.

    Returns max over nonzero eigenphases of |weighted mean of e^{i lambda t}|;
    the true mean is 0 for every nonzero lambda, so this is a direct resolution
    test of the quadrature against the operator's own frequencies.  Equals the
    spectral norm of the averaged flow matrix restricted to the oscillatory
    eigendirections.
    """
    lam = np.asarray(eigenphases, dtype=float)
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    live = np.abs(lam) > zero_tolerance * max(1.0, scale)
    if not np.any(live):
        return 0.0
    times = plan.sample_times()
    w = plan.weights()
    means = np.exp(1j * np.outer(lam[live], times)) @ w
    return float(np.max(np.abs(means)))


def tune_samples(op, plan_template: SamplingPlan, target_error: float = 1e-9,
                 n_max: int = 1 << 22) -> SamplingPlan:
    """Grow n_samples until the plan averages e^{Omega t} to zero on the
    oscillatory part within ``target_error`` (the true average there is zero).

    Doubles N; raises BudgetExceeded (with the last plan and its achieved
    error attached) if ``n_max`` is passed first.
    """
    lam = op.eigenphases
    tol = getattr(op, "zero_tolerance", 1e-12)
    current = plan_template
    while True:
        err = plan_phase_error(current, lam, tol)
        if err <= target_error:
            return current
        if current.n_samples * 2 > n_max:
            raise BudgetExceeded(
                f"flow-average error {err:.3e} > {target_error:.3e} "
                f"at n_samples={current.n_samples}",
                plan=current, achieved_error=err)
        current = current.doubled()


def refine_until_stable(g, plan: SamplingPlan, rel_change_tol: float = 1e-10,
                        n_max: int = 1 << 22, abs_tol: float = 1e-13):
    """Average under doubling n_samples until two successive values agree.

    Returns (value, plan_used).  Raises BudgetExceeded with the last value
    attached if the budget runs out before stabilizing.
    """
    current = plan
    prev = np.asarray(plan_average(g, current))
    while current.n_samples * 2 <= n_max:
        nxt_plan = current.doubled()
        nxt = np.asarray(plan_average(g, nxt_plan))
        diff = np.max(np.abs(nxt - prev))
        scale = np.max(np.abs(nxt))
        if diff <= abs_tol + rel_change_tol * scale:
            return nxt, nxt_plan
        prev, current = nxt, nxt_plan
    raise BudgetExceeded(
        f"average not stable at n_samples={current.n_samples}",
        plan=current, achieved_error=None, value=prev)
