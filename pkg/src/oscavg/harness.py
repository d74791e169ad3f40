"""Experiment harness: configuration, steady-state statistics, error metrics
against benchmark trajectories, and CSV emission."""

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .averaging import SamplingPlan, trapezoid_average
from .errors import ConfigError, NoSharedTimes, WindowTooShort
from .integrate import Trajectory, rk4
from .systems import (classical_field, improved_field, lift_initial,
                      reconstruct)
from . import cput, fpu, wave


# ------------------------------------------------------------- configuration

def _parse_value(text: str):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


@dataclass
class ExperimentConfig:
    """Flat key=value configuration with typed access."""

    suite: str
    values: dict = field(default_factory=dict)

    SUITES = ("cput", "fpu", "wave", "avgcheck")

    def __post_init__(self):
        if self.suite not in self.SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {self.SUITES}")

    @classmethod
    def from_sources(cls, suite: str, config_file: str = None, overrides=()):
        values = {}
        if config_file:
            try:
                with open(config_file) as fh:
                    for line_no, line in enumerate(fh, 1):
                        line = line.split("#", 1)[0].strip()
                        if not line:
                            continue
                        if "=" not in line:
                            raise ConfigError(
                                f"{config_file}:{line_no}: expected key=value, got {line!r}")
                        key, val = line.split("=", 1)
                        values[key.strip()] = _parse_value(val)
            except OSError as exc:
                raise ConfigError(str(exc)) from exc
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            key, val = item.split("=", 1)
            values[key.strip()] = _parse_value(val)
        return cls(suite, values)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def getf(self, key, default):
        v = self.values.get(key, default)
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r} must be numeric, got {v!r}")

    def geti(self, key, default):
        v = self.values.get(key, default)
        try:
            return int(v)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r} must be an integer, got {v!r}")


# ------------------------------------------------------------- statistics

def steady_state_stats(traj: Trajectory, component: int, window: float = 0.2,
                       min_periods: float = None):
    """Trailing-window mean and oscillation amplitude of one state component.

    amplitude = half the peak-to-trough span after removing the window mean;
    ``min_periods`` (period length in trajectory time units) enforces that the
    window spans at least 10 oscillations.
    """
    if not 0 < window <= 1:
        raise WindowTooShort("window fraction must lie in (0, 1]")
    t = traj.times
    start = t[-1] - window * (t[-1] - t[0])
    sel = t >= start
    if min_periods is not None and (t[-1] - start) < 10 * min_periods:
        raise WindowTooShort(
            f"window covers {(t[-1]-start)/min_periods:.1f} periods, need >= 10")
    x = traj.states[sel, component]
    mean = float(np.mean(x))
    return {"amplitude": float(0.5 * (np.max(x) - np.min(x))), "mean": mean}


@dataclass
class ErrorReport:
    times: np.ndarray
    errors: dict           # name -> per-time error array
    time_mean: dict        # name -> scalar

    def worst(self):
        return max(self.time_mean.values())


def error_metrics(candidate: Trajectory, benchmark: Trajectory,
                  observables: dict = None, time_tol: float = 1e-9) -> ErrorReport:
    """Per-time 2-norm differences at exactly shared output times.

    ``observables`` maps a name to a callable state -> vector; default is the
    identity on the whole state.  Time means are plain averages over the
    shared times (excluding t=0 would bias constant-error cases; it is kept).
    """
    if observables is None:
        observables = {"state": lambda s: s}
    ib, ic = [], []
    jb = 0
    for i, t in enumerate(candidate.times):
        while jb < len(benchmark.times) and benchmark.times[jb] < t - time_tol:
            jb += 1
        if jb < len(benchmark.times) and abs(benchmark.times[jb] - t) <= time_tol:
            ic.append(i)
            ib.append(jb)
    if not ic:
        raise NoSharedTimes("candidate and benchmark share no output times")
    times = candidate.times[ic]
    errors, means = {}, {}
    for name, obs in observables.items():
        e = np.array([np.linalg.norm(np.asarray(obs(candidate.states[i]))
                                     - np.asarray(obs(benchmark.states[j])))
                      for i, j in zip(ic, ib)])
        errors[name] = e
        means[name] = float(np.mean(e))
    return ErrorReport(times, errors, means)


# ------------------------------------------------------------- CSV output

def write_trajectory_csv(path: str, traj: Trajectory, columns=None):
    d = traj.states.shape[1]
    if columns is None:
        columns = [f"x{i}" for i in range(d)]
    header = ",".join(["t"] + list(columns))
    data = np.column_stack([traj.times, traj.states])
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def write_error_csv(path: str, report: ErrorReport):
    names = sorted(report.errors)
    header = ",".join(["t"] + names)
    data = np.column_stack([report.times] + [report.errors[n] for n in names])
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def write_metadata(path: str, config: ExperimentConfig, extra: dict = None):
    with open(path, "w") as fh:
        fh.write(f"suite={config.suite}\n")
        fh.write(f"oscavg_version={__version__}\n")
        for k in sorted(config.values):
            fh.write(f"{k}={config.values[k]}\n")
        for k in sorted(extra or {}):
            fh.write(f"{k}={extra[k]}\n")


# ------------------------------------------------------------- FPU pipeline

def fpu_averaged_trajectory(params: fpu.FpuParams, kind: str, u0,
                            h: float = 0.05, T: float = None,
                            n_samples: int = 10) -> Trajectory:
    """Integrate the averaged canonical-form system in physical time s.

    du/ds = omega*eps*AvgField(u) = AvgField(u) since eps = 1/omega; states
    are reconstructed to the original frame at tau = omega*s before return.
    """
    T = 2.0 * params.omega if T is None else T
    sysm = fpu.to_canonical_form(params)
    plan = SamplingPlan("periodic", n_samples, period=2.0 * np.pi)
    if kind == "classical":
        z0 = np.asarray(u0, dtype=float)
        fld = lambda u, s: classical_field(sysm, plan, u)
    elif kind == "improved":
        z0 = lift_initial(sysm, plan, np.asarray(u0, dtype=float))
        fld = lambda u, s: improved_field(sysm, plan, u)
    else:
        raise ConfigError(f"unknown averaging kind {kind!r}")
    traj = rk4(fld, z0, h, T)
    states = np.array([reconstruct(kind, sysm, plan, params.omega * s, u)
                       for s, u in zip(traj.times, traj.states)])
    return Trajectory(traj.times, states, f"{kind}_averaged", h)


def fpu_observables(params: fpu.FpuParams):
    m = params.m
    return {
        "q_slow": lambda u: u[:m],
        "p_slow": lambda u: u[m:2 * m],
        "q_fast": lambda u: u[2 * m:3 * m],
        "v_fast": lambda u: u[3 * m:],
        "I": lambda u: fpu.stiff_energies_canonical(params, u),
    }


def fpu_benchmark_canonical(params: fpu.FpuParams, q0, p0, h: float = None,
                            T: float = None, stride: int = 1000) -> Trajectory:
    bench = fpu.benchmark_trajectory(params, q0, p0, h=h, T=T, stride=stride)
    n = params.m * 2
    states = np.array([fpu.pack_canonical(params, s[:n], s[n:])
                       for s in bench.states])
    return Trajectory(bench.times, states, bench.method, bench.h)


def run_fpu(config: ExperimentConfig, outdir: str):
    params = fpu.FpuParams(m=config.geti("m", 3), omega=config.getf("omega", 200.0))
    T = config.getf("T", 2.0 * params.omega)
    h_avg = config.getf("h", 0.05)
    n_samples = config.geti("N", 10)
    h_bench = config.getf("h_bench", 0.01 / params.omega)
    stride = config.geti("stride", max(1, int(round(h_avg / h_bench))))
    q0 = np.zeros(2 * params.m)
    p0 = fpu.REFERENCE_P0 if params.m == 3 else np.zeros(2 * params.m)
    u0 = fpu.pack_canonical(params, q0, p0)
    methods = str(config.get("methods", "benchmark,classical,improved")).split(",")
    obs = fpu_observables(params)
    results, timings = {}, {}
    if "benchmark" in methods:
        t0 = time.perf_counter()
        results["benchmark"] = fpu_benchmark_canonical(params, q0, p0,
                                                       h=h_bench, T=T, stride=stride)
        timings["benchmark"] = time.perf_counter() - t0
    for kind in ("classical", "improved"):
        if kind in methods:
            t0 = time.perf_counter()
            results[kind] = fpu_averaged_trajectory(params, kind, u0,
                                                    h=h_avg, T=T, n_samples=n_samples)
            timings[kind] = time.perf_counter() - t0
    cols = ([f"q{i+1}" for i in range(2 * params.m)]
            + [f"v{i+1}" for i in range(2 * params.m)])
    reports = {}
    for name, traj in results.items():
        write_trajectory_csv(os.path.join(outdir, f"fpu_{name}.csv"), traj, cols)
        if name != "benchmark" and "benchmark" in results:
            rep = error_metrics(traj, results["benchmark"], obs)
            reports[name] = rep
            write_error_csv(os.path.join(outdir, f"fpu_{name}_errors.csv"), rep)
    meta = {f"walltime_{k}": f"{v:.3f}" for k, v in timings.items()}
    for name, rep in reports.items():
        for k, v in rep.time_mean.items():
            meta[f"time_mean_error_{name}_{k}"] = f"{v:.6e}"
    write_metadata(os.path.join(outdir, "fpu_metadata.txt"), config, meta)
    return results, reports


# ------------------------------------------------------------ CPUT pipeline

def cput_classical_fixed_point(p: cput.CputParams, guess, n_samples: int = 64):
    """Fixed point of the numerically averaged hat-polar (no mean shift) system."""
    plan = SamplingPlan("periodic", n_samples, period=p.period)

    def fld(s):
        return trapezoid_average(
            lambda t: cput.polar_rates(p, s, t, improved=False), plan)

    return cput.fixed_point_numeric(p, guess, field=fld)


def cput_table(config: ExperimentConfig):
    """Steady-state oscillation parameters: truth vs the three predictions."""
    p = cput.REFERENCE
    T = config.getf("T", 3000.0)
    h = config.getf("h", 0.01)
    window = config.getf("window", 0.2)
    truth = cput.truth_trajectory(p, h=h, T=T, stride=config.geti("stride", 10))
    v_stats = steady_state_stats(truth, 0, window, min_periods=p.period)
    y_stats = steady_state_stats(truth, 2, window, min_periods=p.period / 2)
    pert = cput.perturbative_fixed_point(p)
    guess = [pert.rho, 1.0, pert.r, -2.4]
    numeric = cput.fixed_point_numeric(p, guess)
    rho_n, _, r_n, _ = numeric.state
    classical = cput_classical_fixed_point(p, guess)
    rho_c, _, r_c, _ = classical.state
    table = {
        "truth": {"V_amplitude": v_stats["amplitude"], "V_mean": v_stats["mean"],
                  "y_amplitude": y_stats["amplitude"], "y_mean": y_stats["mean"]},
        "improved_numeric": {"V_amplitude": float(rho_n), "V_mean": 0.0,
                             "y_amplitude": float(r_n),
                             "y_mean": cput.mean_shift(p, rho_n)},
        "improved_perturbative": {"V_amplitude": pert.rho, "V_mean": 0.0,
                                  "y_amplitude": pert.r, "y_mean": pert.y_mean},
        "classical": {"V_amplitude": float(rho_c), "V_mean": 0.0,
                      "y_amplitude": float(r_c), "y_mean": 0.0},
    }
    return table, truth


def run_cput(config: ExperimentConfig, outdir: str):
    mode = config.get("mode", "steady")
    meta = {}
    truth = None
    if mode in ("steady", "all"):
        table, truth = cput_table(config)
        write_trajectory_csv(os.path.join(outdir, "cput_truth.csv"), truth,
                             ["V", "U", "y", "z"])
        with open(os.path.join(outdir, "cput_table.csv"), "w") as fh:
            fh.write("method,V_amplitude,V_mean,y_amplitude,y_mean\n")
            for name, row in table.items():
                fh.write(f"{name},{row['V_amplitude']:.6f},{row['V_mean']:.6f},"
                         f"{row['y_amplitude']:.6f},{row['y_mean']:.6f}\n")
    if mode in ("basin", "all"):
        t0 = time.perf_counter()
        scan = cput.basin_scan(cput.REFERENCE, *cput.desk_grid(),
                               h=config.getf("h", 0.01), T=config.getf("T_basin", 450.0))
        meta.update(basin_max_residual=f"{scan.max_residual:.6e}",
                    basin_max_distance=f"{scan.max_distance:.6e}",
                    basin_count=scan.count, basin_failures=scan.failures,
                    walltime_basin=f"{time.perf_counter() - t0:.3f}")
    write_metadata(os.path.join(outdir, "cput_metadata.txt"), config, meta)


# ------------------------------------------------------------ wave pipeline

WAVE_CASES = {
    "resonant_2root3": dict(L1=2.0 * np.sqrt(3.0), L2=np.sqrt(3.0)),
    "resonant_root2": dict(L1=np.sqrt(2.0), L2=2.0 * np.sqrt(2.0)),
    "quasiperiodic": dict(L1=2.0 * np.pi, L2=1.0),
}


def wave_plan(case: str, grid: wave.Grid2D, n_samples: int, t0: float = 0.0):
    if case == "quasiperiodic":
        return SamplingPlan("birkhoff", n_samples, stride=0.17321, t0=t0)
    if abs(grid.L1 - 2.0 * grid.L2) < 1e-12:
        period = grid.L1          # lcm(2*L2, L2)
    elif abs(grid.L2 - 2.0 * grid.L1) < 1e-12:
        period = grid.L2
    else:
        raise ConfigError(f"no period rule for L1={grid.L1}, L2={grid.L2}")
    return SamplingPlan("periodic", n_samples, period=period, t0=t0)


def run_wave_case(case: str, config: ExperimentConfig):
    dims = WAVE_CASES[case]
    grid = wave.Grid2D(dims["L1"], dims["L2"],
                       config.geti("M1", 50), config.geti("M2", 20))
    params = wave.AdvectionParams(epsilon=config.getf("epsilon", 0.01))
    T = config.getf("T", 2.0 / params.epsilon)
    h = config.getf("h", 10.0)
    n_samples = config.geti("N", 1000 if case == "quasiperiodic" else 10)
    h_bench = config.getf("h_bench", 1e-3)
    u0 = wave.reference_initial_condition(grid)
    methods = str(config.get("methods", "benchmark,exp,classical,improved")).split(",")
    plan = wave_plan(case, grid, n_samples)
    results, timings = {}, {}
    if "benchmark" in methods:
        t0 = time.perf_counter()
        results["benchmark"] = wave.pde_benchmark(
            params, grid, u0, h_bench, T, stride=int(round(h / h_bench)))
        timings["benchmark"] = time.perf_counter() - t0
    if "exp" in methods:
        t0 = time.perf_counter()
        results["exp"] = wave.pde_exp_integrator(params, grid, u0, h, T)
        timings["exp"] = time.perf_counter() - t0
    for kind in ("classical", "improved"):
        if kind in methods:
            t0 = time.perf_counter()
            results[kind] = wave.pde_averaged_run(kind, params, grid, u0, plan, h, T)
            timings[kind] = time.perf_counter() - t0
    n_grid = grid.M1 * grid.M2
    obs = {"u_rms": lambda s: s / np.sqrt(n_grid)}
    reports = {name: error_metrics(traj, results["benchmark"], obs)
               for name, traj in results.items()
               if name != "benchmark" and "benchmark" in results}
    return grid, results, reports, timings


def run_wave(config: ExperimentConfig, outdir: str):
    cases = str(config.get("cases", "resonant_2root3")).split(",")
    meta = {}
    for case in cases:
        if case not in WAVE_CASES:
            raise ConfigError(f"unknown wave case {case!r}; choose from {sorted(WAVE_CASES)}")
        grid, results, reports, timings = run_wave_case(case, config)
        for name, traj in results.items():
            write_trajectory_csv(os.path.join(outdir, f"wave_{case}_{name}.csv"), traj)
        for name, rep in reports.items():
            write_error_csv(os.path.join(outdir, f"wave_{case}_{name}_errors.csv"), rep)
            meta[f"{case}_time_mean_error_{name}"] = f"{rep.time_mean['u_rms']:.6e}"
        for k, v in timings.items():
            meta[f"walltime_{case}_{k}"] = f"{v:.3f}"
        if "classical" in reports and "improved" in reports:
            factor = reports["classical"].time_mean["u_rms"] / reports["improved"].time_mean["u_rms"]
            meta[f"{case}_improvement_factor"] = f"{factor:.3f}"
    write_metadata(os.path.join(outdir, "wave_metadata.txt"), config, meta)


# --------------------------------------------------------- avgcheck pipeline

def random_trig_system(rng, dim_max: int = 8):
    """A random small oscillatory system with trigonometric-polynomial forcing.

    Integer eigenphases and forcing frequencies keep everything 2*pi periodic,
    so a modest periodic plan resolves the averages exactly.
    """
    from .linear import make_operator
    from .systems import OscillatorySystem
    d = int(rng.integers(2, dim_max + 1))
    lam = rng.integers(-4, 5, size=d).astype(float)
    herm = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, _ = np.linalg.qr(herm)
    mat = q @ np.diag(1j * lam) @ q.conj().T
    mat = 0.5 * (mat - mat.conj().T)
    op = make_operator(mat)
    n_force = int(rng.integers(1, 4))
    freqs = rng.integers(1, 5, size=n_force).astype(float)
    amps = rng.standard_normal((n_force, d))
    lin = rng.standard_normal((d, d)) / d
    quad = rng.standard_normal((d, d)) / (2 * d)

    def F(x, t):
        out = lin @ x + quad @ (np.asarray(x) ** 2)
        for a, nu in zip(amps, freqs):
            out = out + a * np.cos(nu * t)
        return out

    return OscillatorySystem(op=op, epsilon=0.01, nonlinearity=F,
                             forcing_frequencies=tuple(freqs)), lam, freqs


def run_avgcheck(config: ExperimentConfig, outdir: str):
    from .systems import fluctuation_diagnostic
    rng = np.random.default_rng(config.geti("seed", 0))
    n_systems = config.geti("systems", 20)
    n_states = config.geti("states", 10)
    rows = []
    for si in range(n_systems):
        sysm, lam, freqs = random_trig_system(rng)
        max_harm = max(np.max(np.abs(lam)), np.max(freqs))
        n = int(2 ** np.ceil(np.log2(4 * max_harm + 8)))
        plan = SamplingPlan("periodic", n, period=2.0 * np.pi)
        for _ in range(n_states):
            x = rng.standard_normal(sysm.dimension)
            normF, normG, cross = fluctuation_diagnostic(sysm, plan, x)
            rows.append((si, normF, normG, cross))
    path = os.path.join(outdir, "avgcheck.csv")
    with open(path, "w") as fh:
        fh.write("system,normF,normG,cross\n")
        for r in rows:
            fh.write(f"{r[0]},{r[1]:.12e},{r[2]:.12e},{r[3]:.12e}\n")
    write_metadata(os.path.join(outdir, "avgcheck_metadata.txt"), config,
                   {"rows": len(rows)})
    return rows


RUNNERS = {"cput": run_cput, "fpu": run_fpu, "wave": run_wave,
           "avgcheck": run_avgcheck}


def run(config: ExperimentConfig, outdir: str):
    os.makedirs(outdir, exist_ok=True)
    return RUNNERS[config.suite](config, outdir)
