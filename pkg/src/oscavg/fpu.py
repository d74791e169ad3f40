"""Alternating soft/stiff spring lattice (Fermi-Pasta-Ulam type).

Physical chain of 2m unit masses with quartic soft springs and stiff linear
springs of frequency omega.  A 45-degree canonical rotation decouples each
stiff pair into a slow coordinate q_i (i=1..m) and a fast one q_{m+i}; after
rescaling the fast momenta by omega and slowing time by the same factor the
system takes the standard oscillatory form with eps = 1/omega and a linear
part of rank 2m (m unit-frequency rotation blocks).

Canonical-form state packing (d = 4m):

    [q_slow (m), v_slow (m), q_fast (m), v_fast (m)],  v_fast = p_fast/omega.

For m=3 the closed-form classically averaged field is included verbatim as an
oracle; 10 equispaced samples over one 2*pi period reproduce it to machine
precision.
"""

from dataclasses import dataclass

import numpy as np

from .accel import maybe_jit
from .errors import DimensionMismatch, WrongDimension
from .integrate import Trajectory
from .linear import make_operator
from .systems import OscillatorySystem


@dataclass(frozen=True)
class FpuParams:
    m: int = 3
    omega: float = 200.0

    def __post_init__(self):
        if self.m < 1:
            raise DimensionMismatch("need at least one stiff spring")
        if self.omega <= 1:
            raise DimensionMismatch("omega must exceed 1 (stiff regime)")

    @property
    def epsilon(self) -> float:
        return 1.0 / self.omega

    @property
    def dimension(self) -> int:
        return 4 * self.m


def coupling_terms(m: int, q: np.ndarray) -> np.ndarray:
    """The m+1 quartic-spring elongations t_0..t_m in rotated coordinates.

    t_0 = q_1 - q_{m+1};  t_i = (q_{i+1} - q_{m+i+1}) - (q_i + q_{m+i}) for
    0 < i < m;  t_m = q_m + q_{2m}.  The sign on q_{m+i} in the middle terms
    follows from substituting the rotation into the physical potential: the
    left end of soft spring i+1 is Q_{2i} = (q_i + q_{m+i})/sqrt(2).
    """
    t = np.empty(m + 1)
    t[0] = q[0] - q[m]
    for i in range(1, m):
        t[i] = (q[i] - q[m + i]) - (q[i - 1] + q[m + i - 1])
    t[m] = q[m - 1] + q[2 * m - 1]
    return t


def quartic_potential(m: int, q: np.ndarray) -> float:
    """U(q) = (1/4) sum t_j^4 over the soft-spring elongations."""
    return 0.25 * float(np.sum(coupling_terms(m, q) ** 4))


def quartic_forces(m: int, q: np.ndarray):
    """-(grad U) split into its slow and fast blocks (f, g)."""
    t3 = coupling_terms(m, q) ** 3
    f = np.empty(m)
    g = np.empty(m)
    for i in range(m):          # slow: q_i sits in t_{i-1} (+) and t_i (-, or + at i=m-1)
        if i < m - 1:
            f[i] = -(t3[i] - t3[i + 1])
            g[i] = t3[i] + t3[i + 1]
        else:
            f[i] = -(t3[m - 1] + t3[m])
            g[i] = t3[m - 1] - t3[m]
    return f, g


def hamiltonian(p: FpuParams, q: np.ndarray, p_mom: np.ndarray) -> float:
    """H = |p|^2/2 + (omega^2/2) sum q_fast^2 + U(q) in rotated coordinates."""
    q = np.asarray(q, dtype=float)
    p_mom = np.asarray(p_mom, dtype=float)
    if q.size != 2 * p.m or p_mom.size != 2 * p.m:
        raise DimensionMismatch(f"expected vectors of length {2 * p.m}")
    return (0.5 * float(p_mom @ p_mom)
            + 0.5 * p.omega ** 2 * float(q[p.m:] @ q[p.m:])
            + quartic_potential(p.m, q))


def grad_potential(p: FpuParams, q: np.ndarray) -> np.ndarray:
    """Gradient of the full potential (stiff quadratic + quartic coupling)."""
    f, g = quartic_forces(p.m, q)
    out = np.concatenate([-f, -g])
    out[p.m:] += p.omega ** 2 * q[p.m:]
    return out


def canonical_transform(Q: np.ndarray, P: np.ndarray):
    """Physical (Q,P) -> rotated (q,p): pairwise 45-degree rotation."""
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    if Q.size % 2 or Q.size != P.size:
        raise DimensionMismatch("need even, equal-length Q and P")
    m = Q.size // 2
    s = 1.0 / np.sqrt(2.0)
    q = np.concatenate([(Q[1::2] + Q[0::2]) * s, (Q[1::2] - Q[0::2]) * s])
    p = np.concatenate([(P[1::2] + P[0::2]) * s, (P[1::2] - P[0::2]) * s])
    return q, p


def canonical_transform_inverse(q: np.ndarray, p: np.ndarray):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.size % 2 or q.size != p.size:
        raise DimensionMismatch("need even, equal-length q and p")
    m = q.size // 2
    s = 1.0 / np.sqrt(2.0)
    Q = np.empty_like(q)
    P = np.empty_like(p)
    Q[0::2] = (q[:m] - q[m:]) * s
    Q[1::2] = (q[:m] + q[m:]) * s
    P[0::2] = (p[:m] - p[m:]) * s
    P[1::2] = (p[:m] + p[m:]) * s
    return Q, P


def pack_canonical(p: FpuParams, q: np.ndarray, p_mom: np.ndarray) -> np.ndarray:
    """(q,p) -> canonical-form state [q_slow, v_slow, q_fast, v_fast]."""
    m = p.m
    return np.concatenate([q[:m], p_mom[:m], q[m:], p_mom[m:] / p.omega])


def unpack_canonical(p: FpuParams, u: np.ndarray):
    m = p.m
    q = np.concatenate([u[:m], u[2 * m:3 * m]])
    p_mom = np.concatenate([u[m:2 * m], u[3 * m:] * p.omega])
    return q, p_mom


def canonical_nonlinearity(p: FpuParams, u: np.ndarray, t: float = 0.0) -> np.ndarray:
    """F of the canonical form: (v_slow, f, 0, g/omega), autonomous.

    In the slowed time tau = omega*s the system is u' = Omega u + eps*F(u)
    with eps = 1/omega; equivalently du/ds = F(u) in physical time, since
    omega*eps = 1.
    """
    m = p.m
    q = np.concatenate([u[:m], u[2 * m:3 * m]])
    f, g = quartic_forces(m, q)
    return np.concatenate([u[m:2 * m], f, np.zeros(m), g / p.omega])


def to_canonical_form(p: FpuParams) -> OscillatorySystem:
    """Oscillatory-form system: m zero blocks (slow) + m unit rotation blocks."""
    m = p.m
    d = 4 * m
    mat = np.zeros((d, d))
    for i in range(m):      # fast pair: q' = v, v' = -q (unit frequency in slowed time)
        mat[2 * m + i, 3 * m + i] = 1.0
        mat[3 * m + i, 2 * m + i] = -1.0
    op = make_operator(mat)
    return OscillatorySystem(
        op=op,
        epsilon=p.epsilon,
        nonlinearity=lambda u, t: canonical_nonlinearity(p, u, t),
        name=f"fpu_m{p.m}_w{p.omega:g}",
    )


def stiff_energies(p: FpuParams, q: np.ndarray, p_mom: np.ndarray) -> np.ndarray:
    """Harmonic energies I_i = (p_fast_i^2 + omega^2 q_fast_i^2)/2 of the stiff modes."""
    q = np.asarray(q, dtype=float)
    p_mom = np.asarray(p_mom, dtype=float)
    if q.size != 2 * p.m or p_mom.size != 2 * p.m:
        raise DimensionMismatch(f"expected vectors of length {2 * p.m}")
    return 0.5 * (p_mom[p.m:] ** 2 + p.omega ** 2 * q[p.m:] ** 2)


def stiff_energies_canonical(p: FpuParams, u: np.ndarray) -> np.ndarray:
    """Same energies from a canonical-form state (v_fast = p_fast/omega)."""
    m = p.m
    return 0.5 * p.omega ** 2 * (u[3 * m:] ** 2 + u[2 * m:3 * m] ** 2)


# --------------------------------------------------------------- m=3 oracle

def exact_averaged_field(Y, omega: float = 200.0) -> np.ndarray:
    """Closed-form classical average of the m=3 canonical field.

    Input/output packing [x1,x2,x3,y1,y2,y3,x4,x5,x6,y4,y5,y6]: slow
    positions, slow momenta, fast positions, fast momenta — fast momenta
    UNRESCALED (y_{3+i} = omega * v_fast_i); see ``canonical_averaged_field``
    for the canonical-state version.  Every term has odd total degree, so the
    field is odd in Y.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.size != 12:
        raise WrongDimension("the closed-form average exists for m=3 only (12 components)")
    x1, x2, x3, y1, y2, y3, x4, x5, x6, y4, y5, y6 = Y
    w = omega
    out = np.empty(12)
    out[0:3] = (y1, y2, y3)
    out[3] = -(x1 * (3 * y4 ** 2 + (2 * x1 ** 2 + 3 * x4 ** 2) * w ** 2)
               + (x1 - x2) * (3 * (y4 + y5) ** 2
                              + (2 * (x1 - x2) ** 2 + 3 * (x4 + x5) ** 2) * w ** 2)) / (2 * w ** 2)
    out[4] = ((x1 - x2) * (3 * (y4 + y5) ** 2
                           + (2 * (x1 - x2) ** 2 + 3 * (x4 + x5) ** 2) * w ** 2)
              - (x2 - x3) * (3 * (y5 + y6) ** 2
                             + (2 * (x2 - x3) ** 2 + 3 * (x5 + x6) ** 2) * w ** 2)) / (2 * w ** 2)
    out[5] = ((x2 - x3) * (3 * (y5 + y6) ** 2
                           + (2 * (x2 - x3) ** 2 + 3 * (x5 + x6) ** 2) * w ** 2)
              - x3 * (3 * y6 ** 2 + (2 * x3 ** 2 + 3 * x6 ** 2) * w ** 2)) / (2 * w ** 2)
    out[6] = 3 * ((4 * (2 * y4 + y5) * x1 ** 2 - 8 * x2 * (y4 + y5) * x1
                   + (2 * x4 ** 2 + 2 * x5 * x4 + x5 ** 2) * y4 + (x4 + x5) ** 2 * y5
                   + 4 * x2 ** 2 * (y4 + y5)) * w ** 2
                  + 2 * y4 ** 3 + 3 * y5 * y4 ** 2 + 3 * y5 ** 2 * y4 + y5 ** 3) / (8 * w ** 4)
    out[7] = 3 * (y4 ** 3 + 3 * y5 * y4 ** 2 + 3 * y5 ** 2 * y4
                  + (4 * (x1 - x2) ** 2 + (x4 + x5) ** 2) * w ** 2 * y4
                  + 2 * y5 ** 3 + y6 ** 3 + 3 * y5 * y6 ** 2
                  + ((x4 ** 2 + 2 * x5 * x4 + 2 * x5 ** 2 + x6 ** 2
                      + 4 * (x1 ** 2 - 2 * x2 * x1 + 2 * x2 ** 2 + x3 ** 2 - 2 * x2 * x3)
                      + 2 * x5 * x6) * y5
                     + (4 * (x2 - x3) ** 2 + (x5 + x6) ** 2) * y6) * w ** 2
                  + 3 * y5 ** 2 * y6) / (8 * w ** 4)
    out[8] = 3 * (y5 ** 3 + 3 * y6 * y5 ** 2 + 3 * y6 ** 2 * y5 + 2 * y6 ** 3
                  + (4 * (y5 + y6) * x2 ** 2 - 8 * x3 * (y5 + y6) * x2
                     + (x5 + x6) ** 2 * y5 + (x5 ** 2 + 2 * x6 * x5 + 2 * x6 ** 2) * y6
                     + 4 * x3 ** 2 * (y5 + 2 * y6)) * w ** 2) / (8 * w ** 4)
    out[9] = 3 * (-(2 * x4 + x5) * y4 ** 2 - 2 * (x4 + x5) * y5 * y4 - (x4 + x5) * y5 ** 2
                  - (4 * (2 * x4 + x5) * x1 ** 2 - 8 * x2 * (x4 + x5) * x1
                     + 4 * x2 ** 2 * (x4 + x5)
                     + (2 * x4 + x5) * (x4 ** 2 + x5 * x4 + x5 ** 2)) * w ** 2) / (8 * w ** 2)
    out[10] = -3 * ((4 * (x4 + x5) * x1 ** 2 - 8 * x2 * (x4 + x5) * x1
                     + 4 * x3 ** 2 * (x5 + x6) - 8 * x2 * x3 * (x5 + x6)
                     + 4 * x2 ** 2 * (x4 + 2 * x5 + x6)
                     + (x4 + 2 * x5 + x6) * (x4 ** 2 + (x5 - x6) * x4
                                             + x5 ** 2 + x6 ** 2 + x5 * x6)) * w ** 2
                    + x4 * (y4 + y5) ** 2 + x6 * (y5 + y6) ** 2
                    + x5 * (y4 ** 2 + 2 * y5 * y4 + 2 * y5 ** 2
                            + y6 ** 2 + 2 * y5 * y6)) / (8 * w ** 2)
    out[11] = 3 * (-(x5 + x6) * y5 ** 2 - 2 * (x5 + x6) * y6 * y5 - (x5 + 2 * x6) * y6 ** 2
                   - (4 * (x5 + x6) * x2 ** 2 - 8 * x3 * (x5 + x6) * x2
                      + (x5 + 2 * x6) * (4 * x3 ** 2 + x5 ** 2 + x6 ** 2
                                         + x5 * x6)) * w ** 2) / (8 * w ** 2)
    return out


def canonical_averaged_field(p: FpuParams, u: np.ndarray) -> np.ndarray:
    """Closed-form classical average expressed on canonical-form states.

    The closed form above uses unrescaled fast momenta y = omega*v_fast; the
    canonical field is its conjugation by that scaling:
    Fbar(u) = S F_closed(S^{-1} u) with S = diag(1,...,1, 1/omega on v_fast).
    A slowed-time averaged run in physical time s obeys du/ds = Fbar(u)
    because omega*eps = 1.
    """
    u = np.asarray(u, dtype=float)
    if u.size != 12 or p.m != 3:
        raise WrongDimension("closed-form canonical average exists for m=3 only")
    ya = u.copy()
    ya[9:12] *= p.omega
    out = exact_averaged_field(ya, p.omega)
    out[9:12] /= p.omega
    return out


# --------------------------------------------------------------- benchmark

@maybe_jit(cache=True)
def _fpu_verlet_kernel(q0, p0, m, omega, h, n_steps, stride, c):  # pragma: no cover - jitted
    """Yoshida-composed velocity Verlet on the rotated (q,p) system."""
    n_out = n_steps // stride + 1
    d = q0.size
    out_q = np.empty((n_out, d))
    out_p = np.empty((n_out, d))
    out_q[0] = q0
    out_p[0] = p0
    q = q0.copy()
    p = p0.copy()
    w2 = omega * omega
    subs = np.array([c, 1.0 - 2.0 * c, c])
    t3 = np.empty(m + 1)
    grad = np.empty(d)
    k = 1
    for step in range(1, n_steps + 1):
        for sub in range(3):
            dt = subs[sub] * h
            for half in range(2):
                # grad of potential at current q
                t3[0] = (q[0] - q[m]) ** 3
                for i in range(1, m):
                    t3[i] = ((q[i] - q[m + i]) - (q[i - 1] + q[m + i - 1])) ** 3
                t3[m] = (q[m - 1] + q[2 * m - 1]) ** 3
                for i in range(m):
                    if i < m - 1:
                        grad[i] = t3[i] - t3[i + 1]
                        grad[m + i] = -(t3[i] + t3[i + 1])
                    else:
                        grad[i] = t3[m - 1] + t3[m]
                        grad[m + i] = -(t3[m - 1] - t3[m])
                    grad[m + i] += w2 * q[m + i]
                for j in range(d):
                    p[j] -= 0.5 * dt * grad[j]
                if half == 0:
                    for j in range(d):
                        q[j] += dt * p[j]
        if step % stride == 0:
            out_q[k] = q
            out_p[k] = p
            k += 1
    return out_q[:k], out_p[:k]


def benchmark_trajectory(params: FpuParams, q0, p0, h: float = None,
                         T: float = None, stride: int = 1000) -> Trajectory:
    """Symplectic 4th-order run of the rotated system at the stiff step.

    Defaults: h = 0.01/omega, T = 2*omega.  States pack (q, p).
    """
    h = 0.01 / params.omega if h is None else h
    T = 2.0 * params.omega if T is None else T
    n_steps = int(round(T / h))
    c = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
    qs, ps = _fpu_verlet_kernel(np.asarray(q0, dtype=float),
                                np.asarray(p0, dtype=float),
                                params.m, params.omega, h, n_steps, stride, c)
    times = np.arange(qs.shape[0]) * (h * stride)
    return Trajectory(times, np.hstack([qs, ps]), "symplectic4", h)


REFERENCE_P0 = np.array([2.0, 0.0, 0.0, 1.0, 0.0, 0.0])
