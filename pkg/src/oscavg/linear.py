"""Skew-Hermitian linear part: exact oscillatory flows and zero-safe inverse.

An operator with purely imaginary spectrum i*lambda_k is stored through its
eigendecomposition, so e^{Omega t} and the pseudo-inverse (zero eigenvalues
inverted to zero) are exact diagonal operations for any t.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotSkewHermitian, SingularEigenbasis

DEFAULT_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class SkewHermitianOperator:
    """Eigendecomposition Omega = V diag(i*eigenphases) V^{-1}.

    ``eigenphases`` are real and sorted descending by absolute value.  ``real``
    records whether the original matrix was real, in which case flows of real
    vectors are cast back to real after checking the imaginary residue.
    """

    dimension: int
    basis: np.ndarray            # V, unitary when built from eigh
    basis_inv: np.ndarray        # V^{-1}
    eigenphases: np.ndarray      # lambda_k, real
    zero_tolerance: float = DEFAULT_ZERO_TOL
    real: bool = True
    _zero_mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        scale = np.max(np.abs(self.eigenphases)) if self.dimension else 0.0
        cut = self.zero_tolerance * max(1.0, scale)
        object.__setattr__(self, "_zero_mask", np.abs(self.eigenphases) <= cut)

    @property
    def frequencies(self) -> np.ndarray:
        """Oscillation frequencies |lambda_k|."""
        return np.abs(self.eigenphases)

    def matrix(self) -> np.ndarray:
        m = self.basis @ np.diag(1j * self.eigenphases) @ self.basis_inv
        return m.real if self.real else m

    def _diag_apply(self, diag: np.ndarray, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.dimension:
            raise DimensionMismatch(
                f"vector length {x.shape[-1]} != operator dimension {self.dimension}")
        coeff = self.basis_inv @ x.astype(complex, copy=False)
        out = self.basis @ (diag * coeff)
        if self.real and np.isrealobj(x):
            resid = np.max(np.abs(out.imag))
            norm = np.linalg.norm(x)
            if resid > 1e-10 * max(1.0, norm):
                raise SingularEigenbasis(
                    f"imaginary residue {resid:.3e} on a real input; eigenbasis unreliable")
            return out.real
        return out

    def flow(self, t: float, x: np.ndarray) -> np.ndarray:
        """e^{Omega t} x."""
        return self._diag_apply(np.exp(1j * self.eigenphases * t), x)

    def flow_matrix(self, t: float) -> np.ndarray:
        m = self.basis @ (np.exp(1j * self.eigenphases * t)[:, None] * self.basis_inv)
        return m.real if self.real else m

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Omega x."""
        return self._diag_apply(1j * self.eigenphases, x)

    def pinv_apply(self, c: np.ndarray) -> np.ndarray:
        """Zero-safe inverse: 1/(i*lambda_k) on nonzero phases, 0 on the kernel."""
        lam = np.where(self._zero_mask, 1.0, self.eigenphases)  # avoid 0-division
        diag = np.where(self._zero_mask, 0.0, 1.0 / (1j * lam))
        return self._diag_apply(diag, c)


def make_operator(matrix: np.ndarray, zero_tolerance: float = DEFAULT_ZERO_TOL) -> SkewHermitianOperator:
    """Build an operator from a square skew-Hermitian matrix.

    The matrix is diagonalized through the Hermitian matrix -i*Omega (numpy
    ``eigh``), which yields a unitary eigenbasis.
    """
    a = np.asarray(matrix)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    sym = np.linalg.norm(a + a.conj().T)
    if sym > zero_tolerance * max(1.0, scale) and sym > 1e-10 * max(1.0, scale):
        raise NotSkewHermitian(
            f"||A + A*|| = {sym:.3e} exceeds tolerance for ||A|| = {scale:.3e}")
    herm = -1j * a.astype(complex)
    herm = 0.5 * (herm + herm.conj().T)  # scrub the checked asymmetry
    try:
        lam, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SingularEigenbasis(str(exc)) from exc
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    v = v[:, order]
    return SkewHermitianOperator(
        dimension=a.shape[0],
        basis=v,
        basis_inv=v.conj().T,
        eigenphases=lam,
        zero_tolerance=zero_tolerance,
        real=bool(np.isrealobj(np.asarray(matrix))),
    )


def block_rotation_operator(frequencies, zero_tolerance: float = DEFAULT_ZERO_TOL) -> SkewHermitianOperator:
    """Operator made of 2x2 rotation generators [[0,-w],[w,0]], one per frequency.

    A frequency of zero contributes a 2-dimensional kernel block.  State
    packing is (x_1, y_1, x_2, y_2, ...) per block.
    """
    freqs = np.asarray(frequencies, dtype=float)
    d = 2 * len(freqs)
    m = np.zeros((d, d))
    for i, w in enumerate(freqs):
        m[2 * i, 2 * i + 1] = -w
        m[2 * i + 1, 2 * i] = w
    return make_operator(m, zero_tolerance)


def flow(op: SkewHermitianOperator, t: float, x: np.ndarray) -> np.ndarray:
    return op.flow(t, x)


def pinv_apply(op: SkewHermitianOperator, c: np.ndarray) -> np.ndarray:
    return op.pinv_apply(c)
