"""
matops.py — Dense complex linear-algebra kernel.

Construction, composition and decomposition of operators on small dense
spaces (a few thousand dimensions at most). No physics lives here: the other
modules build every operator they need out of these functions.

All functions are pure and take/return complex numpy arrays. Inputs are
validated (square, finite) and coerced to complex128. Tensor products of
many two-level factors can also be built as scipy.sparse CSR matrices;
frob, commutator and anticommutator accept those as well.

Example:

    from utils import matops

    A = matops.kron(np.eye(2), np.diag([1, -1]))
    matops.inertia_of(A)          # Inertia(n_plus=2, n_minus=2, n_zero=0)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from utils.errors import DomainError, NumericError, ShapeError, SingularMatrixError, SizeError

# Residual tolerance, scaled by max(1, ||operands||) at the call site.
DEFAULT_TOL = 1e-10

# Eigenvalues below ZERO_EIG_REL * spectral radius count as zero in an inertia.
ZERO_EIG_REL = 1e-8

# Eigenvector matrices with a (column-normalised) smallest singular value below
# this are treated as rank-deficient: the source matrix is not diagonalizable.
DIAGONALIZABLE_TOL = 1e-8

MAX_DIM = 2 ** 20

# Log10 gap spreads narrower than this get a unit-width histogram range.
GAP_SPREAD_MIN = 1e-6

DEFAULT_SEED = 0xC0FFEE


# ── Validation ───────────────────────────────────────────────────────────────

def as_matrix(A) -> np.ndarray:
    """Coerce to a complex square matrix; reject non-square or non-finite input."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise ShapeError("expected a matrix of positive dimension")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has NaN or Inf entries")
    return M


def _same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape} vs {B.shape}")


def frob(A) -> float:
    """Frobenius norm, dense or sparse."""
    if scipy.sparse.issparse(A):
        return float(scipy.sparse.linalg.norm(A))
    return float(np.linalg.norm(A))


def is_hermitian(A, tol: float = DEFAULT_TOL) -> bool:
    M = as_matrix(A)
    return frob(M - M.conj().T) <= tol * max(1.0, frob(M))


# ── Construction / composition ───────────────────────────────────────────────

def kron(A, B, *more, max_dim: int = MAX_DIM) -> np.ndarray:
    """
    Kronecker product A ⊗ B (⊗ more...). The leftmost factor is the slowest
    index, matching numpy.kron.
    """
    factors = [as_matrix(F) for F in (A, B) + more]
    dim = 1
    for F in factors:
        dim *= F.shape[0]
    if dim > max_dim:
        raise SizeError(f"Kronecker product dimension {dim} exceeds the cap {max_dim}")
    return reduce(np.kron, factors)


def kron_all(factors: List[np.ndarray], max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product of a list (a single factor is returned as a copy)."""
    if len(factors) == 1:
        return as_matrix(factors[0]).copy()
    return kron(*factors, max_dim=max_dim)


def sparse_kron_all(factors: List[np.ndarray], max_dim: int = MAX_DIM) -> scipy.sparse.csr_matrix:
    """Kronecker product of a list as a CSR matrix, leftmost factor slowest."""
    mats = [as_matrix(F) for F in factors]
    dim = 1
    for F in mats:
        dim *= F.shape[0]
    if dim > max_dim:
        raise SizeError(f"Kronecker product dimension {dim} exceeds the cap {max_dim}")
    out = scipy.sparse.csr_matrix(mats[0])
    for F in mats[1:]:
        out = scipy.sparse.kron(out, F, format="csr")
    return out


def dagger(A) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(A).conj().T


def _operands(A, B):
    if scipy.sparse.issparse(A) and scipy.sparse.issparse(B):
        _same_shape(A, B)
        return A, B
    A, B = as_matrix(A), as_matrix(B)
    _same_shape(A, B)
    return A, B


def commutator(A, B) -> np.ndarray:
    A, B = _operands(A, B)
    return A @ B - B @ A


def anticommutator(A, B) -> np.ndarray:
    A, B = _operands(A, B)
    return A @ B + B @ A


# ── Inverse ──────────────────────────────────────────────────────────────────

def condition_number(A) -> float:
    s = scipy.linalg.svdvals(as_matrix(A))
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def inverse(A, tol: float = DEFAULT_TOL, return_condition: bool = False
            ) -> Union[np.ndarray, Tuple[np.ndarray, float]]:
    """
    Inverse of A. Raises SingularMatrixError when the smallest singular value
    is within tol * max(1, largest singular value) of zero.
    """
    M = as_matrix(A)
    s = scipy.linalg.svdvals(M)
    if s[-1] <= tol * max(1.0, s[0]):
        raise SingularMatrixError("matrix is singular within tolerance", float(s[-1]))
    inv = scipy.linalg.inv(M)
    if return_condition:
        return inv, float(s[0] / s[-1])
    return inv


# ── Eigen-decomposition ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a general square matrix; eigenvector columns have unit norm."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    diagonalizable: bool
    condition_estimate: float

    def reconstruction_residual(self, A) -> float:
        """||A V - V diag(w)|| / max(1, ||A||)."""
        M = as_matrix(A)
        R = M @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return frob(R) / max(1.0, frob(M))


def eig(A, diag_tol: float = DIAGONALIZABLE_TOL) -> EigenDecomposition:
    """
    General eigen-decomposition. diagonalizable is False when the eigenvector
    matrix is rank-deficient within diag_tol (a Jordan block, for example).
    """
    M = as_matrix(A)
    try:
        w, V = scipy.linalg.eig(M)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"eigenvalue iteration did not converge: {e}") from e
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0] = 1.0
    V = V / norms
    s = scipy.linalg.svdvals(V)
    smin = float(s[-1])
    cond = float(s[0] / smin) if smin > 0 else float("inf")
    return EigenDecomposition(
        eigenvalues=w,
        eigenvectors=V,
        diagonalizable=smin > diag_tol,
        condition_estimate=cond,
    )


# ── Inertia / square root ────────────────────────────────────────────────────

@dataclass(frozen=True)
class Inertia:
    """Counts of positive, negative and (numerically) zero eigenvalues."""

    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero

    @property
    def is_definite(self) -> bool:
        return self.n_zero == 0 and (self.n_minus == 0 or self.n_plus == 0)

    @property
    def is_indefinite(self) -> bool:
        return self.n_plus > 0 and self.n_minus > 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)

    def to_dict(self) -> dict:
        return {"nPlus": self.n_plus, "nMinus": self.n_minus, "nZero": self.n_zero}


def _hermitian_or_raise(A, tol: float, what: str) -> np.ndarray:
    M = as_matrix(A)
    if not is_hermitian(M, tol):
        raise DomainError(f"{what} requires a Hermitian matrix "
                          f"(||A - A^dagger|| = {frob(M - M.conj().T):.3e})")
    return (M + M.conj().T) / 2


def inertia_of(A, tol: float = DEFAULT_TOL, zero_rel: float = ZERO_EIG_REL) -> Inertia:
    """Signature of a Hermitian matrix."""
    H = _hermitian_or_raise(A, tol, "inertia_of")
    w = scipy.linalg.eigvalsh(H)
    radius = float(np.max(np.abs(w)))
    threshold = zero_rel * radius
    n_zero = int(np.sum(np.abs(w) <= threshold)) if radius > 0 else len(w)
    n_plus = int(np.sum(w > threshold)) if radius > 0 else 0
    n_minus = int(np.sum(w < -threshold)) if radius > 0 else 0
    return Inertia(n_plus, n_minus, n_zero)


def sqrt_pos_def(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The unique Hermitian positive-definite square root of a Hermitian positive-definite A."""
    H = _hermitian_or_raise(A, tol, "sqrt_pos_def")
    w, V = scipy.linalg.eigh(H)
    if w[0] <= tol * max(1.0, float(np.max(np.abs(w)))):
        raise DomainError(f"sqrt_pos_def requires a positive-definite matrix "
                          f"(smallest eigenvalue {w[0]:.3e})")
    S = (V * np.sqrt(w)) @ V.conj().T
    return (S + S.conj().T) / 2


# ── Random test matrices ─────────────────────────────────────────────────────

def rng_for(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    X = random_complex(rng, n)
    return (X + X.conj().T) / 2


def random_invertible(rng: np.random.Generator, n: int, min_sv: float = 0.1) -> np.ndarray:
    """Random complex matrix, redrawn until its smallest singular value is >= min_sv."""
    while True:
        X = random_complex(rng, n)
        if scipy.linalg.svdvals(X)[-1] >= min_sv:
            return X


def random_metric(rng: np.random.Generator, n: int, n_minus: int = 0) -> np.ndarray:
    """
    Random invertible Hermitian matrix with exactly n_minus negative
    eigenvalues (n_minus = 0 gives a positive-definite metric).
    """
    signs = np.ones(n)
    signs[:n_minus] = -1.0
    S = random_invertible(rng, n, min_sv=0.5)
    M = S.conj().T @ np.diag(signs) @ S
    return (M + M.conj().T) / 2


# ── Involutions and eigenvalue grouping ──────────────────────────────────────

@dataclass(frozen=True)
class SectorSplit:
    """
    Eigenspaces of an involution T (T^2 = 1). Columns of v_plus / v_minus span
    the +1 / -1 eigenspaces; rows of w_plus / w_minus form the dual basis, so
    w_plus @ v_plus = I and w_plus @ v_minus = 0. T need not be Hermitian.
    """

    v_plus: np.ndarray
    v_minus: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        return np.hstack([self.v_plus, self.v_minus])

    def block(self, A: np.ndarray, row: int, col: int) -> np.ndarray:
        """Block of A in the sector basis; row/col are +1 or -1."""
        W = self.w_plus if row > 0 else self.w_minus
        V = self.v_plus if col > 0 else self.v_minus
        return W @ A @ V


def involution_split(T, tol: float = DEFAULT_TOL) -> SectorSplit:
    M = as_matrix(T)
    n = M.shape[0]
    I = np.eye(n)
    if frob(M @ M - I) > ZERO_EIG_REL * max(1.0, frob(M)):
        raise DomainError("involution_split needs T^2 = 1")
    d = np.diag(M)
    if frob(M - np.diag(d)) <= tol * max(1.0, frob(M)):
        # diagonal involution: keep the standard basis, in index order
        v_plus = I[:, d.real > 0].astype(complex)
        v_minus = I[:, d.real < 0].astype(complex)
    else:
        v_plus = scipy.linalg.orth((I + M) / 2, rcond=ZERO_EIG_REL)
        v_minus = scipy.linalg.orth((I - M) / 2, rcond=ZERO_EIG_REL)
    if v_plus.shape[1] + v_minus.shape[1] != n:
        raise DomainError("eigenspaces of the involution do not span the space")
    W = inverse(np.hstack([v_plus, v_minus]), tol)
    k = v_plus.shape[1]
    return SectorSplit(v_plus, v_minus, W[:k], W[k:])


def group_eigenvalues(values, rel_tol: float = ZERO_EIG_REL) -> List[List[int]]:
    """
    Cluster eigenvalues that agree within rel_tol * spectral radius. Returns
    index lists ordered by (real, imag) of the cluster representative.
    """
    w = np.asarray(values, dtype=complex)
    if w.size == 0:
        return []
    radius = float(np.max(np.abs(w)))
    thr = rel_tol * radius if radius > 0 else rel_tol
    order = sorted(range(len(w)), key=lambda i: (w[i].real, w[i].imag))
    groups: List[List[int]] = []
    for i in order:
        for g in groups:
            if abs(w[i] - w[g[0]]) <= thr:
                g.append(i)
                break
        else:
            groups.append([i])
    groups.sort(key=lambda g: (w[g[0]].real, w[g[0]].imag))
    return groups


def gap_histogram(representatives, bins: int = 6) -> dict:
    """
    Histogram of log10 relative gaps between consecutive distinct cluster
    representatives, plus the smallest gap. Small gaps flag clusters that
    may have been split or merged by the grouping threshold.
    """
    r = np.sort_complex(np.asarray(representatives, dtype=complex))
    if r.size < 2:
        return {"smallestRelativeGap": None, "counts": [], "edges": []}
    scale = max(1.0, float(np.max(np.abs(r))))
    gaps = np.abs(np.diff(r)) / scale
    logs = np.log10(np.maximum(gaps, 1e-300))
    lo, hi = float(np.min(logs)), float(np.max(logs))
    if hi - lo < GAP_SPREAD_MIN:
        # evenly spaced spectra: log gaps differ only by rounding
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(logs, bins=bins, range=(lo, hi))
    return {
        "smallestRelativeGap": float(np.min(gaps)),
        "counts": [int(c) for c in counts],
        "edges": [float(e) for e in edges],
    }
