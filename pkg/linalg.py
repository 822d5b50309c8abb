"""Dense symmetric eigensolver and PSD test.

Every other module evaluates lambda_min of some symmetric matrix; this is
the only place that does it. The solver is a cyclic Jacobi method:
rotations annihilate one off-diagonal pair at a time, symmetry is kept by
construction and the accumulated rotations are orthonormal eigenvectors.

Sweeps use the round-robin (tournament) ordering: a sweep is split into
rounds of disjoint (p, q) pairs, every pair appearing exactly once per
sweep. Rotations on disjoint pairs commute, so a round is applied with a
handful of vectorized numpy updates and equals applying the same
rotations one after another.

Usage:
    from linalg import SymmetricMatrix, eigh
    dec = eigh(SymmetricMatrix.from_array([[2.0, 1.0], [1.0, 2.0]]))
    print(dec.eigenvalues)
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from config import JACOBI_MAX_SWEEPS, JACOBI_TOL, SYMMETRY_TOL
from errors import DimensionMismatch, InvalidConfig, NonFinite, NonSymmetric, ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense real symmetric matrix; the matrix of a quadratic form x^T M x.

    Build through ``from_array`` so the symmetry and finiteness gates run.
    The stored entries are exactly symmetric and read-only.
    """

    entries: np.ndarray

    @classmethod
    def from_array(cls, data: ArrayLike) -> "SymmetricMatrix":
        """Validate, symmetrize and wrap a square array.

        Raises:
            NonFinite: an entry is NaN or Inf.
            NonSymmetric: |m_ij - m_ji| > SYMMETRY_TOL * (1 + max|m|).
            DimensionMismatch: the array is not square or is empty.
        """
        if np.iscomplexobj(data):
            raise ValidationError("complex entries; use forms.validate_hermitian")
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("matrix has NaN or Inf entries")

        limit = SYMMETRY_TOL * (1.0 + float(np.max(np.abs(arr))))
        asym = float(np.max(np.abs(arr - arr.T)))
        if asym > limit:
            raise NonSymmetric(asym, limit)

        sym = 0.5 * (arr + arr.T)
        sym.setflags(write=False)
        return cls(sym)

    @classmethod
    def zeros(cls, dim: int) -> "SymmetricMatrix":
        return cls.from_array(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    def array(self) -> np.ndarray:
        """Writable copy of the entries."""
        return self.entries.copy()

    def __repr__(self) -> str:
        return f"SymmetricMatrix(dim={self.dim}, entries={self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues ascending; ``eigenvectors[k]`` is the unit vector for ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def reconstruct(self) -> np.ndarray:
        """V diag(lambda) V^T."""
        v = self.eigenvectors.T
        return (v * self.eigenvalues) @ v.T


def as_symmetric(m: Union[SymmetricMatrix, ArrayLike]) -> SymmetricMatrix:
    """Pass a SymmetricMatrix through, validate anything else."""
    if isinstance(m, SymmetricMatrix):
        return m
    return SymmetricMatrix.from_array(m)


# ============================================================================
# JACOBI KERNEL
# ============================================================================

@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Rounds of disjoint (p, q) index pairs covering every p < q once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        pairs.sort()
        p_idx = np.array([p for p, _ in pairs], dtype=np.intp)
        q_idx = np.array([q for _, q in pairs], dtype=np.intp)
        rounds.append((p_idx, q_idx))
        # Circle method: first player fixed, the rest rotate by one seat.
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(work: np.ndarray) -> float:
    return float(np.linalg.norm(work - np.diag(np.diag(work))))


def _rotate_round(
    work: np.ndarray, vecs: np.ndarray, p: np.ndarray, q: np.ndarray,
) -> None:
    """Annihilate work[p, q] for every pair of one round, in place."""
    apq = work[p, q]
    active = apq != 0.0
    if not np.any(active):
        return
    p, q, apq = p[active], q[active], apq[active]

    theta = (work[q, q] - work[p, p]) / (2.0 * apq)
    sign = np.where(theta >= 0.0, 1.0, -1.0)
    t = sign / (np.abs(theta) + np.hypot(1.0, theta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    col_p = work[:, p].copy()
    col_q = work[:, q].copy()
    work[:, p] = col_p * c - col_q * s
    work[:, q] = col_p * s + col_q * c

    row_p = work[p, :].copy()
    row_q = work[q, :].copy()
    work[p, :] = c[:, None] * row_p - s[:, None] * row_q
    work[q, :] = s[:, None] * row_p + c[:, None] * row_q

    work[p, q] = 0.0
    work[q, p] = 0.0

    vec_p = vecs[:, p].copy()
    vec_q = vecs[:, q].copy()
    vecs[:, p] = vec_p * c - vec_q * s
    vecs[:, q] = vec_p * s + vec_q * c


def _jacobi(
    matrix: np.ndarray, start: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Diagonalize a symmetric array; returns (diagonal, accumulated rotations, sweeps).

    ``start`` (orthonormal columns) is applied first, so the sweeps only
    remove what that basis leaves off the diagonal.
    """
    n = matrix.shape[0]
    norm = float(np.linalg.norm(matrix))
    if start is None:
        work = matrix.copy()
        vecs = np.eye(n)
    else:
        vecs = np.array(start, dtype=float)
        work = vecs.T @ matrix @ vecs
        work = 0.5 * (work + work.T)
    if n == 1 or norm == 0.0:
        return np.diag(work).copy(), vecs, 0

    threshold = JACOBI_TOL * norm
    schedule = _round_robin(n)
    off = _off_norm(work)
    sweeps = 0
    while off > threshold and sweeps < JACOBI_MAX_SWEEPS:
        for p, q in schedule:
            _rotate_round(work, vecs, p, q)
        work = 0.5 * (work + work.T)
        sweeps += 1
        previous, off = off, _off_norm(work)
        if off >= previous:
            # Rounding floor reached above the threshold; more sweeps cannot help.
            logger.debug("Jacobi stagnated at off=%.3e after %d sweeps (n=%d)", off, sweeps, n)
            break

    if off > threshold and sweeps >= JACOBI_MAX_SWEEPS:
        logger.warning(
            "Jacobi hit the %d-sweep cap with off=%.3e (threshold %.3e, n=%d)",
            JACOBI_MAX_SWEEPS, off, threshold, n,
        )
    logger.debug("Jacobi converged in %d sweeps (n=%d, off=%.3e)", sweeps, n, off)
    return np.diag(work).copy(), vecs, sweeps


# ============================================================================
# OPERATIONS
# ============================================================================

def eigh(
    m: Union[SymmetricMatrix, ArrayLike], basis: Optional[np.ndarray] = None,
) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues are sorted ascending; each eigenvector is sign-fixed so its
    largest-magnitude component is positive (first index on exact ties).
    Output is bit-deterministic for identical input bits (and ``basis``).

    ``basis`` warm-starts the sweeps from orthonormal rows, typically the
    eigenvectors of a nearby matrix; a nearly diagonalizing basis leaves
    one or two sweeps of work.

    Raises:
        NonSymmetric, NonFinite: when ``m`` is a raw array failing the gates.
        DimensionMismatch: ``basis`` is not dim x dim.
    """
    sym = as_symmetric(m)
    start = None
    if basis is not None:
        start = np.asarray(basis, dtype=float).T
        if start.shape != (sym.dim, sym.dim):
            raise DimensionMismatch(f"basis must be {sym.dim} x {sym.dim}, got {start.shape}")
    diag, vecs, sweeps = _jacobi(np.array(sym.entries), start)

    order = np.argsort(diag, kind="stable")
    values = diag[order]
    vectors = vecs[:, order].T.copy()

    lead = np.argmax(np.abs(vectors), axis=1)
    signs = np.sign(vectors[np.arange(vectors.shape[0]), lead])
    signs[signs == 0.0] = 1.0
    vectors *= signs[:, None]

    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(values, vectors, sweeps)


def min_eigenvalue(m: Union[SymmetricMatrix, ArrayLike]) -> float:
    """Smallest eigenvalue."""
    return eigh(m).lambda_min


def min_eigenspace(
    m: Union[SymmetricMatrix, ArrayLike], cluster_tol: float,
) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and an orthonormal basis of its (clustered) eigenspace.

    Eigenvalues within ``cluster_tol * (1 + spectral radius)`` of lambda_min
    count as the same eigenvalue.

    Returns:
        (lambda_min, basis) with basis rows orthonormal.
    """
    if not cluster_tol >= 0.0:
        raise InvalidConfig(f"cluster_tol must be >= 0, got {cluster_tol!r}")
    dec = eigh(m)
    lam = dec.lambda_min
    cutoff = lam + cluster_tol * (1.0 + dec.spectral_radius)
    keep = dec.eigenvalues <= cutoff
    return lam, dec.eigenvectors[keep]


def psd_check(m: Union[SymmetricMatrix, ArrayLike], tol: float) -> bool:
    """True iff lambda_min(M) >= -tol * (1 + ||M||_F)."""
    sym = as_symmetric(m)
    return eigh(sym).lambda_min >= -tol * (1.0 + sym.frobenius)
