"""Quadratic-form instances: validation, evaluation, the pencil and tau.

An ``Instance`` holds the triple (T, A, B) whose forms are
sigma_0[x] = x^T T x, sigma_1[x] = x^T A x and sigma_2[x] = x^T B x.
Complex Hermitian triples reduce to real ones by realification:
M = X + iY becomes the real symmetric block matrix [[X, -Y], [Y, X]] acting
on (Re h, Im h), which preserves every form value <Mh, h>.

Usage:
    from forms import validate_instance, pencil
    inst = validate_instance(np.eye(2), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    print(pencil(inst, 2.0).entries)
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from config import PSD_GATE_TOL, SYMMETRY_TOL
from errors import (
    BothZero,
    DimensionMismatch,
    NonFinite,
    NonPositiveS,
    NotHermitian,
    NotPsd,
    ZeroForm,
)
from linalg import ArrayLike, SymmetricMatrix, as_symmetric, eigh

logger = logging.getLogger(__name__)

FORM_NAMES = ("T", "A", "B")


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class Instance:
    """Validated triple (T, A, B) sharing one dimension.

    ``scale`` = ||T||_F + ||A||_F + ||B||_F is the reference for every
    absolute tolerance downstream. ``a_psd`` / ``b_psd`` are the copies of A
    and B shifted by -lambda_min * I when lambda_min fell inside the PSD
    gate; tau and the generators read those, T is never shifted.
    """

    T: SymmetricMatrix
    A: SymmetricMatrix
    B: SymmetricMatrix
    dim: int
    scale: float
    a_psd: SymmetricMatrix = field(repr=False)
    b_psd: SymmetricMatrix = field(repr=False)

    def swapped(self) -> "Instance":
        """The instance with sigma_1 and sigma_2 exchanged."""
        return validate_instance(self.T, self.B, self.A)

    def scaled(self, c: float) -> "Instance":
        """The instance (cT, cA, cB)."""
        return validate_instance(
            c * self.T.entries, c * self.A.entries, c * self.B.entries,
        )


@dataclass(frozen=True, eq=False)
class HermitianInstance:
    """Validated complex Hermitian triple; A and B PSD and non-zero."""

    T: np.ndarray
    A: np.ndarray
    B: np.ndarray
    dim: int


# ============================================================================
# VALIDATION
# ============================================================================

def _psd_shift(which: str, m: SymmetricMatrix) -> SymmetricMatrix:
    """Apply the PSD gate to A or B; return the clamped internal copy."""
    if m.frobenius == 0.0:
        raise ZeroForm(which)
    lam = eigh(m).lambda_min
    if lam < -PSD_GATE_TOL * (1.0 + m.frobenius):
        raise NotPsd(which, lam)
    if lam >= 0.0:
        return m
    logger.warning("Clamping %s by %.3e to remove rounding-level negativity", which, -lam)
    return SymmetricMatrix.from_array(m.entries - lam * np.eye(m.dim))


def validate_instance(
    T: Union[SymmetricMatrix, ArrayLike],
    A: Union[SymmetricMatrix, ArrayLike],
    B: Union[SymmetricMatrix, ArrayLike],
) -> Instance:
    """Check the hypotheses on (T, A, B) and build an Instance.

    Raises:
        DimensionMismatch: the three matrices differ in size.
        ZeroForm: A or B is the zero matrix (excluded by hypothesis).
        NotPsd: A or B has lambda_min below -1e-9 * (1 + ||.||_F).
        NonSymmetric, NonFinite: from the matrix gates.
    """
    t, a, b = as_symmetric(T), as_symmetric(A), as_symmetric(B)
    if not t.dim == a.dim == b.dim:
        raise DimensionMismatch(
            f"T, A, B must share a dimension, got {t.dim}, {a.dim}, {b.dim}"
        )
    a_psd = _psd_shift("A", a)
    b_psd = _psd_shift("B", b)
    scale = t.frobenius + a.frobenius + b.frobenius
    return Instance(t, a, b, t.dim, scale, a_psd, b_psd)


def _check_hermitian(which: str, m: np.ndarray) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"{which}: expected a non-empty square matrix, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{which} has NaN or Inf entries")
    limit = SYMMETRY_TOL * (1.0 + float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.conj().T))) > limit:
        raise NotHermitian(which)
    return 0.5 * (arr + arr.conj().T)


def validate_hermitian(T: ArrayLike, A: ArrayLike, B: ArrayLike) -> HermitianInstance:
    """Check a complex triple; PSD and zero gates run on the realified A, B."""
    t = _check_hermitian("T", T)
    a = _check_hermitian("A", A)
    b = _check_hermitian("B", B)
    if not t.shape == a.shape == b.shape:
        raise DimensionMismatch(
            f"T, A, B must share a dimension, got {t.shape[0]}, {a.shape[0]}, {b.shape[0]}"
        )
    for which, m in (("A", a), ("B", b)):
        _psd_shift(which, SymmetricMatrix.from_array(realify_matrix(m)))
    return HermitianInstance(t, a, b, t.shape[0])


# ============================================================================
# EVALUATION
# ============================================================================

def _as_vector(x: ArrayLike, dim: int) -> np.ndarray:
    vec = np.asarray(x, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatch(f"vector of length {dim} expected, got shape {vec.shape}")
    return vec


def evaluate(m: Union[SymmetricMatrix, ArrayLike], x: ArrayLike) -> float:
    """sigma[x] = x^T M x."""
    sym = as_symmetric(m)
    vec = _as_vector(x, sym.dim)
    return float(vec @ sym.entries @ vec)


def hermitian_evaluate(m: np.ndarray, h: np.ndarray) -> float:
    """<Mh, h> for Hermitian M (the imaginary part vanishes)."""
    return float(np.real(np.vdot(h, m @ h)))


def pencil(inst: Instance, s: float) -> SymmetricMatrix:
    """sigma^s = T - s A - s^{-1} B."""
    if not (math.isfinite(s) and s > 0.0):
        raise NonPositiveS(s)
    return SymmetricMatrix.from_array(
        inst.T.entries - s * inst.A.entries - (1.0 / s) * inst.B.entries
    )


def tau(inst: Instance, x: ArrayLike) -> float:
    """sqrt(sigma_2[x] / sigma_1[x]), with +inf where sigma_1[x] = 0 < sigma_2[x].

    Raises:
        BothZero: sigma_1[x] = sigma_2[x] = 0.
    """
    a = max(evaluate(inst.a_psd, x), 0.0)
    b = max(evaluate(inst.b_psd, x), 0.0)
    if a == 0.0:
        if b == 0.0:
            raise BothZero("sigma_1[x] = sigma_2[x] = 0; tau is undefined")
        return math.inf
    return math.sqrt(b / a)


def positive_direction(inst: Instance) -> np.ndarray:
    """Unit x with sigma_1[x] > 0 and sigma_2[x] > 0.

    Takes x1, x2 = top eigenvectors of A and B. On span{x1, x2} each of
    sigma_1(x1 + w x2), sigma_2(x1 + w x2) is a quadratic in w with a
    non-zero leading or constant term, so each vanishes for at most two
    weights; seven candidate weights always leave one where both are positive.
    """
    x1 = eigh(inst.a_psd).eigenvectors[-1]
    x2 = eigh(inst.b_psd).eigenvectors[-1]
    best, best_score = None, -math.inf
    for w in (0.0, 1.0, -1.0, 0.5, 2.0, -0.5, -2.0):
        x = x1 + w * x2 if w != 0.0 else x1
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            continue
        x = x / norm
        score = min(evaluate(inst.a_psd, x), evaluate(inst.b_psd, x))
        if score > best_score:
            best, best_score = x, score
        if score > 0.0:
            break
    if best is None or best_score <= 0.0:
        # Only reachable when A or B is zero, which validation rejects.
        raise ZeroForm("A" if evaluate(inst.a_psd, x1) <= 0.0 else "B")
    return best


# ============================================================================
# REALIFICATION
# ============================================================================

def realify_matrix(m: ArrayLike) -> np.ndarray:
    """[[X, -Y], [Y, X]] for M = X + iY (any shape, square or rectangular)."""
    arr = np.asarray(m)
    x, y = np.real(arr).astype(float), np.imag(arr).astype(float)
    return np.block([[x, -y], [y, x]])


def realify_vector(h: ArrayLike) -> np.ndarray:
    """h = u + iv maps to the concatenation (u, v)."""
    vec = np.asarray(h)
    return np.concatenate([np.real(vec), np.imag(vec)]).astype(float)


def complexify_vector(x: ArrayLike) -> np.ndarray:
    """Inverse of realify_vector."""
    vec = np.asarray(x, dtype=float)
    n = vec.shape[0] // 2
    return vec[:n] + 1j * vec[n:]


def realify(h: HermitianInstance) -> Instance:
    """Real 2n-dimensional Instance with the same form values, certificates and witnesses."""
    return validate_instance(
        realify_matrix(h.T), realify_matrix(h.A), realify_matrix(h.B),
    )
