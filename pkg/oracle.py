"""Ground truth at desk scale and reproducible instance families.

``sphere_scan`` evaluates sigma_0[x] - 2 sqrt(sigma_1[x] sigma_2[x]) on a
grid of unit vectors in dimension 2 or 3, ``grid_alpha`` evaluates f(s)
on a log grid; both exist to cross-check the search in ``certify``.

The generators draw every number from ``Lcg64``, a fixed 64-bit linear
congruential generator, so a (family, dim, seed) triple names the same
instance on every platform:

    certified  T = alpha A + alpha^{-1} B + C    (C PSD)
    tight      T = alpha A + alpha^{-1} B
    violating  T = c (alpha A + alpha^{-1} B),   0 < c < 1, A + B definite
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from certify import fval
from config import GENERATOR_MAX_RETRIES, SCAN_MAX_RESOLUTION, SCAN_RESOLUTION
from errors import GeneratorExhausted, InvalidConfig, UnsupportedDimension
from forms import Instance, validate_instance
from linalg import eigh

logger = logging.getLogger(__name__)

# Rows of the dim-3 grid evaluated per vectorized block.
_SCAN_CHUNK = 64


# ============================================================================
# PRNG AND RANDOM MATRICES
# ============================================================================

class Lcg64:
    """state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64.

    ``uniform`` maps the top 53 bits of the new state to [-1, 1).
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) & self.MASK
        return self.state

    def uniform(self) -> float:
        return 2.0 * ((self.next_u64() >> 11) / float(1 << 53)) - 1.0

    def below(self, n: int) -> int:
        """Integer in [0, n)."""
        return self.next_u64() % n

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        """Row-major rows x cols matrix of uniforms."""
        data = [self.uniform() for _ in range(rows * cols)]
        return np.array(data, dtype=float).reshape(rows, cols)


def random_psd(rng: Lcg64, dim: int, rank: Optional[int] = None) -> np.ndarray:
    """R R^T for a dim x dim uniform R, keeping only the first ``rank`` columns."""
    r = rng.matrix(dim, dim)
    if rank is not None:
        r = r[:, :rank]
    m = r @ r.T
    return 0.5 * (m + m.T)


def random_orthogonal(rng: Lcg64, dim: int) -> np.ndarray:
    """Q from the QR factorization of a uniform matrix, columns sign-fixed by diag(R)."""
    q, r = np.linalg.qr(rng.matrix(dim, dim))
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs


def random_projection_pair(rng: Lcg64, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-zero orthogonal projections P1, P2 onto orthogonal coordinate blocks of a random basis."""
    if dim < 2:
        raise InvalidConfig(f"a projection pair needs dim >= 2, got {dim}")
    q = random_orthogonal(rng, dim)
    k1 = 1 + rng.below(dim - 1)
    k2 = 1 + rng.below(dim - k1)
    u1, u2 = q[:, :k1], q[:, k1:k1 + k2]
    p1, p2 = u1 @ u1.T, u2 @ u2.T
    return 0.5 * (p1 + p1.T), 0.5 * (p2 + p2.T)


# ============================================================================
# GENERATORS
# ============================================================================

class Family(str, Enum):
    CERTIFIED = "certified"
    TIGHT = "tight"
    VIOLATING = "violating"


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """What to generate. The overrides replace the drawn A, B or C verbatim."""

    dim: int
    seed: int
    family: Family = Family.CERTIFIED
    alpha: float = 1.0
    shrink: float = 0.5
    swap_forms: bool = False
    a_override: Optional[np.ndarray] = None
    b_override: Optional[np.ndarray] = None
    c_override: Optional[np.ndarray] = None

    def validate(self) -> "GeneratorSpec":
        if self.dim < 2:
            raise InvalidConfig(f"generator dim must be >= 2, got {self.dim}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise InvalidConfig(f"alpha must be positive and finite, got {self.alpha!r}")
        if self.family is Family.VIOLATING and not 0.0 < self.shrink < 1.0:
            raise InvalidConfig(f"shrink must lie in (0, 1), got {self.shrink!r}")
        return self


def _draw_forms(spec: GeneratorSpec, rng: Lcg64) -> tuple[np.ndarray, np.ndarray]:
    # Ranks vary in [1, dim] so semidefinite-but-singular forms are common.
    a = spec.a_override
    if a is None:
        a = random_psd(rng, spec.dim, 1 + rng.below(spec.dim))
    b = spec.b_override
    if b is None:
        b = random_psd(rng, spec.dim, 1 + rng.below(spec.dim))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if spec.swap_forms:
        a, b = b, a
    return a, b


def _tight_part(alpha: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Written so that (alpha, A, B) and (1/alpha, B, A) produce the same bits.
    return alpha * a + (1.0 / alpha) * b


def gen_certified(spec: GeneratorSpec) -> Instance:
    """T = alpha A + alpha^{-1} B + C; certified by construction with certificate alpha."""
    spec.validate()
    rng = Lcg64(spec.seed)
    a, b = _draw_forms(spec, rng)
    c = spec.c_override
    if c is None:
        c = random_psd(rng, spec.dim, rng.below(spec.dim + 1))
    t = _tight_part(spec.alpha, a, b) + np.asarray(c, dtype=float)
    return validate_instance(t, a, b)


def gen_tight(spec: GeneratorSpec) -> Instance:
    """T = alpha A + alpha^{-1} B; the pencil at alpha is exactly zero."""
    spec.validate()
    rng = Lcg64(spec.seed)
    a, b = _draw_forms(spec, rng)
    return validate_instance(_tight_part(spec.alpha, a, b), a, b)


def _balanced_direction(inst: Instance, alpha: float) -> Optional[np.ndarray]:
    """Unit x with alpha^2 sigma_1[x] = sigma_2[x] > 0, or None if none exists."""
    stationarity = inst.b_psd.entries / (alpha * alpha) - inst.a_psd.entries
    dec = eigh(stationarity)
    if dec.lambda_min > 0.0 or dec.lambda_max < 0.0:
        return None
    v_neg, v_pos = dec.eigenvectors[0], dec.eigenvectors[-1]
    tol = 1e-14 * (1.0 + float(np.linalg.norm(stationarity)))

    lo, hi = 0.0, 0.5 * math.pi
    x = v_neg
    for _ in range(200):
        theta = 0.5 * (lo + hi)
        x = math.cos(theta) * v_neg + math.sin(theta) * v_pos
        g = float(x @ stationarity @ x)
        if abs(g) <= tol:
            break
        if g < 0.0:
            lo = theta
        else:
            hi = theta

    if float(x @ inst.a_psd.entries @ x) <= 0.0:
        return None
    lead = int(np.argmax(np.abs(x)))
    return -x if x[lead] < 0.0 else x


def gen_violating(spec: GeneratorSpec) -> tuple[Instance, np.ndarray]:
    """T = c (alpha A + alpha^{-1} B) with a known violating unit vector.

    At the returned x, tau(x) = alpha and sigma_1[x] > 0, so
    sigma_0[x] = 2c sqrt(sigma_1[x] sigma_2[x]) falls short of the bound.
    Seeds seed, seed + 1, ... are tried until A + B is definite and such an
    x exists.

    Raises:
        GeneratorExhausted: no usable draw within the retry cap.
    """
    spec.validate()
    for attempt in range(GENERATOR_MAX_RETRIES):
        rng = Lcg64(spec.seed + attempt)
        a, b = _draw_forms(spec, rng)
        total = a + b
        if eigh(total).lambda_min <= 1e-9 * float(np.linalg.norm(total)):
            logger.debug("Seed %d: A + B is singular, retrying", spec.seed + attempt)
            continue
        inst = validate_instance(spec.shrink * _tight_part(spec.alpha, a, b), a, b)
        witness = _balanced_direction(inst, spec.alpha)
        if witness is None:
            logger.debug("Seed %d: no direction with tau = alpha, retrying", spec.seed + attempt)
            continue
        if attempt:
            logger.info("Violating instance found after %d retries", attempt)
        return inst, witness
    raise GeneratorExhausted(
        f"no violating instance for dim={spec.dim} seed={spec.seed} "
        f"within {GENERATOR_MAX_RETRIES} seeds"
    )


def generate(spec: GeneratorSpec) -> tuple[Instance, Optional[np.ndarray]]:
    """Dispatch on the family; the known witness is None except for violating."""
    if spec.family is Family.CERTIFIED:
        return gen_certified(spec), None
    if spec.family is Family.TIGHT:
        return gen_tight(spec), None
    return gen_violating(spec)


# ============================================================================
# SCANS
# ============================================================================

@dataclass(frozen=True, eq=False)
class ScanResult:
    """Grid minimum of sigma_0 - 2 sqrt(sigma_1 sigma_2) over unit vectors.

    The true infimum is at least ``min_value - error_bound``.
    """

    min_value: float
    argmin: np.ndarray
    resolution: float
    points: int
    error_bound: float


def _bound_gap(inst: Instance, points: np.ndarray) -> np.ndarray:
    t = np.einsum("ij,jk,ik->i", points, inst.T.entries, points)
    a = np.einsum("ij,jk,ik->i", points, inst.A.entries, points)
    b = np.einsum("ij,jk,ik->i", points, inst.B.entries, points)
    return t - 2.0 * np.sqrt(np.maximum(a, 0.0) * np.maximum(b, 0.0))


def sphere_scan(inst: Instance, resolution: float = SCAN_RESOLUTION) -> ScanResult:
    """Grid search of the pointwise bound on the unit circle or sphere.

    The gap is even in x, so half the circle / sphere suffices. The
    function is 2 * scale Lipschitz on the sphere and every unit vector
    is within ``resolution`` of a grid point.

    Raises:
        UnsupportedDimension: dim not in {2, 3}.
        InvalidConfig: resolution outside (0, 0.05].
    """
    if inst.dim not in (2, 3):
        raise UnsupportedDimension(inst.dim)
    if not 0.0 < resolution <= SCAN_MAX_RESOLUTION:
        raise InvalidConfig(
            f"resolution must lie in (0, {SCAN_MAX_RESOLUTION}], got {resolution!r}"
        )

    if inst.dim == 2:
        thetas = np.arange(0.0, math.pi, resolution)
        points = np.column_stack([np.cos(thetas), np.sin(thetas)])
        values = _bound_gap(inst, points)
        k = int(np.argmin(values))
        best_value, best_x, count = float(values[k]), points[k], len(points)
    else:
        # Polar angle over [0, pi], azimuth over [0, pi): the y >= 0 half.
        thetas = np.linspace(0.0, math.pi, int(math.ceil(math.pi / resolution)) + 1)
        phis = np.arange(0.0, math.pi, resolution)
        best_value, best_x, count = math.inf, None, 0
        for start in range(0, len(thetas), _SCAN_CHUNK):
            th = thetas[start:start + _SCAN_CHUNK, None]
            points = np.stack(
                [np.sin(th) * np.cos(phis), np.sin(th) * np.sin(phis), np.cos(th) * np.ones_like(phis)],
                axis=-1,
            ).reshape(-1, 3)
            values = _bound_gap(inst, points)
            k = int(np.argmin(values))
            count += len(points)
            if values[k] < best_value:
                best_value, best_x = float(values[k]), points[k]

    argmin = best_x / np.linalg.norm(best_x)
    argmin.setflags(write=False)
    logger.debug("Sphere scan: min=%.6e over %d points", best_value, count)
    return ScanResult(best_value, argmin, resolution, count, 2.0 * resolution * inst.scale)


def grid_alpha(
    inst: Instance,
    points_per_decade: int = 100,
    bounds: tuple[float, float] = (1e-3, 1e3),
) -> tuple[float, float]:
    """Maximize f(s) over a log-spaced grid of s in ``bounds``.

    Returns:
        (best_s, best_f); the first maximizer on ties.
    """
    lo, hi = bounds
    if points_per_decade < 10:
        raise InvalidConfig(f"points_per_decade must be >= 10, got {points_per_decade}")
    if not 0.0 < lo < hi:
        raise InvalidConfig(f"grid bounds must satisfy 0 < lo < hi, got {bounds!r}")
    decades = math.log10(hi / lo)
    count = int(round(decades * points_per_decade)) + 1
    grid = np.logspace(math.log10(lo), math.log10(hi), count)
    values = np.array([fval(inst, float(s)) for s in grid])
    k = int(np.argmax(values))
    return float(grid[k]), float(values[k])


# ============================================================================
# CLOSED FORMS
# ============================================================================

def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def closed_form_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix of dim 1-3 from its characteristic polynomial.

    dim 2 uses the quadratic formula; dim 3 the trigonometric solution of
    the depressed cubic det((M - qI)/p) = 2 cos(3 phi), which needs no
    iteration. Shares no code with ``linalg.eigh``.

    Raises:
        UnsupportedDimension: dim > 3.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 1:
        return np.array([m[0, 0]])
    if n == 2:
        mean = 0.5 * (m[0, 0] + m[1, 1])
        radius = math.hypot(0.5 * (m[0, 0] - m[1, 1]), m[0, 1])
        return np.array([mean - radius, mean + radius])
    if n != 3:
        raise UnsupportedDimension(n, "closed-form eigenvalues", "1 to 3")

    q = float(np.trace(m)) / 3.0
    off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
    p2 = (m[0, 0] - q) ** 2 + (m[1, 1] - q) ** 2 + (m[2, 2] - q) ** 2 + 2.0 * off
    if p2 == 0.0:
        return np.full(3, q)
    p = math.sqrt(p2 / 6.0)
    r = min(1.0, max(-1.0, 0.5 * _det3((m - q * np.eye(3)) / p)))
    phi = math.acos(r) / 3.0
    largest = q + 2.0 * p * math.cos(phi)
    smallest = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.sort(np.array([smallest, 3.0 * q - largest - smallest, largest]))
