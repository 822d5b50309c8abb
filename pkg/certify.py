"""Decision procedure: certificate alpha or a witness refuting the pointwise bound.

For an Instance (T, A, B) the question is whether

    sigma_0[x] >= 2 sqrt(sigma_1[x] sigma_2[x])        for every x        (P)

holds. It does exactly when some alpha > 0 gives T - alpha A - alpha^{-1} B
PSD (C). The engine maximizes

    f(s) = lambda_min(T - s A - s^{-1} B),   s in (0, inf)

and reads the answer off the sign of the maximum.

Why f is concave: -s A is linear in s, and for PSD B the map s -> -s^{-1} B
is matrix-concave on (0, inf) (x^T B x / s is convex in s for every x).
The pencil is therefore a matrix-concave family, and lambda_min of such a
family is a pointwise minimum over unit x of concave functions of s, hence
concave. With A, B non-zero, f -> -inf at both ends of (0, inf), so a
three-point bracket with a higher middle contains the maximum and a
golden-section search in s converges to it.

When max f < 0, the witness comes from the minimal eigenspace at the
maximizer: stationarity makes the derivative form -A + alpha^{-2} B take
both signs there, and moving along the unit circle between a negative and
a positive direction (the eigenspace is a subspace, so the path stays in
it) reaches x with tau(x) = alpha. For that x,
sigma_0[x] - 2 sqrt(sigma_1 sigma_2) = sigma^alpha[x] < 0.

Usage:
    from certify import certify
    verdict = certify(inst)
    print(verdict.tag)
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, ClassVar, Optional, Union

import numpy as np

from config import (
    BRACKET_FACTOR,
    BRACKET_MAX_S,
    BRACKET_MIN_S,
    CLUSTER_TOL,
    EPS_CERT,
    EPS_REF,
    MAX_ITER,
    TAU_MISMATCH_TOL,
    TOL_S,
    WITNESS_BISECTION_STEPS,
    WITNESS_CLUSTER_WIDEN,
    WITNESS_RESIDUAL_TOL,
    WITNESS_SPHERE_SAMPLES,
)
from errors import BothZero, BracketOverflow, InvalidConfig, WitnessNotFound
from forms import (
    HermitianInstance,
    Instance,
    complexify_vector,
    evaluate,
    pencil,
    realify,
    tau,
)
from linalg import eigh, min_eigenspace, min_eigenvalue, psd_check

logger = logging.getLogger(__name__)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


# ============================================================================
# CONFIGURATION AND RESULT TYPES
# ============================================================================

@dataclass(frozen=True)
class CertifyConfig:
    """Search and decision tolerances. ``eps_cert`` < ``eps_ref`` opens the inconclusive band."""

    tol_s: float = TOL_S
    eps_cert: float = EPS_CERT
    eps_ref: float = EPS_REF
    cluster_tol: float = CLUSTER_TOL
    max_iter: int = MAX_ITER

    def validate(self) -> "CertifyConfig":
        """Return self, or raise InvalidConfig."""
        for name in ("tol_s", "eps_cert", "eps_ref"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise InvalidConfig(f"{name} must be a positive finite real, got {value!r}")
        if not self.cluster_tol >= 0.0:
            raise InvalidConfig(f"cluster_tol must be >= 0, got {self.cluster_tol!r}")
        if self.eps_cert >= self.eps_ref:
            raise InvalidConfig(
                f"eps_cert ({self.eps_cert!r}) must be smaller than eps_ref ({self.eps_ref!r})"
            )
        if self.max_iter < 1:
            raise InvalidConfig(f"max_iter must be >= 1, got {self.max_iter!r}")
        return self

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Bracket:
    """Three points lo < mid < hi (mid the log-midpoint) with f(mid) above both ends."""

    lo: float
    mid: float
    hi: float
    f_lo: float
    f_mid: float
    f_hi: float
    steps: int


@dataclass(frozen=True)
class SearchResult:
    alpha_star: float
    f_star: float
    iterations: int
    bracket: Bracket


@dataclass(frozen=True)
class Certificate:
    """alpha with T - alpha A - alpha^{-1} B having lambda_min = slack."""

    alpha: float
    slack: float
    iterations: int
    bracket: tuple[float, float]


@dataclass(frozen=True, eq=False)
class Refutation:
    """Unit witness x with sigma_0[x] = lhs < rhs = 2 sqrt(sigma_1[x] sigma_2[x])."""

    witness: np.ndarray
    lhs: float
    rhs: float
    gap: float
    alpha_star: float
    tau_mismatch: float

    def complex_witness(self) -> np.ndarray:
        """Witness in the complex picture when the instance was realified."""
        return complexify_vector(self.witness)


@dataclass(frozen=True)
class Certified:
    certificate: Certificate
    tag: ClassVar[str] = "certified"
    exit_code: ClassVar[int] = 0


@dataclass(frozen=True, eq=False)
class Refuted:
    refutation: Refutation
    f_star: float
    iterations: int
    bracket: tuple[float, float]
    tag: ClassVar[str] = "refuted"
    exit_code: ClassVar[int] = 1


@dataclass(frozen=True)
class Inconclusive:
    """Neither side could be established; carries the achieved maximum when known."""

    alpha_star: Optional[float]
    f_star: Optional[float]
    band: tuple[float, float]
    reason: str
    iterations: int = 0
    bracket: Optional[tuple[float, float]] = None
    tag: ClassVar[str] = "inconclusive"
    exit_code: ClassVar[int] = 2


Verdict = Union[Certified, Refuted, Inconclusive]


# ============================================================================
# SEARCH
# ============================================================================

def fval(inst: Instance, s: float) -> float:
    """f(s) = lambda_min(pencil(inst, s)); negative iff sigma^s is not PSD."""
    return min_eigenvalue(pencil(inst, s))


def _memo(inst: Instance) -> Callable[[float], float]:
    """Cached f; each solve starts from the eigenvectors of the previous one."""
    cache: dict[float, float] = {}
    basis: list[Optional[np.ndarray]] = [None]

    def f(s: float) -> float:
        if s not in cache:
            dec = eigh(pencil(inst, s), basis[0])
            basis[0] = dec.eigenvectors
            cache[s] = dec.lambda_min
        return cache[s]

    return f


def bracket(inst: Instance, f: Optional[Callable[[float], float]] = None) -> Bracket:
    """Walk from s = 1 in factors of 10 until f(mid) beats both neighbours.

    A flat stretch around mid widens the neighbours (mid stays the
    log-midpoint) until both fall strictly below f(mid).

    Raises:
        BracketOverflow: the walk left [BRACKET_MIN_S, BRACKET_MAX_S].
    """
    f = f or _memo(inst)
    mid, f_mid = 1.0, f(1.0)
    k = BRACKET_FACTOR
    steps = 0
    while True:
        lo, hi = mid / k, mid * k
        if lo < BRACKET_MIN_S or hi > BRACKET_MAX_S:
            raise BracketOverflow(lo, hi)
        f_lo, f_hi = f(lo), f(hi)
        steps += 1
        if f_lo < f_mid and f_hi < f_mid:
            logger.debug("Bracket [%.6g, %.6g] around %.6g after %d steps", lo, hi, mid, steps)
            return Bracket(lo, mid, hi, f_lo, f_mid, f_hi, steps)
        if f_lo > f_mid and f_lo >= f_hi:
            mid, f_mid, k = lo, f_lo, BRACKET_FACTOR
        elif f_hi > f_mid:
            mid, f_mid, k = hi, f_hi, BRACKET_FACTOR
        else:
            k *= BRACKET_FACTOR


def maximize(
    inst: Instance, tol_s: float = TOL_S, max_iter: int = MAX_ITER,
) -> SearchResult:
    """Golden-section search for the maximizer of the concave f over its bracket.

    Stops once the interval width is at most ``tol_s`` times its midpoint or
    after ``max_iter`` steps. Returns the best evaluated point, so f_star is
    never below any point the search visited.

    Raises:
        BracketOverflow: from ``bracket``.
    """
    f = _memo(inst)
    br = bracket(inst, f)
    a, b = br.lo, br.hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)

    best_s, best_f = br.mid, br.f_mid
    for s, value in ((x1, f1), (x2, f2)):
        if value > best_f:
            best_s, best_f = s, value

    iterations = 0
    while iterations < max_iter and (b - a) > tol_s * 0.5 * (a + b):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
            s, value = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
            s, value = x2, f2
        if value > best_f:
            best_s, best_f = s, value
        iterations += 1

    centre = 0.5 * (a + b)
    f_centre = f(centre)
    if f_centre > best_f:
        best_s, best_f = centre, f_centre

    logger.debug(
        "Section search: alpha*=%.12g f*=%.6e after %d steps (width %.3e)",
        best_s, best_f, iterations, b - a,
    )
    return SearchResult(best_s, best_f, iterations, br)


# ============================================================================
# WITNESS EXTRACTION
# ============================================================================

def _residual(inst: Instance, x: np.ndarray, alpha: float) -> float:
    """(alpha^-2 sigma_2 - sigma_1) / (alpha^-2 sigma_2 + sigma_1); zero iff tau(x) = alpha.

    NaN where sigma_1[x] = sigma_2[x] = 0.
    """
    a = max(float(x @ inst.a_psd.entries @ x), 0.0)
    b = max(float(x @ inst.b_psd.entries @ x), 0.0) / (alpha * alpha)
    denom = a + b
    if denom == 0.0:
        return math.nan
    return (b - a) / denom


def _accept(r: float) -> bool:
    # NaN: x lies in ker A and ker B, sigma^s[x] = sigma_0[x] for every s.
    return math.isnan(r) or abs(r) <= WITNESS_RESIDUAL_TOL


def _bisect_circle(
    inst: Instance, v_neg: np.ndarray, v_pos: np.ndarray, alpha: float,
) -> Optional[np.ndarray]:
    """Bisect the residual along cos(t) v_neg + sin(t) v_pos, t in [0, pi/2]."""
    lo, hi = 0.0, 0.5 * math.pi
    best_x, best_r = None, math.inf
    for _ in range(WITNESS_BISECTION_STEPS):
        theta = 0.5 * (lo + hi)
        x = math.cos(theta) * v_neg + math.sin(theta) * v_pos
        r = _residual(inst, x, alpha)
        if _accept(r):
            return x
        if abs(r) < best_r:
            best_x, best_r = x, abs(r)
        if r < 0.0:
            lo = theta
        else:
            hi = theta
        if hi - lo <= 1e-17:
            break
    logger.debug("Circle bisection stalled at |r|=%.3e", best_r)
    return None


def _search_eigenspace(
    inst: Instance, basis: np.ndarray, alpha: float,
) -> Optional[np.ndarray]:
    residuals = [_residual(inst, v, alpha) for v in basis]
    for v, r in zip(basis, residuals):
        if _accept(r):
            return v

    # Extreme directions of the stationarity form restricted to the eigenspace.
    stationarity = -inst.a_psd.entries + inst.b_psd.entries / (alpha * alpha)
    restricted = basis @ stationarity @ basis.T
    dec = eigh(0.5 * (restricted + restricted.T))
    if not (dec.lambda_min <= 0.0 <= dec.lambda_max):
        logger.debug(
            "Stationarity form one-signed on a %d-dim eigenspace: [%.3e, %.3e]",
            basis.shape[0], dec.lambda_min, dec.lambda_max,
        )
        return None
    v_neg = dec.eigenvectors[0] @ basis
    v_pos = dec.eigenvectors[-1] @ basis
    return _bisect_circle(inst, v_neg, v_pos, alpha)


def _lowest_direction(
    inst: Instance, s: float, basis: Optional[np.ndarray],
) -> tuple[float, np.ndarray]:
    """Residual of the lowest pencil eigenvector at s, and the eigenvectors."""
    vectors = eigh(pencil(inst, s), basis).eigenvectors
    return _residual(inst, vectors[0], s), vectors


def _polish_alpha(
    inst: Instance, alpha: float, tol_s: float,
) -> Optional[tuple[float, np.ndarray]]:
    """Bisect in s for the lowest pencil direction with zero residual.

    For a simple lambda_min the residual of its eigenvector has the sign of
    f'(s), so it changes sign across the maximizer. Returns (s, x) with x
    accepted at s, or None when the sign change is a jump (a crossing of
    two eigenvalues) rather than a zero.
    """
    r0, vectors = _lowest_direction(inst, alpha, None)
    if _accept(r0):
        return alpha, vectors[0]
    rising = r0 > 0.0

    # Walk outwards in doubling steps until the residual changes sign.
    near, far = alpha, None
    step = tol_s * alpha
    for _ in range(64):
        s = alpha + step if rising else alpha - step
        if not s > 0.0:
            break
        r, vectors = _lowest_direction(inst, s, vectors)
        if _accept(r):
            return s, vectors[0]
        if (r > 0.0) != rising:
            far = s
            break
        near = s
        step *= 2.0
    if far is None:
        return None

    for _ in range(WITNESS_BISECTION_STEPS):
        mid = 0.5 * (near + far)
        if mid in (near, far):
            break
        r, vectors = _lowest_direction(inst, mid, vectors)
        if _accept(r):
            return mid, vectors[0]
        if (r > 0.0) == rising:
            near = mid
        else:
            far = mid
    logger.debug("Alpha polish ended on a residual jump near s=%.17g", near)
    return None


def _sphere_fallback(inst: Instance, alpha: float) -> Optional[np.ndarray]:
    """Sample the circle spanned by the two lowest pencil directions."""
    if inst.dim < 2:
        return None
    p = pencil(inst, alpha).entries
    dec = eigh(p)
    v0, v1 = dec.eigenvectors[0], dec.eigenvectors[1]
    thetas = np.linspace(0.0, math.pi, WITNESS_SPHERE_SAMPLES, endpoint=False)
    points = np.outer(np.cos(thetas), v0) + np.outer(np.sin(thetas), v1)
    values = np.einsum("ij,jk,ik->i", points, p, points)
    residuals = np.array([_residual(inst, x, alpha) for x in points])

    best_x, best_value = None, 0.0
    for i in range(len(thetas)):
        j = (i + 1) % len(thetas)
        x_i = points[i]
        # The circle closes on itself with x(pi) = -x(0).
        x_j = points[j] if j else -points[0]
        if values[i] >= 0.0 or values[j] >= 0.0:
            continue
        if _accept(residuals[i]):
            x = x_i
        elif residuals[i] * residuals[j] <= 0.0:
            neg, pos = (x_i, x_j) if residuals[i] < 0.0 else (x_j, x_i)
            # neg and pos are close, not orthogonal: bisect on the chord, then normalize.
            x = _bisect_chord(inst, neg, pos, alpha)
            if x is None:
                continue
        else:
            continue
        value = float(x @ p @ x)
        if value < best_value:
            best_x, best_value = x, value
    return best_x


def _bisect_chord(
    inst: Instance, neg: np.ndarray, pos: np.ndarray, alpha: float,
) -> Optional[np.ndarray]:
    lo, hi = 0.0, 1.0
    for _ in range(WITNESS_BISECTION_STEPS):
        w = 0.5 * (lo + hi)
        x = (1.0 - w) * neg + w * pos
        x = x / np.linalg.norm(x)
        r = _residual(inst, x, alpha)
        if _accept(r):
            return x
        if r < 0.0:
            lo = w
        else:
            hi = w
        if hi - lo <= 1e-17:
            break
    return None


def _sign_fix(x: np.ndarray) -> np.ndarray:
    x = x / np.linalg.norm(x)
    lead = int(np.argmax(np.abs(x)))
    return -x if x[lead] < 0.0 else x


def refutation_for(inst: Instance, x: np.ndarray, alpha_star: float) -> Refutation:
    """Evaluate both sides of the pointwise bound at the unit vector along x."""
    witness = _sign_fix(np.asarray(x, dtype=float))
    witness.setflags(write=False)
    lhs = evaluate(inst.T, witness)
    a = max(evaluate(inst.A, witness), 0.0)
    b = max(evaluate(inst.B, witness), 0.0)
    rhs = 2.0 * math.sqrt(a * b)
    try:
        mismatch = abs(tau(inst, witness) - alpha_star)
    except BothZero:
        # sigma^s[x] does not depend on s here; every s matches.
        mismatch = 0.0
    return Refutation(witness, lhs, rhs, rhs - lhs, alpha_star, mismatch)


def extract_witness(
    inst: Instance, alpha_star: float, config: Optional[CertifyConfig] = None,
) -> Refutation:
    """Unit x in the minimal eigenspace of pencil(alpha_star) with tau(x) = alpha_star.

    Strategy: a basis vector with (near) zero stationarity residual;
    otherwise bisection on the unit circle between the extreme directions
    of the restricted stationarity form. A one-dimensional eigenspace has
    no circle to bisect: its vector is taken when tau matches alpha_star
    within TAU_MISMATCH_TOL * (1 + alpha_star) and the gap re-verifies;
    failing that alpha is polished and the witness is the lowest pencil
    direction there (``Refutation.alpha_star`` is then the polished value).
    Then the eigenspace search again with cluster_tol widened 100x; finally
    sampling the circle of the two lowest pencil directions.

    Raises:
        WitnessNotFound: all strategies exhausted.
    """
    cfg = config or CertifyConfig()
    p = pencil(inst, alpha_star)
    _, basis = min_eigenspace(p, cfg.cluster_tol)
    x = _search_eigenspace(inst, basis, alpha_star)
    if x is not None:
        return refutation_for(inst, x, alpha_star)

    if basis.shape[0] == 1:
        # Residual here is at the tol_s level of alpha_star.
        ref = refutation_for(inst, basis[0], alpha_star)
        if ref.tau_mismatch <= TAU_MISMATCH_TOL * (1.0 + alpha_star) and verify_refutation(
            inst, ref.witness, cfg.eps_ref,
        ):
            return ref
        polished = _polish_alpha(inst, alpha_star, cfg.tol_s)
        if polished is not None:
            alpha, x = polished
            logger.debug("Polished alpha %.17g -> %.17g for the witness", alpha_star, alpha)
            return refutation_for(inst, x, alpha)

    wide = cfg.cluster_tol * WITNESS_CLUSTER_WIDEN
    logger.warning(
        "No witness in the %d-dim eigenspace at alpha=%.6g, widening cluster_tol to %.1e",
        basis.shape[0], alpha_star, wide,
    )
    _, basis = min_eigenspace(p, wide)
    x = _search_eigenspace(inst, basis, alpha_star)
    if x is not None:
        return refutation_for(inst, x, alpha_star)

    x = _sphere_fallback(inst, alpha_star)
    if x is not None:
        logger.warning("Witness found by circle sampling at alpha=%.6g", alpha_star)
        return refutation_for(inst, x, alpha_star)
    raise WitnessNotFound(alpha_star, "eigenspace bisection and circle sampling failed")


# ============================================================================
# DECISION
# ============================================================================

def verify_certificate(inst: Instance, alpha: float, tol: float) -> bool:
    """Independent check that T - alpha A - alpha^{-1} B is PSD to ``tol``."""
    return psd_check(pencil(inst, alpha), tol)


def verify_refutation(inst: Instance, witness: np.ndarray, tol: float) -> bool:
    """Independent check that a unit witness violates the pointwise bound by more than tol * scale."""
    x = np.asarray(witness, dtype=float)
    if abs(float(np.linalg.norm(x)) - 1.0) > 1e-12:
        return False
    lhs = evaluate(inst.T, x)
    rhs = 2.0 * math.sqrt(max(evaluate(inst.A, x), 0.0) * max(evaluate(inst.B, x), 0.0))
    return rhs - lhs > tol * inst.scale


def certify(inst: Instance, config: Optional[CertifyConfig] = None) -> Verdict:
    """Decide the pointwise bound for ``inst``.

    Certified when max f >= -eps_cert * scale; Refuted when
    max f < -eps_ref * scale and the extracted witness re-verifies;
    Inconclusive otherwise (including bracket overflow and witness failure).

    Raises:
        InvalidConfig: inconsistent tolerances.
    """
    cfg = (config or CertifyConfig()).validate()
    band = (-cfg.eps_ref * inst.scale, -cfg.eps_cert * inst.scale)

    try:
        search = maximize(inst, cfg.tol_s, cfg.max_iter)
    except BracketOverflow as exc:
        logger.info("Inconclusive: %s", exc)
        return Inconclusive(None, None, band, reason=str(exc))

    span = (search.bracket.lo, search.bracket.hi)
    alpha, f_star = search.alpha_star, search.f_star

    if f_star >= band[1]:
        logger.info("Certified: alpha=%.12g slack=%.6e", alpha, f_star)
        return Certified(Certificate(alpha, f_star, search.iterations, span))

    if f_star >= band[0]:
        logger.info("Inconclusive: f*=%.6e inside the band [%.3e, %.3e)", f_star, *band)
        return Inconclusive(
            alpha, f_star, band, "maximum inside the inconclusive band",
            search.iterations, span,
        )

    try:
        ref = extract_witness(inst, alpha, cfg)
    except WitnessNotFound as exc:
        logger.warning("Inconclusive: %s", exc)
        return Inconclusive(alpha, f_star, band, str(exc), search.iterations, span)

    if not verify_refutation(inst, ref.witness, cfg.eps_ref):
        logger.error(
            "Witness failed re-verification at alpha=%.6g (gap=%.6e, needed > %.6e)",
            alpha, ref.gap, cfg.eps_ref * inst.scale,
        )
        return Inconclusive(
            alpha, f_star, band, "witness failed re-verification",
            search.iterations, span,
        )

    logger.info("Refuted: gap=%.6e at alpha=%.12g", ref.gap, alpha)
    return Refuted(ref, f_star, search.iterations, span)


def certify_hermitian(h: HermitianInstance, config: Optional[CertifyConfig] = None) -> Verdict:
    """Operator form for complex Hermitian triples: certify the realified instance.

    Certificates carry over unchanged; ``Refutation.complex_witness()`` maps
    a witness back to C^n.
    """
    return certify(realify(h), config)
