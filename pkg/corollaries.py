"""Consequences of a certified triple: trace, Hilbert-Schmidt and averages checks.

A certificate alpha for (T, A, B) is an operator inequality
T >= alpha A + alpha^{-1} B, so it survives any positive linear map. Taking
the trace, compressing by L^T . L, or summing diagonal entries over a
system of vectors gives the three checks below; each is followed by scalar
AM-GM.

Usage:
    from corollaries import trace_check
    report = trace_check(inst, certify(inst))
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from certify import (
    CertifyConfig,
    Certified,
    Inconclusive,
    Refuted,
    Verdict,
    certify,
    verify_certificate,
)
from config import EPS_CERT, PROJECTION_TOL
from errors import (
    DimensionMismatch,
    HypothesisRefuted,
    HypothesisUndecided,
    LengthMismatch,
    NegativeInput,
    NonFinite,
    NotOrthogonalPair,
    NotProjection,
    PreconditionNotCertified,
)
from forms import Instance, evaluate, realify_matrix, validate_instance
from linalg import ArrayLike, SymmetricMatrix, as_symmetric

logger = logging.getLogger(__name__)


# ============================================================================
# REPORTS
# ============================================================================

@dataclass(frozen=True)
class TraceReport:
    trace_t: float
    bound: float
    margin: float
    alpha: float
    holds: bool


@dataclass(frozen=True, eq=False)
class HsReport:
    """trace(L^T T L) against 2 ||P1 L||_HS ||P2 L||_HS.

    ``reduced_instance`` is the compressed triple (L^T T L, L^T P1 L,
    L^T P2 L), or None when L kills the range of P1 or P2 (a zero form).
    """

    lhs: float
    rhs: float
    margin: float
    scale: float
    holds: bool
    hypothesis_alpha: float
    reduced_instance: Optional[Instance]
    reduced_tag: Optional[str]
    reduced_alpha: Optional[float]
    alpha_transfers: Optional[bool]


@dataclass(frozen=True)
class AveragesReport:
    n: int
    ag: float
    ga: float
    t_mean: float
    special: bool
    cauchy_schwarz_holds: bool
    special_holds: Optional[bool]


# ============================================================================
# TRACE
# ============================================================================

def _require_certified(verdict: Verdict) -> Certified:
    if not isinstance(verdict, Certified):
        raise PreconditionNotCertified(verdict.tag)
    return verdict


def trace_check(inst: Instance, verdict: Verdict, eps_cert: float = EPS_CERT) -> TraceReport:
    """trace T - 2 sqrt(trace A * trace B) for a certified instance.

    Raises:
        PreconditionNotCertified: ``verdict`` is not Certified.
    """
    cert = _require_certified(verdict).certificate
    trace_t = float(np.trace(inst.T.entries))
    trace_a = max(float(np.trace(inst.A.entries)), 0.0)
    trace_b = max(float(np.trace(inst.B.entries)), 0.0)
    bound = 2.0 * math.sqrt(trace_a * trace_b)
    margin = trace_t - bound
    holds = margin >= -eps_cert * inst.scale
    if not holds:
        logger.error("Trace bound fails on a certified instance: margin=%.6e", margin)
    return TraceReport(trace_t, bound, margin, cert.alpha, holds)


# ============================================================================
# HILBERT-SCHMIDT
# ============================================================================

def projection_defect(p: Union[SymmetricMatrix, ArrayLike]) -> float:
    m = as_symmetric(p).entries
    return float(np.linalg.norm(m @ m - m))


def projection_check(p: Union[SymmetricMatrix, ArrayLike], tol: float = PROJECTION_TOL) -> bool:
    """True iff ||P^2 - P||_F <= tol * (1 + ||P||_F)."""
    sym = as_symmetric(p)
    return projection_defect(sym) <= tol * (1.0 + sym.frobenius)


def _as_lmat(L: Optional[ArrayLike], dim: int) -> np.ndarray:
    if L is None:
        return np.eye(dim)
    lmat = np.asarray(L, dtype=float)
    if lmat.ndim == 1:
        lmat = lmat[:, None]
    if lmat.ndim != 2 or lmat.shape[0] != dim or lmat.shape[1] == 0:
        raise DimensionMismatch(f"L must be {dim} x m with m >= 1, got shape {lmat.shape}")
    if not np.all(np.isfinite(lmat)):
        raise NonFinite("L has NaN or Inf entries")
    return lmat


def _compressed_is_zero(m: np.ndarray, lmat: np.ndarray) -> bool:
    return float(np.linalg.norm(m)) <= PROJECTION_TOL * (1.0 + float(np.linalg.norm(lmat)) ** 2)


def hs_check(
    T: Union[SymmetricMatrix, ArrayLike],
    P1: Union[SymmetricMatrix, ArrayLike],
    P2: Union[SymmetricMatrix, ArrayLike],
    L: Optional[ArrayLike] = None,
    config: Optional[CertifyConfig] = None,
) -> HsReport:
    """Check trace(L^T T L) >= 2 ||P1 L||_HS ||P2 L||_HS.

    The hypothesis x^T T x >= 2 ||P1 x|| ||P2 x|| is the pointwise bound for
    (T, P1, P2) since ||P x||^2 = x^T P x for an orthogonal projection, so
    it is certified first. The compressed triple is then certified on its
    own, and the hypothesis alpha is checked to carry over to it.

    Raises:
        NotProjection, NotOrthogonalPair: the P gates failed.
        HypothesisRefuted: (T, P1, P2) violates the hypothesis.
        HypothesisUndecided: the hypothesis landed in the inconclusive band.
    """
    cfg = (config or CertifyConfig()).validate()
    t, p1, p2 = as_symmetric(T), as_symmetric(P1), as_symmetric(P2)
    if not t.dim == p1.dim == p2.dim:
        raise DimensionMismatch(f"T, P1, P2 must share a dimension, got {t.dim}, {p1.dim}, {p2.dim}")
    for which, p in (("P1", p1), ("P2", p2)):
        if not projection_check(p):
            raise NotProjection(which, projection_defect(p))
    cross = float(np.linalg.norm(p1.entries @ p2.entries))
    if cross > PROJECTION_TOL * (1.0 + p1.frobenius * p2.frobenius):
        raise NotOrthogonalPair(cross)

    hypothesis = certify(validate_instance(t, p1, p2), cfg)
    if isinstance(hypothesis, Refuted):
        raise HypothesisRefuted(hypothesis.refutation)
    if isinstance(hypothesis, Inconclusive):
        raise HypothesisUndecided(hypothesis)
    alpha = hypothesis.certificate.alpha

    lmat = _as_lmat(L, t.dim)
    rt = lmat.T @ t.entries @ lmat
    r1 = lmat.T @ p1.entries @ lmat
    r2 = lmat.T @ p2.entries @ lmat
    lhs = float(np.trace(rt))
    rhs = 2.0 * float(np.linalg.norm(p1.entries @ lmat)) * float(np.linalg.norm(p2.entries @ lmat))
    margin = lhs - rhs
    scale = float(np.linalg.norm(rt) + np.linalg.norm(r1) + np.linalg.norm(r2))
    holds = margin >= -cfg.eps_cert * scale

    reduced: Optional[Instance] = None
    reduced_tag = reduced_alpha = transfers = None
    if _compressed_is_zero(r1, lmat) or _compressed_is_zero(r2, lmat):
        logger.info("L annihilates the range of a projection; the compressed triple has a zero form")
    else:
        reduced = validate_instance(0.5 * (rt + rt.T), 0.5 * (r1 + r1.T), 0.5 * (r2 + r2.T))
        reduced_verdict = certify(reduced, cfg)
        reduced_tag = reduced_verdict.tag
        if isinstance(reduced_verdict, Certified):
            reduced_alpha = reduced_verdict.certificate.alpha
        transfers = verify_certificate(reduced, alpha, cfg.eps_ref)

    logger.info("HS check: lhs=%.6g rhs=%.6g margin=%.3e (alpha=%.6g)", lhs, rhs, margin, alpha)
    return HsReport(
        lhs, rhs, margin, scale, holds, alpha, reduced, reduced_tag, reduced_alpha, transfers,
    )


def hs_check_hermitian(
    T: ArrayLike,
    P1: ArrayLike,
    P2: ArrayLike,
    L: Optional[ArrayLike] = None,
    config: Optional[CertifyConfig] = None,
) -> HsReport:
    """Complex variant: realify every matrix, check, map the values back.

    Realification doubles traces and squared HS norms, so lhs, rhs and
    margin are halved; Frobenius norms grow by sqrt(2), so the scale is
    divided by it and ``holds`` is re-decided on the complex figures.
    """
    cfg = (config or CertifyConfig()).validate()
    dim = np.asarray(T).shape[0]
    lmat = np.eye(dim, dtype=complex) if L is None else np.asarray(L, dtype=complex)
    if lmat.ndim == 1:
        lmat = lmat[:, None]
    report = hs_check(
        realify_matrix(T), realify_matrix(P1), realify_matrix(P2), realify_matrix(lmat), cfg,
    )
    margin = 0.5 * report.margin
    scale = report.scale / math.sqrt(2.0)
    return replace(
        report,
        lhs=0.5 * report.lhs,
        rhs=0.5 * report.rhs,
        margin=margin,
        scale=scale,
        holds=margin >= -cfg.eps_cert * scale,
    )


# ============================================================================
# AVERAGES
# ============================================================================

def averages_check(
    a: Sequence[float], b: Sequence[float], t: Sequence[float], special: bool = False,
) -> AveragesReport:
    """Arithmetic mean of geometric means vs geometric mean of arithmetic means.

    ga >= ag is Cauchy-Schwarz and holds for any nonnegative input. For
    collections read off a certified operator (t_i = x_i^T T x_i / 2) the
    stronger t_mean >= ga holds as well; ``special`` asks for that check.

    Raises:
        LengthMismatch: a, b, t differ in length or are empty.
        NegativeInput: some a_i or b_i is negative.
    """
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    tv = np.asarray(t, dtype=float)
    if not (av.ndim == bv.ndim == tv.ndim == 1) or not len(av) == len(bv) == len(tv):
        raise LengthMismatch(f"a, b, t must be equal-length sequences, got {len(av)}, {len(bv)}, {len(tv)}")
    if len(av) == 0:
        raise LengthMismatch("a, b, t are empty")
    if np.any(av < 0.0) or np.any(bv < 0.0):
        raise NegativeInput("a and b must be nonnegative")

    n = len(av)
    ag = float(np.sum(np.sqrt(av * bv))) / n
    ga = math.sqrt(float(np.sum(av)) * float(np.sum(bv))) / n
    t_mean = float(np.sum(tv)) / n

    cs_holds = ga >= ag - 1e-12 * (1.0 + ga)
    special_holds = t_mean >= ga - 1e-10 * (1.0 + ga) if special else None
    if special and not special_holds:
        logger.warning("Special-collection bound fails: t_mean=%.6g < ga=%.6g", t_mean, ga)
    return AveragesReport(n, ag, ga, t_mean, special, cs_holds, special_holds)


def averages_from_operator(
    inst: Instance, verdict: Verdict, vectors: ArrayLike,
) -> AveragesReport:
    """Collections a_i = x_i^T A x_i, b_i = x_i^T B x_i, t_i = x_i^T T x_i / 2 over rows x_i.

    Raises:
        PreconditionNotCertified: ``verdict`` is not Certified.
    """
    _require_certified(verdict)
    rows = np.atleast_2d(np.asarray(vectors, dtype=float))
    a = [max(evaluate(inst.A, x), 0.0) for x in rows]
    b = [max(evaluate(inst.B, x), 0.0) for x in rows]
    t = [0.5 * evaluate(inst.T, x) for x in rows]
    return averages_check(a, b, t, special=True)
