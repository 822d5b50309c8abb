"""Exception hierarchy for the certification engine.

Every error raised on purpose derives from ``TriformError`` so the CLI can
map the whole family to one exit code. Errors carry their payload as
attributes (which form failed, the offending eigenvalue, the line number)
rather than only in the message.
"""

from typing import Any, Optional


class TriformError(Exception):
    """Base class for all engine errors."""


# ── Matrix / form validation ────────────────────────────────────────────────

class ValidationError(TriformError):
    """An input failed a structural or hypothesis gate."""


class NonSymmetric(ValidationError):
    """Matrix asymmetry exceeds the symmetry gate."""

    def __init__(self, max_asymmetry: float, limit: float) -> None:
        super().__init__(
            f"matrix is not symmetric: max |m_ij - m_ji| = {max_asymmetry:.3g} > {limit:.3g}"
        )
        self.max_asymmetry = max_asymmetry
        self.limit = limit


class NonFinite(ValidationError):
    """Matrix or vector contains NaN or Inf."""


class DimensionMismatch(ValidationError):
    """Operands do not share a dimension."""


class NotPsd(ValidationError):
    """A or B fails the positive-semidefinite gate."""

    def __init__(self, which: str, lambda_min: float) -> None:
        super().__init__(f"form {which} is not PSD (lambda_min = {lambda_min:.6g})")
        self.which = which
        self.lambda_min = lambda_min


class ZeroForm(ValidationError):
    """A or B is the zero form; both must be non-zero."""

    def __init__(self, which: str) -> None:
        super().__init__(f"form {which} is zero; non-zero forms are required")
        self.which = which


class NotHermitian(ValidationError):
    """Complex matrix is not conjugate-symmetric."""

    def __init__(self, which: str) -> None:
        super().__init__(f"matrix {which} is not Hermitian")
        self.which = which


class NotProjection(ValidationError):
    """Matrix is not an orthogonal projection."""

    def __init__(self, which: str, defect: float) -> None:
        super().__init__(f"{which} is not a projection (||P^2 - P||_F = {defect:.3g})")
        self.which = which
        self.defect = defect


class NotOrthogonalPair(ValidationError):
    """P1 P2 is not zero to tolerance."""

    def __init__(self, defect: float) -> None:
        super().__init__(f"projections are not mutually orthogonal (||P1 P2||_F = {defect:.3g})")
        self.defect = defect


class LengthMismatch(ValidationError):
    """Sequences passed together have different lengths (or are empty)."""


class NegativeInput(ValidationError):
    """A value required to be nonnegative is negative."""


# ── Evaluation ──────────────────────────────────────────────────────────────

class NonPositiveS(TriformError):
    """Pencil parameter s is not a positive finite real."""

    def __init__(self, s: float) -> None:
        super().__init__(f"pencil parameter must be positive and finite, got {s!r}")
        self.s = s


class BothZero(TriformError):
    """sigma_1[x] = sigma_2[x] = 0, so tau(x) is undefined."""


class InvalidConfig(TriformError):
    """Certification tolerances are inconsistent."""


# ── Search ──────────────────────────────────────────────────────────────────

class BracketOverflow(TriformError):
    """Bracket expansion left [BRACKET_MIN_S, BRACKET_MAX_S]."""

    def __init__(self, s_lo: float, s_hi: float) -> None:
        super().__init__(
            f"bracket expansion left the search range at [{s_lo:.3g}, {s_hi:.3g}]"
        )
        self.s_lo = s_lo
        self.s_hi = s_hi


class WitnessNotFound(TriformError):
    """Every witness-extraction strategy failed."""

    def __init__(self, alpha_star: float, detail: str) -> None:
        super().__init__(f"no witness found at alpha = {alpha_star:.6g}: {detail}")
        self.alpha_star = alpha_star
        self.detail = detail


# ── Corollaries ─────────────────────────────────────────────────────────────

class PreconditionNotCertified(TriformError):
    """A corollary was asked for without a Certified verdict."""

    def __init__(self, tag: str) -> None:
        super().__init__(f"corollary requires a certified hypothesis, verdict was {tag}")
        self.tag = tag


class HypothesisRefuted(TriformError):
    """The corollary hypothesis is false; carries the refutation."""

    def __init__(self, refutation: Any) -> None:
        super().__init__(f"hypothesis refuted (gap = {refutation.gap:.6g})")
        self.refutation = refutation


class HypothesisUndecided(TriformError):
    """The corollary hypothesis landed in the inconclusive band."""

    def __init__(self, verdict: Any) -> None:
        super().__init__(f"hypothesis undecided: {getattr(verdict, 'reason', '')}")
        self.verdict = verdict


# ── Oracle ──────────────────────────────────────────────────────────────────

class UnsupportedDimension(TriformError):
    """A ground-truth routine does not cover this dimension."""

    def __init__(self, dim: int, routine: str = "sphere scan", supported: str = "2 and 3") -> None:
        super().__init__(f"{routine} supports dim {supported} only, got {dim}")
        self.dim = dim


class GeneratorExhausted(TriformError):
    """Generator retried its seed budget without success."""


# ── Instance files ──────────────────────────────────────────────────────────

class InstanceFormatError(TriformError):
    """Instance file does not follow the grammar."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class BadMagic(InstanceFormatError):
    """First line is not the format header."""


class BadDimension(InstanceFormatError):
    """Missing or malformed ``dim N`` line."""


class BadMatrixBlock(InstanceFormatError):
    """A matrix block has the wrong label, row count or row length."""


# ── Command line ────────────────────────────────────────────────────────────

class UsageError(TriformError):
    """Bad command-line arguments."""
