"""Randomized rounds: generate an instance, certify it, check what must hold.

Each round draws one instance from a family, runs ``certify`` and checks
the properties that family guarantees:

    certified   verdict Certified, certificate re-verified, trace bound holds
    tight       never Refuted
    violating   never Certified, every witness re-verified by evaluation

Rounds of dimension <= 3 are also compared with a sphere scan. Rounds run
in a process pool; results are ordered by round index, so the table and the
tally do not depend on completion order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

import pandas as pd

from certify import (
    CertifyConfig,
    Certified,
    Refuted,
    certify,
    verify_certificate,
    verify_refutation,
)
from config import FUZZ_MAX_DIM, FUZZ_MIN_DIM, FUZZ_WORKERS, RESULTS_DIR, SCAN_RESOLUTION
from corollaries import trace_check
from errors import GeneratorExhausted, InvalidConfig
from oracle import Family, GeneratorSpec, Lcg64, generate, sphere_scan

logger = logging.getLogger(__name__)

FAMILY_CHOICES = ("certified", "tight", "violating", "mixed")
_MIXED_CYCLE = (Family.CERTIFIED, Family.TIGHT, Family.VIOLATING)

# Violating rounds with shrink at most this must be refuted at least REFUTED_RATE of the time.
REFUTED_SHRINK_LIMIT = 0.9
REFUTED_RATE = 0.99


@dataclass(frozen=True)
class RoundPlan:
    index: int
    seed: int
    family: Family
    dim: int


@dataclass(frozen=True)
class RoundOutcome:
    index: int
    seed: int
    family: str
    dim: int
    verdict: str
    alpha: Optional[float]
    f_star: Optional[float]
    gap: Optional[float]
    oracle_min: Optional[float]
    failures: str

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class FuzzSummary:
    frame: pd.DataFrame
    family: str
    shrink: float

    @property
    def count(self) -> int:
        return len(self.frame)

    @property
    def passed(self) -> int:
        return int(self.frame["passed"].sum())

    def verdict_counts(self) -> dict[str, int]:
        counts = self.frame["verdict"].value_counts()
        return {tag: int(counts.get(tag, 0)) for tag in ("certified", "refuted", "inconclusive")}

    def refuted_rate(self) -> Optional[float]:
        violating = self.frame[self.frame["family"] == Family.VIOLATING.value]
        if violating.empty:
            return None
        return float((violating["verdict"] == "refuted").mean())

    @property
    def properties_held(self) -> bool:
        if self.passed != self.count:
            return False
        rate = self.refuted_rate()
        if rate is not None and self.shrink <= REFUTED_SHRINK_LIMIT:
            return rate >= REFUTED_RATE
        return True

    def tally_lines(self) -> list[str]:
        lines = [f"{self.passed}/{self.count} rounds passed"]
        lines.extend(f"{n}/{self.count} {tag}" for tag, n in self.verdict_counts().items())
        return lines


# ============================================================================
# ROUNDS
# ============================================================================

def plan_rounds(
    count: int,
    seed: int,
    family: str,
    dim: Optional[int] = None,
    dims: tuple[int, int] = (FUZZ_MIN_DIM, FUZZ_MAX_DIM),
) -> list[RoundPlan]:
    """Seeds and dimensions for every round, drawn up front from one Lcg64 stream."""
    if count < 1:
        raise InvalidConfig(f"count must be >= 1, got {count}")
    if not 2 <= dims[0] <= dims[1]:
        raise InvalidConfig(f"dimension range must satisfy 2 <= lo <= hi, got {dims!r}")
    if family not in FAMILY_CHOICES:
        raise InvalidConfig(f"unknown family {family!r}; choose from {', '.join(FAMILY_CHOICES)}")
    rng = Lcg64(seed)
    plans = []
    for index in range(count):
        round_seed = rng.next_u64() >> 1
        round_dim = dims[0] + rng.below(dims[1] - dims[0] + 1)
        if dim is not None:
            round_dim = dim
        fam = _MIXED_CYCLE[index % 3] if family == "mixed" else Family(family)
        plans.append(RoundPlan(index, round_seed, fam, round_dim))
    return plans


def run_round(
    plan: RoundPlan,
    config: CertifyConfig,
    alpha: float = 1.0,
    shrink: float = 0.5,
    resolution: float = SCAN_RESOLUTION,
) -> RoundOutcome:
    spec = GeneratorSpec(plan.dim, plan.seed, plan.family, alpha=alpha, shrink=shrink)
    try:
        inst, _ = generate(spec)
    except GeneratorExhausted as exc:
        logger.warning("Round %d: %s", plan.index, exc)
        return RoundOutcome(
            plan.index, plan.seed, plan.family.value, plan.dim, "none",
            None, None, None, None, "generator-exhausted",
        )
    verdict = certify(inst, config)
    failures = []

    alpha_out = f_star = gap = oracle_min = None
    if isinstance(verdict, Certified):
        alpha_out, f_star = verdict.certificate.alpha, verdict.certificate.slack
        if not verify_certificate(inst, alpha_out, config.eps_ref):
            failures.append("certificate-unverified")
        if not trace_check(inst, verdict, config.eps_cert).holds:
            failures.append("trace-bound")
    elif isinstance(verdict, Refuted):
        alpha_out, f_star, gap = verdict.refutation.alpha_star, verdict.f_star, verdict.refutation.gap
        if not verify_refutation(inst, verdict.refutation.witness, config.eps_ref):
            failures.append("witness-unverified")
    else:
        alpha_out, f_star = verdict.alpha_star, verdict.f_star

    if plan.family is Family.CERTIFIED and not isinstance(verdict, Certified):
        failures.append("not-certified")
    if plan.family is Family.VIOLATING and isinstance(verdict, Certified):
        failures.append("violating-certified")
    if plan.family is Family.TIGHT and isinstance(verdict, Refuted):
        failures.append("tight-refuted")

    if inst.dim <= 3:
        scan = sphere_scan(inst, resolution)
        oracle_min = scan.min_value
        if abs(scan.min_value) > 10.0 * config.eps_ref * inst.scale:
            if (scan.min_value >= 0.0 and isinstance(verdict, Refuted)) or (
                scan.min_value < 0.0 and isinstance(verdict, Certified)
            ):
                failures.append("oracle-disagrees")

    if failures:
        logger.warning("Round %d (%s, dim %d, seed %d) failed: %s",
                       plan.index, plan.family.value, plan.dim, plan.seed, ", ".join(failures))
    return RoundOutcome(
        plan.index, plan.seed, plan.family.value, plan.dim, verdict.tag,
        alpha_out, f_star, gap, oracle_min, ";".join(failures),
    )


def run_fuzz(
    count: int,
    seed: int,
    family: str = "mixed",
    dim: Optional[int] = None,
    config: Optional[CertifyConfig] = None,
    alpha: float = 1.0,
    shrink: float = 0.5,
    resolution: float = SCAN_RESOLUTION,
    workers: int = FUZZ_WORKERS,
    dims: tuple[int, int] = (FUZZ_MIN_DIM, FUZZ_MAX_DIM),
) -> FuzzSummary:
    """Run ``count`` rounds on ``workers`` processes and tabulate them by index.

    ``workers <= 1`` runs the rounds inline. The table is identical either way.
    """
    cfg = (config or CertifyConfig()).validate()
    plans = plan_rounds(count, seed, family, dim, dims)
    results: dict[int, RoundOutcome] = {}

    def _record(outcome: RoundOutcome) -> None:
        results[outcome.index] = outcome
        if len(results) % 50 == 0:
            logger.info("Progress: %d/%d rounds", len(results), count)

    if workers <= 1:
        logger.info("Running %d %s rounds (seed %d) inline...", count, family, seed)
        for plan in plans:
            _record(run_round(plan, cfg, alpha, shrink, resolution))
    else:
        logger.info("Running %d %s rounds (seed %d) on %d processes...", count, family, seed, workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(run_round, plan, cfg, alpha, shrink, resolution)
                for plan in plans
            ]
            for future in as_completed(futures):
                _record(future.result())

    rows = []
    for index in sorted(results):
        row = asdict(results[index])
        row["passed"] = results[index].passed
        rows.append(row)
    frame = pd.DataFrame(rows)
    summary = FuzzSummary(frame, family, shrink)
    logger.info("Fuzz done: %s", "; ".join(summary.tally_lines()))
    return summary


def save_table(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info("Saved round table: %s", path)
    return path


def save_snapshot(frame: pd.DataFrame, prefix: str, results_dir: Path = RESULTS_DIR) -> Path:
    """Timestamped CSV snapshot under ``results_dir``."""
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    return save_table(frame, Path(results_dir) / f"{prefix}_{timestamp}.csv")
