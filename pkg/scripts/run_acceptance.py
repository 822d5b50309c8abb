"""
Full-volume acceptance run.

Runs the property suites at their full sizes, saves one CSV snapshot per
suite under RESULTS_DIR and exits non-zero if any property failed:

    linalg      1000 symmetric matrices, dim 1-12, reconstruction and
                orthonormality; closed-form roots for dim <= 3
    oracle      200 mixed rounds, dim 2-3, certify vs sphere scan
    certified   500 certified rounds, dim 2-12
    violating   500 violating rounds (shrink 0.5), dim 2-12
    concavity   500 chord checks of f(s) = lambda_min(T - sA - B/s)
    symmetry    200 swap checks f_swap(1/s) = f(s), 200 scaling checks
    hs          200 Hilbert-Schmidt trials with random projections and L
    averages    200 operator-generated collections

Usage:
    python scripts/run_acceptance.py
    python scripts/run_acceptance.py --seed 11 --workers 8
"""

import argparse
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from certify import Certified, certify, fval
from config import FUZZ_WORKERS, LOG_FORMAT, RESULTS_DIR
from corollaries import averages_from_operator, hs_check, trace_check
from fuzz import run_fuzz, save_snapshot
from linalg import eigh
from oracle import (
    Family,
    GeneratorSpec,
    Lcg64,
    closed_form_eigenvalues,
    gen_certified,
    random_orthogonal,
    random_projection_pair,
)

logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


def _random_s(rng: Lcg64) -> float:
    return 10.0 ** (3.0 * rng.uniform())


def _spec(rng: Lcg64) -> GeneratorSpec:
    return GeneratorSpec(2 + rng.below(11), rng.next_u64() >> 1, Family.CERTIFIED, alpha=_random_s(rng))


def linalg_suite(seed: int, count: int = 1000) -> pd.DataFrame:
    rng = Lcg64(seed)
    rows = []
    for index in range(count):
        dim = 1 + rng.below(12)
        m = rng.matrix(dim, dim)
        m = m + m.T
        dec = eigh(m)
        norm = float(np.linalg.norm(m))
        recon_err = float(np.linalg.norm(m - dec.reconstruct()))
        ortho_err = float(np.linalg.norm(dec.eigenvectors @ dec.eigenvectors.T - np.eye(dim)))
        closed_err = math.nan
        passed = recon_err <= 1e-9 * (1.0 + norm) and ortho_err <= 1e-9
        if dim <= 3:
            closed_err = float(np.max(np.abs(dec.eigenvalues - closed_form_eigenvalues(m))))
            passed = passed and closed_err <= 1e-8 * (1.0 + norm)
        rows.append({"index": index, "dim": dim, "sweeps": dec.sweeps, "recon_err": recon_err,
                     "ortho_err": ortho_err, "closed_err": closed_err, "passed": passed})
    return pd.DataFrame(rows)


def concavity_suite(seed: int, count: int = 500) -> pd.DataFrame:
    rng = Lcg64(seed)
    rows = []
    for index in range(count):
        inst = gen_certified(_spec(rng))
        s1, s2, s3 = sorted(_random_s(rng) for _ in range(3))
        w = (s3 - s2) / (s3 - s1) if s3 > s1 else 0.5
        chord = w * fval(inst, s1) + (1.0 - w) * fval(inst, s3)
        defect = chord - fval(inst, s2)
        rows.append({"index": index, "s1": s1, "s2": s2, "s3": s3, "defect": defect,
                     "passed": defect <= 1e-9 * inst.scale})
    return pd.DataFrame(rows)


def symmetry_suite(seed: int, count: int = 200) -> pd.DataFrame:
    rng = Lcg64(seed)
    rows = []
    for index in range(count):
        inst = gen_certified(_spec(rng))
        s = _random_s(rng)
        swap_err = abs(fval(inst.swapped(), 1.0 / s) - fval(inst, s))
        c = _random_s(rng)
        scaled = inst.scaled(c)
        scale_err = abs(fval(scaled, s) - c * fval(inst, s))
        same_tag = certify(scaled).tag == certify(inst).tag
        rows.append({
            "index": index, "s": s, "c": c, "swap_err": swap_err, "scale_err": scale_err,
            "passed": swap_err <= 1e-10 * inst.scale and scale_err <= 1e-9 * c * inst.scale and same_tag,
        })
    return pd.DataFrame(rows)


def hs_suite(seed: int, count: int = 200) -> pd.DataFrame:
    rng = Lcg64(seed)
    rows = []
    for index in range(count):
        dim = 2 + rng.below(7)
        p1, p2 = random_projection_pair(rng, dim)
        inst = gen_certified(GeneratorSpec(dim, rng.next_u64() >> 1, a_override=p1, b_override=p2,
                                           alpha=_random_s(rng)))
        m = 1 + rng.below(dim)
        lmat = rng.matrix(dim, m)
        if m > 1 and rng.below(2):
            lmat[:, -1] = lmat[:, 0]  # rank-deficient
        report = hs_check(inst.T, p1, p2, lmat)
        consistent = True
        if report.reduced_instance is not None and report.reduced_tag == "certified":
            reduced = report.reduced_instance
            tr = trace_check(reduced, certify(reduced))
            consistent = math.isclose(tr.margin, report.margin, rel_tol=1e-10, abs_tol=1e-10 * reduced.scale)
        rows.append({"index": index, "dim": dim, "m": m, "margin": report.margin,
                     "passed": report.holds and consistent})
    return pd.DataFrame(rows)


def averages_suite(seed: int, count: int = 200) -> pd.DataFrame:
    rng = Lcg64(seed)
    rows = []
    for index in range(count):
        inst = gen_certified(_spec(rng))
        verdict = certify(inst)
        if not isinstance(verdict, Certified):
            rows.append({"index": index, "passed": False})
            continue
        report = averages_from_operator(inst, verdict, random_orthogonal(rng, inst.dim).T)
        rows.append({"index": index, "t_mean": report.t_mean, "ga": report.ga,
                     "passed": bool(report.special_holds and report.cauchy_schwarz_holds)})
    return pd.DataFrame(rows)


def main() -> None:
    parser = argparse.ArgumentParser(description="Run the full acceptance suites")
    parser.add_argument("--seed", type=int, default=7, help="base seed (default: 7)")
    parser.add_argument("--workers", type=int, default=FUZZ_WORKERS,
                        help=f"fuzz worker processes (default: {FUZZ_WORKERS})")
    args = parser.parse_args()

    suites = {
        "linalg": lambda: linalg_suite(args.seed + 7),
        "oracle": lambda: run_fuzz(200, args.seed, "mixed", workers=args.workers, dims=(2, 3)).frame,
        "certified": lambda: run_fuzz(500, args.seed + 1, "certified", workers=args.workers).frame,
        "violating": lambda: run_fuzz(500, args.seed + 2, "violating", shrink=0.5,
                                      workers=args.workers).frame,
        "concavity": lambda: concavity_suite(args.seed + 3),
        "symmetry": lambda: symmetry_suite(args.seed + 4),
        "hs": lambda: hs_suite(args.seed + 5),
        "averages": lambda: averages_suite(args.seed + 6),
    }

    logger.info("Starting acceptance run (seed %d), snapshots in %s", args.seed, RESULTS_DIR)
    all_passed = True
    for name, suite in suites.items():
        started = time.perf_counter()
        frame = suite()
        elapsed = time.perf_counter() - started
        passed = int(frame["passed"].sum())
        save_snapshot(frame, f"acceptance_{name}")
        ok = passed == len(frame)
        if name == "violating":
            rate = float((frame["verdict"] == "refuted").mean())
            ok = ok and rate >= 0.99
            logger.info("violating: refuted rate %.3f", rate)
        logger.log(logging.INFO if ok else logging.ERROR,
                   "%s: %d/%d passed in %.1fs", name, passed, len(frame), elapsed)
        all_passed = all_passed and ok

    if not all_passed:
        logger.error("Acceptance run failed")
        sys.exit(1)
    logger.info("Acceptance run complete: all suites passed.")


if __name__ == "__main__":
    main()
