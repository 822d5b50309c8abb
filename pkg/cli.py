"""
Command-line interface.

Commands:
    certify PATH      decide the pointwise bound        exit 0 / 1 / 2
    oracle PATH       sphere scan (dim 2 or 3)           exit 0
    trace PATH        trace corollary                    exit 0 / 1 / 2
    hs PATH           Hilbert-Schmidt corollary          exit 0 / 1 / 2
    fuzz              generator + certify + oracle rounds, exit 0 iff all held
    gen               write an instance file for a generator spec

Exit 3 means bad input or usage. PATH '-' reads standard input. Reports go
to standard output, logs to standard error.

Usage:
    python cli.py certify canonical.txt --json
    python cli.py fuzz --count 100 --seed 7 --family certified
"""

import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from certify import CertifyConfig, Certified, Refuted, certify
from config import (
    EPS_CERT,
    EPS_REF,
    FUZZ_WORKERS,
    LOG_FORMAT,
    LOG_LEVEL,
    MAX_ITER,
    SCAN_RESOLUTION,
    TOL_S,
)
from corollaries import hs_check, hs_check_hermitian, trace_check
from errors import HypothesisRefuted, HypothesisUndecided, TriformError, UsageError
from fuzz import FAMILY_CHOICES, run_fuzz, save_table
from instance_io import InstanceFile, load, parse_instance, read_matrix, serialize, write
from oracle import Family, GeneratorSpec, generate, grid_alpha, sphere_scan
from reports import (
    Report,
    hs_report,
    hypothesis_report,
    scan_report,
    trace_report,
    verdict_report,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ============================================================================
# ARGUMENTS
# ============================================================================

def _config_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--tol-s", type=float, default=TOL_S, help=f"section-search tolerance (default: {TOL_S})")
    parent.add_argument("--eps-cert", type=float, default=EPS_CERT, help=f"certify band (default: {EPS_CERT})")
    parent.add_argument("--eps-ref", type=float, default=EPS_REF, help=f"refute band (default: {EPS_REF})")
    parent.add_argument("--max-iter", type=int, default=MAX_ITER, help=f"section steps (default: {MAX_ITER})")
    return parent


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--json", action="store_true", help="machine-readable report")
    parent.add_argument("--verbose", action="store_true", help="debug logging on standard error")
    return parent


def _generator_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=0, help="generator seed (default: 0)")
    parent.add_argument("--alpha", type=float, default=1.0, help="construction alpha (default: 1.0)")
    parent.add_argument("--shrink", type=float, default=0.5, help="violating shrink c in (0, 1) (default: 0.5)")
    parent.add_argument("--dim", type=int, default=None, help="instance dimension")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="triform", description="Certify or refute sigma_0 >= 2 sqrt(sigma_1 sigma_2)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    config, common, gen = _config_flags(), _common_flags(), _generator_flags()

    p = sub.add_parser("certify", parents=[config, common], help="certify or refute an instance")
    p.add_argument("path", help="instance file, '-' for standard input")

    p = sub.add_parser("oracle", parents=[common], help="sphere scan of a dim 2 or 3 instance")
    p.add_argument("path")
    p.add_argument("--resolution", type=float, default=SCAN_RESOLUTION,
                   help=f"grid step in radians (default: {SCAN_RESOLUTION})")

    p = sub.add_parser("trace", parents=[config, common], help="trace corollary")
    p.add_argument("path")

    p = sub.add_parser("hs", parents=[config, common], help="Hilbert-Schmidt corollary; A, B blocks are P1, P2")
    p.add_argument("path")
    p.add_argument("--lmat", default=None, help="file with the rows of L (default: identity)")

    p = sub.add_parser("fuzz", parents=[config, common, gen], help="randomized property rounds")
    p.add_argument("--count", type=int, default=100, help="rounds (default: 100)")
    p.add_argument("--family", choices=FAMILY_CHOICES, default="mixed")
    p.add_argument("--resolution", type=float, default=SCAN_RESOLUTION)
    p.add_argument("--workers", type=int, default=FUZZ_WORKERS,
                   help=f"worker processes, 1 runs inline (default: FUZZ_WORKERS or {FUZZ_WORKERS})")
    p.add_argument("--csv", default=None, help="write the per-round table here")

    p = sub.add_parser("gen", parents=[common, gen], help="write a generated instance file")
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.CERTIFIED.value)
    p.add_argument("--output", default=None, help="instance file path (default: standard output)")

    return parser


def _certify_config(args: argparse.Namespace) -> CertifyConfig:
    return CertifyConfig(
        tol_s=args.tol_s, eps_cert=args.eps_cert, eps_ref=args.eps_ref, max_iter=args.max_iter,
    ).validate()


# ============================================================================
# COMMANDS
# ============================================================================

def _emit(report: Report, args: argparse.Namespace) -> None:
    sys.stdout.write(report.render(args.json))


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = _certify_config(args)
    inst = parse_instance(args.path)
    verdict = certify(inst, cfg)
    _emit(verdict_report(verdict, inst, cfg, source=args.path), args)
    return verdict.exit_code


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = parse_instance(args.path)
    scan = sphere_scan(inst, args.resolution)
    _emit(scan_report(scan, inst, grid_alpha(inst), source=args.path), args)
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    cfg = _certify_config(args)
    inst = parse_instance(args.path)
    verdict = certify(inst, cfg)
    if isinstance(verdict, Refuted):
        _emit(hypothesis_report("trace", HypothesisRefuted(verdict.refutation), args.path), args)
        return EXIT_REFUTED
    if not isinstance(verdict, Certified):
        _emit(hypothesis_report("trace", HypothesisUndecided(verdict), args.path), args)
        return EXIT_INCONCLUSIVE
    report = trace_check(inst, verdict, cfg.eps_cert)
    _emit(trace_report(report, inst, source=args.path), args)
    return EXIT_OK if report.holds else EXIT_INCONCLUSIVE


def cmd_hs(args: argparse.Namespace) -> int:
    cfg = _certify_config(args)
    doc = load(args.path)
    lmat: Optional[np.ndarray] = None if args.lmat is None else read_matrix(args.lmat)
    check = hs_check_hermitian if doc.is_complex else hs_check
    try:
        report = check(doc.T, doc.A, doc.B, lmat, cfg)
    except (HypothesisRefuted, HypothesisUndecided) as exc:
        _emit(hypothesis_report("hs", exc, args.path), args)
        return EXIT_REFUTED if isinstance(exc, HypothesisRefuted) else EXIT_INCONCLUSIVE
    _emit(hs_report(report, source=args.path), args)
    return EXIT_OK if report.holds else EXIT_INCONCLUSIVE


def cmd_fuzz(args: argparse.Namespace) -> int:
    cfg = _certify_config(args)
    summary = run_fuzz(
        args.count, args.seed, args.family, args.dim, cfg,
        alpha=args.alpha, shrink=args.shrink, resolution=args.resolution, workers=args.workers,
    )
    if args.csv:
        save_table(summary.frame, args.csv)

    held = summary.properties_held
    report = Report("fuzz", "passed" if held else "failed")
    report.add("family", args.family).add("seed", args.seed).add("count", summary.count)
    report.add("tally", summary.tally_lines())
    report.add("refuted_rate", summary.refuted_rate())
    failed = summary.frame[~summary.frame["passed"]]
    report.add("failed_rounds", [int(i) for i in failed["index"]])
    if args.json:
        _emit(report, args)
    else:
        report.fields.pop("tally")
        sys.stdout.write(report.to_text())
        for line in summary.tally_lines():
            sys.stdout.write(f"tally: {line}\n")
    return EXIT_OK if held else EXIT_REFUTED


def cmd_gen(args: argparse.Namespace) -> int:
    if args.dim is None:
        raise UsageError("gen: --dim is required")
    spec = GeneratorSpec(
        args.dim, args.seed, Family(args.family), alpha=args.alpha, shrink=args.shrink,
    )
    inst, witness = generate(spec)
    doc = InstanceFile.from_instance(inst)
    if args.output is None:
        sys.stdout.write(serialize(doc))
        return EXIT_OK
    path = write(doc, args.output)
    report = Report("gen", spec.family.value)
    report.add("output", str(path)).add("dim", inst.dim).add("seed", spec.seed)
    report.add("alpha", spec.alpha)
    if witness is not None:
        report.add("shrink", spec.shrink).add("witness", witness)
    _emit(report, args)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "certify": cmd_certify,
    "oracle": cmd_oracle,
    "trace": cmd_trace,
    "hs": cmd_hs,
    "fuzz": cmd_fuzz,
    "gen": cmd_gen,
}


# ============================================================================
# ENTRY POINTS
# ============================================================================

def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run one command, return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (TriformError, OSError) as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
