"""Reports printed by the command line.

A ``Report`` is an ordered set of named values. ``to_text`` and
``to_json`` render the same object, so the two formats cannot drift.
Reals print with 17 significant digits in text and as shortest round-trip
numbers in JSON; either is enough to re-verify a certificate or a witness
against the instance file.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import numpy as np

from certify import CertifyConfig, Certified, Inconclusive, Refuted, Verdict
from corollaries import HsReport, TraceReport
from errors import HypothesisRefuted, HypothesisUndecided
from forms import Instance
from oracle import ScanResult


@dataclass
class Report:
    command: str
    tag: str
    fields: dict[str, Any] = field(default_factory=dict)

    def add(self, key: str, value: Any) -> "Report":
        self.fields[key] = value
        return self

    def items(self) -> Iterator[tuple[str, Any]]:
        """Fields flattened to dotted keys (``config.tol_s``)."""
        for key, value in self.fields.items():
            if isinstance(value, dict):
                for sub, inner in value.items():
                    yield f"{key}.{sub}", inner
            else:
                yield key, value

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"result: {self.tag}"]
        lines.extend(f"{key}: {_text_value(value)}" for key, value in self.items())
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {"command": self.command, "result": self.tag}
        payload.update((key, _json_value(value)) for key, value in self.fields.items())
        return json.dumps(payload, indent=2) + "\n"

    def render(self, as_json: bool = False) -> str:
        return self.to_json() if as_json else self.to_text()


# ── Value rendering ─────────────────────────────────────────────────────────

def _text_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_text_value(v) for v in np.asarray(value, dtype=object).ravel())
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _json_value(inner) for key, inner in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in np.asarray(value, dtype=object).ravel()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        # JSON has no literal for these.
        return v if math.isfinite(v) else repr(v)
    return value


# ── Builders ────────────────────────────────────────────────────────────────

def _instance_fields(report: Report, inst: Instance, source: Optional[str]) -> Report:
    if source is not None:
        report.add("source", source)
    return report.add("dim", inst.dim).add("scale", inst.scale)


def verdict_report(
    verdict: Verdict,
    inst: Instance,
    config: CertifyConfig,
    source: Optional[str] = None,
    command: str = "certify",
) -> Report:
    report = _instance_fields(Report(command, verdict.tag), inst, source)
    if isinstance(verdict, Certified):
        cert = verdict.certificate
        report.add("alpha", cert.alpha).add("slack", cert.slack)
        report.add("iterations", cert.iterations).add("bracket", list(cert.bracket))
    elif isinstance(verdict, Refuted):
        ref = verdict.refutation
        report.add("alpha_star", ref.alpha_star).add("f_star", verdict.f_star)
        report.add("witness", ref.witness).add("lhs", ref.lhs).add("rhs", ref.rhs)
        report.add("gap", ref.gap).add("tau_mismatch", ref.tau_mismatch)
        report.add("iterations", verdict.iterations).add("bracket", list(verdict.bracket))
    elif isinstance(verdict, Inconclusive):
        report.add("alpha_star", verdict.alpha_star).add("f_star", verdict.f_star)
        report.add("band", list(verdict.band)).add("reason", verdict.reason)
        report.add("iterations", verdict.iterations)
        report.add("bracket", None if verdict.bracket is None else list(verdict.bracket))
    return report.add("config", config.as_dict())


def scan_report(
    scan: ScanResult, inst: Instance, grid: tuple[float, float], source: Optional[str] = None,
) -> Report:
    tag = "nonnegative" if scan.min_value >= 0.0 else "negative"
    report = _instance_fields(Report("oracle", tag), inst, source)
    report.add("min_value", scan.min_value).add("argmin", scan.argmin)
    report.add("resolution", scan.resolution).add("points", scan.points)
    report.add("error_bound", scan.error_bound)
    return report.add("grid_best_s", grid[0]).add("grid_best_f", grid[1])


def trace_report(tr: TraceReport, inst: Instance, source: Optional[str] = None) -> Report:
    report = _instance_fields(Report("trace", "verified" if tr.holds else "failed"), inst, source)
    report.add("trace_t", tr.trace_t).add("bound", tr.bound).add("margin", tr.margin)
    return report.add("alpha", tr.alpha)


def hs_report(hs: HsReport, source: Optional[str] = None) -> Report:
    report = Report("hs", "verified" if hs.holds else "failed")
    if source is not None:
        report.add("source", source)
    report.add("lhs", hs.lhs).add("rhs", hs.rhs).add("margin", hs.margin).add("scale", hs.scale)
    report.add("hypothesis_alpha", hs.hypothesis_alpha)
    report.add("reduced_dim", None if hs.reduced_instance is None else hs.reduced_instance.dim)
    report.add("reduced_result", hs.reduced_tag).add("reduced_alpha", hs.reduced_alpha)
    return report.add("alpha_transfers", hs.alpha_transfers)


def hypothesis_report(command: str, exc: Exception, source: Optional[str] = None) -> Report:
    """Report for a corollary whose hypothesis was refuted or left undecided."""
    if isinstance(exc, HypothesisRefuted):
        ref = exc.refutation
        report = Report(command, "hypothesis-refuted")
        if source is not None:
            report.add("source", source)
        report.add("alpha_star", ref.alpha_star).add("witness", ref.witness)
        return report.add("lhs", ref.lhs).add("rhs", ref.rhs).add("gap", ref.gap)
    if isinstance(exc, HypothesisUndecided):
        verdict = exc.verdict
        report = Report(command, "hypothesis-undecided")
        if source is not None:
            report.add("source", source)
        report.add("alpha_star", verdict.alpha_star).add("f_star", verdict.f_star)
        return report.add("reason", verdict.reason)
    raise TypeError(f"not a hypothesis failure: {exc!r}")
