"""Tests for report rendering.

Usage:
    pytest test_reports.py -v
"""

import json
import math

import numpy as np
import pytest

from certify import CertifyConfig, certify
from corollaries import hs_check, trace_check
from errors import HypothesisRefuted
from forms import Instance
from reports import Report, hs_report, hypothesis_report, trace_report, verdict_report


class TestReport:
    """Tests for Report text and JSON rendering."""

    def test_text_layout(self) -> None:
        report = Report("certify", "certified").add("alpha", 0.1).add("ok", True).add("none", None)
        assert report.to_text() == (
            "command: certify\nresult: certified\nalpha: 0.10000000000000001\nok: true\nnone: none\n"
        )

    def test_nested_fields_flatten(self) -> None:
        report = Report("x", "y").add("config", {"tol_s": 1e-9, "max_iter": 200})
        assert "config.tol_s: 1.0000000000000001e-09" in report.to_text()
        assert "config.max_iter: 200" in report.to_text()

    def test_vectors(self) -> None:
        report = Report("x", "y").add("witness", np.array([0.5, -0.25]))
        assert "witness: 0.5 -0.25" in report.to_text()
        assert json.loads(report.to_json())["witness"] == [0.5, -0.25]

    def test_json_non_finite(self) -> None:
        payload = json.loads(Report("x", "y").add("v", math.inf).add("w", math.nan).to_json())
        assert payload["v"] == "inf" and payload["w"] == "nan"

    def test_json_shortest_round_trip(self) -> None:
        payload = json.loads(Report("x", "y").add("v", 0.1).to_json())
        assert payload["v"] == 0.1

    def test_render(self) -> None:
        report = Report("x", "y")
        assert report.render() == report.to_text()
        assert report.render(as_json=True) == report.to_json()


class TestBuilders:
    """Tests for the report builders."""

    def test_certified(self, canonical: Instance) -> None:
        cfg = CertifyConfig()
        report = verdict_report(certify(canonical, cfg), canonical, cfg, source="c.tri")
        keys = [key for key, _ in report.items()]
        assert keys[:3] == ["source", "dim", "scale"]
        assert "alpha" in keys and "slack" in keys
        assert keys[-1] == "config.max_iter"

    def test_refuted(self, shrunk: Instance) -> None:
        cfg = CertifyConfig()
        report = verdict_report(certify(shrunk, cfg), shrunk, cfg)
        assert report.tag == "refuted"
        assert report.fields["gap"] == pytest.approx(0.5)
        assert "source" not in report.fields

    def test_trace(self, canonical: Instance) -> None:
        report = trace_report(trace_check(canonical, certify(canonical)), canonical)
        assert report.tag == "verified"
        assert report.fields["margin"] == 0.0

    def test_hs(self) -> None:
        report = hs_report(hs_check(np.eye(2), np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
        assert report.tag == "verified"
        assert report.fields["reduced_dim"] == 2

    def test_hypothesis(self, shrunk: Instance) -> None:
        exc = HypothesisRefuted(certify(shrunk).refutation)
        report = hypothesis_report("hs", exc, "s.tri")
        assert report.tag == "hypothesis-refuted"
        assert report.fields["source"] == "s.tri"

    def test_hypothesis_rejects_other_errors(self) -> None:
        with pytest.raises(TypeError):
            hypothesis_report("hs", ValueError("x"))
