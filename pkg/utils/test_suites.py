"""Tests for utils/suites.py: report assembly without going through the CLI."""

from __future__ import annotations

import json

import pytest

from utils import suites
from utils.config import RunConfig
from utils.errors import AlgebraObstruction
from utils.reports import SCHEMA


@pytest.mark.parametrize("species,eta", [
    ("boson", None),
    ("fermion", None),
    ("phermion", "diag:4,1"),
    ("abnormal-phermion", None),
])
def test_verify_algebra_suite(species, eta):
    report = suites.run(RunConfig(command="verify-algebra", species=species, eta_spec=eta, truncation=4))
    assert report.passed, [c.name for c in report.checks if not c.passed]
    assert report.data["rep"]["species"] == species


def test_abnormal_audit_is_reported_not_asserted():
    report = suites.run(RunConfig(command="verify-algebra", species="abnormal-phermion"))
    audit = report.data["unifiedCommutatorAudit"]
    assert audit["printed"]["pass"] is False
    assert audit["corrected"]["pass"] is True
    assert report.passed
    assert "complexification" in report.sections
    assert report.data["physicalStates"] == 1


def test_obstructed_phermion_raises():
    with pytest.raises(AlgebraObstruction):
        suites.run(RunConfig(command="verify-algebra", species="phermion", eta_spec="sigma3"))


@pytest.mark.parametrize("kind", ["boson-fermion", "boson-phermion", "boson-abnormal-phermion"])
def test_oscillator_suite(kind):
    report = suites.run(RunConfig(command="oscillator", kind=kind, truncation=5))
    assert report.passed, [c.name for c in report.checks if not c.passed]
    system = report.data["system"]
    assert system["sourceGrade"] == -1
    assert len(system["pairing"]["pairs"]) == 5
    assert ("similarity to susy" in report.sections) == (kind == "boson-phermion")


def test_multi_suite():
    report = suites.run(RunConfig(command="multi", ell=3))
    assert report.passed
    system = report.data["system"]
    assert system["physicalDim"] == 4
    assert system["metricInertia"] == {"nPlus": 4, "nMinus": 4, "nZero": 0}
    assert system["singleSitePhysicalDim"] == 1
    assert system["innerProductDiagonal"] == [1, -1, -1, 1, -1, 1, 1, -1]
    assert len(system["commutatorChecks"]) == 9


def test_lie_suite():
    report = suites.run(RunConfig(command="lie", epsilon=-1))
    assert report.passed
    assert report.data["triple"]["algebra"] == "su(1,1)"


def test_property_checks_pass_for_default_seed():
    out = suites.property_checks(seed=0xC0FFEE, tol=1e-10, truncation=4)
    assert set(out) == {
        "pseudo-adjoint", "sylvester", "obstruction", "phermion metrics",
        "two-component round trip", "pairing under remixing",
    }
    for name, checks in out.items():
        assert all(c.passed for c in checks), name


def test_report_json_shape():
    report = suites.run(RunConfig(command="lie"))
    doc = json.loads(report.to_json())
    assert doc["schema"] == SCHEMA
    assert doc["pass"] is True
    assert doc["config"]["command"] == "lie"
    assert doc["wallTimeMs"] >= 0


@pytest.mark.parametrize("truncation", range(2, 13))
@pytest.mark.parametrize("kind", ["boson-fermion", "boson-phermion", "boson-abnormal-phermion"])
def test_oscillator_suite_across_truncations(kind, truncation):
    report = suites.run(RunConfig(command="oscillator", kind=kind, truncation=truncation))
    assert report.passed, [c.name for c in report.checks if not c.passed]
    assert len(report.data["system"]["pairing"]["pairs"]) == truncation


@pytest.mark.parametrize("species,eta,condition", [
    ("fermion", None, 1.0),
    ("phermion", "diag:4,1", 4.0),
    ("abnormal-phermion", None, 1.0),
])
def test_verify_algebra_reports_metric_condition(species, eta, condition):
    report = suites.run(RunConfig(command="verify-algebra", species=species, eta_spec=eta))
    metric = report.data["metric"]
    assert metric["condition"] == pytest.approx(condition)
    assert sum(metric["inertia"].values()) == 2
