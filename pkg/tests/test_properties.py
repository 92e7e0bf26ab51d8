import json

import pytest

from bbmstuff.errors import PropertyViolation
from bbmstuff.properties import (
    CheckOutcome,
    PropertyReport,
    closed_form_gap,
    run_property_suite,
)
from bbmstuff.young import Power, preset


def test_report_bookkeeping():
    report = PropertyReport(seed=3)
    report.add("fine", -1.0)
    report.add("loose", 1e-9, 1e-8)
    assert report.passed
    report.add("broken", 0.5, 1e-3)
    assert [o.name for o in report.failures()] == ["broken"]
    with pytest.raises(PropertyViolation, match="broken"):
        report.raise_for_failures()
    data = report.to_dict()
    assert data["seed"] == 3
    assert data["passed"] is False
    assert len(data["checks"]) == 3
    json.dumps(data)


def test_outcome_boundary():
    assert CheckOutcome("x", 1e-6, 1e-6).passed
    assert not CheckOutcome("x", float("nan"), 1.0).passed


def test_closed_form_gap():
    assert closed_form_gap(Power(2.0), 2) <= 1e-6
    assert closed_form_gap(preset("plog1p"), 1) == 0.0


@pytest.mark.slow
def test_property_suite_passes():
    report = run_property_suite(seed=0, samples=200)
    assert report.passed, [o.name for o in report.failures()]
    assert set(report.structure) == {
        "power2",
        "power3",
        "powerlog",
        "doublephase",
        "varexp",
        "plog1p",
    }


@pytest.mark.slow
def test_wrong_declaration_fails_the_suite():
    report = run_property_suite(seed=0, samples=200, corrupt=True)
    failed = {o.name for o in report.failures()}
    assert "structure/power3/growth-ratio" in failed
    assert all(name.startswith("structure/power3/") for name in failed)
