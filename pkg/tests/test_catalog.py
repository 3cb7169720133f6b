import json

import jsonschema
import numpy as np
import pytest

from bitension import catalog, report
from bitension.charts import DomainError


def test_every_builtin_passes_at_defaults():
    for name in catalog.CASE_NAMES:
        rep = catalog.verify_case(catalog.build_case(name))
        failing = [c.name for c in rep.checks if not c.passed]
        assert rep.passed, f"{name} failed {failing}"


def test_every_builtin_has_a_failing_control():
    for name in catalog.CASE_NAMES:
        control, key = catalog.negative_control(name)
        rep = catalog.verify_case(control)
        record = next(c for c in rep.checks if c.name == key)
        assert not record.passed, f"{name} control passed its key check"
        assert record.max_abs is not None and record.max_abs > 1e-2
        assert not rep.passed


def test_reports_are_deterministic():
    one = catalog.verify_case(catalog.build_case("h5_inclusion"), seed=3)
    two = catalog.verify_case(catalog.build_case("h5_inclusion"), seed=3)
    assert report.to_json(one) == report.to_json(two)
    assert report.to_text(one) == report.to_text(two)


def test_json_matches_schema_and_text_numbers():
    rep = catalog.verify_case(catalog.build_case("cylinder_family"),
                              samples=32, seed=5)
    payload = json.loads(report.to_json(rep))
    jsonschema.validate(payload, report.REPORT_SCHEMA)
    assert payload["case"] == "cylinder_family"
    assert payload["samples"] == 32 and payload["seed"] == 5
    assert payload["pass"] is True
    text = report.to_text(rep)
    for check in payload["checks"]:
        # the text rendering carries the same full-precision numbers
        assert repr(check["max_abs"]) in text
        assert check["name"] in text


def test_unknown_case_and_bad_params():
    with pytest.raises(ValueError, match="unknown case"):
        catalog.build_case("no_such_case")
    with pytest.raises(ValueError, match="bad parameters"):
        catalog.build_case("cylinder_family", bogus=1.0)
    with pytest.raises(ValueError, match="2..6"):
        catalog.build_case("identity", m=9)


def test_degenerate_cylinder_parameters_are_rejected():
    # lambda^2(0) = (1 - 4)/2 < 0: never silently verified
    with pytest.raises(DomainError, match="positive"):
        catalog.build_case("cylinder_family", R=1.0, C1=4.0, C2=1.0, sign=1)


def test_tolerance_override_is_respected():
    rep = catalog.verify_case(catalog.build_case("h5_inclusion"), tol=1e-20)
    assert not rep.passed
    # magnitude checks keep their own bounds under the override
    magnitude = next(c for c in rep.checks if c.name == "tension_nonzero")
    assert magnitude.passed and magnitude.tol == 1e-3


def test_magnitude_checks_store_the_binding_minimum():
    rep = catalog.verify_case(catalog.build_case("h5_inclusion"),
                              samples=64, seed=11)
    record = next(c for c in rep.checks if c.name == "tension_nonzero")
    # |tau| = 2/x4^2 on the box 0.5 <= x4 <= 2 binds at the largest
    # sampled x4, well above the 1e-3 bound
    assert 0.5 < record.max_abs < 0.8
    assert record.passed
    worst = record.worst_point
    assert worst is not None and len(worst) == 4
    assert worst[3] > 1.6


def test_worst_point_pins_the_largest_residual():
    control, key = catalog.negative_control("plane_inclusion")
    rep = catalog.verify_case(control, samples=48, seed=13)
    record = next(c for c in rep.checks if c.name == key)
    # the bent plane has |tau| = 2 everywhere; any sample point is binding
    assert abs(record.max_abs - 2.0) < 1e-12
    assert record.worst_point is not None


def test_identity_dimension_sweep():
    for m in (2, 3, 4):
        rep = catalog.verify_case(catalog.build_case("identity", m=m),
                                  samples=16)
        assert rep.passed
        assert rep.case == "identity"
