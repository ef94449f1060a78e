import json

import numpy as np
import pytest
from conftest import xval_report

from jetgeom.inputs import ScalarField, TemporalMetric
from jetgeom.validation import OBJECTS, Discrepancy, cross_validate, sample_points


def test_sample_points_reproducible_and_in_range():
    t, x, y = sample_points(200, 7)
    t2, x2, y2 = sample_points(200, 7)
    assert np.array_equal(t, t2) and np.array_equal(x, x2) and np.array_equal(y, y2)
    assert t.min() >= 0.5 and t.max() <= 2.0
    assert x.min() >= -1 and x.max() <= 1
    assert y.min() >= 0.1 and y.max() <= 2.0
    assert not np.array_equal(sample_points(5, 8)[1], x[:5])


def test_discrepancy_relative_and_absolute():
    d = Discrepancy()
    d.update(np.array([2.0, -4.0]), np.array([2.0, -4.0 + 4e-7]))
    assert d.max_rel == pytest.approx(1e-7) and not d.exact_zero
    z = Discrepancy()
    z.update(np.zeros(3), np.array([0, 5e-10, 0]))
    assert z.exact_zero and z.max_rel == pytest.approx(5e-10)
    assert z.passed(1e-6, 1e-9) and not z.passed(1e-6, 1e-10)


def test_linear_unit_report():
    r = xval_report("linear", "unit")
    assert r.passed
    assert set(r.objects) == set(OBJECTS)
    assert r.objects["C"].exact_zero and r.objects["F"].exact_zero


@pytest.mark.parametrize("sigma_name", ["quadratic", "cubic"])
def test_power_metric_reports(sigma_name):
    r = xval_report(sigma_name, "t2")
    assert r.passed, r.as_dict()["objects"]


def test_flat_report_is_exactly_zero():
    r = cross_validate(ScalarField.constant(1.0), TemporalMetric.constant(1.0), 10, 0)
    assert r.passed
    for name in ("M", "N", "L", "C", "Gk_j1", "torsion", "curvature", "ricci", "scalarR", "F"):
        assert r.objects[name].max_abs == 0.0, name


def test_unreachable_tolerance_fails():
    r = cross_validate(ScalarField.linear([1, 0, 0, 0]), TemporalMetric.constant(1.0), 4, 1,
                       tolerance=1e-18)
    assert not r.passed
    assert r.as_dict()["passed"] is False


def test_report_serializes():
    r = cross_validate(ScalarField.polynomial([((1, 2, 0, 0), 0.5)]), TemporalMetric.power(2), 3, 2)
    d = json.loads(json.dumps(r.as_dict()))
    assert d["samples"] == 3 and d["seed"] == 2 and d["sigma"]["kind"] == "polynomial"
    assert set(d["objects"]) == set(OBJECTS)


def test_sample_must_be_positive():
    with pytest.raises(ValueError):
        cross_validate(ScalarField.constant(0.0), TemporalMetric.constant(1.0), 0, 0)
