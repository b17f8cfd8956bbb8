import json
import math

import pytest

import josephson_cycles as jc


def test_golden_point_census():
    cen = jc.census(0.5, 0.75, -1.0)
    assert (cen["i"], cen["j"]) == (1, 1)
    assert cen["first_kind"][0]["stability"] == "stable"
    assert cen["second_kind_positive"][0]["stability"] == "stable"
    assert cen["agreement"] is True


def test_cycle_is_a_zero_of_the_displacement():
    y0 = jc.census(0.5, 0.75, -1.0)["second_kind_positive"][0]["y0"]
    assert abs(jc.displacement(0.5, 0.75, -1.0, y0)) < 1e-8


def test_zero_coefficients_and_params():
    g2, g3, g4 = jc.zero_coefficients(0.0, 1.0, 0.0)
    assert g2 == pytest.approx(2 * math.pi)
    assert g3 == pytest.approx(4 * math.pi**2)
    p = jc.from_physical(0.5, 1 / 0.75**2, -1 / 0.75)
    assert (p.a, p.b, p.c) == pytest.approx((0.5, 0.75, -1.0))


def test_json_and_errors():
    report = json.loads(jc.census_json(2.0, 0.5, 1.0))
    assert report["label"] == "S7"
    assert jc.locate_curve("psi2", 0.5, -1.0) is None
    with pytest.raises(ValueError):
        jc.census(-1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        jc.locate_curve("nope", 0.5, 1.0)
