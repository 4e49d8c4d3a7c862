import json
import math
import os

import pytest

import pspec


def test_catalog_lists_standard_shapes():
    names = pspec.catalog()
    assert len(names) == 8
    assert {"disk", "square", "annulus", "spiky_disk"} <= set(names)
    assert "annulus: connectivity 2" in pspec.describe_catalog()


def test_square_eigenvalue_and_field():
    r = pspec.eigen("square", p=2.0, h=1 / 32, with_field=True)
    assert r["lambda"] == pytest.approx(2 * math.pi**2, rel=0.02)
    field = r["field"]
    assert field.shape == pspec.mask("square", h=1 / 32).shape
    assert field.min() >= 0.0


def test_shape_dict_and_geometry():
    g = pspec.geometry({"variant": "annulus", "r_in": 0.5, "r_out": 1.0}, h=1 / 32)
    assert g["connectivity"] == 2
    assert not g["convex"]
    assert g["inradius"] == pytest.approx(0.25, abs=2 / 32)


def test_bound_report():
    r = pspec.evaluate_bound("OSSERMAN_CROKE_SIMPLE", "square", p=2.0, h=1 / 32)
    assert r["satisfied"]
    assert r["inputs"]


def test_infinity_identity_reports_infinite_p():
    r = pspec.evaluate_bound("INFTY_IDENTITY", "square", h=1 / 32)
    assert math.isinf(r["p"])
    assert r["lhs"] == pytest.approx(2.0, rel=0.05)


def test_errors_carry_kind():
    with pytest.raises(pspec.PspecError) as info:
        pspec.evaluate_bound("OSSERMAN_CROKE_SIMPLE", "annulus", p=2.0, h=1 / 32)
    assert info.value.kind == "PreconditionViolated"
    with pytest.raises(pspec.PspecError) as info:
        pspec.evaluate_bound("NOPE", "disk")
    assert info.value.kind == "ConfigParse"


def test_run_suite_skips_with_reason():
    reports = pspec.run_suite(["annulus"], [2.0], h=1 / 32, bounds=["OSSERMAN_CROKE_SIMPLE", "FABER_KRAHN"])
    assert [r["id"] for r in reports] == ["FABER_KRAHN", "OSSERMAN_CROKE_SIMPLE"]
    assert reports[1]["skipped"]
    assert reports[1]["skip_reason"] == "connectivity = 2"


def test_capacity_helpers():
    assert pspec.ball_capacity_exact(1.0, 3, 2.0) == pytest.approx(4 * math.pi)
    c = pspec.p_capacity("disk", p=1.5, h=1 / 16)
    assert c["value"] == pytest.approx(2 * math.pi, rel=0.05)


def test_verify_writes_reports(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"catalog": ["square"], "ps": [2], "h": 1 / 32, "bounds": ["FABER_KRAHN"]}))
    summary = pspec.verify(str(cfg), str(tmp_path / "out"))
    assert summary["exit_status"] == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["partial"] is False
    assert report["reports"][0]["id"] == "FABER_KRAHN"
