import numpy as np
import pytest

from _charts import linear_image, random_unitary_real
from biwarp.audit import (
    audit_characterization,
    audit_connection,
    audit_distributions,
    audit_triviality,
    equality_diagnostics,
    inequality_audit,
    run_audit,
    sample_chart,
    warp_samples,
)
from biwarp.catalog import fixture
from biwarp.errors import ConfigError, ImproperSplit
from biwarp.serialize import dumps

CONNECTION = [
    "conn_TT_theta", "conn_thth_T", "conn_TT_perp", "conn_Tperp_theta", "conn_perpperp_T",
    "conn_thth_perp", "conn_thperp_T", "conn_perpperp_theta", "conn_perpT_theta",
]  # fmt: skip
CHARACTERIZATION = ["shape_JX_V", "shape_FTZ_V", "shape_JY_TZ_perp", "shape_JY_TW_theta"]
SFF = ["sff_TT_Jperp", "sff_Tperp_Jperp", "sff_Ttheta_Jperp", "sff_TT_Ftheta", "sff_Tperp_Ftheta", "sff_Ttheta_Ftheta"]


@pytest.fixture(scope="module")
def r14_report(r14):
    return run_audit(r14.chart, grid=3)


def test_r14_report_passes(r14_report):
    assert r14_report.passed
    assert [s.name for s in r14_report.sections] == [
        "geometry", "slant", "connection", "distributions", "characterization",
        "second_fundamental_form", "triviality", "inequality", "equality",
    ]  # fmt: skip
    for section, names in (
        ("connection", CONNECTION),
        ("characterization", CHARACTERIZATION),
        ("second_fundamental_form", SFF),
    ):
        for name in names:
            e = r14_report.section(section).entry(name)
            assert e.kind == "identity" and e.max_residual <= 1e-7


def test_r14_distribution_conditions(r14_report):
    sec = r14_report.section("distributions")
    for name in ("holo_geodesic_perp", "holo_geodesic_theta", "slant_integrable_T", "slant_integrable_perp"):
        assert sec.entry(name).kind == "condition" and sec.entry(name).passed
    assert sec.entry("holo_geodesic_equivalence").passed
    assert sec.entry("slant_integrable_equivalence").passed


def test_improper_split_rejected():
    sample = sample_chart(fixture("holomorphic_plane").chart, grid=2)
    with pytest.raises(ImproperSplit):
        audit_connection(sample)
    assert issubclass(ImproperSplit, ConfigError)


def test_trivial_product_everything_vanishes():
    report = run_audit(fixture("trivial_biwarped").chart, grid=3)
    assert report.passed
    conn = report.section("connection")
    assert conn.entry("conn_TT_perp").max_residual == 0.0
    assert all(r.lhs == 0.0 and r.rhs == 0.0 for r in report.inequality)
    assert all(d.near_equality and d.all_flags for d in report.diagnostics)
    triv = report.section("triviality").entry("triviality_equivalence")
    assert triv.kind == "agreement" and triv.passed and triv.detail["trivial"]


def test_twisted_conditions_fail_but_agree():
    sample = sample_chart(fixture("twisted_r14").chart, grid=3)
    sec = audit_distributions(sample)
    assert not sec.entry("holo_geodesic_theta").passed
    assert not sec.entry("holo_geodesic_direct").passed
    assert not sec.entry("slant_integrable_T").passed
    assert not sec.entry("slant_bracket_direct").passed
    assert sec.entry("holo_geodesic_equivalence").passed
    assert sec.entry("slant_integrable_equivalence").passed
    # conditions are reported, not asserted
    assert sec.passed


def test_twisted_skips_block_sections():
    report = run_audit(fixture("twisted_r14").chart, grid=2)
    assert report.section("characterization").skipped
    assert report.passed


def test_wrong_second_warp_breaks_characterization(r14, r14_sample):
    warps = warp_samples(r14_sample)
    good = audit_characterization(r14_sample, warps=warps)
    bad = audit_characterization(r14_sample, warps=warps.scaled_log(1, 2.0))
    assert good.entry("shape_FTZ_V").max_residual < 1e-14
    assert bad.entry("shape_FTZ_V").max_residual > 0.1
    assert not bad.passed
    # the first warp is untouched, so its condition still holds
    assert bad.entry("shape_JX_V").passed


def test_triviality_cases(r14_report):
    r14 = r14_report.section("triviality")
    eq = r14.entry("triviality_equivalence")
    assert eq.kind == "info" and eq.detail["hypothesis"] == "hypothesis not met"
    assert not r14.entry("warps_trivial").passed
    single = sample_chart(fixture("singly_warped").chart, grid=3)
    assert {s.l for s in single.splits} == {0}
    sec = audit_triviality(single)
    assert not sec.entry("warps_trivial").passed
    assert not sec.entry("mixed_geodesic_T_perp").passed
    eq = sec.entry("triviality_equivalence")
    assert eq.kind == "agreement" and eq.passed


def test_inequality_values(r14, oracles):
    sample = sample_chart(r14.chart, points=[ref["point"] for ref in oracles["r14"]["points"]])
    section, rows = inequality_audit(sample)
    assert section.passed
    for row, ref in zip(rows, oracles["r14"]["points"]):
        assert row.rhs == pytest.approx(ref["rhs"], rel=1e-12)
        assert row.lhs == pytest.approx(ref["sff_norm2"], rel=1e-12)
        assert row.f == pytest.approx(ref["f"], rel=1e-13)
        assert row.sigma == pytest.approx(ref["sigma"], rel=1e-13)
        assert sum(row.decomposition.values()) == pytest.approx(row.lhs, rel=1e-12)
        assert row.mixed_bound == pytest.approx(row.rhs, rel=1e-12)
    assert rows[0].rhs == pytest.approx(19 / 27, abs=1e-12)


def _slack(chart, pts):
    return np.array([r.slack for r in inequality_audit(sample_chart(chart, points=pts))[1]])


def test_slack_frame_invariant(r14, rng):
    pts = r14.chart.grid(2)
    base = _slack(r14.chart, pts)
    for _ in range(2):
        moved = linear_image(r14.chart, random_unitary_real(rng, 7))
        np.testing.assert_allclose(_slack(moved, pts), base, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("c", [2.0, 10.0])
def test_slack_homothety(r14, c):
    pts = r14.chart.grid(2)
    np.testing.assert_allclose(_slack(r14.chart.scaled(c), pts) * c**2, _slack(r14.chart, pts), rtol=1e-8)


def test_equality_diagnostics_r14(r14_sample):
    section, rows = equality_diagnostics(r14_sample)
    assert section.entry("fiber_umbilic").passed
    assert section.entry("fiber_umbilic_christoffel").passed
    assert not any(r.near_equality for r in rows)
    # flag (a) holds on r14: the holomorphic leaves are totally geodesic
    assert all(r.flags["a"] for r in rows)
    assert not any(r.flags["c"] for r in rows)


def test_report_json_deterministic(r14):
    a = dumps(run_audit(r14.chart, grid=2))
    b = dumps(run_audit(r14.chart, grid=2))
    assert a == b


def test_dimension_jump_flagged():
    from dataclasses import replace

    from biwarp.audit import require_constant_dims
    from biwarp.errors import Unclassifiable

    a = sample_chart(fixture("slant_plane:0.3").chart, grid=2)
    b = sample_chart(fixture("holomorphic_plane").chart, grid=2)
    require_constant_dims(a)
    mixed = replace(a, splits=a.splits + b.splits)
    with pytest.raises(Unclassifiable):
        require_constant_dims(mixed)


def test_wrong_warp_residual_matches_prediction(r14_sample):
    from biwarp.audit import _contexts

    warps = warp_samples(r14_sample)
    bad = audit_characterization(r14_sample, warps=warps.scaled_log(1, 2.0)).entry("shape_FTZ_V")
    # doubling mu leaves exactly the term sin^2(theta) V(mu) Z unbalanced
    predicted = max(
        np.linalg.norm(c.s2 * c.dlog("s", V) * Z) for c in _contexts(r14_sample, warps) for V in c.U for Z in c.Z
    )
    assert predicted < 1.0  # relative residuals are absolute below scale 1
    assert bad.max_residual == pytest.approx(predicted, rel=1e-9)


def test_sff_identity_with_jv_substituted(r14_sample):
    # g(h(JV, X), JY) = V(ln f) g(X, Y): the first-fiber identity with V replaced by JV
    from biwarp.audit import _contexts

    worst = 0.0
    for c in _contexts(r14_sample, warp_samples(r14_sample)):
        for V in c.U:
            for X in c.X:
                for Y in c.X:
                    lhs = c.h(c.J(V), X) @ c.J(Y)
                    worst = max(worst, abs(lhs - c.dlog("f", V) * (X @ Y)))
                    # and the sign flips relative to the unsubstituted form
                    assert c.h(V, X) @ c.J(Y) == pytest.approx(-c.dlog("f", c.J(V)) * (X @ Y), abs=1e-12)
    assert worst < 1e-12


def test_constant_sigma_sff_vanishes():
    sample = sample_chart(fixture("trivial_biwarped").chart, grid=2)
    from biwarp.audit import audit_sff

    sec = audit_sff(sample)
    assert sec.entry("sff_Ttheta_Ftheta").max_residual == 0.0
    for g, s in zip(sample.geoms, sample.splits):
        for i in range(s.k):
            for j in range(s.m):
                assert np.abs(g.h(s.D_T[:, i], s.D_theta[:, j]) @ s.F_theta).max() == 0.0
