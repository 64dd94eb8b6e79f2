import math

import numpy as np
import pytest

from _charts import linear_image, random_unitary_real
from biwarp.catalog import fixture
from biwarp.errors import ConfigError, DomainError, NotNormal
from biwarp.linalg import random_rotation
from biwarp.submanifold import (
    christoffel_consistency,
    gauss_split_residual,
    grid_geometries,
    mean_curvature,
    point_geometry,
    second_fundamental_norm,
    shape_operator,
    shape_operator_from_sff,
    totally_geodesic_residual,
    umbilic_residual,
)


def test_unit_circle():
    chart = fixture("unit_circle").chart
    for g in grid_geometries(chart, chart.grid(7)):
        t = g.point[0]
        np.testing.assert_allclose(g.metric, [[1.0]], atol=1e-15)
        np.testing.assert_allclose(g.sff_ambient[:, 0, 0], [-math.cos(t), -math.sin(t)], atol=1e-15)
        np.testing.assert_allclose(np.linalg.norm(mean_curvature(g)), 1.0, atol=1e-14)
        assert second_fundamental_norm(g) == pytest.approx(1.0, abs=1e-14)


def test_round_sphere():
    entry = fixture("round_sphere")
    chart = entry.chart
    for g in grid_geometries(chart, chart.grid(5)):
        np.testing.assert_allclose(g.metric, entry.expected.metric(g.point), atol=1e-13)
        # totally umbilic with |H| = 1/r
        assert umbilic_residual(g) < 1e-13
        assert np.linalg.norm(mean_curvature(g)) == pytest.approx(0.5, abs=1e-14)
        assert second_fundamental_norm(g) == pytest.approx(0.5, abs=1e-13)
        a = g.point[0]
        assert g.christoffel[0, 1, 1] == pytest.approx(-math.sin(a) * math.cos(a), abs=1e-14)
        assert g.christoffel[1, 0, 1] == pytest.approx(math.cos(a) / math.sin(a), abs=1e-13)


def test_flat_planes_are_geodesic():
    for name in ("holomorphic_plane", "totally_real_plane", "slant_plane", "product_chart"):
        chart = fixture(name).chart
        for g in grid_geometries(chart, chart.grid(3)):
            assert totally_geodesic_residual(g) == 0.0


def test_r14_metric_and_routes(r14, r14_sample, oracles):
    for g in r14_sample.geoms:
        np.testing.assert_allclose(g.metric, r14.expected.metric(g.point), atol=1e-13)
        assert gauss_split_residual(g) < 1e-14
        assert christoffel_consistency(g) < 1e-14
    for ref in oracles["r14"]["points"]:
        g = point_geometry(r14.chart, ref["point"])
        np.testing.assert_allclose(g.metric, ref["metric"], atol=1e-13)
        np.testing.assert_allclose(g.christoffel, ref["christoffel"], atol=1e-13)
        assert second_fundamental_norm(g) == pytest.approx(ref["sff_norm2"], rel=1e-13)
        assert np.linalg.norm(mean_curvature(g)) == pytest.approx(ref["mean_curvature_norm"], rel=1e-13)


def test_shape_operator_two_routes(r14, rng):
    g = point_geometry(r14.chart, [1.3, 0.7, 0.4, 0.9, 1.2])
    for _ in range(5):
        xi = g.normal_frame @ rng.standard_normal(g.normal_frame.shape[1])
        a = shape_operator(g, xi)
        np.testing.assert_allclose(a, shape_operator_from_sff(g, xi), atol=1e-13)
        np.testing.assert_allclose(a, a.T, atol=1e-13)
    with pytest.raises(NotNormal):
        shape_operator(g, g.tangent_frame[:, 0])


def test_sff_norm_frame_invariant(r14_sample, rng):
    for g in r14_sample.geoms[::17]:
        base = second_fundamental_norm(g)
        for _ in range(3):
            q = random_rotation(rng, g.dim)
            assert second_fundamental_norm(g, q) == pytest.approx(base, rel=1e-9, abs=1e-9)


def test_sff_norm_ambient_unitary_invariant(r14, rng):
    u = random_unitary_real(rng, 7)
    moved = linear_image(r14.chart, u)
    pts = r14.chart.grid(2)
    for a, b in zip(grid_geometries(r14.chart, pts), grid_geometries(moved, pts)):
        np.testing.assert_allclose(b.metric, a.metric, atol=1e-12)
        assert second_fundamental_norm(b) == pytest.approx(second_fundamental_norm(a), rel=1e-9)


@pytest.mark.parametrize("c", [2.0, 10.0])
def test_homothety(r14, c):
    scaled = r14.chart.scaled(c)
    pts = r14.chart.grid(2)
    for a, b in zip(grid_geometries(r14.chart, pts), grid_geometries(scaled, pts)):
        np.testing.assert_allclose(b.metric, c * c * a.metric, rtol=1e-13, atol=1e-12)
        np.testing.assert_allclose(b.christoffel, a.christoffel, atol=1e-12)
        assert second_fundamental_norm(b) == pytest.approx(second_fundamental_norm(a) / c**2, rel=1e-12)


def test_domain_and_grid(r14):
    with pytest.raises(DomainError):
        point_geometry(r14.chart, [0.1, 1, 1, 1, 1])
    with pytest.raises(ConfigError):
        r14.chart.grid(0)
    assert r14.chart.grid(3).shape == (243, 5)
    strict = fixture("r14", strict_domain=True).chart
    # u, v in {0.5, 1.5, 2.5} for n = 3: nothing excluded; n = 5 drops u = 1 and v = 1
    assert len(strict.grid(3, strict=True)) == 243
    assert len(strict.grid(5, strict=True)) == 16 * 125
