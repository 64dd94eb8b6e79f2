import math

import numpy as np
import pytest

from biwarp.catalog import fixture
from biwarp.errors import HigherOrder, Unclassifiable
from biwarp.slant import (
    TangentialOperator,
    classify_point,
    isometry_residual,
    operator_identity_residual,
    slant_spectrum,
    slant_split,
    tangential_operator,
    verify_slant_identities,
)
from biwarp.submanifold import grid_geometries, point_geometry


def test_r14_classification(r14, r14_sample):
    for op, split in zip(r14_sample.ops, r14_sample.splits):
        assert split.dims == (2, 1, 2, 6)
        assert split.proper and split.order == 1
        assert split.cos_theta == pytest.approx(r14.expected.cos_theta(split.point), abs=1e-12)
        assert op.skew_residual() < 1e-15
        assert operator_identity_residual(op, split) < 1e-13
        r9, r10 = verify_slant_identities(op, split)
        assert max(r9, r10) < 1e-13
        assert split.invariant_residual < 1e-13


def test_r14_spectrum_at_unit_point(r14):
    g = point_geometry(r14.chart, [1.0, 1.0, 0.3, 0.4, 0.5])
    clusters = slant_spectrum(tangential_operator(g, r14.chart.ambient))
    got = [(c.eigenvalue, c.multiplicity) for c in clusters]
    assert [m for _, m in got] == [1, 2, 2]
    assert got[0][0] == 0.0 and got[2][0] == 1.0
    assert got[1][0] == pytest.approx(1 / 9, abs=1e-14)


def test_r14_against_oracle(r14, oracles):
    for ref in oracles["r14"]["points"]:
        split = slant_split(point_geometry(r14.chart, ref["point"]), r14.chart.ambient)
        assert split.cos_theta == pytest.approx(ref["cos_theta"], abs=1e-13)


def test_normal_split_is_orthogonal(r14_sample):
    s = r14_sample.splits[40]
    g = r14_sample.geoms[40]
    normal = np.hstack([s.J_perp, s.F_theta, s.inv_normal])
    assert normal.shape[1] == g.ambient_dim - g.dim
    np.testing.assert_allclose(normal.T @ normal, np.eye(normal.shape[1]), atol=1e-12)
    np.testing.assert_allclose(g.tangent_frame.T @ normal, 0.0, atol=1e-12)


def test_isometry(r14_sample, rng):
    op = r14_sample.ops[7]
    for _ in range(5):
        assert isometry_residual(op, rng.standard_normal(5)) < 1e-14


@pytest.mark.parametrize(
    "name, dims, theta",
    [("holomorphic_plane", (2, 0, 0, 2), 0.0), ("totally_real_plane", (0, 2, 0, 0), math.pi / 2)],
)
def test_pure_planes(name, dims, theta):
    chart = fixture(name).chart
    for g in grid_geometries(chart, chart.grid(3)):
        split = slant_split(g, chart.ambient)
        assert split.dims == dims
        assert split.theta == theta
        assert not split.proper


@pytest.mark.parametrize("theta0", [0.3, math.pi / 4, 1.2])
def test_slant_plane(theta0):
    entry = fixture(f"slant_plane:{theta0!r}")
    chart = entry.chart
    for g in grid_geometries(chart, chart.grid(3)):
        op = tangential_operator(g, chart.ambient)
        split = classify_point(op, slant_spectrum(op))
        assert split.dims == (0, 0, 2, 0)
        assert split.theta == pytest.approx(theta0, abs=1e-12)
        assert operator_identity_residual(op, split) < 1e-14
        assert not split.proper


def test_snapping_near_holomorphic():
    chart = fixture("slant_plane:1e-4").chart
    split = slant_split(point_geometry(chart, [0.0, 0.0]), chart.ambient)
    # cos^2 = 1 - 1e-8 lies inside the cluster tolerance of 1
    assert split.theta == 0.0
    assert split.dims[:3] == (2, 0, 0)


def test_higher_order():
    chart = fixture("two_angle_higher_order").chart
    with pytest.raises(HigherOrder):
        slant_split(point_geometry(chart, [0.1, 0.2, 0.3, 0.4]), chart.ambient)


def _block_skew(values):
    t = np.zeros((2 * len(values), 2 * len(values)))
    for i, a in enumerate(values):
        t[2 * i, 2 * i + 1] = a
        t[2 * i + 1, 2 * i] = -a
    return t


def test_unclassifiable_chained_cluster():
    # eigenvalues 0.3, 0.3 + 8e-7, 0.3 + 1.6e-6: neighbours within tolerance, ends apart
    t = _block_skew(np.sqrt([0.3, 0.3 + 8e-7, 0.3 + 1.6e-6]))
    op = TangentialOperator(t, np.zeros((0, 6)), geom=None, space=None)
    clusters = slant_spectrum(op)
    assert len(clusters) == 1 and clusters[0].spread > 1e-6
    with pytest.raises(Unclassifiable):
        classify_point(op, clusters)


def test_odd_slant_block_unclassifiable():
    t = _block_skew([0.5])
    t3 = np.zeros((3, 3))
    t3[:2, :2] = t
    op = TangentialOperator(t3, np.zeros((0, 3)), geom=None, space=None)
    clusters = slant_spectrum(op)
    assert [c.multiplicity for c in clusters] == [1, 2]
    # a two-dimensional slant block next to a one-dimensional totally real one is fine;
    # an isolated odd block is rejected
    bad = [clusters[1]]
    bad[0] = type(bad[0])(bad[0].eigenvalue, bad[0].raw, 3, np.eye(3), 0.0)
    with pytest.raises(Unclassifiable):
        classify_point(op, bad)
