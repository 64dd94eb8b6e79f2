import numpy as np
import pytest

from biwarp.catalog import catalog_names, fixture
from biwarp.errors import HigherOrder, InconsistentScaling, UnknownFixture
from biwarp.slant import slant_split
from biwarp.submanifold import grid_geometries
from biwarp.warped import recover_warping, triviality_check

ERRORS = {"HigherOrder": HigherOrder, "InconsistentScaling": InconsistentScaling}


@pytest.mark.parametrize("name", catalog_names())
def test_entry_regression(name):
    entry = fixture(name)
    exp = entry.expected
    chart = entry.chart
    geoms = grid_geometries(chart, chart.grid(3))
    if exp.metric is not None:
        for g in geoms:
            np.testing.assert_allclose(g.metric, exp.metric(g.point), atol=1e-12)
    if exp.raises == "HigherOrder":
        with pytest.raises(HigherOrder):
            slant_split(geoms[0], chart.ambient)
        return
    if exp.raises == "InconsistentScaling":
        with pytest.raises(InconsistentScaling):
            recover_warping(chart, geometries=geoms)
        return
    if exp.dims is not None:
        for g in geoms:
            split = slant_split(g, chart.ambient)
            assert split.dims == exp.dims
            assert split.proper == exp.proper
            if exp.theta is not None:
                assert split.theta == pytest.approx(exp.theta, abs=1e-12)
            if exp.cos_theta is not None:
                assert split.cos_theta == pytest.approx(exp.cos_theta(g.point), abs=1e-12)
    if exp.warps is not None:
        samples = recover_warping(chart, geometries=geoms)
        for p, vals in zip(samples.points, samples.values):
            np.testing.assert_allclose(vals, exp.warps(p), atol=1e-12)
        assert triviality_check(samples)[0] == exp.trivial


def test_unknown_names():
    with pytest.raises(UnknownFixture):
        fixture("nope")
    with pytest.raises(UnknownFixture):
        fixture("r14:3")
    with pytest.raises(UnknownFixture):
        fixture("slant_plane:abc")
    with pytest.raises(UnknownFixture):
        fixture("slant_plane:2.0")


def test_slant_plane_inline_angle():
    assert fixture("slant_plane:0.25").expected.theta == 0.25
