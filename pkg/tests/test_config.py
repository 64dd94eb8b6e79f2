import copy
import json
from pathlib import Path

import numpy as np
import pytest

from biwarp.config import chart_from_dict, load_config, resolve_target
from biwarp.errors import ConfigError, ExprSyntaxError, UnknownFixture
from biwarp.submanifold import point_geometry

R14_JSON = Path(__file__).resolve().parent.parent / "configs" / "r14.json"


@pytest.fixture
def doc():
    return json.loads(R14_JSON.read_text())


def test_config_matches_catalog(r14):
    cfg = load_config(R14_JSON)
    assert cfg.grid_points == 3
    assert cfg.blocks.base == (0, 1) and cfg.blocks.fibers == ((2,), (3, 4))
    p = [1.2, 0.8, 0.3, 0.6, 0.9]
    np.testing.assert_array_equal(point_geometry(cfg.chart, p).metric, point_geometry(r14.chart, p).metric)


def test_index_blocks_and_tolerances(doc):
    doc["blocks"] = {"base": [0, 1], "fiber1": [2], "fiber2": [3, 4]}
    doc["tolerances"] = {"audit_tol": 1e-6}
    cfg = chart_from_dict(doc)
    assert cfg.blocks.fibers == ((2,), (3, 4))
    assert cfg.tolerances.audit_tol == 1e-6


def _mutations():
    def drop(key):
        return lambda d: d.pop(key)

    def setv(key, value):
        return lambda d: d.__setitem__(key, value)

    return [
        drop("complex_dim"),
        drop("params"),
        setv("surprise", 1),
        setv("complex_dim", "7"),
        setv("complex_dim", 6),
        setv("pairing", "other"),
        setv("blocks", {"base": ["u"], "fiber1": ["x"]}),
        setv("blocks", {"base": ["u", "v"], "fiber1": ["x"], "fiber2": ["z", "q"]}),
        setv("blocks", {"base": [0, 1], "fiber1": [2], "fiber2": [3, 9]}),
        setv("warps", {"fiber1": "u"}),
        setv("tolerances", {"nope": 1.0}),
        setv("tolerances", {"audit_tol": "x"}),
        setv("grid", {"points": 0}),
        setv("grid", {"size": 3}),
        setv("exclude", {"q": [1]}),
        lambda d: d["params"].append({"name": "u", "lower": 0, "upper": 1}),
        lambda d: d["params"][0].update(lower=3.0),
        lambda d: d["components"].__setitem__(0, "u*cos(q)"),
    ]


@pytest.mark.parametrize("mutate", _mutations())
def test_bad_configs(doc, mutate):
    bad = copy.deepcopy(doc)
    mutate(bad)
    with pytest.raises(ConfigError):
        chart_from_dict(bad)


def test_bad_expression_reports_offset(doc):
    doc["components"][3] = "v*cos(w"
    with pytest.raises(ExprSyntaxError) as err:
        chart_from_dict(doc)
    assert err.value.offset == 7


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(broken)
    with pytest.raises(ConfigError):
        chart_from_dict([1, 2])


def test_resolve_target():
    assert resolve_target("catalog:r14").chart.name == "r14"
    assert resolve_target("catalog:r14", strict=True).chart.excluded
    assert resolve_target(str(R14_JSON), strict=True).strict
    with pytest.raises(UnknownFixture):
        resolve_target("catalog:missing")
