"""JSON chart configuration.

Schema (keys not listed are rejected)::

    {
      "name": "r14",
      "complex_dim": 7,
      "pairing": "consecutive",                  # optional
      "params": [{"name": "u", "lower": 0.5, "upper": 2.5}, ...],
      "components": ["u*cos(z)", ...],           # 2 * complex_dim strings
      "blocks": {"base": ["u", "v"], "fiber1": ["x"], "fiber2": ["z", "w"]},   # optional
      "warps": {"fiber1": "sqrt(u^2+v^2)", "fiber2": "..."},                   # optional
      "fiber_metrics": {"fiber1": [["1"]], "fiber2": [["1", "0"], ["0", "1"]]},  # optional
      "exclude": {"u": [0, 1], "v": [0, 1]},     # optional, used with strict grids
      "grid": {"points": 3, "strict": false},    # optional
      "tolerances": {"audit_tol": 1e-7}          # optional overrides
    }

Block entries may be parameter names or 0-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .ambient import PAIRING, AmbientSpace
from .catalog import CatalogEntry, fixture
from .errors import ConfigError
from .expr import parse_expression
from .submanifold import ImmersionChart, ParamSpec
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .warped import BlockStructure

TOP_KEYS = {
    "name", "complex_dim", "pairing", "params", "components", "blocks", "warps",
    "fiber_metrics", "exclude", "grid", "tolerances",
}  # fmt: skip
FIBER_KEYS = ("fiber1", "fiber2")


@dataclass(frozen=True)
class ChartConfig:
    chart: ImmersionChart
    grid_points: int | None = None
    strict: bool = False
    tolerances: Tolerances = DEFAULT_TOLERANCES
    entry: CatalogEntry | None = None

    @property
    def blocks(self) -> BlockStructure | None:
        return self.chart.blocks


def _require(doc: dict, key: str, kind):
    if key not in doc:
        raise ConfigError(f"missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ConfigError(f"{key!r} has the wrong type ({type(value).__name__})")
    return value


def _index(names: list[str], item) -> int:
    if isinstance(item, bool):
        raise ConfigError(f"bad block entry {item!r}")
    if isinstance(item, int):
        if not 0 <= item < len(names):
            raise ConfigError(f"block index {item} out of range")
        return item
    if isinstance(item, str) and item in names:
        return names.index(item)
    raise ConfigError(f"block entry {item!r} is not a declared parameter")


def _blocks(doc: dict, names: list[str]) -> BlockStructure | None:
    raw = doc.get("blocks")
    if raw is None:
        if "warps" in doc or "fiber_metrics" in doc:
            raise ConfigError("warps and fiber_metrics need a blocks entry")
        return None
    if not isinstance(raw, dict) or set(raw) - {"base", *FIBER_KEYS} or "base" not in raw or "fiber1" not in raw:
        raise ConfigError("blocks must have keys base, fiber1 and optionally fiber2")
    base = tuple(_index(names, i) for i in raw["base"])
    fiber_keys = [k for k in FIBER_KEYS if k in raw]
    fibers = tuple(tuple(_index(names, i) for i in raw[k]) for k in fiber_keys)
    warps = None
    if "warps" in doc:
        w = doc["warps"]
        if not isinstance(w, dict) or set(w) != set(fiber_keys):
            raise ConfigError(f"warps must give one expression for each of {fiber_keys}")
        warps = tuple(parse_expression(w[k]) for k in fiber_keys)
    metrics = None
    if "fiber_metrics" in doc:
        fm = doc["fiber_metrics"]
        if not isinstance(fm, dict) or set(fm) != set(fiber_keys):
            raise ConfigError(f"fiber_metrics must give one matrix for each of {fiber_keys}")
        metrics = tuple(tuple(tuple(parse_expression(str(e)) for e in row) for row in fm[k]) for k in fiber_keys)
    blocks = BlockStructure(base, fibers, warps, metrics)
    blocks.validate(names)
    return blocks


def chart_from_dict(doc: dict[str, Any]) -> ChartConfig:
    try:
        return _chart_from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from None


def _chart_from_dict(doc: dict[str, Any]) -> ChartConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    name = doc.get("name", "chart")
    m = _require(doc, "complex_dim", int)
    ambient = AmbientSpace(m, doc.get("pairing", PAIRING))
    params = []
    for p in _require(doc, "params", list):
        if not isinstance(p, dict) or set(p) != {"name", "lower", "upper"}:
            raise ConfigError("each param needs exactly name, lower, upper")
        params.append(ParamSpec(str(p["name"]), float(p["lower"]), float(p["upper"])))
    names = [p.name for p in params]
    components = tuple(parse_expression(str(c)) for c in _require(doc, "components", list))
    blocks = _blocks(doc, names)
    excluded = ()
    if "exclude" in doc:
        ex = doc["exclude"]
        if not isinstance(ex, dict) or set(ex) - set(names):
            raise ConfigError("exclude maps parameter names to value lists")
        excluded = tuple((k, tuple(float(v) for v in vals)) for k, vals in ex.items())
    grid = doc.get("grid", {})
    if not isinstance(grid, dict) or set(grid) - {"points", "strict"}:
        raise ConfigError("grid takes keys points and strict")
    points = grid.get("points")
    if points is not None and (not isinstance(points, int) or points < 1):
        raise ConfigError("grid.points must be a positive integer")
    tol_doc = doc.get("tolerances", {})
    try:
        tols = DEFAULT_TOLERANCES.updated(**tol_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad tolerances: {exc}") from None
    chart = ImmersionChart(name, ambient, tuple(params), components, blocks, excluded, points or 3)
    return ChartConfig(chart, points, bool(grid.get("strict", False)), tols)


def load_config(path: str | Path) -> ChartConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {str(path)!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return chart_from_dict(doc)


def resolve_target(target: str, strict: bool = False) -> ChartConfig:
    """``catalog:NAME`` or a path to a JSON config."""
    if target.startswith("catalog:"):
        name = target[len("catalog:") :]
        kwargs = {"strict_domain": True} if strict and name == "r14" else {}
        entry = fixture(name, **kwargs)
        return ChartConfig(entry.chart, None, strict, DEFAULT_TOLERANCES, entry)
    cfg = load_config(target)
    if strict:
        cfg = ChartConfig(cfg.chart, cfg.grid_points, True, cfg.tolerances)
    return cfg
