"""Audit report containers.

Entry kinds:

* ``identity``: both sides of an equation; asserted.
* ``agreement``: two predicates computed by different routes must agree; asserted.
* ``condition``: a property that may or may not hold on a given chart; reported only.
* ``info``: diagnostics with no pass/fail meaning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

ASSERTED = ("identity", "agreement")


def _point(p) -> list[float] | None:
    return None if p is None else [float(x) for x in np.asarray(p).ravel()]


@dataclass
class IdentityEntry:
    name: str
    formula: str
    kind: str
    max_residual: float
    worst_point: Any
    tol: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "formula": self.formula,
            "kind": self.kind,
            "max_residual": float(self.max_residual),
            "worst_point": _point(self.worst_point),
            "tol": float(self.tol),
            "pass": bool(self.passed),
            "detail": self.detail,
        }


@dataclass
class Section:
    name: str
    entries: list[IdentityEntry] = field(default_factory=list)
    skipped: str | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries if e.kind in ASSERTED)

    def entry(self, name: str) -> IdentityEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "skipped": self.skipped,
            "notes": self.notes,
            "entries": [e.to_dict() for e in self.entries],
        }


@dataclass
class InequalityRow:
    point: np.ndarray
    lhs: float
    rhs: float
    slack: float
    theta: float
    f: float
    sigma: float
    mixed_bound: float
    decomposition: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "point": _point(self.point),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "theta": self.theta,
            "f": self.f,
            "sigma": self.sigma,
            "mixed_bound": self.mixed_bound,
            "decomposition": self.decomposition,
        }


@dataclass
class EqualityRow:
    point: np.ndarray
    near_equality: bool
    flags: dict[str, bool]
    residuals: dict[str, float]

    @property
    def all_flags(self) -> bool:
        return all(self.flags.values())

    @property
    def agree(self) -> bool:
        return self.near_equality == self.all_flags

    def to_dict(self) -> dict:
        return {
            "point": _point(self.point),
            "near_equality": self.near_equality,
            "flags": self.flags,
            "residuals": self.residuals,
            "agree": self.agree,
        }


@dataclass
class AuditReport:
    chart: str
    grid: dict
    tolerances: dict
    sections: list[Section] = field(default_factory=list)
    inequality: list[InequalityRow] = field(default_factory=list)
    diagnostics: list[EqualityRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections)

    def section(self, name: str) -> Section:
        for s in self.sections:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "chart": self.chart,
            "grid": self.grid,
            "tolerances": self.tolerances,
            "pass": self.passed,
            "sections": [s.to_dict() for s in self.sections],
            "inequality": [r.to_dict() for r in self.inequality],
            "diagnostics": [r.to_dict() for r in self.diagnostics],
        }

    def summary_lines(self) -> list[str]:
        lines = [f"chart {self.chart}: {self.grid.get('count', '?')} points"]
        for s in self.sections:
            if s.skipped:
                lines.append(f"  {s.name:<24} skipped ({s.skipped})")
                continue
            lines.append(f"  {s.name:<24} {'PASS' if s.passed else 'FAIL'}")
            for e in s.entries:
                mark = {True: "ok", False: "FAIL"}[e.passed] if e.kind in ASSERTED else e.kind
                if e.kind == "condition":
                    mark = "holds" if e.passed else "fails"
                lines.append(f"    {e.name:<30} {e.max_residual:10.3e}  {mark}")
        if self.inequality:
            worst = min(self.inequality, key=lambda r: r.slack)
            lines.append(f"  inequality: min slack {worst.slack:.6e} at {_point(worst.point)}")
        if self.diagnostics:
            bad = sum(not r.agree for r in self.diagnostics)
            near = sum(r.near_equality for r in self.diagnostics)
            lines.append(f"  equality: {near} near-equality points, {bad} disagreements with flags (a)-(d)")
        lines.append("PASS" if self.passed else "FAIL")
        return lines
