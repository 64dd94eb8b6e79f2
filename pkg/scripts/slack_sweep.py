"""Slack of the curvature inequality on R^14 as a function of (u, v).

The slack only depends on the base point, so the angles are held fixed and
u, v run over a fine grid. Prints the minimum and writes a CSV table.

    python3 scripts/slack_sweep.py [--n 41] [--csv slack_uv.csv]
"""

import argparse

import numpy as np

from biwarp.audit import inequality_audit, sample_chart
from biwarp.catalog import fixture
from biwarp.serialize import csv_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=41)
    ap.add_argument("--csv", default="slack_uv.csv")
    args = ap.parse_args()
    chart = fixture("r14").chart
    uv = np.linspace(0.5, 2.5, args.n)
    pts = np.array([[u, v, 0.7, 0.7, 0.7] for u in uv for v in uv])
    _, rows = inequality_audit(sample_chart(chart, points=pts))
    table = [(r.point[0], r.point[1], r.lhs, r.rhs, r.slack, r.slack / r.lhs) for r in rows]
    with open(args.csv, "w", encoding="utf-8") as fh:
        fh.write(csv_text(["u", "v", "lhs", "rhs", "slack", "slack_ratio"], table))
    worst = min(rows, key=lambda r: r.slack)
    ratio = min(t[5] for t in table)
    print(f"{len(rows)} points; min slack {worst.slack:.6e} at u={worst.point[0]:.3f}, v={worst.point[1]:.3f}")
    print(f"min slack / lhs {ratio:.4f}")


if __name__ == "__main__":
    main()
