"""Full audit of the R^14 example; writes the JSON report next to the summary.

    python3 scripts/run_r14_audit.py [--grid 5] [--out r14_audit.json]
"""

import argparse
import time

from biwarp.audit import run_audit
from biwarp.catalog import fixture
from biwarp.serialize import write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=3)
    ap.add_argument("--out", default="r14_audit.json")
    args = ap.parse_args()
    t0 = time.perf_counter()
    report = run_audit(fixture("r14").chart, grid=args.grid)
    print("\n".join(report.summary_lines()))
    print(f"{time.perf_counter() - t0:.2f} s")
    write_json(report, args.out)
    raise SystemExit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
