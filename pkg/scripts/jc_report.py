#!/usr/bin/env python3
"""Print the bounded JC characterization report for every theory in a
workspace file.

    python3 scripts/jc_report.py data/posets.posmt data/unary.posmt --n 3 --N 4
"""

from __future__ import annotations

import argparse
import json

from posmt.textio import load_workspace
from posmt.theories import Budget, jc_characterization_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("files", nargs="+")
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    ws = load_workspace([open(f).read() for f in args.files])
    b = Budget(n=args.n, N=args.N, k=args.k)
    out = {}
    for name, t in sorted(ws.theories.items()):
        out[name] = jc_characterization_report(t, b)
    if args.json:
        print(json.dumps(out, indent=2, default=str))
        return 0
    for name, rep in out.items():
        conds = " ".join(f"{k}={'Y' if v else 'N'}" for k, v in rep["conditions"].items())
        agree = all(rep["agreement"].values())
        print(f"{name:<10} jc={rep['is_jc']:<8} {conds}  agreement={'all' if agree else 'PARTIAL'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
