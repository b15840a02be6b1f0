#!/usr/bin/env python3
"""Census of bounded models and bounded-pc models for each theory in a
workspace file.

    python3 scripts/pc_census.py data/posets.posmt --n 3
"""

from __future__ import annotations

import argparse

from posmt.textio import load_workspace
from posmt.theories import Budget, bounded_pc_models, models


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("files", nargs="+")
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--node-cap", type=int, default=10**6)
    args = ap.parse_args()

    ws = load_workspace([open(f).read() for f in args.files])
    b = Budget(n=args.n, node_cap=args.node_cap)
    for name, t in sorted(ws.theories.items()):
        ms = models(t, b)
        pcs = bounded_pc_models(t, b)
        sizes = ",".join(str(m.size()) for m in pcs) or "-"
        print(f"{name:<10} models<= {b.n}: {len(ms):>4}   pc models: {len(pcs)} (sizes {sizes})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
