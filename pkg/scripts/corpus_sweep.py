#!/usr/bin/env python3
"""Move-invariance sweep over the seeded corpus, with per-tree timings.

Writes a JSON summary (counts per status, failures, seconds) to --out.
"""
import argparse
import json
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from plumbtop.admissible import kostant_series, translate_family_member  # noqa: E402
from plumbtop.corpus import CorpusConfig, admissible_moves, tree_corpus  # noqa: E402
from plumbtop.root_lattice import build_root_lattice  # noqa: E402
from plumbtop.series import verify_move_invariance  # noqa: E402
from plumbtop.spinc import enumerate_spinc  # noqa: E402


def sweep_tree(T, lattices, window):
    stat, failures = Counter(), []
    for name in lattices:
        L = build_root_lattice(name)
        for P in (kostant_series(L), translate_family_member(L, (0,) * L.rank, 0)):
            for m in admissible_moves(T):
                for k, a in enumerate(enumerate_spinc(T, L)):
                    rep = verify_move_invariance(T, m, L, P, a, window=window)
                    stat[rep.status] += 1
                    if rep.status == "differ":
                        failures.append({"lattice": name, "series": P.label, "move": m.to_json(), "spinc": k})
    return stat, failures


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=CorpusConfig.seed)
    ap.add_argument("--count", type=int, default=CorpusConfig.count)
    ap.add_argument("--lattice", nargs="+", default=["A1", "A2"])
    ap.add_argument("--window", default="16")
    ap.add_argument("--out", default="corpus_sweep.json")
    args = ap.parse_args()

    rows = []
    for i, T in enumerate(tree_corpus(CorpusConfig(seed=args.seed, count=args.count))):
        t0 = time.perf_counter()
        stat, failures = sweep_tree(T, args.lattice, Fraction(args.window))
        dt = time.perf_counter() - t0
        print(f"{i:3d} {T.labels} {dict(stat)} {dt:.1f}s", flush=True)
        rows.append({"tree": T.to_json(), "counts": dict(stat), "failures": failures, "seconds": round(dt, 2)})
    Path(args.out).write_text(json.dumps({"seed": args.seed, "rows": rows}, indent=2, sort_keys=True) + "\n")
    return 1 if any(r["failures"] for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
