#!/usr/bin/env python3
"""Tabulate Brieskorn spheres: plumbing data and the first terms of Y, by both routes."""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from plumbtop.admissible import kostant_series  # noqa: E402
from plumbtop.brieskorn import InvalidBrieskorn, brieskorn_plumbing, brieskorn_Y  # noqa: E402
from plumbtop.root_lattice import build_root_lattice  # noqa: E402
from plumbtop.series import ComputationPlan, compute_Y, lower_bound  # noqa: E402
from plumbtop.spinc import enumerate_spinc  # noqa: E402


def triples(limit):
    for b1 in range(2, limit):
        for b2 in range(b1 + 1, limit):
            for b3 in range(b2 + 1, limit):
                try:
                    yield brieskorn_plumbing(b1, b2, b3)
                except InvalidBrieskorn:
                    continue


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-b", type=int, default=8)
    ap.add_argument("--lattice", default="A1")
    ap.add_argument("--window", type=int, default=10)
    args = ap.parse_args()
    L = build_root_lattice(args.lattice)
    W = kostant_series(L)
    bad = 0
    for data, T in triples(args.max_b):
        (a,) = enumerate_spinc(T, L)
        n = lower_bound(T, L, a) + args.window
        y = compute_Y(ComputationPlan(T, L, W, a, n))
        same = y == brieskorn_Y(data, L, W, n)
        bad += not same
        print(f"Sigma{data.b}  b0={data.b0}  legs={[list(x) for x in data.legs]}  h={data.h}  "
              f"C/<rho,rho>={data.C_unit}  agree={same}")
        print(f"    {y.pretty()}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
