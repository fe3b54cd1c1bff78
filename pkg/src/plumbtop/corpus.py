"""Seeded random test trees and the catalogue of moves tried on them."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .linalg import det
from .plumbing import (
    InapplicableMove,
    MoveKind,
    MoveSpec,
    PlumbingTree,
    apply_move,
    framing_matrix,
    is_reduced,
    is_weakly_negative_definite,
)


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 20240
    count: int = 20
    max_vertices: int = 8
    max_det: int = 3
    labels: tuple[int, int] = (-6, -1)
    max_degree: int = 4


def random_shape(rng: random.Random, n: int, max_degree: int) -> list[tuple[int, int]]:
    edges = []
    deg = [0] * n
    for v in range(1, n):
        choices = [u for u in range(v) if deg[u] < max_degree]
        u = rng.choice(choices)
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    return edges


def random_tree(rng: random.Random, cfg: CorpusConfig) -> PlumbingTree:
    """Reduced, weakly negative definite, ``1 <= |det| <= max_det``, at least one high vertex."""
    lo, hi = cfg.labels
    while True:
        n = rng.randint(4, cfg.max_vertices)
        # Degree 4 is rare: most stars in practice are trivalent.
        cap = cfg.max_degree if rng.random() < 0.15 else 3
        edges = random_shape(rng, n, cap)
        labels = [rng.randint(lo, hi) for _ in range(n)]
        T = PlumbingTree(tuple(labels), tuple(edges))
        if not T.high_vertices:
            continue
        d = det(framing_matrix(T))
        if d == 0 or abs(d) > cfg.max_det:
            continue
        if is_weakly_negative_definite(T) and is_reduced(T):
            return T


def tree_corpus(cfg: CorpusConfig = CorpusConfig()) -> list[PlumbingTree]:
    rng = random.Random(cfg.seed)
    seen = set()
    out = []
    while len(out) < cfg.count:
        T = random_tree(rng, cfg)
        if T not in seen:
            seen.add(T)
            out.append(T)
    return out


def candidate_moves(T: PlumbingTree) -> list[MoveSpec]:
    """Every blow-up and blow-down applicable to T, with C splits ``(-1, m+1)`` and ``(m+1, -1)``.

    C splits are unbounded in general; the two used here keep one side at
    label -1 and run over every choice of neighbours sent to the new vertex.
    """
    out = []
    for u, w in T.edges:
        out.append(MoveSpec(MoveKind.A_MINUS, (u, w)))
        out.append(MoveSpec(MoveKind.A_PLUS, (u, w)))
    for v in range(T.size):
        out.append(MoveSpec(MoveKind.B_MINUS, (v,)))
        out.append(MoveSpec(MoveKind.B_PLUS, (v,)))
    for v in range(T.size):
        m = T.labels[v]
        nb = T.neighbors(v)
        for split in sorted({(-1, m + 1), (m + 1, -1)}):
            for k in range(len(nb) + 1):
                for right in itertools.combinations(nb, k):
                    out.append(MoveSpec(MoveKind.C, (v,), split, right))
    for v in range(T.size):
        for kind in (MoveKind.A_MINUS_INV, MoveKind.A_PLUS_INV, MoveKind.B_MINUS_INV, MoveKind.B_PLUS_INV,
                     MoveKind.C_INV):
            out.append(MoveSpec(kind, (v,)))
    good = []
    for m in out:
        try:
            apply_move(T, m)
        except InapplicableMove:
            continue
        good.append(m)
    return good


def admissible_moves(T: PlumbingTree) -> list[MoveSpec]:
    """Candidate moves whose result is again reduced and weakly negative definite."""
    out = []
    for m in candidate_moves(T):
        U = apply_move(T, m)
        if is_reduced(U) and is_weakly_negative_definite(U):
            out.append(m)
    return out
