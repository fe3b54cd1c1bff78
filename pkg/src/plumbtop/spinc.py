"""Generalized Spin^c classes ``(delta + 2 L' x Q) / (2 B L x Q)``.

A representative is one root-lattice vector per vertex.  Since B acts the
same way on each of the r root coordinates, the class set is
``(Z^s / B Z^s)^r`` and a Smith normal form of B gives canonical keys.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable

from .linalg import inverse, matvec, smith_form
from .plumbing import (
    MoveKind,
    MoveSpec,
    PlumbingTree,
    apply_move_tracked,
    framing,
    side_of_edge,
)
from .root_lattice import RootLatticeData, Vector, WeylElement


@dataclass(frozen=True)
class SpincRep:
    components: tuple[Vector, ...]

    def __iter__(self):
        return iter(self.components)

    def to_json(self) -> list:
        return [[str(x) for x in v] for v in self.components]


def delta(T: PlumbingTree, L: RootLatticeData) -> SpincRep:
    r = L.weyl_vector_doubled
    return SpincRep(tuple(tuple((2 - T.degree(v)) * x for x in r) for v in range(T.size)))


def is_valid(T: PlumbingTree, L: RootLatticeData, a: SpincRep) -> bool:
    d = delta(T, L)
    return len(a.components) == T.size and all(
        all((x - y) % 2 == 0 for x, y in zip(av, dv)) for av, dv in zip(a.components, d.components)
    )


@functools.lru_cache(maxsize=1024)
def _smith(T: PlumbingTree):
    d, u = smith_form(framing(T).matrix)
    uinv = tuple(tuple(int(x) for x in row) for row in inverse(u))
    return d, u, uinv


def class_key(T: PlumbingTree, L: RootLatticeData, a: SpincRep) -> tuple:
    """Canonical invariant of the class of ``a``: ``U (a - delta)/2 mod d`` per root coordinate."""
    d, u, _ = _smith(T)
    base = delta(T, L).components
    key = []
    for j in range(L.rank):
        diff = [a.components[v][j] - base[v][j] for v in range(T.size)]
        if any(x % 2 for x in diff):
            raise ValueError("not a generalized Spin^c representative")
        t = matvec(u, [x // 2 for x in diff])
        key.append(tuple((ti % di) if di else ti for ti, di in zip(t, d)))
    return tuple(key)


def _rep_from_key(T: PlumbingTree, L: RootLatticeData, key: tuple) -> SpincRep:
    _, _, uinv = _smith(T)
    base = delta(T, L).components
    cols = [matvec(uinv, list(t)) for t in key]
    return SpincRep(tuple(tuple(base[v][j] + 2 * cols[j][v] for j in range(L.rank)) for v in range(T.size)))


def canonical(T: PlumbingTree, L: RootLatticeData, a: SpincRep) -> SpincRep:
    return _rep_from_key(T, L, class_key(T, L, a))


def enumerate_spinc(T: PlumbingTree, L: RootLatticeData) -> list[SpincRep]:
    """All classes, ``|det B|^r`` of them, in a fixed order."""
    d, _, _ = _smith(T)
    column_keys = list(itertools.product(*[range(di) for di in d]))
    return [_rep_from_key(T, L, key) for key in itertools.product(column_keys, repeat=L.rank)]


def weyl_act(w: WeylElement, a: SpincRep) -> SpincRep:
    return SpincRep(tuple(w.apply(v) for v in a.components))


def equivalent(T: PlumbingTree, L: RootLatticeData, a: SpincRep, b: SpincRep) -> bool:
    return class_key(T, L, a) == class_key(T, L, b)


# ---------------------------------------------------------------- transport


def _neg(v: Vector) -> Vector:
    return tuple(-x for x in v)


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def transport_up(T: PlumbingTree, m: MoveSpec, L: RootLatticeData, a: SpincRep, beta: Vector | None = None,
                 w: WeylElement | None = None) -> SpincRep:
    """The map R for an up-move ``m`` on the bottom tree ``T``.

    ``w`` (for B moves) and ``beta`` (for C) select other members of the
    fibres used in the invariance argument; the defaults give the
    distinguished representative.
    """
    comps = list(a.components)
    two_rho = L.weyl_vector_doubled
    zero = (0,) * L.rank
    k = m.kind
    if k in (MoveKind.A_MINUS, MoveKind.A_PLUS):
        u, wv = m.site
        right = side_of_edge(T, u, wv)
        f = -k.eps
        out = [tuple(f * x for x in c) if v in right else c for v, c in enumerate(comps)]
        return SpincRep(tuple(out) + (zero,))
    if k in (MoveKind.B_MINUS, MoveKind.B_PLUS):
        (u,) = m.site
        t = w.apply(two_rho) if w is not None else two_rho
        comps[u] = _add(comps[u], t)
        return SpincRep(tuple(comps) + (tuple(k.eps * x for x in t),))
    if k is MoveKind.C:
        (v0,) = m.site
        top, _ = apply_move_tracked(T, m)
        v2 = T.size + 1
        if beta is None:
            # Membership in delta + 2L' forces beta = deg(v2) * 2 rho mod 2Q.
            beta = two_rho if top.degree(v2) % 2 else zero
        right = set()
        for r in m.right:
            right |= side_of_edge(T, v0, r)
        out = [(_neg(c) if v in right else c) for v, c in enumerate(comps)]
        out[v0] = _add(comps[v0], beta)
        return SpincRep(tuple(out) + (zero, tuple(beta)))
    raise ValueError("transport_up needs an up-move")


@dataclass(frozen=True)
class MovePair:
    """A move seen from both ends: bottom tree, up-move, top tree.

    ``perm[i]`` is the index in ``top`` of vertex ``i`` of
    ``apply_move(bottom, up)``.
    """

    bottom: PlumbingTree
    up: MoveSpec
    top: PlumbingTree
    perm: tuple[int, ...]


def move_pair(T: PlumbingTree, m: MoveSpec) -> MovePair:
    """Normalise a move on T (up or down) to a bottom/top pair."""
    if not m.kind.is_inverse:
        top, _ = apply_move_tracked(T, m)
        return MovePair(T, m, top, tuple(range(top.size)))
    bottom, idx = apply_move_tracked(T, m)
    back = {}
    for old, new in idx.items():
        back.setdefault(new, old)
    (z,) = m.site
    nb = T.neighbors(z)
    k = m.kind.inverse()
    if k in (MoveKind.A_MINUS, MoveKind.A_PLUS):
        p, q = nb
        up = MoveSpec(k, (idx[p], idx[q]))
        order = [back[i] for i in range(bottom.size)] + [z]
    elif k in (MoveKind.B_MINUS, MoveKind.B_PLUS):
        up = MoveSpec(k, (idx[nb[0]],))
        order = [back[i] for i in range(bottom.size)] + [z]
    else:
        p, q = nb
        keep = idx[p]
        back[keep] = p
        right = tuple(sorted(idx[x] for x in T.neighbors(q) if x != z))
        up = MoveSpec(MoveKind.C, (keep,), (T.labels[p], T.labels[q]), right)
        order = [back[i] for i in range(bottom.size)] + [z, q]
    rebuilt, _ = apply_move_tracked(bottom, up)
    perm = tuple(order)
    # Sanity: the rebuilt tree is the top tree under perm.
    assert all(rebuilt.labels[i] == T.labels[perm[i]] for i in range(T.size))
    assert {tuple(sorted((perm[a], perm[b]))) for a, b in rebuilt.edges} == set(T.edges)
    return MovePair(bottom, up, T, perm)


def permute_to_top(pair: MovePair, a: SpincRep) -> SpincRep:
    comps = [None] * pair.top.size
    for i, c in enumerate(a.components):
        comps[pair.perm[i]] = c
    return SpincRep(tuple(comps))


def transport_pair(pair: MovePair, L: RootLatticeData, a_bottom: SpincRep, **kw) -> SpincRep:
    """R(a) expressed in the vertex order of ``pair.top``."""
    return permute_to_top(pair, transport_up(pair.bottom, pair.up, L, a_bottom, **kw))


def transport(m: MoveSpec, a: SpincRep, T: PlumbingTree, L: RootLatticeData, direction: str = "up") -> SpincRep:
    """Move a class across ``m`` applied to ``T``.

    For up-moves ``a`` lives on ``T`` and the image lives on the new tree.
    For blow-downs ``a`` lives on ``T`` (the top) and the result is the
    unique bottom class whose image is the class of ``a``.
    """
    pair = move_pair(T, m)
    if direction == "up" and not m.kind.is_inverse:
        return transport_pair(pair, L, a)
    target = class_key(pair.top, L, a)
    hits = [b for b in enumerate_spinc(pair.bottom, L) if class_key(pair.top, L, transport_pair(pair, L, b)) == target]
    if len(hits) != 1:
        raise ValueError(f"transport is not bijective here ({len(hits)} preimages)")
    return hits[0]


def transport_is_bijective(pair: MovePair, L: RootLatticeData) -> bool:
    bottom = enumerate_spinc(pair.bottom, L)
    images = {class_key(pair.top, L, transport_pair(pair, L, b)) for b in bottom}
    return len(images) == len(bottom) == len(enumerate_spinc(pair.top, L))


def transport_fiber(pair: MovePair, L: RootLatticeData, a: SpincRep, betas: Iterable[Vector] = ()) -> list[SpincRep]:
    """Test helper: the maps R_w (B moves) or R_beta (C, for the given betas)."""
    k = pair.up.kind
    if k in (MoveKind.B_MINUS, MoveKind.B_PLUS):
        return [transport_pair(pair, L, a, w=w) for w in L.weyl_group]
    if k is MoveKind.C:
        return [transport_pair(pair, L, a, beta=tuple(b)) for b in betas]
    return [transport_pair(pair, L, a)]
