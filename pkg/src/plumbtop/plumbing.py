"""Plumbing trees, framing matrices and the five local moves.

Vertex order is part of the data: moves append new vertices at the end
and blow-downs delete a vertex and shift later indices down by one.
``apply_move_tracked`` returns the old-to-new index map so callers can
follow vertices through a sequence of moves.
"""

from __future__ import annotations

import enum
import functools
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import det, inertia, inverse, is_positive_definite
from .root_lattice import RootLatticeData, WeylElement


class InvalidTree(ValueError):
    pass


class DegenerateFraming(ValueError):
    pass


class InapplicableMove(ValueError):
    pass


@dataclass(frozen=True)
class PlumbingTree:
    labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        s = len(self.labels)
        if s == 0:
            raise InvalidTree("empty tree")
        norm = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        object.__setattr__(self, "edges", norm)
        object.__setattr__(self, "labels", tuple(int(m) for m in self.labels))
        if len(norm) != s - 1 or len(set(norm)) != len(norm):
            raise InvalidTree("a tree on s vertices has s - 1 distinct edges")
        for a, b in norm:
            if not (0 <= a < s and 0 <= b < s) or a == b:
                raise InvalidTree(f"bad edge {(a, b)}")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != s:
            raise InvalidTree("graph is not connected")

    @property
    def size(self) -> int:
        return len(self.labels)

    @functools.cached_property
    def _adj(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.labels]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self._adj)

    @property
    def high_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.size) if self.degree(v) >= 3)

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in set(self.edges)

    def to_json(self) -> dict:
        return {"vertices": [{"m": m} for m in self.labels], "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "PlumbingTree":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            labels = [int(v["m"]) for v in data["vertices"]]
            edges = [tuple(int(x) for x in e) for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidTree(f"malformed tree JSON: {exc}") from exc
        return cls(tuple(labels), tuple(edges))

    @classmethod
    def path(cls, labels: Sequence[int]) -> "PlumbingTree":
        return cls(tuple(labels), tuple((i, i + 1) for i in range(len(labels) - 1)))

    @classmethod
    def star(cls, center: int, legs: Sequence[Sequence[int]]) -> "PlumbingTree":
        labels = [center]
        edges = []
        for leg in legs:
            prev = 0
            for m in leg:
                labels.append(m)
                edges.append((prev, len(labels) - 1))
                prev = len(labels) - 1
        return cls(tuple(labels), tuple(edges))


def framing_matrix(T: PlumbingTree) -> tuple[tuple[int, ...], ...]:
    s = T.size
    m = [[0] * s for _ in range(s)]
    for v, lab in enumerate(T.labels):
        m[v][v] = lab
    for a, b in T.edges:
        m[a][b] = m[b][a] = 1
    return tuple(tuple(r) for r in m)


@dataclass(frozen=True)
class FramingData:
    matrix: tuple[tuple[int, ...], ...]
    determinant: int
    inverse: tuple[tuple[Fraction, ...], ...]
    sigma: int
    pi: int
    trace: int


@functools.lru_cache(maxsize=4096)
def framing(T: PlumbingTree) -> FramingData:
    b = framing_matrix(T)
    d = det(b)
    if d == 0:
        raise DegenerateFraming("framing matrix is singular")
    pos, neg, zero = inertia(b)
    assert zero == 0
    return FramingData(b, d, inverse(b), pos - neg, pos, sum(T.labels))


def is_weakly_negative_definite(T: PlumbingTree) -> bool:
    f = framing(T)
    h = T.high_vertices
    block = [[-f.inverse[i][j] for j in h] for i in h]
    return is_positive_definite(block)


# ------------------------------------------------------------------- moves


class MoveKind(enum.Enum):
    A_MINUS = "Aminus"
    A_PLUS = "Aplus"
    B_MINUS = "Bminus"
    B_PLUS = "Bplus"
    C = "C"
    A_MINUS_INV = "Aminus-inv"
    A_PLUS_INV = "Aplus-inv"
    B_MINUS_INV = "Bminus-inv"
    B_PLUS_INV = "Bplus-inv"
    C_INV = "C-inv"

    @property
    def eps(self) -> int:
        return -1 if "minus" in self.value else 1

    @property
    def family(self) -> str:
        return self.value[0]

    @property
    def is_inverse(self) -> bool:
        return self.value.endswith("-inv")

    def inverse(self) -> "MoveKind":
        v = self.value
        return MoveKind(v[:-4] if v.endswith("-inv") else v + "-inv")


@dataclass(frozen=True)
class MoveSpec:
    """A move anchored at ``site``.

    Sites: (u, w) edge for A up-moves (w is the "right" side); (u,) for B
    up-moves; (v0,) for C with ``split=(m1, m2)`` and ``right`` the
    neighbours of v0 that move to the new vertex v2; (z,) the vertex to
    remove for every inverse move.
    """

    kind: MoveKind
    site: tuple[int, ...]
    split: tuple[int, int] | None = None
    right: tuple[int, ...] = ()

    def to_json(self) -> dict:
        d = {"kind": self.kind.value, "site": list(self.site)}
        if self.split is not None:
            d["split"] = list(self.split)
            d["right"] = list(self.right)
        return d

    @classmethod
    def from_json(cls, d) -> "MoveSpec":
        split = tuple(d["split"]) if d.get("split") is not None else None
        return cls(MoveKind(d["kind"]), tuple(d["site"]), split, tuple(d.get("right", ())))


def _remove_vertex(labels: list[int], edges: list[tuple[int, int]], z: int):
    new_index = {v: (v if v < z else v - 1) for v in range(len(labels)) if v != z}
    labels = [m for v, m in enumerate(labels) if v != z]
    edges = [(new_index[a], new_index[b]) for a, b in edges if z not in (a, b)]
    return labels, edges, new_index


def apply_move_tracked(T: PlumbingTree, m: MoveSpec) -> tuple[PlumbingTree, dict[int, int]]:
    """Apply a move; return the new tree and the map old index -> new index."""
    labels = list(T.labels)
    edges = list(T.edges)
    s = T.size
    k = m.kind
    eps = k.eps
    ident = {v: v for v in range(s)}
    try:
        if k in (MoveKind.A_MINUS, MoveKind.A_PLUS):
            u, w = m.site
            if not T.has_edge(u, w):
                raise InapplicableMove("A move needs an edge")
            labels[u] += eps
            labels[w] += eps
            labels.append(eps)
            edges.remove((min(u, w), max(u, w)))
            edges += [(u, s), (s, w)]
            return PlumbingTree(tuple(labels), tuple(edges)), ident
        if k in (MoveKind.B_MINUS, MoveKind.B_PLUS):
            (u,) = m.site
            labels[u] += eps
            labels.append(eps)
            edges.append((u, s))
            return PlumbingTree(tuple(labels), tuple(edges)), ident
        if k is MoveKind.C:
            (v0,) = m.site
            if m.split is None or sum(m.split) != labels[v0]:
                raise InapplicableMove("C split must add up to the label")
            right = set(m.right)
            if not right <= set(T.neighbors(v0)):
                raise InapplicableMove("C right part must consist of neighbours")
            m1, m2 = m.split
            labels[v0] = m1
            labels += [0, m2]
            z, v2 = s, s + 1
            edges = [e for e in edges if not (v0 in e and (set(e) - {v0}) <= right)]
            edges += [(v0, z), (z, v2)] + [(v2, r) for r in sorted(right)]
            return PlumbingTree(tuple(labels), tuple(edges)), ident
        (z,) = m.site
        if not 0 <= z < s:
            raise InapplicableMove("vertex out of range")
        nb = T.neighbors(z)
        if k in (MoveKind.A_MINUS_INV, MoveKind.A_PLUS_INV):
            if len(nb) != 2 or labels[z] != eps:
                raise InapplicableMove("A blow-down needs a degree-2 vertex labelled +-1")
            p, q = nb
            labels[p] -= eps
            labels[q] -= eps
            edges.append((p, q))
            labels, edges, idx = _remove_vertex(labels, edges, z)
            return PlumbingTree(tuple(labels), tuple(edges)), idx
        if k in (MoveKind.B_MINUS_INV, MoveKind.B_PLUS_INV):
            if len(nb) != 1 or labels[z] != eps:
                raise InapplicableMove("B blow-down needs a leaf labelled +-1")
            labels[nb[0]] -= eps
            labels, edges, idx = _remove_vertex(labels, edges, z)
            return PlumbingTree(tuple(labels), tuple(edges)), idx
        if k is MoveKind.C_INV:
            if len(nb) != 2 or labels[z] != 0:
                raise InapplicableMove("C inverse needs a degree-2 vertex labelled 0")
            p, q = nb
            labels[p] += labels[q]
            edges = [e for e in edges if z not in e]
            edges = [tuple(p if x == q else x for x in e) for e in edges]
            labels, edges, idx1 = _remove_vertex(labels, edges, max(z, q))
            labels, edges, idx2 = _remove_vertex(labels, edges, idx1[min(z, q)])
            idx = {}
            for v in range(s):
                if v == z:
                    continue
                src = p if v == q else v
                idx[v] = idx2[idx1[src]]
            return PlumbingTree(tuple(labels), tuple(edges)), idx
    except ValueError as exc:
        if isinstance(exc, InapplicableMove):
            raise
        raise InapplicableMove(str(exc)) from exc
    raise InapplicableMove(f"unknown move {k}")


def apply_move(T: PlumbingTree, m: MoveSpec) -> PlumbingTree:
    return apply_move_tracked(T, m)[0]


def inverse_move(T: PlumbingTree, m: MoveSpec) -> MoveSpec:
    """The blow-down undoing an up-move ``m`` applied to ``T``."""
    if m.kind.is_inverse:
        raise ValueError("only up-moves have a canonical inverse here")
    s = T.size
    return MoveSpec(m.kind.inverse(), (s,))


def side_of_edge(T: PlumbingTree, u: int, w: int) -> set[int]:
    """Vertices on w's side after cutting the edge (u, w)."""
    seen = {w}
    stack = [w]
    while stack:
        v = stack.pop()
        for x in T.neighbors(v):
            if x not in seen and not (v == w and x == u):
                seen.add(x)
                stack.append(x)
    return seen


# --------------------------------------------------------------- isomorphism


def canonical_form(T: PlumbingTree) -> tuple:
    """Label-aware canonical encoding (AHU rooted at the tree centre)."""

    def enc(v: int, parent: int) -> tuple:
        kids = sorted(enc(u, v) for u in T.neighbors(v) if u != parent)
        return (T.labels[v], tuple(kids))

    return min(enc(c, -1) for c in _centers(T))


def _centers(T: PlumbingTree) -> list[int]:
    deg = list(T.degrees)
    leaves = [v for v in range(T.size) if deg[v] <= 1]
    remaining = T.size
    alive = set(range(T.size))
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for v in leaves:
            alive.discard(v)
            for u in T.neighbors(v):
                if u in alive:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        leaves = nxt
    return sorted(alive)


def isomorphic(a: PlumbingTree, b: PlumbingTree) -> bool:
    return a.size == b.size and canonical_form(a) == canonical_form(b)


# ----------------------------------------------------- branches and bridges


def chain_det(labels: Sequence[int]) -> int:
    """Continuant: determinant of the tridiagonal path matrix."""
    prev, cur = 1, 1
    first = True
    for k in labels:
        if first:
            prev, cur = 1, k
            first = False
        else:
            prev, cur = cur, k * cur - prev
    return cur


@dataclass(frozen=True)
class Branch:
    center: int
    vertices: tuple[int, ...]
    contractible: bool


def branches(T: PlumbingTree) -> list[Branch]:
    """All legs hanging off vertices of degree at least three."""
    out = []
    for v in T.high_vertices:
        for u in T.neighbors(v):
            chain = [u]
            prev = v
            while T.degree(chain[-1]) == 2:
                nxt = next(x for x in T.neighbors(chain[-1]) if x != prev)
                prev = chain[-1]
                chain.append(nxt)
            if T.degree(chain[-1]) == 1:
                labs = [T.labels[c] for c in chain]
                out.append(Branch(v, tuple(chain), abs(chain_det(labs)) == 1))
    return out


def find_contractible_branches(T: PlumbingTree) -> list[Branch]:
    return [b for b in branches(T) if b.contractible]


def _path_from(T: PlumbingTree, v: int, first: int) -> list[int]:
    chain = [first]
    prev = v
    while T.degree(chain[-1]) == 2:
        nxt = next(x for x in T.neighbors(chain[-1]) if x != prev)
        prev = chain[-1]
        chain.append(nxt)
    return chain


@dataclass
class Contraction:
    tree: PlumbingTree
    trace: list = field(default_factory=list)
    vertex_map: dict = field(default_factory=dict)


def _step_chain(T: PlumbingTree, chain: list[int], leg: bool) -> MoveSpec | None:
    """One greedy blow-down step on a chain (leg or bridge interior)."""
    labs = [T.labels[c] for c in chain]
    last = len(chain) - 1
    if leg and labs[last] in (1, -1):
        kind = MoveKind.B_PLUS_INV if labs[last] == 1 else MoveKind.B_MINUS_INV
        return MoveSpec(kind, (chain[last],))
    interior = range(len(chain) - 1) if leg else range(len(chain))
    for i in interior:
        if labs[i] in (1, -1):
            kind = MoveKind.A_PLUS_INV if labs[i] == 1 else MoveKind.A_MINUS_INV
            return MoveSpec(kind, (chain[i],))
    for i in interior:
        if labs[i] == 0:
            return MoveSpec(MoveKind.C_INV, (chain[i],))
    if leg and labs[last] == 0 and last >= 1:
        # [x, 0] -> [x + e, e, e] -> [x + e, 0]; walks x towards +-1.
        e = -1 if labs[last - 1] > 0 else 1
        kind = MoveKind.A_PLUS if e == 1 else MoveKind.A_MINUS
        return MoveSpec(kind, (chain[last - 1], chain[last]))
    return None


def _track(T: PlumbingTree, m: MoveSpec, c: Contraction, marks: dict) -> dict:
    T2, idx = apply_move_tracked(T, m)
    c.tree = T2
    c.trace.append(m)
    c.vertex_map = {k: idx[v] for k, v in c.vertex_map.items() if v in idx}
    return {k: idx[v] for k, v in marks.items() if v in idx}


def contract_leg(T: PlumbingTree, v: int, first: int, max_steps: int = 10_000) -> Contraction | None:
    """Contract the leg of ``v`` starting at ``first`` by greedy blow-downs.

    The leg's labels determine contractibility (|continuant| = 1); each
    greedy step keeps the continuant up to sign and shortens the leg or
    moves a label towards +-1, so the procedure terminates exactly when
    the leg is contractible.  ``vertex_map`` follows the original
    vertices that survive.
    """
    c = Contraction(T, [], {u: u for u in range(T.size)})
    leg = set(_path_from(T, v, first))
    rest = {u for u in range(T.size) if u not in leg and u != v}
    marks = {"v": v}
    rest_marks = {("r", u): u for u in rest}
    for _ in range(max_steps):
        cur_v = marks["v"]
        rest_now = set(rest_marks.values())
        heads = [u for u in c.tree.neighbors(cur_v) if u not in rest_now]
        if not heads:
            return c
        chain = _path_from(c.tree, cur_v, heads[0])
        m = _step_chain(c.tree, chain, leg=True)
        if m is None:
            return None
        both = dict(marks)
        both.update(rest_marks)
        both = _track(c.tree, m, c, both)
        marks = {"v": both["v"]}
        rest_marks = {k: val for k, val in both.items() if k != "v"}
    return None


def reducible_vertices(T: PlumbingTree) -> list[int]:
    counts: dict[int, int] = {}
    for b in find_contractible_branches(T):
        counts[b.center] = counts.get(b.center, 0) + 1
    return [v for v in T.high_vertices if T.degree(v) - counts.get(v, 0) <= 2]


def is_reduced(T: PlumbingTree) -> bool:
    return not reducible_vertices(T)


@dataclass
class ReduceResult:
    tree: PlumbingTree
    trace: list
    complete: bool


def reduce(T: PlumbingTree, max_rounds: int = 1000) -> ReduceResult:
    """Contract branches at reducible vertices until none remain."""
    trace: list = []
    for _ in range(max_rounds):
        red = reducible_vertices(T)
        if not red:
            return ReduceResult(T, trace, True)
        v = red[0]
        b = next(b for b in find_contractible_branches(T) if b.center == v)
        res = contract_leg(T, v, b.vertices[0])
        if res is None:
            return ReduceResult(T, trace, False)
        T = res.tree
        trace += res.trace
    return ReduceResult(T, trace, False)


@dataclass(frozen=True)
class Bridge:
    v: int
    w: int
    interior: tuple[int, ...]
    delta_pi: int
    trace: tuple = ()


def _bridge_paths(T: PlumbingTree) -> list[tuple[int, int, list[int]]]:
    out = []
    for v in T.high_vertices:
        for u in T.neighbors(v):
            chain = [u]
            prev = v
            while T.degree(chain[-1]) == 2:
                nxt = next(x for x in T.neighbors(chain[-1]) if x != prev)
                prev = chain[-1]
                chain.append(nxt)
            end = chain[-1]
            if T.degree(end) >= 3 and v < end:
                out.append((v, end, chain[:-1]))
    return out


def forcing_bridges(T: PlumbingTree) -> list[Bridge]:
    """Paths between degree >= 3 vertices whose interior contracts away.

    A nonempty interior chain contracts to a single merged vertex by (A)
    and (C) blow-downs exactly when its continuant vanishes; the greedy
    contraction below realises it.
    """
    out = []
    pi0 = framing(T).pi
    for v, w, interior in _bridge_paths(T):
        if not interior or chain_det([T.labels[c] for c in interior]) != 0:
            continue
        cur = T
        marks = {"v": v, "w": w}
        trace = []
        while True:
            if cur.has_edge(marks["v"], marks["w"]) or marks["v"] == marks["w"]:
                break
            chain = _path_from(cur, marks["v"], _toward(cur, marks["v"], marks["w"]))[:-1]
            m = _step_chain(cur, chain, leg=False)
            if m is None:
                break
            cur, idx = apply_move_tracked(cur, m)
            trace.append(m)
            marks = {k: idx[x] for k, x in marks.items()}
        if marks["v"] != marks["w"]:
            continue
        out.append(Bridge(v, w, tuple(interior), pi0 - framing(cur).pi, tuple(trace)))
    return out


def _toward(T: PlumbingTree, v: int, w: int) -> int:
    """The neighbour of v on the path to w."""
    prev = {v: None}
    stack = [v]
    while stack:
        x = stack.pop()
        for y in T.neighbors(x):
            if y not in prev:
                prev[y] = x
                stack.append(y)
    x = w
    while prev[x] != v:
        x = prev[x]
    return x


def weyl_assignment_structure(T: PlumbingTree) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """Free vertices and, for the others, (root vertex, iota exponent parity)."""
    high = list(T.high_vertices)
    parent = {v: (v, 0) for v in high}

    def find(v):
        p, par = parent[v]
        if p == v:
            return v, 0
        r, rp = find(p)
        parent[v] = (r, (par + rp) % 2)
        return parent[v]

    for b in forcing_bridges(T):
        rv, pv = find(b.v)
        rw, pw = find(b.w)
        want = b.delta_pi % 2
        if rv == rw:
            if (pv + pw) % 2 != want:
                raise ValueError("conflicting bridge constraints")
            continue
        lo, hi = sorted((rv, rw))
        parent[hi] = (lo, (pv + pw + want) % 2)
    roots = sorted({find(v)[0] for v in high})
    rel = {v: find(v) for v in high}
    return roots, rel


def enumerate_weyl_assignments(T: PlumbingTree, L: RootLatticeData) -> list[tuple[WeylElement, ...]]:
    roots, rel = weyl_assignment_structure(T)
    one = L.identity_element
    out = []
    for choice in itertools.product(L.weyl_group, repeat=len(roots)):
        val = dict(zip(roots, choice))
        xi = []
        for v in range(T.size):
            if v not in rel:
                xi.append(one)
            else:
                r, par = rel[v]
                xi.append(L.iota(val[r]) if par else val[r])
        out.append(tuple(xi))
    return out
