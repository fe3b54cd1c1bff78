"""Root lattices, Weyl groups and the Kostant partition function.

All vectors live in the simple-root basis.  Lattice vectors are tuples of
``int`` (or ``Fraction`` for weights); ``2*rho`` is integral, so the
package stores the doubled Weyl vector and never needs ``rho`` itself
except for pairings.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import identity, inverse, matmul, matvec

Vector = tuple


class UnsupportedLattice(ValueError):
    pass


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element, or a formal ``iota * w`` when ``-1`` is not in W.

    ``formal`` marks the second case: the matrix is ``-M`` for some genuine
    ``M`` in W and the length is ``len(w) + |positive roots|``, which is all
    that the sign bookkeeping ever needs.
    """

    matrix: tuple[tuple[int, ...], ...]
    length: int
    formal: bool = False

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    @property
    def length_parity(self) -> int:
        return self.sign

    def apply(self, v: Sequence) -> Vector:
        return matvec(self.matrix, v)

    def __repr__(self) -> str:
        tag = "iota*" if self.formal else ""
        return f"WeylElement({tag}{[list(r) for r in self.matrix]}, len={self.length})"


def _cartan(kind: str, rank: int) -> list[list[int]]:
    """Symmetric gram matrix of the simple roots (short roots have norm 2)."""
    g = [[0] * rank for _ in range(rank)]
    if kind == "A":
        for i in range(rank):
            g[i][i] = 2
            if i + 1 < rank:
                g[i][i + 1] = g[i + 1][i] = -1
    elif kind == "D":
        if rank < 4:
            raise UnsupportedLattice("D_n needs n >= 4")
        for i in range(rank):
            g[i][i] = 2
        for i in range(rank - 2):
            g[i][i + 1] = g[i + 1][i] = -1
        g[rank - 3][rank - 1] = g[rank - 1][rank - 3] = -1
    elif kind == "B":
        if rank < 2:
            raise UnsupportedLattice("B_n needs n >= 2")
        for i in range(rank - 1):
            g[i][i] = 4
            g[i][i + 1] = g[i + 1][i] = -2
        g[rank - 1][rank - 1] = 2
    elif kind == "C":
        if rank < 3:
            raise UnsupportedLattice("C_n needs n >= 3")
        for i in range(rank - 1):
            g[i][i] = 2
            g[i][i + 1] = g[i + 1][i] = -1
        g[rank - 1][rank - 1] = 4
        g[rank - 2][rank - 1] = g[rank - 1][rank - 2] = -2
    elif kind == "G":
        if rank != 2:
            raise UnsupportedLattice("G_2 only")
        g = [[2, -3], [-3, 6]]
    elif kind == "E":
        if rank not in (6, 7, 8):
            raise UnsupportedLattice("E_6, E_7, E_8 only")
        # Bourbaki numbering: 1-3-4-5-6-(7-8), with 2 attached to 4.
        for i in range(rank):
            g[i][i] = 2
        chain = [0, 2, 3] + list(range(4, rank))
        for a, b in zip(chain, chain[1:]):
            g[a][b] = g[b][a] = -1
        g[1][3] = g[3][1] = -1
    else:
        raise UnsupportedLattice(f"unsupported lattice kind {kind!r}")
    return g


@dataclass(frozen=True)
class RootLatticeData:
    kind: str
    rank: int
    gram: tuple[tuple[int, ...], ...]
    positive_roots: tuple[Vector, ...]
    weyl_vector_doubled: Vector
    fundamental_weights: tuple[Vector, ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __hash__(self) -> int:
        # Kind and rank determine every other field.
        return hash((self.kind, self.rank))

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    def pairing(self, a: Sequence, b: Sequence) -> Fraction | int:
        if len(a) != self.rank or len(b) != self.rank:
            raise ValueError("dimension mismatch")
        g = self.gram
        return sum(a[i] * g[i][j] * b[j] for i in range(self.rank) for j in range(self.rank))

    def norm(self, a: Sequence) -> Fraction | int:
        return self.pairing(a, a)

    @property
    def rho_norm(self) -> Fraction:
        """<rho, rho>."""
        return Fraction(self.norm(self.weyl_vector_doubled), 4)

    def simple_reflection(self, i: int) -> tuple[tuple[int, ...], ...]:
        g = self.gram
        rows = [list(r) for r in identity(self.rank)]
        # s_i(alpha_j) = alpha_j - (2 g_ij / g_ii) alpha_i ; column j is the image of alpha_j.
        for j in range(self.rank):
            rows[i][j] -= 2 * g[i][j] // g[i][i]
        return tuple(tuple(r) for r in rows)

    # Weyl group -------------------------------------------------------

    @property
    def weyl_group(self) -> tuple[WeylElement, ...]:
        if "W" not in self._cache:
            self._cache["W"] = _enumerate_weyl(self)
        return self._cache["W"]

    @property
    def _by_matrix(self) -> dict:
        if "byM" not in self._cache:
            self._cache["byM"] = {w.matrix: w for w in self.weyl_group}
        return self._cache["byM"]

    @property
    def identity_element(self) -> WeylElement:
        return self.weyl_group[0]

    def element(self, matrix) -> WeylElement:
        """Look up a matrix in W, or build the formal negation of an element of W."""
        matrix = tuple(tuple(int(x) for x in r) for r in matrix)
        w = self._by_matrix.get(matrix)
        if w is not None:
            return w
        neg = tuple(tuple(-x for x in r) for r in matrix)
        base = self._by_matrix.get(neg)
        if base is None:
            raise ValueError("matrix is neither in W nor in -W")
        return WeylElement(matrix, base.length + self.n_positive, formal=True)

    def compose(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self.element(matmul(a.matrix, b.matrix))

    def inverse_of(self, w: WeylElement) -> WeylElement:
        invs = self._cache.setdefault("inv", {})
        if w.matrix not in invs:
            inv = inverse(w.matrix)
            invs[w.matrix] = self.element(tuple(tuple(int(x) for x in r) for r in inv))
        return invs[w.matrix]

    def iota(self, w: WeylElement | None = None) -> WeylElement:
        """``iota * w``: the genuine element when ``-1`` lies in W, else formal."""
        w = self.identity_element if w is None else w
        return self.element(tuple(tuple(-x for x in r) for r in w.matrix))

    def reduced_word(self, w: WeylElement) -> tuple[int, ...]:
        """Word in simple reflections (0-based) whose product is ``w`` (up to iota if formal)."""
        words = self._cache.get("words")
        if words is None:
            words = self._cache["words"] = _reduced_words(self)
        m = w.matrix
        if w.formal:
            m = tuple(tuple(-x for x in r) for r in m)
        return words[m]

    def from_word(self, word: Sequence[int], negated: bool = False) -> WeylElement:
        m = identity(self.rank)
        for i in word:
            m = matmul(m, self.simple_reflection(i))
        w = self.element(m)
        return self.iota(w) if negated else w

    def is_positive(self, v: Sequence) -> bool:
        return any(x != 0 for x in v) and all(x >= 0 for x in v)

    @property
    def denominator_terms(self) -> dict[Vector, int]:
        """``{2 w(rho): sign(w)}``, the monomials of the Weyl denominator."""
        if "den" not in self._cache:
            self._cache["den"] = {w.apply(self.weyl_vector_doubled): w.sign for w in self.weyl_group}
        return self._cache["den"]

    @property
    def denominator_square(self) -> dict[Vector, int]:
        if "den2" not in self._cache:
            out: dict = {}
            for a, s in self.denominator_terms.items():
                for b, t in self.denominator_terms.items():
                    k = tuple(x + y for x, y in zip(a, b))
                    out[k] = out.get(k, 0) + s * t
            self._cache["den2"] = {k: v for k, v in out.items() if v}
        return self._cache["den2"]


def _closure_roots(gram, reflections) -> list[tuple[int, ...]]:
    r = len(gram)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    seen = set(simple)
    todo = deque(simple)
    while todo:
        v = todo.popleft()
        for s in reflections:
            u = matvec(s, v)
            if u not in seen:
                seen.add(u)
                todo.append(u)
    pos = [v for v in seen if all(x >= 0 for x in v)]
    return sorted(pos, key=lambda v: (sum(v), v))


def build_root_lattice(kind: str, rank: int | None = None) -> RootLatticeData:
    """Build a root lattice from ``("A", 2)`` or the label ``"A2"``."""
    if rank is None:
        label = kind.strip()
        kind, rest = label[0].upper(), label[1:]
        if not rest.isdigit():
            raise UnsupportedLattice(f"bad lattice label {label!r}")
        rank = int(rest)
    kind = kind.upper()
    if rank < 1:
        raise UnsupportedLattice("rank must be positive")
    gram = _cartan(kind, rank)
    tmp = RootLatticeData(kind, rank, tuple(map(tuple, gram)), (), (), ())
    refl = [tmp.simple_reflection(i) for i in range(rank)]
    pos = tuple(_closure_roots(gram, refl))
    two_rho = tuple(sum(v[i] for v in pos) for i in range(rank))
    # lambda_i = sum_k M_ik alpha_k with M = (2 gram D^{-1})^{-1}.
    coroot = [[Fraction(2 * gram[k][j], gram[j][j]) for j in range(rank)] for k in range(rank)]
    fw = inverse(coroot)
    return RootLatticeData(kind, rank, tuple(map(tuple, gram)), pos, two_rho, tuple(tuple(r) for r in fw))


def _enumerate_weyl(L: RootLatticeData) -> tuple[WeylElement, ...]:
    refl = [L.simple_reflection(i) for i in range(L.rank)]
    start = identity(L.rank)
    seen = {start}
    todo = deque([start])
    mats = []
    while todo:
        m = todo.popleft()
        mats.append(m)
        for s in refl:
            u = matmul(m, s)
            if u not in seen:
                seen.add(u)
                todo.append(u)
    out = []
    for m in mats:
        length = sum(1 for a in L.positive_roots if not all(x >= 0 for x in matvec(m, a)))
        out.append(WeylElement(m, length))
    out.sort(key=lambda w: (w.length, w.matrix))
    return tuple(out)


def _reduced_words(L: RootLatticeData) -> dict:
    refl = [L.simple_reflection(i) for i in range(L.rank)]
    start = identity(L.rank)
    words = {start: ()}
    todo = deque([start])
    while todo:
        m = todo.popleft()
        for i, s in enumerate(refl):
            u = matmul(m, s)
            if u not in words:
                words[u] = words[m] + (i,)
                todo.append(u)
    return words


def enumerate_weyl_group(L: RootLatticeData) -> list[WeylElement]:
    return list(L.weyl_group)


def pairing(L: RootLatticeData, a: Sequence, b: Sequence):
    return L.pairing(a, b)


def in_Q(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def in_2Q(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 and int(x) % 2 == 0 for x in v)


def in_2rho_coset(L: RootLatticeData, v: Sequence) -> bool:
    """Membership in 2rho + 2Q."""
    return in_2Q(tuple(x - y for x, y in zip(v, L.weyl_vector_doubled)))


def kostant_partition(L: RootLatticeData, a: Sequence) -> int:
    """Number of ways to write ``a`` as a nonnegative combination of positive roots."""
    if not in_Q(a):
        raise ValueError("argument must lie in the root lattice")
    fn = L._cache.get("kostant")
    if fn is None:
        fn = L._cache["kostant"] = _kostant_counter(L.positive_roots)
    return fn(len(L.positive_roots), tuple(int(x) for x in a))


def _kostant_counter(roots):
    roots = tuple(roots)

    @functools.lru_cache(maxsize=None)
    def count(k: int, v: tuple[int, ...]) -> int:
        if any(x < 0 for x in v):
            return 0
        if k == 0:
            return int(not any(v))
        if k == 1:
            r = roots[0]
            # v must be a nonnegative multiple of r.
            t = None
            for x, y in zip(v, r):
                if y == 0:
                    if x != 0:
                        return 0
                elif t is None:
                    if x % y:
                        return 0
                    t = x // y
                elif x != t * y:
                    return 0
            return 1
        r = roots[k - 1]
        total = 0
        u = v
        while all(x >= 0 for x in u):
            total += count(k - 1, u)
            u = tuple(x - y for x, y in zip(u, r))
        return total

    return count
