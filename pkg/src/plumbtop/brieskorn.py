"""Brieskorn homology spheres Sigma(b1, b2, b3) and their closed-form series."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .admissible import AdmissibleSeries, coefficient
from .linalg import det, ellipsoid_points
from .plumbing import PlumbingTree, framing
from .root_lattice import RootLatticeData, Vector
from .series import QSeries


class InvalidBrieskorn(ValueError):
    pass


@dataclass(frozen=True)
class BrieskornData:
    b: tuple[int, int, int]
    b0: int
    a: tuple[int, int, int]
    legs: tuple[tuple[int, ...], ...]
    h: tuple[int, int, int]
    C_unit: Fraction  # C divided by <rho, rho>

    @property
    def d(self) -> int:
        return self.b[0] * self.b[1] * self.b[2]

    def C(self, L: RootLatticeData) -> Fraction:
        return self.C_unit * L.rho_norm

    def to_json(self) -> dict:
        return {"b": list(self.b), "b0": self.b0, "a": list(self.a), "legs": [list(x) for x in self.legs],
                "h": list(self.h), "C_over_rho2": str(self.C_unit)}


def negative_continued_fraction(p: int, q: int) -> list[int]:
    """[k1, ..., ks] with p/q = k1 - 1/(k2 - 1/(... - 1/ks)), all k >= 2 when p > q > 0."""
    out = []
    while q:
        k = -(-p // q)
        out.append(k)
        p, q = q, k * q - p
    return out


def brieskorn_plumbing(b1: int, b2: int, b3: int) -> tuple[BrieskornData, PlumbingTree]:
    b = (b1, b2, b3)
    if not 2 <= b1 < b2 < b3:
        raise InvalidBrieskorn("need 2 <= b1 < b2 < b3")
    if math.gcd(b1, b2) != 1 or math.gcd(b1, b3) != 1 or math.gcd(b2, b3) != 1:
        raise InvalidBrieskorn("b1, b2, b3 must be pairwise coprime")
    d = b1 * b2 * b3
    a = tuple((-pow(d // bi, -1, bi)) % bi for bi in b)
    num = -1 - sum(ai * (d // bi) for ai, bi in zip(a, b))
    assert num % d == 0
    b0 = num // d
    legs = tuple(tuple(negative_continued_fraction(bi, ai)) for ai, bi in zip(a, b))
    T = PlumbingTree.star(b0, [[-k for k in leg] for leg in legs])
    # Leaf of leg i is the last vertex of that leg in star order.
    h = []
    start = 1
    for leg in legs:
        leaf = start + len(leg) - 1
        keep = [v for v in range(T.size) if v != leaf]
        m = framing(T).matrix
        h.append(abs(det([[m[i][j] for j in keep] for i in keep])))
        start += len(leg)
    s = T.size
    tr = sum(T.labels)
    c_unit = -Fraction(1, 2) * (3 * s + tr + d * sum(Fraction(1, bi * bi) for bi in b) - sum(h))
    return BrieskornData(b, b0, a, legs, tuple(h), c_unit), T


def leaf_vertices(data: BrieskornData) -> tuple[int, int, int]:
    out, start = [], 1
    for leg in data.legs:
        out.append(start + len(leg) - 1)
        start += len(leg)
    return tuple(out)


def psi_series(P: AdmissibleSeries, d: int, eta: Vector, N) -> QSeries:
    """Sum over alpha in -2rho + 2Q of c(alpha) sum_w sign(w) q^(|d alpha + w eta|^2 / 8d), to exponent N.

    Writing alpha = -2rho + 2 beta, the exponent bound is an ellipsoid in beta,
    so the enumeration is complete.
    """
    L = P.lattice
    N = Fraction(N)
    acc: dict = defaultdict(Fraction)
    if N < 0:
        return QSeries((), N)
    rho = [Fraction(x, 2) for x in L.weyl_vector_doubled]
    two_rho = L.weyl_vector_doubled
    for w in L.weyl_group:
        we = w.apply(eta)
        center = [rho[j] - Fraction(we[j], 2 * d) for j in range(L.rank)]
        for beta in ellipsoid_points(L.gram, center, 2 * N / d):
            alpha = tuple(-two_rho[j] + 2 * beta[j] for j in range(L.rank))
            c = coefficient(P, alpha)
            if not c:
                continue
            v = [d * alpha[j] + we[j] for j in range(L.rank)]
            expo = Fraction(L.norm(v), 8 * d)
            if expo <= N:
                acc[expo] += w.sign * c
    return QSeries.from_dict(dict(acc), N)


def eta(data: BrieskornData, L: RootLatticeData, w1, w2) -> Vector:
    b1, b2, b3 = data.b
    r = L.weyl_vector_doubled
    u1, u2 = w1.apply(r), w2.apply(r)
    return tuple(b2 * b3 * u1[j] + b1 * b3 * u2[j] + b1 * b2 * r[j] for j in range(L.rank))


def brieskorn_Y(data: BrieskornData, L: RootLatticeData, P: AdmissibleSeries, N) -> QSeries:
    N = Fraction(N)
    C = data.C(L)
    acc: dict = defaultdict(Fraction)
    cache: dict = {}
    for w1 in L.weyl_group:
        for w2 in L.weyl_group:
            e = eta(data, L, w1, w2)
            if e not in cache:
                cache[e] = psi_series(P, data.d, e, N - C)
            for x, c in cache[e].terms:
                acc[x + C] += w1.sign * w2.sign * c
    return QSeries.from_dict(dict(acc), N)
