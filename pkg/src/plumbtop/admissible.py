"""Admissible series: closed-form coefficient oracles and their checks.

A series is a finite sum of terms ``scalar * z^(2 gamma) * B(z)`` where
``B`` is either a twisted Kostant series ``W^x`` or an even Weyl line
``L_x``.  Coefficients are evaluated lazily; powers of a series (needed
for vertices of degree at least four) are computed by a ray-counting
recursion that requires the combined cone of the factors to be pointed.
"""

from __future__ import annotations

import functools
import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Callable, Sequence, Union

from .linalg import ellipsoid_points, solve_linear
from .root_lattice import RootLatticeData, Vector, WeylElement, build_root_lattice, in_2Q, kostant_partition


class NotConvolvable(ValueError):
    """Raised when a requested power of a series is not a well-defined series."""


class InvalidSeries(ValueError):
    pass


@dataclass(frozen=True)
class KostantTwist:
    x: WeylElement


@dataclass(frozen=True)
class EvenWeylLine:
    x: WeylElement


Basis = Union[KostantTwist, EvenWeylLine]


@dataclass(frozen=True)
class SeriesTerm:
    scalar: Fraction
    shift: Vector
    basis: Basis


def _term_key(t: SeriesTerm):
    kind = 0 if isinstance(t.basis, KostantTwist) else 1
    return (kind, t.basis.x.formal, t.basis.x.matrix, t.shift, t.scalar)


@dataclass(frozen=True)
class AdmissibleSeries:
    lattice: RootLatticeData
    terms: tuple[SeriesTerm, ...]
    admissible: bool = True
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.lattice, self.terms, self.admissible, self.label)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def build(cls, lattice, terms, admissible=True, label=""):
        """Normal form: merge equal (shift, basis) pairs, drop zeros, sort."""
        acc: dict = {}
        for t in terms:
            key = (t.shift, t.basis)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(t.scalar)
        out = [SeriesTerm(s, k[0], k[1]) for k, s in acc.items() if s != 0]
        return cls(lattice, tuple(sorted(out, key=_term_key)), admissible, label)

    def coefficient(self, mu: Sequence) -> Fraction:
        return coefficient(self, mu)

    def to_json(self) -> dict:
        L = self.lattice
        return {
            "lattice": L.name,
            "label": self.label,
            "terms": [
                {
                    "scalar": str(t.scalar),
                    "shift": [str(x) for x in t.shift],
                    "basis": "kostant" if isinstance(t.basis, KostantTwist) else "line",
                    "word": list(L.reduced_word(t.basis.x)),
                    "negated": t.basis.x.formal,
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data) -> "AdmissibleSeries":
        """Parse the term-list format; admissibility is re-derived from the line certificate."""
        if isinstance(data, str):
            data = json.loads(data)
        try:
            L = build_root_lattice(data["lattice"])
            terms = []
            for i, t in enumerate(data["terms"]):
                shift = tuple(_as_int(x, f"terms[{i}].shift") for x in t["shift"])
                if len(shift) != L.rank:
                    raise InvalidSeries(f"terms[{i}].shift has the wrong length")
                x = L.from_word(t.get("word", []), bool(t.get("negated", False)))
                basis = {"kostant": KostantTwist, "line": EvenWeylLine}[t.get("basis", "kostant")](x)
                terms.append(SeriesTerm(Fraction(t["scalar"]), shift, basis))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidSeries):
                raise
            raise InvalidSeries(f"malformed series JSON: {exc!r}") from exc
        P = cls.build(L, terms, True, data.get("label", ""))
        return cls(L, P.terms, line_certificate(P).ok, P.label)


def _as_int(x, where: str) -> int:
    q = Fraction(x)
    if q.denominator != 1:
        raise InvalidSeries(f"{where}: lattice coordinates must be integers, got {x}")
    return int(q)


@dataclass
class CoefficientWindow:
    lattice: RootLatticeData
    radius: Fraction
    table: dict
    free_variables: int = 0

    def coefficient(self, mu: Sequence) -> Fraction:
        return Fraction(self.table.get(tuple(mu), 0))


# ---------------------------------------------------------------- constructors


def kostant_series(L: RootLatticeData) -> AdmissibleSeries:
    zero = (0,) * L.rank
    return AdmissibleSeries(L, (SeriesTerm(Fraction(1), zero, KostantTwist(L.identity_element)),), True, "W")


def weyl_twist(P: AdmissibleSeries, w: WeylElement) -> AdmissibleSeries:
    """``P^w(z) = sign(w) * sum_a c(a) z^(w a)``."""
    L = P.lattice
    out = []
    for t in P.terms:
        wx = L.compose(w, t.basis.x)
        if isinstance(t.basis, KostantTwist):
            out.append(SeriesTerm(t.scalar, w.apply(t.shift), KostantTwist(wx)))
        else:
            out.append(SeriesTerm(t.scalar * w.sign, w.apply(t.shift), EvenWeylLine(wx)))
    label = f"{P.label}^w" if P.label else ""
    return AdmissibleSeries.build(L, out, P.admissible, label)


def translate_family_member(L: RootLatticeData, gamma: Sequence, simple_root_index: int) -> AdmissibleSeries:
    """``W + z^(2 gamma) (W - W^sigma)`` with sigma the reflection in a simple root."""
    gamma = tuple(int(g) for g in gamma)
    i = simple_root_index
    if not 0 <= i < L.rank:
        raise InvalidSeries("simple root index out of range")
    alpha = tuple(int(j == i) for j in range(L.rank))
    test = tuple(r - a for r, a in zip(L.weyl_vector_doubled, alpha))
    if L.pairing(gamma, test) < 0:
        raise InvalidSeries("translate must satisfy <gamma, 2 rho - alpha> >= 0")
    one = L.identity_element
    sigma = L.element(L.simple_reflection(i))
    zero = (0,) * L.rank
    terms = [
        SeriesTerm(Fraction(1), zero, KostantTwist(one)),
        SeriesTerm(Fraction(1), gamma, KostantTwist(one)),
        SeriesTerm(Fraction(-1), gamma, KostantTwist(sigma)),
    ]
    P = AdmissibleSeries.build(L, terms, True, f"translate(gamma={list(gamma)}, i={i})")
    ok = line_certificate(P).ok
    return P if ok else AdmissibleSeries(L, P.terms, False, P.label)


def even_weyl_line_member(P: AdmissibleSeries, c, gamma: Sequence, x: WeylElement) -> AdmissibleSeries:
    L = P.lattice
    if L.name != "A2":
        raise InvalidSeries("even Weyl line translates are only available for A2")
    gamma = tuple(int(g) for g in gamma)
    if not any(gamma):
        raise InvalidSeries("gamma must be nonzero")
    terms = list(P.terms) + [SeriesTerm(Fraction(c), gamma, EvenWeylLine(x))]
    Q = AdmissibleSeries.build(L, terms, P.admissible, P.label + "+line")
    ok = P.admissible and line_certificate(Q).ok
    return AdmissibleSeries(L, Q.terms, ok, Q.label)


# ---------------------------------------------------------------- coefficients


def _inv(L: RootLatticeData, x: WeylElement) -> WeylElement:
    return L.inverse_of(x)


def kostant_coefficient(L: RootLatticeData, nu: Sequence) -> int:
    """Coefficient of ``z^nu`` in W: ``k(-nu/2 - rho)`` when that lies in Q."""
    t = tuple(-a - b for a, b in zip(nu, L.weyl_vector_doubled))
    if not in_2Q(t):
        return 0
    return kostant_partition(L, tuple(int(v) // 2 for v in t))


def _line_index(direction: Sequence, v: Sequence) -> int | None:
    """The integer n with ``v = n * direction``, if any."""
    n = None
    for d, a in zip(direction, v):
        if d == 0:
            if a != 0:
                return None
            continue
        if Fraction(a) % d:
            return None
        k = Fraction(a) / d
        if n is None:
            n = k
        elif k != n:
            return None
    return int(n) if n is not None else 0


def _parallel(a: Sequence, b: Sequence) -> bool:
    """Is ``b`` a rational multiple of the nonzero vector ``a``?"""
    i = next(k for k, v in enumerate(a) if v)
    r = Fraction(b[i]) / a[i]
    return all(Fraction(y) == r * x for x, y in zip(a, b))


def _term_coefficient(L: RootLatticeData, t: SeriesTerm, mu: Sequence) -> Fraction:
    nu = tuple(m - 2 * g for m, g in zip(mu, t.shift))
    x = t.basis.x
    if isinstance(t.basis, KostantTwist):
        y = _inv(L, x).apply(nu)
        return t.scalar * x.sign * kostant_coefficient(L, y)
    k = _line_index(x.apply(L.weyl_vector_doubled), nu)
    return t.scalar if k is not None else Fraction(0)


def coefficient(P: AdmissibleSeries, mu: Sequence) -> Fraction:
    return _coefficient(P, tuple(mu))


@functools.lru_cache(maxsize=1 << 20)
def _coefficient(P: AdmissibleSeries, mu: Vector) -> Fraction:
    return sum((_term_coefficient(P.lattice, t, mu) for t in P.terms), Fraction(0))


def _pointing_functional(L: RootLatticeData, rays: Sequence[Vector]) -> Vector | None:
    """An integer covector f with ``f . r > 0`` for every ray, if one is found."""
    cands = []
    for w in L.weyl_group:
        v = w.apply(L.weyl_vector_doubled)
        cands.append(tuple(-sum(L.gram[i][j] * v[j] for j in range(L.rank)) for i in range(L.rank)))
    total = tuple(sum(r[i] for r in rays) for i in range(L.rank))
    cands.append(tuple(sum(L.gram[i][j] * total[j] for j in range(L.rank)) for i in range(L.rank)))
    for f in cands:
        if all(sum(a * b for a, b in zip(f, r)) > 0 for r in rays):
            return f
    return None


@functools.lru_cache(maxsize=None)
def _ray_counter(rays: tuple[Vector, ...], mults: tuple[int, ...], f: Vector) -> Callable:
    fr = [sum(a * b for a, b in zip(f, r)) for r in rays]

    @functools.lru_cache(maxsize=None)
    def count(i: int, s: Vector) -> int:
        fs = sum(a * b for a, b in zip(f, s))
        if fs < 0:
            return 0
        r, m = rays[i], mults[i]
        if i == len(rays) - 1:
            k = _line_index(r, s)
            if k is None or k < 0:
                return 0
            return comb(k + m - 1, m - 1)
        total = 0
        k = 0
        while fs - k * fr[i] >= 0:
            rest = tuple(a - k * b for a, b in zip(s, r))
            total += comb(k + m - 1, m - 1) * count(i + 1, rest)
            k += 1
        return total

    return count


def kostant_product_coefficient(L: RootLatticeData, factors: dict, target: Sequence) -> int:
    """Coefficient of ``z^target`` in ``prod_x (W^x)^(factors[x])``."""
    rays: Counter = Counter()
    sign = 1
    for x, c in factors.items():
        sign *= x.sign ** c
        for a in L.positive_roots:
            rays[tuple(-v for v in x.apply(a))] += c
    rlist = sorted(rays)
    if any(tuple(-v for v in r) in rays for r in rlist):
        raise NotConvolvable("product of series with opposite rays")
    f = _pointing_functional(L, rlist)
    if f is None:
        raise NotConvolvable("no pointing functional for the product cone")
    mults = tuple(rays[r] for r in rlist)
    rest = tuple(t - sum(m * r[i] for r, m in zip(rlist, mults)) for i, t in enumerate(target))
    if not in_2Q(rest):
        return 0
    half = tuple(int(v) // 2 for v in rest)
    return sign * _ray_counter(tuple(rlist), mults, f)(0, half)


@functools.lru_cache(maxsize=1 << 20)
def power_coefficient(P: AdmissibleSeries, k: int, nu: Vector) -> Fraction:
    """Coefficient of ``z^nu`` in ``P(z)^k``."""
    if k == 0:
        return Fraction(int(not any(nu)))
    if k == 1:
        return coefficient(P, nu)
    L = P.lattice
    total = Fraction(0)
    n = len(P.terms)
    for combo in itertools.combinations_with_replacement(range(n), k):
        counts = Counter(combo)
        ts = [P.terms[i] for i in counts]
        if any(isinstance(t.basis, EvenWeylLine) for t in ts):
            raise NotConvolvable("powers of series with an even Weyl line are not defined")
        weight = factorial(k) // prod(factorial(c) for c in counts.values())
        scal = prod((P.terms[i].scalar ** c for i, c in counts.items()), start=Fraction(1))
        shift = [0] * L.rank
        factors: Counter = Counter()
        for i, c in counts.items():
            t = P.terms[i]
            for j in range(L.rank):
                shift[j] += 2 * c * t.shift[j]
            factors[t.basis.x] += c
        target = tuple(a - b for a, b in zip(nu, shift))
        total += weight * scal * kostant_product_coefficient(L, dict(factors), target)
    return total


def graded_twist_coefficient(P: AdmissibleSeries, x: WeylElement, n: int, mu: Sequence) -> Fraction:
    """Coefficient of ``z^mu`` in the degree-``n`` vertex weight twisted by ``x``."""
    L = P.lattice
    mu = tuple(mu)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 2:
        return Fraction(int(not any(mu)))
    if n == 1:
        return Fraction(L.denominator_terms.get(mu, 0))
    if n == 0:
        return Fraction(L.denominator_square.get(mu, 0))
    k = n - 2
    y = _inv(L, x).apply(mu)
    return x.sign ** k * power_coefficient(P, k, y)


def graded_support(L: RootLatticeData, n: int) -> dict:
    """Finite support of the degree-``n`` weight for ``n <= 2`` (independent of x)."""
    if n == 2:
        return {(0,) * L.rank: 1}
    if n == 1:
        return dict(L.denominator_terms)
    if n == 0:
        return dict(L.denominator_square)
    raise ValueError("only degrees 0, 1, 2 have finite support")


# ---------------------------------------------------------------- verification


@dataclass
class LineCertificate:
    ok: bool
    checked: list = field(default_factory=list)
    failed: list = field(default_factory=list)


def _term_unbounded(L: RootLatticeData, t: SeriesTerm, d: Vector) -> bool:
    """Can the support of the term meet ``{n d : n >= 0}`` for arbitrarily large n?

    Conservative: uses the simple-root orthant enclosing the Kostant cone.
    """
    x = t.basis.x
    if isinstance(t.basis, EvenWeylLine):
        line = x.apply(L.weyl_vector_doubled)
        return _parallel(line, d) and (not any(t.shift) or _parallel(line, t.shift))
    xi = _inv(L, x)
    e = tuple(-v for v in xi.apply(d))
    if any(v < 0 for v in e):
        return False
    # Support: x^{-1}(mu - 2 gamma) = -2 rho - 2 v with v in the orthant.
    const = tuple(a - b for a, b in zip(xi.apply(tuple(2 * g for g in t.shift)), L.weyl_vector_doubled))
    return all(c >= 0 for v, c in zip(e, const) if v == 0)


def line_directions(L: RootLatticeData) -> list[Vector]:
    dirs = set()
    for w in L.weyl_group:
        for a in list(L.positive_roots) + [L.weyl_vector_doubled]:
            v = w.apply(a)
            if tuple(-c for c in v) not in dirs:
                dirs.add(v)
    return sorted(dirs)


def line_certificate(P: AdmissibleSeries) -> LineCertificate:
    """For each root / Weyl-vector line, prove vanishing in at least one direction."""
    L = P.lattice
    cert = LineCertificate(True)
    for d in line_directions(L):
        cert.checked.append(d)
        neg = tuple(-v for v in d)
        up = any(_term_unbounded(L, t, d) for t in P.terms)
        down = any(_term_unbounded(L, t, neg) for t in P.terms)
        if up and down:
            cert.ok = False
            cert.failed.append(d)
    return cert


def product_certificate(P: AdmissibleSeries) -> bool:
    """True when every pairwise product of terms is a well-defined series."""
    L = P.lattice
    if any(isinstance(t.basis, EvenWeylLine) for t in P.terms):
        return False
    rays = set()
    for t in P.terms:
        for a in L.positive_roots:
            rays.add(tuple(-v for v in t.basis.x.apply(a)))
    if any(tuple(-v for v in r) in rays for r in rays):
        return False
    return _pointing_functional(L, sorted(rays)) is not None


@dataclass
class AdmissibilityReport:
    p1_ok: bool
    p2_ok: bool
    violations: list = field(default_factory=list)
    p1_product_ok: bool | None = None
    checked_sites: int = 0
    skipped_sites: int = 0
    caveats: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.p1_ok and self.p2_ok


def window_sites(L: RootLatticeData, radius, coset: Vector | None = None) -> list[Vector]:
    """Points ``coset + 2y`` (y in Q) with norm at most ``radius``."""
    coset = coset or (0,) * L.rank
    center = tuple(Fraction(-v, 2) for v in coset)
    pts = ellipsoid_points(L.gram, center, Fraction(radius) / 4)
    return sorted(tuple(2 * y + c for y, c in zip(pt, coset)) for pt in pts)


def verify_admissible(P, radius) -> AdmissibilityReport:
    """Window check of the Weyl-denominator identity plus the line criterion."""
    L = P.lattice
    radius = Fraction(radius)
    sgn = -1 if L.n_positive % 2 else 1
    den = L.denominator_terms
    is_window = isinstance(P, CoefficientWindow)
    report = AdmissibilityReport(True, True)
    for a in window_sites(L, radius):
        shifted = [tuple(x + y for x, y in zip(a, s)) for s in den]
        if is_window and any(L.norm(v) > P.radius for v in shifted):
            report.skipped_sites += 1
            continue
        total = sgn * sum(sig * P.coefficient(v) for v, sig in zip(shifted, den.values()))
        want = int(not any(a))
        report.checked_sites += 1
        if total != want:
            report.p2_ok = False
            report.violations.append(("p2", a, total))
    if is_window:
        report.caveats.append("window series: line criterion only checked inside the window")
        for d in line_directions(L):
            ends = []
            for sign in (1, -1):
                n, last = 1, None
                while L.norm(tuple(sign * n * v for v in d)) <= P.radius:
                    last = P.coefficient(tuple(sign * n * v for v in d))
                    n += 1
                ends.append(last)
            if all(e not in (None, 0) for e in ends):
                report.p1_ok = False
                report.violations.append(("p1", d, tuple(ends)))
        if report.skipped_sites:
            report.caveats.append(f"{report.skipped_sites} sites too close to the window boundary")
        return report
    cert = line_certificate(P)
    report.p1_ok = cert.ok
    for d in cert.failed:
        report.violations.append(("p1", d, "support unbounded in both directions"))
    report.p1_product_ok = product_certificate(P)
    return report


# ---------------------------------------------------------------- A1 puzzle


def solve_puzzle_a1(support_side: str = "vanish_positive", radius=200) -> CoefficientWindow:
    """Solve ``c(j-1) - c(j+1) = [j == 0]`` on a finite window of A1.

    The unknowns are the coefficients at odd j with ``2 j^2 <= radius``;
    the chosen side pins the outermost unknown to zero.
    """
    L = build_root_lattice("A", 1)
    radius = Fraction(radius)
    jmax = 0
    while 2 * (jmax + 1) ** 2 <= radius:
        jmax += 1
    odd = [j for j in range(-jmax, jmax + 1) if j % 2]
    pos = {j: i for i, j in enumerate(odd)}
    rows, rhs = [], []
    for j in range(-jmax, jmax + 1):
        if j % 2 == 0 and (j - 1) in pos and (j + 1) in pos:
            row = [0] * len(odd)
            row[pos[j - 1]] += 1
            row[pos[j + 1]] -= 1
            rows.append(row)
            rhs.append(int(j == 0))
    if support_side not in ("vanish_positive", "vanish_negative"):
        raise ValueError("support_side must be vanish_positive or vanish_negative")
    anchor = odd[-1] if support_side == "vanish_positive" else odd[0]
    row = [0] * len(odd)
    row[pos[anchor]] = 1
    rows.append(row)
    rhs.append(0)
    sol, free = solve_linear(rows, rhs)
    if sol is None:
        raise InvalidSeries("inconsistent puzzle")
    table = {(j,): sol[pos[j]] for j in odd}
    return CoefficientWindow(L, radius, table, free)
