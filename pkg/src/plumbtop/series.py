"""The invariant Laurent series Y_{P,a}(q) of a plumbing tree.

Summation runs over ``l`` in ``a + 2 B (L x Q)``.  Components at vertices
of degree at most two range over the finite supports of their weights;
the remaining components are parametrised through a lower-triangular
basis of ``B Z^s`` and enumerated inside an exact ellipsoid.
"""

from __future__ import annotations

import functools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .admissible import AdmissibleSeries, graded_support, graded_twist_coefficient
from .linalg import det, ellipsoid_points, inverse, lower_hnf, quadratic_min
from .plumbing import (
    PlumbingTree,
    framing,
    is_reduced,
    is_weakly_negative_definite,
    weyl_assignment_structure,
)
from .root_lattice import RootLatticeData, Vector
from .spinc import SpincRep, is_valid

DEFAULT_WINDOW = Fraction(24)


class PlanError(ValueError):
    pass


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QSeries:
    """Finite Laurent series in q with rational exponents and coefficients.

    ``terms`` holds (exponent, coefficient) pairs in increasing exponent
    order with nonzero coefficients; ``truncation`` is the exponent bound
    up to which the series is complete.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]
    truncation: Fraction | None = None

    @classmethod
    def from_dict(cls, d: dict, truncation=None) -> "QSeries":
        items = sorted((Fraction(e), Fraction(c)) for e, c in d.items() if c != 0)
        if truncation is not None:
            truncation = Fraction(truncation)
            items = [(e, c) for e, c in items if e <= truncation]
        return cls(tuple(items), truncation)

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def exponent_denominator(self) -> int:
        return math.lcm(1, *(e.denominator for e, _ in self.terms))

    @property
    def min_exponent(self) -> Fraction | None:
        return self.terms[0][0] if self.terms else None

    def truncate(self, n) -> "QSeries":
        return QSeries.from_dict(self.as_dict(), n)

    def is_polynomial(self) -> bool:
        return self.truncation is None

    def to_json(self) -> dict:
        return {
            "truncation": None if self.truncation is None else _fmt(self.truncation),
            "terms": [[_fmt(e), _fmt(c)] for e, c in self.terms],
            "text": self.pretty(),
        }

    def pretty(self, var: str = "q") -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "" if e == 0 else f"{var}^({_fmt(e)})"
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else "+"
                parts.append(f"{coef} {mono}")
            else:
                sign = "-" if c < 0 else "+"
                parts.append(f"{sign} {_fmt(abs(c))}{'*' + mono if mono else ''}")
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        if self.truncation is not None:
            text += f" + O({var}^({_fmt(self.truncation)}))"
        return text

    def diff(self, other: "QSeries") -> list:
        a, b = self.as_dict(), other.as_dict()
        return [(e, a.get(e, 0), b.get(e, 0)) for e in sorted(set(a) | set(b)) if a.get(e, 0) != b.get(e, 0)]


@dataclass
class ComputationPlan:
    tree: PlumbingTree
    lattice: RootLatticeData
    series: AdmissibleSeries
    spinc: SpincRep
    truncation: Fraction | None = None
    window: Fraction = DEFAULT_WINDOW
    require_reduced: bool = True
    keep_points: bool = False
    want_bound: bool = False


@dataclass
class YResult:
    series: QSeries
    lower_bound: Fraction | None
    prefactor_exponent: Fraction
    a_norm: Fraction
    lattice_points: int = 0
    ring_ok: bool = True
    ring_violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    points: list = field(default_factory=list)


class _Setup:
    """Per-(tree, lattice, class) data shared by the bound and the enumeration."""

    def __init__(self, T: PlumbingTree, L: RootLatticeData, a: SpincRep):
        self.T, self.L, self.a = T, L, a
        f = framing(T)
        self.binv = f.inverse
        self.det = f.determinant
        self.adj = [[int(x * f.determinant) for x in row] for row in f.inverse]
        s, r = T.size, L.rank
        self.low = [v for v in range(s) if T.degree(v) <= 2]
        self.high = [v for v in range(s) if T.degree(v) >= 3]
        self.order = self.low + self.high
        nl, nh = len(self.low), len(self.high)
        bp = [[f.matrix[v][c] for c in range(s)] for v in self.order]
        g = lower_hnf(bp)
        self.g = g
        self.gll_diag = [g[i][i] for i in range(nl)]
        kk = [[g[nl + i][nl + j] for j in range(nh)] for i in range(nh)]
        self.ghl = [[g[nl + i][j] for j in range(nl)] for i in range(nh)]
        self.kk = kk
        x = [[self.binv[vi][vj] for vj in self.high] for vi in self.high]
        # M = K^T (-X) K ; quadratic part in c is 4 * (M kron gram).
        negx = [[-v for v in row] for row in x]
        kt = list(zip(*kk)) if nh else []
        tmp = [[sum(kt[i][k] * negx[k][j] for k in range(nh)) for j in range(nh)] for i in range(nh)]
        m = [[sum(tmp[i][k] * kk[k][j] for k in range(nh)) for j in range(nh)] for i in range(nh)]
        gram = L.gram
        dim = nh * r
        self.qm = [[4 * m[p // r][q // r] * gram[p % r][q % r] for q in range(dim)] for p in range(dim)]
        self.qm_det = det(self.qm) if dim else 1
        self.qm_adj = [[int(x * self.qm_det) for x in row] for row in inverse(self.qm)] if dim else []
        self.a_norm = self.pair(a.components, a.components)
        # Change of l under c -> c + e_p (p = i*r + j is high row i, root coordinate j).
        zero = (0,) * r
        self.steps = []
        for p in range(dim):
            k, j = divmod(p, r)
            comps = [zero] * s
            for i, v in enumerate(self.high):
                if kk[i][k]:
                    vec = [0] * r
                    vec[j] = 2 * kk[i][k]
                    comps[v] = tuple(vec)
            self.steps.append(comps)
        # step_duals[p][w] = sum_v adj[w][v] * gram * step_p[v], so det * <l, step_p> = sum_w l_w . dual[w].
        self.step_duals = []
        for comps in self.steps:
            gs = [[sum(gram[i][j] * x[j] for j in range(r)) for i in range(r)] for x in comps]
            self.step_duals.append([tuple(sum(self.adj[w][v] * gs[v][i] for v in self.high) for i in range(r))
                                    for w in range(s)])
        self.supports = [graded_support(L, T.degree(v)) for v in self.low]

    def pair(self, la: Sequence[Vector], lb: Sequence[Vector]) -> Fraction:
        return Fraction(self.pair_int(la, lb), self.det)

    def pair_int(self, la: Sequence[Vector], lb: Sequence[Vector]) -> int:
        """``det(B) * <la, lb>`` as an exact integer."""
        g = self.L.gram
        r = self.L.rank
        ga = [(v, [sum(x[i] * g[i][j] for i in range(r)) for j in range(r)]) for v, x in enumerate(la) if any(x)]
        nz = [(w, y) for w, y in enumerate(lb) if any(y)]
        adj = self.adj
        total = 0
        for v, gx in ga:
            row = adj[v]
            for w, y in nz:
                if row[w]:
                    total += row[w] * sum(gx[j] * y[j] for j in range(r))
        return total

    def low_combos(self):
        """Yield (low components, c_L columns, product of low weights)."""
        nl, r = len(self.low), self.L.rank
        a = self.a.components
        g = self.g

        def rec(i, comps, cols, weight):
            if i == nl:
                yield list(comps), [list(c) for c in cols], weight
                return
            v = self.low[i]
            for vec, coef in self.supports[i].items():
                new_cols = []
                ok = True
                for j in range(r):
                    t = vec[j] - a[v][j]
                    if t % 2:
                        ok = False
                        break
                    num = t // 2 - sum(g[i][k] * cols[j][k] for k in range(i))
                    if num % g[i][i]:
                        ok = False
                        break
                    new_cols.append(num // g[i][i])
                if not ok:
                    continue
                comps.append(vec)
                for j in range(r):
                    cols[j].append(new_cols[j])
                yield from rec(i + 1, comps, cols, weight * coef)
                comps.pop()
                for j in range(r):
                    cols[j].pop()

        yield from rec(0, [], [[] for _ in range(r)], 1)

    def high_offset(self, cols: list[list[int]]) -> list[list[int]]:
        """m = a_H + 2 G_HL c_L, as an (h x r) integer array."""
        a = self.a.components
        r = self.L.rank
        return [[a[v][j] + 2 * sum(self.ghl[i][k] * cols[j][k] for k in range(len(self.low))) for j in range(r)]
                for i, v in enumerate(self.high)]

    def assemble(self, low_comps, offset, c) -> list[Vector]:
        r = self.L.rank
        nh = len(self.high)
        comps: list = [None] * self.T.size
        for v, vec in zip(self.low, low_comps):
            comps[v] = tuple(vec)
        for i, v in enumerate(self.high):
            comps[v] = tuple(offset[i][j] + 2 * sum(self.kk[i][k] * c[k * r + j] for k in range(nh)) for j in range(r))
        return comps

    def center(self, low_comps, offset) -> tuple[list[Fraction], Fraction]:
        """Centre c0 and constant of F(c) = -<l, l> = (c - c0)^T Qm (c - c0) + const.

        With lin the linear coefficients, Qm c0 = -lin and const = k0 + c0 . lin;
        everything is carried as integers over the fixed denominator det(Qm) det(B).
        """
        dim = len(self.qm)
        base = self.assemble(low_comps, offset, [0] * dim)
        k0 = -self.pair_int(base, base)
        if dim == 0:
            return [], Fraction(k0, self.det)
        lnum = [-sum(x * y for bv, hv in zip(base, hp) for x, y in zip(bv, hv)) for hp in self.step_duals]
        cnum = [-sum(a * b for a, b in zip(row, lnum)) for row in self.qm_adj]
        dc = self.qm_det * self.det
        c0 = [Fraction(x, dc) for x in cnum]
        const = Fraction(k0 * dc + sum(x * y for x, y in zip(cnum, lnum)), dc * self.det)
        return c0, const


@functools.lru_cache(maxsize=64)
def _weight_memo(P: AdmissibleSeries) -> dict:
    return {}


def _as_number(x: Fraction):
    return x.numerator if x.denominator == 1 else x


class _HighWeights:
    """Sum over Weyl assignments of the product of high-vertex weights.

    Assignments factor over union-find components, so the sum is a product
    of per-component sums over W.
    """

    def __init__(self, T: PlumbingTree, L: RootLatticeData, P: AdmissibleSeries):
        self.T, self.L, self.P = T, L, P
        roots, rel = weyl_assignment_structure(T)
        self.groups = [[(v, rel[v][1], T.degree(v)) for v in T.high_vertices if rel[v][0] == r0] for r0 in roots]
        self.elements = [(x, L.iota(x)) for x in L.weyl_group]
        self.memo = _weight_memo(P)

    def weight(self, i: int, par: int, n: int, mu) -> int | Fraction:
        key = (i, par, n, mu)
        val = self.memo.get(key)
        if val is None:
            x = self.elements[i][par]
            val = self.memo[key] = _as_number(graded_twist_coefficient(self.P, x, n, mu))
        return val

    def __call__(self, comps) -> Fraction:
        total = 1
        weight = self.weight
        for members in self.groups:
            s = 0
            for i in range(len(self.elements)):
                term = 1
                for v, par, n in members:
                    term *= weight(i, par, n, comps[v])
                    if not term:
                        break
                s += term
            total *= s
            if not total:
                break
        return Fraction(total)


def gamma_coefficient(T: PlumbingTree, L: RootLatticeData, P: AdmissibleSeries, comps: Sequence[Vector]) -> Fraction:
    """c_Gamma(l): the Weyl-assignment average of the vertex-weight product."""
    low = Fraction(1)
    for v in range(T.size):
        if T.degree(v) <= 2:
            low *= graded_support(L, T.degree(v)).get(tuple(comps[v]), 0)
            if not low:
                return Fraction(0)
    n_xi = len(L.weyl_group) ** len(weyl_assignment_structure(T)[0])
    return low * _HighWeights(T, L, P)(comps) / n_xi


def prefactor(T: PlumbingTree, L: RootLatticeData) -> tuple[int, Fraction]:
    f = framing(T)
    sign = -1 if (L.n_positive * f.pi) % 2 else 1
    return sign, Fraction(3 * f.sigma - f.trace, 2) * L.rho_norm


def _check_plan(plan: ComputationPlan) -> None:
    T, L = plan.tree, plan.lattice
    if not is_weakly_negative_definite(T):
        raise PlanError("tree is not weakly negative definite")
    if plan.require_reduced and not is_reduced(T):
        raise PlanError("tree is not reduced")
    if not is_valid(T, L, plan.spinc):
        raise PlanError("representative does not lie in delta + 2 L'")
    if plan.series.lattice != L:
        raise PlanError("series and lattice disagree")


def _blocks(st: "_Setup") -> list:
    """Per admissible low part: (low comps, high offset, low weight, centre, constant)."""
    out = []
    for low_comps, cols, wlow in st.low_combos():
        offset = st.high_offset(cols)
        c0, const = st.center(low_comps, offset)
        out.append((low_comps, offset, wlow, c0, const))
    return out


def _bound_from_blocks(st: "_Setup", blocks: list, e0: Fraction) -> Fraction | None:
    # The quadratic part is >= 0, so blocks are visited by constant and the
    # search inside each one is capped by the best value so far.
    best = None
    for blk in sorted(blocks, key=lambda b: b[4]):
        const = blk[4]
        if best is None:
            best = quadratic_min(st.qm, blk[3]) + const
            continue
        if const >= best:
            break
        for _, val in ellipsoid_points(st.qm, blk[3], best - const, with_values=True):
            best = min(best, val + const)
    return e0 + best / 8 if best is not None else None


@functools.lru_cache(maxsize=4096)
def lower_bound(T: PlumbingTree, L: RootLatticeData, a: SpincRep) -> Fraction | None:
    """Exact minimum exponent over the summation domain (None if it is empty)."""
    _, e0 = prefactor(T, L)
    st = _Setup(T, L, a)
    return _bound_from_blocks(st, _blocks(st), e0)


def compute_Y_detailed(plan: ComputationPlan) -> YResult:
    _check_plan(plan)
    T, L, P, a = plan.tree, plan.lattice, plan.series, plan.spinc
    st = _Setup(T, L, a)
    sign, e0 = prefactor(T, L)
    blocks = _blocks(st)
    bound = lower_bound(T, L, a) if plan.truncation is None or plan.want_bound else None
    if plan.truncation is not None:
        n = Fraction(plan.truncation)
    elif st.high:
        n = (bound if bound is not None else e0) + plan.window
    else:
        n = None
    n_xi = len(L.weyl_group) ** len(weyl_assignment_structure(T)[0])
    ring_mod = 8 if L.name == "A1" else 4
    acc: dict = defaultdict(Fraction)
    res = YResult(QSeries((), n), bound, e0, st.a_norm)
    if n is not None and bound is not None and n < bound:
        res.warnings.append(f"truncation {_fmt(n)} lies below the minimal exponent {_fmt(bound)}")
    weights = _HighWeights(T, L, P)

    for low_comps, offset, wlow, c0, const in blocks:
        if not st.high:
            points = [((), Fraction(0))]
        else:
            budget = 8 * (n - e0) - const
            if budget < 0:
                continue
            points = ellipsoid_points(st.qm, c0, budget, with_values=True)
        for c, val in points:
            comps = st.assemble(low_comps, offset, c)
            norm = -(val + const)
            expo = e0 - norm / 8
            if n is not None and expo > n:
                continue
            res.lattice_points += 1
            diff = norm - st.a_norm
            if diff.denominator != 1 or diff.numerator % ring_mod:
                res.ring_ok = False
                res.ring_violations.append(tuple(comps))
            coef = wlow * weights(comps) if st.high else Fraction(wlow)
            if coef:
                acc[expo] += sign * coef / n_xi
            if plan.keep_points:
                res.points.append((tuple(comps), coef / n_xi))
    res.series = QSeries.from_dict(dict(acc), n)
    RING_AUDIT["series"] += 1
    RING_AUDIT["points"] += res.lattice_points
    if not res.ring_ok:
        RING_AUDIT["violations"] += 1
    return res


# Running tally of the exponent-ring check over every series computed in this process.
RING_AUDIT: Counter = Counter()


@functools.lru_cache(maxsize=8192)
def _cached_Y(T: PlumbingTree, L: RootLatticeData, P: AdmissibleSeries, a: SpincRep, n: Fraction) -> YResult:
    return compute_Y_detailed(ComputationPlan(T, L, P, a, n))


def compute_Y(plan: ComputationPlan) -> QSeries:
    return compute_Y_detailed(plan).series


def exponent_ring_ok(series: QSeries, T: PlumbingTree, L: RootLatticeData, a: SpincRep) -> bool:
    """Every exponent lies in ``E0 - <a,a>/8 + Z/2`` (``+ Z`` for A1)."""
    _, e0 = prefactor(T, L)
    st = _Setup(T, L, a)
    base = e0 - st.a_norm / 8
    step = Fraction(1) if L.name == "A1" else Fraction(1, 2)
    return all(((e - base) / step).denominator == 1 for e, _ in series.terms)


# ---------------------------------------------------------------- invariance checks


@dataclass
class InvarianceReport:
    """Outcome of one invariance comparison.

    ``status`` is ``equal``, ``differ``, ``precondition`` (a tree is not
    reduced or not weakly negative definite) or ``undefined`` (the series
    needs a product ``P * P`` that does not exist).
    """

    kind: str
    status: str
    truncation: Fraction | None = None
    left: QSeries | None = None
    right: QSeries | None = None
    detail: str = ""
    diffs: list = field(default_factory=list)
    ring_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.status == "equal"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "status": self.status,
            "truncation": None if self.truncation is None else _fmt(self.truncation),
            "ring_ok": self.ring_ok,
            "detail": self.detail,
            "left": None if self.left is None else self.left.to_json(),
            "right": None if self.right is None else self.right.to_json(),
            "diffs": [[_fmt(e), _fmt(x), _fmt(y)] for e, x, y in self.diffs],
        }


def _compare(kind: str, n, left: YResult, right: YResult, detail: str = "") -> InvarianceReport:
    diffs = left.series.diff(right.series)
    return InvarianceReport(kind, "differ" if diffs else "equal", n, left.series, right.series, detail, diffs,
                            left.ring_ok and right.ring_ok)


def _tree_problem(T: PlumbingTree) -> str | None:
    if not is_weakly_negative_definite(T):
        return "not weakly negative definite"
    if not is_reduced(T):
        return "not reduced"
    return None


def verify_move_invariance(T: PlumbingTree, m, L: RootLatticeData, P: AdmissibleSeries, a: SpincRep,
                           truncation=None, window=Fraction(16)) -> InvarianceReport:
    """Compare Y on both sides of the move ``m`` applied to ``T``.

    ``a`` lives on ``T``.  For blow-ups it is carried up by the transport
    map; for blow-downs the matching bottom class is found by inverting it.
    The default truncation is the lower bound of the bottom tree plus
    ``window``; the same absolute truncation is used on both sides.
    """
    from .admissible import NotConvolvable
    from .spinc import move_pair, transport, transport_pair

    pair = move_pair(T, m)
    kind = f"move {m.kind.value}"
    for name, tree in (("bottom", pair.bottom), ("top", pair.top)):
        problem = _tree_problem(tree)
        if problem:
            return InvarianceReport(kind, "precondition", detail=f"{name} tree {problem}")
    a_bottom = a if not m.kind.is_inverse else transport(m, a, T, L)
    a_top = transport_pair(pair, L, a_bottom)
    n = Fraction(truncation) if truncation is not None else lower_bound(pair.bottom, L, a_bottom) + window
    try:
        yb = _cached_Y(pair.bottom, L, P, a_bottom, n)
        yt = _cached_Y(pair.top, L, P, a_top, n)
    except NotConvolvable as exc:
        return InvarianceReport(kind, "undefined", n, detail=str(exc))
    return _compare(kind, n, yb, yt)


def verify_weyl_invariance(T: PlumbingTree, L: RootLatticeData, P: AdmissibleSeries, a: SpincRep, w,
                           truncation=None, window=DEFAULT_WINDOW) -> InvarianceReport:
    """Y_{P,a} against Y_{P,w(a)}, plus c_Gamma(l) = c_Gamma(w l) on every enumerated l."""
    from .admissible import NotConvolvable
    from .spinc import weyl_act

    kind = "weyl"
    problem = _tree_problem(T)
    if problem:
        return InvarianceReport(kind, "precondition", detail=problem)
    wa = weyl_act(w, a)
    n = Fraction(truncation) if truncation is not None else lower_bound(T, L, a) + window
    try:
        y1 = compute_Y_detailed(ComputationPlan(T, L, P, a, n, keep_points=True))
        y2 = compute_Y_detailed(ComputationPlan(T, L, P, wa, n))
    except NotConvolvable as exc:
        return InvarianceReport(kind, "undefined", n, detail=str(exc))
    rep = _compare(kind, n, y1, y2)
    bad = 0
    for comps, c in y1.points:
        if gamma_coefficient(T, L, P, [w.apply(v) for v in comps]) != c:
            bad += 1
    if bad:
        rep.status = "differ"
        rep.detail = f"{bad} coefficient mismatches c(l) != c(w l)"
    return rep


def verify_twist_independence(T: PlumbingTree, L: RootLatticeData, P: AdmissibleSeries, a: SpincRep, w,
                              truncation=None, window=DEFAULT_WINDOW) -> InvarianceReport:
    from .admissible import NotConvolvable, weyl_twist

    kind = "twist"
    problem = _tree_problem(T)
    if problem:
        return InvarianceReport(kind, "precondition", detail=problem)
    n = Fraction(truncation) if truncation is not None else lower_bound(T, L, a) + window
    try:
        y1 = _cached_Y(T, L, P, a, n)
        y2 = _cached_Y(T, L, weyl_twist(P, w), a, n)
    except NotConvolvable as exc:
        return InvarianceReport(kind, "undefined", n, detail=str(exc))
    return _compare(kind, n, y1, y2)
