"""Exact integer/rational linear algebra used throughout the package.

Matrices are plain nested tuples (or lists) of ``int`` / ``Fraction``.
Floating point appears only inside :func:`ellipsoid_points`, to propose
candidates; membership is always decided by exact integer tests.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterator, Sequence

Matrix = Sequence[Sequence]


def identity(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix) -> tuple[tuple, ...]:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Matrix) -> tuple[tuple, ...]:
    return tuple(zip(*a))


def det(a: Matrix) -> int:
    """Determinant of an integer matrix by Bareiss fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse by Gauss-Jordan over the rationals.

    Raises:
        ZeroDivisionError: if the matrix is singular.
    """
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def inertia(a: Matrix) -> tuple[int, int, int]:
    """Return (#positive, #negative, #zero) eigenvalues of a symmetric matrix.

    Uses symmetric congruence elimination over the rationals, so the counts
    are exact (Sylvester's law of inertia). When every remaining diagonal
    entry vanishes but an off-diagonal one does not, row/column ``i`` is
    replaced by row/column ``i + j`` to manufacture a nonzero pivot.
    """
    m = [[Fraction(x) for x in row] for row in a]
    pos = neg = 0
    idx = list(range(len(m)))
    while idx:
        piv = next((i for i in idx if m[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if i != j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for k in range(len(m)):
                m[i][k] += m[j][k]
            for k in range(len(m)):
                m[k][i] += m[k][j]
            piv = i
        p = m[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for i in idx:
            if m[i][piv] != 0:
                f = m[i][piv] / p
                for k in idx:
                    m[i][k] -= f * m[piv][k]
        for i in idx:
            m[i][piv] = m[piv][i] = Fraction(0)
    return pos, neg, len(m) - pos - neg


def is_positive_definite(a: Matrix) -> bool:
    """Sylvester's criterion on leading principal minors."""
    n = len(a)
    for k in range(1, n + 1):
        minor = [[Fraction(a[i][j]) for j in range(k)] for i in range(k)]
        if _rational_det(minor) <= 0:
            return False
    return True


def _rational_det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return out


def smith_form(a: Matrix) -> tuple[list[int], tuple[tuple[int, ...], ...]]:
    """Smith normal form data for a nonsingular square integer matrix.

    Returns ``(d, U)`` with ``U`` unimodular such that ``u`` lies in the
    column lattice of ``a`` iff ``(U u)_i`` is divisible by ``d_i`` for all i.
    """
    from sympy import Matrix as SMatrix
    from sympy.matrices.normalforms import smith_normal_decomp

    s, u, _ = smith_normal_decomp(SMatrix([list(map(int, r)) for r in a]))
    n = len(a)
    d = [abs(int(s[i, i])) for i in range(n)]
    return d, tuple(tuple(int(u[i, j]) for j in range(n)) for i in range(n))


def lower_hnf(a: Matrix) -> tuple[tuple[int, ...], ...]:
    """Lower-triangular basis of the column lattice of a nonsingular integer matrix.

    Integer column operations only, so the result spans the same lattice.
    """
    n = len(a)
    m = [list(map(int, row)) for row in a]
    for i in range(n):
        for j in range(i + 1, n):
            # Euclid on columns i and j within row i.
            while m[i][j] != 0:
                q = m[i][i] // m[i][j]
                for r in range(n):
                    m[r][i] -= q * m[r][j]
                for r in range(n):
                    m[r][i], m[r][j] = m[r][j], m[r][i]
        if m[i][i] < 0:
            for r in range(n):
                m[r][i] = -m[r][i]
        if m[i][i] == 0:
            raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row) for row in m)


def udu(q: Matrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Decompose a positive definite matrix as ``Uᵀ diag(d) U`` with U unit upper triangular."""
    return _udu(tuple(tuple(Fraction(x) for x in row) for row in q))


@functools.lru_cache(maxsize=256)
def _udu(q: tuple) -> tuple[list[Fraction], list[list[Fraction]]]:
    n = len(q)
    d = [Fraction(0)] * n
    u = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        d[i] = Fraction(q[i][i]) - sum((d[k] * u[k][i] ** 2 for k in range(i)), Fraction(0))
        if d[i] <= 0:
            raise ValueError("matrix is not positive definite")
        for j in range(i + 1, n):
            s = Fraction(q[i][j]) - sum((d[k] * u[k][i] * u[k][j] for k in range(i)), Fraction(0))
            u[i][j] = s / d[i]
    return d, u


@functools.lru_cache(maxsize=1024)
def _prepared(q: tuple) -> tuple:
    """Integer form of q plus a float UᵀDU factorisation."""
    qden = math.lcm(*(Fraction(v).denominator for row in q for v in row))
    qi = [[int(Fraction(v) * qden) for v in row] for row in q]
    d, u = udu(q)
    return qi, qden, [float(v) for v in d], [[float(v) for v in row] for row in u]


def ellipsoid_points(q: Matrix, center: Sequence[Fraction], bound: Fraction,
                     with_values: bool = False) -> Iterator:
    """Yield every integer vector x with ``(x-c)ᵀ q (x-c) <= bound``.

    ``q`` must be positive definite.  The Fincke-Pohst recursion runs in
    floating point on a slightly enlarged ellipsoid, so it only proposes a
    superset; every candidate is then accepted or rejected by an exact
    integer evaluation.  With ``with_values`` the items are
    ``(x, (x-c)ᵀ q (x-c))`` as Fractions.
    """
    n = len(q)
    bound = Fraction(bound)
    if n == 0:
        if bound >= 0:
            yield ((), Fraction(0)) if with_values else ()
        return
    if bound < 0:
        return
    qi, qden, df, uf = _prepared(tuple(map(tuple, q)))
    c = [Fraction(x) for x in center]
    # Exact side: den * c = p and qden * q = qi is integral.
    den = math.lcm(*(x.denominator for x in c))
    p = [int(x * den) for x in c]
    scale = den * den * qden
    lim = bound.numerator * scale  # accept iff value_numerator * bound.den <= lim
    bden = bound.denominator
    cf = [float(v) for v in c]
    top = float(bound) * (1 + 1e-9) + 1e-9
    x = [0] * n
    sqrt, ceil, floor = math.sqrt, math.ceil, math.floor

    def exact() -> int:
        y = [den * a - b for a, b in zip(x, p)]
        return sum(y[i] * sum(qi[i][j] * y[j] for j in range(n)) for i in range(n))

    def rec(i: int, budget: float):
        ui = uf[i]
        mid = cf[i] - sum(ui[j] * (x[j] - cf[j]) for j in range(i + 1, n))
        half = sqrt(budget / df[i]) if budget > 0 else 0.0
        lo = ceil(mid - half - 1e-9)
        hi = floor(mid + half + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            rest = budget - df[i] * (v - mid) ** 2
            if i == 0:
                val = exact()
                if val * bden <= lim:
                    yield (tuple(x), Fraction(val, scale)) if with_values else tuple(x)
            elif rest >= -1e-9:
                yield from rec(i - 1, max(rest, 0.0) + 1e-9)

    yield from rec(n - 1, top)


def quadratic_min(q: Matrix, center: Sequence[Fraction]) -> Fraction:
    """Exact minimum of ``(x-c)ᵀ q (x-c)`` over integer vectors x."""
    n = len(q)
    if n == 0:
        return Fraction(0)
    guess = tuple(round(Fraction(v)) for v in center)
    best = _qform(q, center, guess)
    for _, val in ellipsoid_points(q, center, best, with_values=True):
        best = min(best, val)
    return best


def _qform(q: Matrix, c: Sequence[Fraction], x: Sequence[int]) -> Fraction:
    y = [Fraction(a) - b for a, b in zip(x, c)]
    return sum((y[i] * q[i][j] * y[j] for i in range(len(y)) for j in range(len(y))), Fraction(0))


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> tuple[list[Fraction] | None, int]:
    """Solve ``rows @ x = rhs`` exactly.

    Returns ``(x, free)`` where ``free`` is the number of free variables and
    ``x`` is the solution with all free variables set to zero, or ``None``
    when the system is inconsistent.
    """
    n = len(rows[0]) if rows else 0
    m = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(row[n] != 0 and not any(row[:n]) for row in m):
        return None, n - len(pivots)
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = m[i][n]
    return x, n - len(pivots)
