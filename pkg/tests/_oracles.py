"""Independent reference computations shared by the test modules.

Nothing here goes through the ellipsoid enumerator or the Smith-form
class keys; windows are scanned by brute force over integer boxes.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from plumbtop.admissible import graded_support, graded_twist_coefficient


def box_window(L, radius):
    """All alpha in Q with <alpha, alpha> <= radius, by scanning a box."""
    # Norm >= lambda_min |v|^2 and lambda_min >= 1/2 for A-type Gram matrices here.
    bound = math.isqrt(2 * int(radius)) + 1
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=L.rank):
        if L.norm(v) <= radius:
            out.append(tuple(v))
    return out


def c(P, x, n, mu):
    return graded_twist_coefficient(P, x, n, mu)


def alternating_shift(P, x, n, alpha):
    L = P.lattice
    sgn = -1 if L.n_positive % 2 else 1
    lhs = sgn * sum(
        w.sign * c(P, x, n, tuple(a + b for a, b in zip(alpha, w.apply(L.weyl_vector_doubled))))
        for w in L.weyl_group
    )
    return lhs, c(P, x, n - 1, alpha)


def iota_reflection(P, x, n, alpha):
    L = P.lattice
    sgn = (-1) ** (L.n_positive * n)
    return c(P, x, n, alpha), sgn * c(P, L.iota(x), n, tuple(-a for a in alpha))


def weyl_equivariance(P, x, w, n, alpha):
    L = P.lattice
    return c(P, x, n, alpha), w.sign ** n * c(P, L.compose(w, x), n, w.apply(alpha))


def _kostant_box(t):
    """All u with 0 <= u <= t componentwise (t in simple-root coordinates)."""
    return itertools.product(*(range(k + 1) for k in t))


def graded_convolution(P, x, p, q, alpha):
    """Convolution of two graded twists of the Kostant series at ``alpha``.

    The beta-range is finite: either one factor has finite support, or both
    supports sit in the translate ``x(-2 k rho - 2 C)`` of the simple-root cone C.
    """
    L = P.lattice
    alpha = tuple(alpha)
    rhs = c(P, x, p + q - 2, alpha)
    if min(p, q) <= 2:
        small, big = (p, q) if p <= q else (q, p)
        # sum_beta c_small(s) c_big(alpha - s); the product is commutative.
        lhs = sum(
            cs * c(P, x, big, tuple(a - s for a, s in zip(alpha, sv)))
            for sv, cs in graded_support(L, small).items()
        )
        return lhs, rhs
    rho2 = L.weyl_vector_doubled
    xi = L.inverse_of(x)
    y = xi.apply(alpha)
    k = p + q - 4
    twice_t = [-a - k * r for a, r in zip(y, rho2)]
    if any(v % 2 or v < 0 for v in twice_t):
        return Fraction(0), rhs
    t = [v // 2 for v in twice_t]
    lhs = Fraction(0)
    for u in _kostant_box(t):
        # -beta = x(-2(q-2) rho - 2u)
        mb = x.apply(tuple(-(q - 2) * r - 2 * ui for r, ui in zip(rho2, u)))
        beta = tuple(-v for v in mb)
        lhs += c(P, x, p, tuple(a + b for a, b in zip(alpha, beta))) * c(P, x, q, mb)
    return lhs, rhs


def _adjugate(T):
    from plumbtop.plumbing import framing

    f = framing(T)
    d = f.determinant
    adj = [[int(x * d) for x in row] for row in f.inverse]
    return adj, abs(d)


def _key(adj, d, v):
    return tuple(sum(a * x for a, x in zip(row, v)) % d for row in adj)


def bf_key(T, L, a):
    """Class of ``a`` as ``adj(B) (a - delta)/2 mod |det B|`` per root coordinate.

    ``v`` lies in ``B Z^s`` exactly when ``adj(B) v`` vanishes mod det.
    """
    from plumbtop.spinc import delta

    adj, d = _adjugate(T)
    base = delta(T, L).components
    out = []
    for k in range(L.rank):
        v = [(a.components[i][k] - base[i][k]) // 2 for i in range(T.size)]
        out.append(_key(adj, d, v))
    return tuple(out)


def spinc_count_bruteforce(T, L):
    """Number of classes, by listing ``Z^s / B Z^s`` over the box ``[0, |det|)^s``.

    The box meets every coset because ``|det| Z^s`` lies in ``B Z^s``.
    """
    adj, d = _adjugate(T)
    keys = {_key(adj, d, v) for v in itertools.product(range(d), repeat=T.size)}
    return len(keys) ** L.rank, keys


def brute_Y(T, L, P, a, N, box):
    """Y truncated at N by direct summation.

    Low vertices range over the finite supports of their weights; each high
    vertex ranges over a coordinate box in Q.  Membership in ``a + 2 B L`` is
    tested with the adjugate, and the coefficient averages the product of
    graded twists over every Weyl assignment.
    """
    from plumbtop.plumbing import enumerate_weyl_assignments, framing

    f = framing(T)
    adj, d = _adjugate(T)
    s = T.size
    sign = -1 if (L.n_positive * f.pi) % 2 else 1
    e0 = Fraction(3 * f.sigma - f.trace, 2) * L.rho_norm
    xis = enumerate_weyl_assignments(T, L)
    choices = []
    for v in range(s):
        if T.degree(v) <= 2:
            choices.append(list(graded_support(L, T.degree(v))))
        else:
            choices.append(list(itertools.product(range(-box, box + 1), repeat=L.rank)))
    acc: dict = {}
    domain_min = None
    for ell in itertools.product(*choices):
        diff = [[ell[v][k] - a.components[v][k] for v in range(s)] for k in range(L.rank)]
        if any(x % 2 for row in diff for x in row):
            continue
        if any(any(_key(adj, d, [x // 2 for x in row])) for row in diff):
            continue
        norm = sum(f.inverse[v][w] * L.pairing(ell[v], ell[w]) for v in range(s) for w in range(s))
        expo = e0 - norm / 8
        domain_min = expo if domain_min is None else min(domain_min, expo)
        if N is not None and expo > N:
            continue
        coef = Fraction(0)
        for xi in xis:
            term = Fraction(1)
            for v in range(s):
                term *= graded_twist_coefficient(P, xi[v], T.degree(v), ell[v])
                if not term:
                    break
            coef += term
        acc[expo] = acc.get(expo, 0) + sign * coef / len(xis)
    return {e: c for e, c in acc.items() if c}, domain_min
