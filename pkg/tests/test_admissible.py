import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import _oracles as orc
from plumbtop.admissible import (
    AdmissibleSeries,
    InvalidSeries,
    NotConvolvable,
    coefficient,
    even_weyl_line_member,
    graded_support,
    graded_twist_coefficient,
    kostant_series,
    line_certificate,
    power_coefficient,
    solve_puzzle_a1,
    translate_family_member,
    verify_admissible,
    weyl_twist,
)
from plumbtop.root_lattice import build_root_lattice

A1 = build_root_lattice("A1")
A2 = build_root_lattice("A2")


def expand_kostant_product(L, depth):
    """Multiply the geometric series z^-a sum_k z^-2ka over positive roots, by brute force."""
    series = {(0,) * L.rank: 1}
    for a in L.positive_roots:
        nxt = {}
        for mu, c in series.items():
            for k in range(depth + 1):
                nu = tuple(m - (2 * k + 1) * x for m, x in zip(mu, a))
                nxt[nu] = nxt.get(nu, 0) + c
        series = nxt
    # Only exponents whose partitions all fit under the depth are complete.
    return {mu: c for mu, c in series.items() if all(-m <= 2 * depth + 1 for m in mu)}


def test_A1_closed_form():
    W = kostant_series(A1)
    for j in range(-41, 42):
        assert coefficient(W, (j,)) == (1 if j < 0 and j % 2 else 0)
    Wi = weyl_twist(W, A1.iota())
    for j in range(-41, 42):
        assert coefficient(Wi, (j,)) == (-1 if j > 0 and j % 2 else 0)


@pytest.mark.parametrize("label", ["A2", "A3"])
def test_kostant_series_matches_product_expansion(label):
    L = build_root_lattice(label)
    W = kostant_series(L)
    ref = expand_kostant_product(L, 4)
    for mu, c in ref.items():
        assert coefficient(W, mu) == c
    # Off-coset exponents vanish.
    assert coefficient(W, (1,) * L.rank) == 0


def test_denominator_product_formula():
    # sum_w sign(w) z^{2 w rho} = prod_{a > 0} (z^a - z^-a)
    for L in (A1, A2, build_root_lattice("A3")):
        prod = {(0,) * L.rank: 1}
        for a in L.positive_roots:
            nxt = {}
            for mu, c in prod.items():
                for s, sgn in ((1, 1), (-1, -1)):
                    nu = tuple(m + s * x for m, x in zip(mu, a))
                    nxt[nu] = nxt.get(nu, 0) + c * sgn
            prod = {k: v for k, v in nxt.items() if v}
        assert prod == L.denominator_terms


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "B2"])
def test_W_admissible(label):
    L = build_root_lattice(label)
    rep = verify_admissible(kostant_series(L), 24)
    assert rep.ok and rep.checked_sites > 0 and rep.p1_product_ok


def test_twists_admissible():
    W = kostant_series(A2)
    for w in A2.weyl_group:
        assert verify_admissible(weyl_twist(W, w), 24).ok
    # The formal iota twist too.
    assert verify_admissible(weyl_twist(W, A2.iota()), 24).ok


def test_translate_member():
    P = translate_family_member(A2, (0, 0), 0)
    rep = verify_admissible(P, 30)
    assert P.admissible and rep.ok
    # Convolution powers do not exist: the terms point in opposite directions.
    assert rep.p1_product_ok is False
    with pytest.raises(NotConvolvable):
        power_coefficient(P, 2, (-4, -4))


def test_translate_precondition():
    with pytest.raises(InvalidSeries):
        translate_family_member(A2, (-1, -1), 0)
    with pytest.raises(InvalidSeries):
        translate_family_member(A2, (0, 0), 5)


def test_translate_flag_follows_line_certificate():
    # gamma = alpha_2 passes the stated precondition yet puts both ends of a root line in the support.
    P = translate_family_member(A2, (0, 1), 0)
    assert not P.admissible
    assert not line_certificate(P).ok


def test_even_line_member():
    W = kostant_series(A2)
    x = A2.weyl_group[1]
    P = even_weyl_line_member(W, 1, (1, 0), x)
    rep = verify_admissible(P, 30)
    assert rep.p2_ok and P.admissible
    with pytest.raises(NotConvolvable):
        power_coefficient(P, 2, (0, 0))
    # gamma = rho along the identity line: the line criterion fails and is reported.
    Q = even_weyl_line_member(W, 1, (1, 1), A2.identity_element)
    rep = verify_admissible(Q, 30)
    assert rep.p2_ok and not rep.p1_ok and not Q.admissible
    with pytest.raises(InvalidSeries):
        even_weyl_line_member(kostant_series(A1), 1, (1,), A1.identity_element)


def test_power_coefficient_A1_bruteforce():
    W = kostant_series(A1)
    for k in range(1, 5):
        for m in range(0, 25):
            # Number of ways -m = -(2 i1 + 1) - ... - (2 ik + 1).
            want = sum(1 for t in itertools.product(range(m + 1), repeat=k) if sum(2 * i + 1 for i in t) == m)
            assert power_coefficient(W, k, (-m,)) == want


def test_power_coefficient_A2_direct_convolution():
    W = kostant_series(A2)
    ref = expand_kostant_product(A2, 6)
    square: dict = {}
    for (a, ca), (b, cb) in itertools.product(ref.items(), repeat=2):
        mu = (a[0] + b[0], a[1] + b[1])
        square[mu] = square.get(mu, 0) + ca * cb
    for mu, c in square.items():
        if -min(mu) <= 2 * 6 + 1 - 2:
            assert power_coefficient(W, 2, mu) == c


def test_graded_low_degrees_independent_of_P_and_x():
    for P in (kostant_series(A2), translate_family_member(A2, (0, 0), 0)):
        for x in A2.weyl_group:
            for n in (0, 1, 2):
                for mu in orc.box_window(A2, 16):
                    assert graded_twist_coefficient(P, x, n, mu) == graded_support(A2, n).get(mu, 0)
    with pytest.raises(ValueError):
        graded_support(A2, 3)


@pytest.mark.parametrize("L", [A1, A2], ids=["A1", "A2"])
def test_graded_twist_identities_near_rho_multiples(L):
    # Windows around -2k rho, where the higher graded twists are mostly nonzero.
    P = kostant_series(L)
    nonzero = 0
    for k in range(1, 4):
        centre = tuple(-k * r for r in L.weyl_vector_doubled)
        for x in L.weyl_group:
            for d in orc.box_window(L, 8):
                a = tuple(c + e for c, e in zip(centre, d))
                for n in range(1, 6):
                    lhs, rhs = orc.alternating_shift(P, x, n, a)
                    assert lhs == rhs
                    nonzero += rhs != 0
                    assert orc.iota_reflection(P, x, n, a)[0] == orc.iota_reflection(P, x, n, a)[1]
                for p, q in ((3, 3), (3, 4), (1, 5), (4, 4)):
                    lhs, rhs = orc.graded_convolution(P, x, p, q, a)
                    assert lhs == rhs
                    nonzero += rhs != 0
    assert nonzero > 50


def test_graded_twist_identities_translate_member():
    # Only degrees up to 3 exist for this series.
    P = translate_family_member(A2, (0, 0), 0)
    for x in A2.weyl_group:
        for a in orc.box_window(A2, 24):
            for n in (1, 2, 3):
                lhs, rhs = orc.alternating_shift(P, x, n, a)
                assert lhs == rhs
                lhs, rhs = orc.iota_reflection(P, x, n, a)
                assert lhs == rhs
                for w in A2.weyl_group:
                    lhs, rhs = orc.weyl_equivariance(P, x, w, n, a)
                    assert lhs == rhs


def test_puzzle_solutions():
    for side, sign in (("vanish_positive", 1), ("vanish_negative", -1)):
        win = solve_puzzle_a1(side, 72)
        assert win.free_variables == 0
        assert all(v == (sign if (j < 0) == (sign == 1) else 0) for (j,), v in win.table.items())
        assert verify_admissible(win, 72).p2_ok
    with pytest.raises(ValueError):
        solve_puzzle_a1("sideways", 50)


def test_puzzle_window_bounds():
    win = solve_puzzle_a1("vanish_positive", 200)
    # 2 j^2 <= 200 gives |j| <= 10, odd j only.
    assert sorted(j for (j,) in win.table) == [j for j in range(-9, 10, 2)]


@given(st.sampled_from(range(6)), st.sampled_from([(0, 0), (1, 0), (-1, 0)]))
def test_json_round_trip(widx, gamma):
    P = weyl_twist(translate_family_member(A2, gamma, 0), A2.weyl_group[widx])
    Q = AdmissibleSeries.from_json(P.to_json())
    assert Q.admissible == P.admissible
    for mu in orc.box_window(A2, 12):
        assert coefficient(Q, mu) == coefficient(P, mu)


def test_json_rejects_garbage():
    with pytest.raises((InvalidSeries, ValueError, KeyError)):
        AdmissibleSeries.from_json({"lattice": "A2", "terms": [{"scalar": "x"}]})


def test_scalars_are_exact():
    P = translate_family_member(A2, (0, 0), 0)
    assert all(isinstance(coefficient(P, mu), Fraction) for mu in orc.box_window(A2, 8))
