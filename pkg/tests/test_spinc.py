import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import _oracles as orc
from plumbtop.corpus import CorpusConfig, candidate_moves, random_tree
from plumbtop.plumbing import PlumbingTree, apply_move, framing, inverse_move
from plumbtop.root_lattice import build_root_lattice
from plumbtop.spinc import (
    SpincRep,
    canonical,
    class_key,
    delta,
    enumerate_spinc,
    equivalent,
    is_valid,
    move_pair,
    transport,
    transport_is_bijective,
    transport_pair,
    weyl_act,
)

A1 = build_root_lattice("A1")
A2 = build_root_lattice("A2")


@st.composite
def wnd_trees(draw, max_det=4):
    seed = draw(st.integers(0, 10_000))
    return random_tree(random.Random(seed), CorpusConfig(max_vertices=6, max_det=max_det))


def shift(T, L, a, ks):
    """a + 2 B k, with one integer vector k per root coordinate."""
    B = framing(T).matrix
    comps = []
    for v in range(T.size):
        comps.append(tuple(a.components[v][j] + 2 * sum(B[v][u] * ks[j][u] for u in range(T.size))
                           for j in range(L.rank)))
    return SpincRep(tuple(comps))


@given(wnd_trees(), st.sampled_from([A1, A2]))
def test_count_is_det_power(T, L):
    classes = enumerate_spinc(T, L)
    d = abs(framing(T).determinant)
    count, _ = orc.spinc_count_bruteforce(T, L)
    assert len(classes) == d ** L.rank == count
    assert len({orc.bf_key(T, L, a) for a in classes}) == len(classes)
    assert all(is_valid(T, L, a) for a in classes)


@given(wnd_trees(), st.sampled_from([A1, A2]), st.data())
def test_keys_are_class_invariants(T, L, data):
    classes = enumerate_spinc(T, L)
    a = data.draw(st.sampled_from(classes))
    ks = [[data.draw(st.integers(-3, 3)) for _ in range(T.size)] for _ in range(L.rank)]
    b = shift(T, L, a, ks)
    assert is_valid(T, L, b)
    assert class_key(T, L, b) == class_key(T, L, a)
    assert orc.bf_key(T, L, b) == orc.bf_key(T, L, a)
    assert canonical(T, L, b) == canonical(T, L, a)


def test_delta_and_validity():
    T = PlumbingTree.star(-2, [[-2], [-3], [-5]])
    d = delta(T, A2)
    assert d.components[0] == (-2, -2) and d.components[1] == (2, 2)
    assert is_valid(T, A2, d)
    bad = SpincRep(((1, 0),) + d.components[1:])
    assert not is_valid(T, A2, bad)
    with pytest.raises(ValueError):
        class_key(T, A2, bad)


@given(wnd_trees(), st.data())
def test_weyl_action_on_classes(T, data):
    L = A2
    classes = enumerate_spinc(T, L)
    a = data.draw(st.sampled_from(classes))
    w = data.draw(st.sampled_from(L.weyl_group))
    v = data.draw(st.sampled_from(L.weyl_group))
    wa = weyl_act(w, a)
    assert is_valid(T, L, wa)
    # Well defined on classes, and an action.
    ks = [[1] * T.size, [0] * T.size]
    assert equivalent(T, L, weyl_act(w, shift(T, L, a, ks)), wa)
    assert weyl_act(L.compose(w, v), a) == weyl_act(w, weyl_act(v, a))
    assert weyl_act(L.identity_element, a) == a


@given(wnd_trees(max_det=3), st.sampled_from([A1, A2]), st.data())
def test_transport_bijective(T, L, data):
    moves = candidate_moves(T)
    m = data.draw(st.sampled_from(moves))
    pair = move_pair(T, m)
    assert transport_is_bijective(pair, L)
    bottom = enumerate_spinc(pair.bottom, L)
    images = {orc.bf_key(pair.top, L, transport_pair(pair, L, a)) for a in bottom}
    assert len(images) == len(bottom) == len(enumerate_spinc(pair.top, L))


@given(wnd_trees(max_det=3), st.data())
def test_transport_down_inverts_up(T, data):
    L = A2
    ups = [m for m in candidate_moves(T) if not m.kind.is_inverse]
    m = data.draw(st.sampled_from(ups))
    a = data.draw(st.sampled_from(enumerate_spinc(T, L)))
    top = move_pair(T, m).top
    down = inverse_move(T, m)
    back = transport(down, transport(m, a, T, L), top, L)
    # C blow-downs may renumber the vertices; compare only when they do not.
    if apply_move(top, down) == T:
        assert equivalent(T, L, back, a)
    else:
        assert m.kind.family == "C"
