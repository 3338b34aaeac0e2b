import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcf.digraph import Digraph, complete_symmetric, validate_certificate
from dcf.generators import gen_d2, gen_random
from dcf.oracle import Status, oracle_cyclable, oracle_digon_factor, oracle_factor_exists
from dcf.sweep import partitions_for


def all_cycles(D):
    """Every directed cycle as a vertex tuple rooted at its smallest vertex."""
    out = []
    for L in range(2, D.n + 1):
        for cyc in itertools.permutations(range(D.n), L):
            if cyc[0] == min(cyc) and all(D.has_arc(cyc[i], cyc[(i + 1) % L]) for i in range(L)):
                out.append(cyc)
    return out


def factor_by_cover(D, W, parts):
    """Reference decision: try every selection of pairwise disjoint cycles."""
    wset = set(W)
    cycles = [c for c in all_cycles(D) if sum(v in wset for v in c) in parts]
    want = sorted(parts)

    def rec(start, used, counts):
        if sorted(counts) == want:
            return wset <= used
        for i in range(start, len(cycles)):
            c = cycles[i]
            if used & set(c):
                continue
            got = rec(i + 1, used | set(c), counts + [sum(v in wset for v in c)])
            if got:
                return True
        return False

    return rec(0, set(), [])


# -- factor existence ----------------------------------------------------------------


def test_two_digons_in_k4():
    v = oracle_factor_exists(complete_symmetric(4), range(4), [2, 2])
    assert v.yes
    assert sorted(map(sorted, v.certificate.cycles)) == [[0, 1], [2, 3]]


def test_triangle_counts_w_vertices_not_length():
    # parts are W-counts: the triangle carries both W-vertices
    v = oracle_factor_exists(Digraph(3, [(0, 1), (1, 2), (2, 0)]), [0, 1], [2])
    assert v.yes and [sorted(c) for c in v.certificate.cycles] == [[0, 1, 2]]


def test_acyclic_digraph_has_no_factor():
    assert oracle_factor_exists(Digraph(3, [(0, 1), (1, 2), (0, 2)]), [0, 1], [2]).no


def test_d2_has_no_two_long_cycles():
    assert oracle_factor_exists(gen_d2(2), range(6), [3, 3]).no


def test_budget_is_a_verdict():
    v = oracle_factor_exists(complete_symmetric(8), range(8), [4, 4], budget=3)
    assert v.status is Status.BUDGET_EXCEEDED
    assert not v.yes and not v.no


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5), st.floats(0.2, 0.9), st.integers(0, 10**6), st.data())
def test_factor_oracle_matches_cover_search(n, p, seed, data):
    D = gen_random(n, p, seed)
    W = sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=2)))
    parts = data.draw(st.sampled_from(partitions_for("all", len(W))))
    v = oracle_factor_exists(D, W, parts)
    assert v.yes == factor_by_cover(D, W, parts)
    if v.yes:
        assert validate_certificate(D, W, parts, v.certificate)


# -- cyclability ---------------------------------------------------------------------


def test_complete_digraphs_are_cyclable():
    for n in range(2, 7):
        assert oracle_cyclable(complete_symmetric(n), range(n)).yes
        assert oracle_cyclable(complete_symmetric(n), [0, n - 1]).yes


def test_triangle_through_two_vertices():
    v = oracle_cyclable(Digraph(3, [(0, 1), (1, 2), (2, 0)]), [0, 2])
    assert v.yes and sorted(v.cycle) == [0, 1, 2]


def test_empty_w_asks_for_any_cycle():
    assert oracle_cyclable(Digraph(3, [(0, 1), (1, 2)]), []).no
    assert oracle_cyclable(Digraph(3, [(1, 2), (2, 1)]), []).yes


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6), st.floats(0.2, 0.9), st.integers(0, 10**6), st.data())
def test_cyclable_oracle_matches_cycle_list(n, p, seed, data):
    D = gen_random(n, p, seed)
    W = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    v = oracle_cyclable(D, W)
    assert v.yes == any(W <= set(c) for c in all_cycles(D))
    if v.yes:
        c = v.cycle
        assert W <= set(c)
        assert all(D.has_arc(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))


# -- digon factors -------------------------------------------------------------------


def test_digon_factor_examples():
    assert oracle_digon_factor(complete_symmetric(4)).yes
    assert oracle_digon_factor(Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])).no
    assert oracle_digon_factor(complete_symmetric(5)).no


def test_digon_oracle_agrees_with_factor_oracle():
    rng = random.Random(17)
    for i in range(1000):
        n = rng.randint(2, 10)
        D = gen_random(n, rng.uniform(0.3, 0.95), i)
        want = oracle_digon_factor(D).yes
        if n % 2:
            assert not want
            continue
        assert oracle_factor_exists(D, range(n), [2] * (n // 2)).yes == want


# -- relabelling ----------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 6), st.floats(0.3, 0.9), st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_verdicts_survive_relabelling(n, p, seed, rnd):
    D = gen_random(n, p, seed)
    perm = list(range(n))
    rnd.shuffle(perm)
    E = D.relabel(perm)
    W = sorted(rnd.sample(range(n), rnd.randint(2, n)))
    W2 = [perm[w] for w in W]
    parts = rnd.choice(partitions_for("all", len(W)))
    assert oracle_factor_exists(D, W, parts).status == oracle_factor_exists(E, W2, parts).status
    assert oracle_cyclable(D, W).status == oracle_cyclable(E, W2).status
    assert oracle_digon_factor(D).status == oracle_digon_factor(E).status
