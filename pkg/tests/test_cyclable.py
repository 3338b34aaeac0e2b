import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcf.cyclable import (
    Bypass,
    MergeError,
    NoCycleReport,
    find_bypass,
    find_w_cycle,
    insert_vertex,
    merge_insertable_set,
    path_degree,
    short_connecting_paths,
    theorem5_factor,
    theorem5_gate,
)
from dcf.digraph import Digraph, VertexSet, complete_symmetric, min_semi_degree, validate_certificate
from dcf.errors import BelowThresholdError, PreconditionError
from dcf.generators import enumerate_digraphs, gen_complete_bipartite_sym, gen_random_min_semidegree
from dcf.oracle import oracle_cyclable
from dcf.sweep import partitions_for


def is_path(D, P) -> bool:
    return len(set(P)) == len(P) and all(D.has_arc(a, b) for a, b in zip(P, P[1:]))


def is_cycle(D, C) -> bool:
    return len(C) >= 2 and len(set(C)) == len(C) and all(D.has_arc(C[i], C[(i + 1) % len(C)]) for i in range(len(C)))


def all_subsets(n, smallest=2):
    for k in range(smallest, n + 1):
        yield from itertools.combinations(range(n), k)


# -- short connecting paths ---------------------------------------------------------


def test_short_paths_in_complete_digraph_are_the_arcs():
    assert short_connecting_paths(complete_symmetric(3), range(3), 0, 1) == ([0, 1], [1, 0])


def test_short_paths_through_distinct_middles():
    arcs = [(a, b) for a in range(6) for b in range(6) if a != b and {a, b} != {0, 1}]
    D = Digraph(6, arcs)
    assert not D.has_arc(0, 1)
    assert len(D.succ[0] & D.pred[1]) >= 2
    p1, p2 = short_connecting_paths(D, [0, 1], 0, 1)
    assert len(p1) == 3 and len(p2) == 3
    assert p1[0] == 0 and p1[-1] == 1 and p2[0] == 1 and p2[-1] == 0
    assert is_path(D, p1) and is_path(D, p2)
    assert p1[1] != p2[1]


def test_short_paths_reject_low_degree():
    D = Digraph(4, [(0, 1), (1, 0)])
    with pytest.raises(BelowThresholdError):
        short_connecting_paths(D, [0, 1], 0, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10**6))
def test_short_paths_exist_under_the_gate(n, seed):
    D, W = gen_random_min_semidegree(n, min(n, 3), -(-n // 2), seed)
    u, v = W[0], W[1]
    p1, p2 = short_connecting_paths(D, W, u, v)
    assert is_path(D, p1) and is_path(D, p2)
    assert len(p1) <= 3 and len(p2) <= 3
    assert not set(p1[1:-1]) & set(p2[1:-1])


# -- insertion ----------------------------------------------------------------------


def test_insert_into_single_arc_in_k3():
    assert insert_vertex(complete_symmetric(3), [0, 1], 2) == [0, 2, 1]


def test_insert_into_three_arc_path_in_k5():
    D = complete_symmetric(5)
    P = [0, 1, 2, 3]
    assert path_degree(D, P, 4) == 8
    got = insert_vertex(D, P, 4)
    assert got[0] == 0 and got[-1] == 3 and sorted(got) == [0, 1, 2, 3, 4]
    assert is_path(D, got)


def _neighbourhoods(p):
    """Every choice of arcs between an outside vertex ``u = p + 1`` and the
    path ``0 -> 1 -> ... -> p``."""
    u = p + 1
    pairs = [(v, u) for v in range(p + 1)] + [(u, v) for v in range(p + 1)]
    for mask in range(1 << len(pairs)):
        arcs = [(i, i + 1) for i in range(p)] + [a for k, a in enumerate(pairs) if mask >> k & 1]
        yield Digraph(p + 2, arcs), list(range(p + 1)), u


def _has_slot(D, P, u):
    return any(D.has_arc(P[i], u) and D.has_arc(u, P[i + 1]) for i in range(len(P) - 1))


def test_one_short_of_the_bound_can_leave_no_slot():
    p = 3
    blocked = [(D, P, u) for D, P, u in _neighbourhoods(p - 1) if path_degree(D, P, u) == p + 1 and not _has_slot(D, P, u)]
    assert blocked
    for D, P, u in blocked:
        with pytest.raises(PreconditionError):
            insert_vertex(D, P, u)


@pytest.mark.parametrize("arcs", [1, 2, 3, 4])
def test_insertion_succeeds_whenever_degree_allows(arcs):
    for D, P, u in _neighbourhoods(arcs):
        if path_degree(D, P, u) >= len(P) + 2:
            got = insert_vertex(D, P, u)
            assert got[0] == P[0] and got[-1] == P[-1]
            assert len(got) == len(P) + 1 and set(got) == set(P) | {u}
            assert is_path(D, got)


# -- merging a set of insertable vertices ------------------------------------------


def test_merge_empty_set_returns_the_path():
    assert merge_insertable_set(complete_symmetric(3), [0, 1], []) == [0, 1]


def test_merge_single_vertex_matches_insertion():
    D = complete_symmetric(3)
    assert merge_insertable_set(D, [0, 1], [2]) == insert_vertex(D, [0, 1], 2)


def _hamiltonian_path_exists(D, s, t):
    inner = [v for v in range(D.n) if v not in (s, t)]
    return any(is_path(D, [s, *perm, t]) for perm in itertools.permutations(inner))


def test_merge_three_vertices_in_k6_spans_everything():
    D = complete_symmetric(6)
    got = merge_insertable_set(D, [0, 1, 2], [3, 4, 5])
    assert got[0] == 0 and got[-1] == 2
    assert sorted(got) == list(range(6))
    assert is_path(D, got)
    assert _hamiltonian_path_exists(D, 0, 2)


def test_merge_rejects_non_insertable_vertex():
    D = Digraph(3, [(0, 1), (2, 0)])
    with pytest.raises(PreconditionError):
        merge_insertable_set(D, [0, 1], [2])


def test_merge_with_competing_vertices_needs_the_host():
    # 2 and 3 both fit only between 0 and 1; the host path 2 -> 4 -> 3 carries both
    D = Digraph(5, [(0, 1), (0, 2), (2, 1), (0, 3), (3, 1), (2, 4), (4, 3)])
    with pytest.raises(MergeError):
        merge_insertable_set(D, [0, 1], [2, 3])
    got = merge_insertable_set(D, [0, 1], [2, 3], host_path=[2, 4, 3])
    assert got == [0, 2, 4, 3, 1]
    assert is_path(D, got)


@settings(max_examples=100, deadline=None)
@given(st.integers(4, 8), st.integers(0, 10**6))
def test_merge_output_is_a_path_over_the_union(n, seed):
    rng = random.Random(seed)
    D, _ = gen_random_min_semidegree(n, n, n - 2, seed)
    Q = rng.sample(range(n), 2)
    if not is_path(D, Q):
        return
    K = [z for z in range(n) if z not in Q and _has_slot(D, Q, z)]
    try:
        got = merge_insertable_set(D, Q, K)
    except MergeError:
        return
    assert got[0] == Q[0] and got[-1] == Q[-1]
    assert set(got) == set(Q) | set(K)
    assert is_path(D, got)


# -- bypasses -----------------------------------------------------------------------


def _all_bypasses(D, C, v):
    """Brute force: simple paths x -> ... -> v -> ... -> y with interior off C."""
    on = set(C)
    off = [w for w in range(D.n) if w not in on and w != v]
    found = set()
    for k1 in range(len(off) + 1):
        for before in itertools.permutations(off, k1):
            rest = [w for w in off if w not in before]
            for k2 in range(len(rest) + 1):
                for after in itertools.permutations(rest, k2):
                    for x in C:
                        for y in C:
                            path = (x, *before, v, *after, y)
                            if all(D.has_arc(a, b) for a, b in zip(path, path[1:])):
                                found.add(path)
    return found


def test_bypass_between_consecutive_cycle_vertices():
    D = complete_symmetric(4)
    b = find_bypass(D, range(4), [0, 1, 2], 3)
    assert isinstance(b, Bypass)
    assert b.x != b.y
    assert b.path[1:-1] == (3,)
    assert b.skipped == 0


def test_bypass_may_start_and_end_at_the_same_vertex():
    D = Digraph(3, [(0, 1), (1, 0), (0, 2), (2, 0)])
    b = find_bypass(D, range(3), [0, 1], 2, check=False)
    assert b.x == b.y == 0
    assert b.path == (0, 2, 0)
    assert b.first_leg == (0, 2) and b.second_leg == (2, 0)


def test_bypass_on_constructed_six_vertex_instance():
    # cycle 0 -> 1 -> 2 -> 0; v = 5 reachable only through 3 and back through 4
    arcs = [(0, 1), (1, 2), (2, 0), (1, 3), (3, 5), (5, 4), (4, 2), (0, 3), (4, 0)]
    D = Digraph(6, arcs)
    C = [0, 1, 2]
    b = find_bypass(D, [0, 1, 5], C, 5, check=False)
    brute = _all_bypasses(D, C, 5)
    assert b.path in brute
    assert set(b.path[1:-1]).isdisjoint(C)
    assert all(D.has_arc(a, c) for a, c in zip(b.path, b.path[1:]))
    assert min(len(p) for p in brute) == len(b.path) or b.skipped == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(4, 7), st.integers(0, 10**6))
def test_bypasses_agree_with_brute_force(n, seed):
    rng = random.Random(seed)
    D, W = gen_random_min_semidegree(n, n, -(-n // 2), seed)
    cycles = [c for L in range(2, n) for c in itertools.permutations(range(n), L) if is_cycle(D, c) and c[0] == min(c)]
    if not cycles:
        return
    C = rng.choice(cycles)
    off = [v for v in range(n) if v not in C]
    v = rng.choice(off)
    b = find_bypass(D, W, list(C), v)
    brute = _all_bypasses(D, C, v)
    assert b.path in brute
    assert b.skipped == min(Bypass(p, v, C.index(p[0]), C.index(p[-1]), len(C)).skipped for p in brute)


# -- cycles through W ---------------------------------------------------------------


def test_cycle_through_three_vertices_of_k5():
    D = complete_symmetric(5)
    cyc = find_w_cycle(D, [0, 1, 2])
    assert is_cycle(D, cyc) and {0, 1, 2} <= set(cyc)


def test_complete_bipartite_two_three_is_not_cyclable():
    D = gen_complete_bipartite_sym(2, 3)
    with pytest.raises(BelowThresholdError):
        find_w_cycle(D, range(5))
    report = find_w_cycle(D, range(5), mode="best_effort")
    assert isinstance(report, NoCycleReport)
    assert report.oracle_verdict == "no"
    assert not oracle_cyclable(D, range(5)).yes


def test_random_order_ten_instances():
    for seed in range(30):
        D, W = gen_random_min_semidegree(10, random.Random(seed).randint(2, 10), 5, seed)
        cyc = find_w_cycle(D, W)
        assert is_cycle(D, cyc) and set(W) <= set(cyc)
        assert oracle_cyclable(D, W).yes


def _exhaustive_agreement(n, gated_only=False):
    checked = 0
    for D in enumerate_digraphs(n, huge=n > 4):
        semi = [min(len(D.succ[v]), len(D.pred[v])) for v in range(n)]
        for W in all_subsets(n):
            gated = 2 * min(semi[v] for v in W) >= n
            if gated_only and not gated:
                continue
            got = find_w_cycle(D, W, mode="best_effort")
            truth = oracle_cyclable(D, W)
            assert bool(got) == truth.yes, (D, W)
            if gated:
                assert got, (D, W)
                assert find_w_cycle(D, W) == got
                checked += 1
            if got:
                assert is_cycle(D, got) and set(W) <= set(got)
    return checked


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exhaustive_small_orders_match_oracle(n):
    assert _exhaustive_agreement(n) > 0


@pytest.mark.huge
def test_exhaustive_order_five_matches_oracle():
    assert _exhaustive_agreement(5, gated_only=True) > 0


def test_guaranteed_mode_rejects_below_gate():
    D = Digraph(4, [(0, 1), (1, 0)])
    with pytest.raises(BelowThresholdError) as info:
        find_w_cycle(D, [0, 1])
    assert info.value.required == 2


def test_w_needs_two_vertices():
    with pytest.raises(PreconditionError):
        find_w_cycle(complete_symmetric(3), [0])


# -- greedy factor with many spare vertices ----------------------------------------


def test_greedy_factor_in_k8():
    D = complete_symmetric(8)
    cert = theorem5_factor(D, [0, 1, 2, 3], [2, 2])
    assert sorted(cert.w_counts) == [2, 2]
    assert validate_certificate(D, [0, 1, 2, 3], [2, 2], cert)


def test_greedy_factor_at_the_boundary_order():
    rng = random.Random(3)
    for trial in range(1000):
        w = rng.randint(2, 5)
        n = 2 * w
        target = -(-(n + 2 * w - 2) // 2)
        D, W = gen_random_min_semidegree(n, w, target, trial)
        assert theorem5_gate(min_semi_degree(D, W), n, w)
        parts = rng.choice(partitions_for("all", w))
        cert = theorem5_factor(D, W, parts)
        assert validate_certificate(D, W, parts, cert)


def test_greedy_factor_needs_enough_vertices():
    with pytest.raises(PreconditionError):
        theorem5_factor(complete_symmetric(5), [0, 1, 2], [3])


def test_greedy_factor_rejects_low_degree():
    D = gen_complete_bipartite_sym(4, 4)
    with pytest.raises(BelowThresholdError):
        theorem5_factor(D, [0, 1], [2])


def test_greedy_factor_never_reuses_intermediates():
    rng = random.Random(9)
    for trial in range(200):
        w = rng.randint(2, 5)
        n = rng.randint(2 * w, 14)
        D, W = gen_random_min_semidegree(n, w, -(-(n + 2 * w - 2) // 2), 5000 + trial)
        parts = rng.choice(partitions_for("all", w))
        cert = theorem5_factor(D, W, parts)
        spare = [v for c in cert.cycles for v in c if v not in set(W)]
        assert len(spare) == len(set(spare))
        assert all(is_cycle(D, c) for c in cert.cycles)
