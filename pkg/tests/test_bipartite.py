import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcf.bipartite import (
    BipartiteRep,
    FeasibleCycle,
    FeasiblePath,
    alt_cycle_to_dicycle,
    build_bipartite_rep,
    dicycle_to_alt_cycle,
    endpoint_degree,
    fact1_reduce,
    is_good_path,
    m0_length,
    mark_m0,
    select_good_feasible_path,
    xv,
    yv,
)
from dcf.digraph import Digraph, complete_symmetric, in_degree, min_semi_degree, out_degree
from dcf.errors import PreconditionError
from tests.test_digraph import digraphs

DIGON = Digraph(2, [(0, 1), (1, 0)])
TRIANGLE = Digraph(3, [(0, 1), (1, 2), (2, 0)])


def edge_set(rep: BipartiteRep) -> set[frozenset[int]]:
    return {frozenset((a, b)) for a in range(2 * rep.n) for b in rep.adj[a]}


def test_digon_rep():
    rep = build_bipartite_rep(DIGON)
    assert edge_set(rep) == {
        frozenset((xv(0), yv(0))),
        frozenset((xv(1), yv(1))),
        frozenset((xv(0), yv(1))),
        frozenset((xv(1), yv(0))),
    }
    assert rep.degree(xv(0)) == 2


def test_triangle_and_arcless_reps():
    rep = build_bipartite_rep(TRIANGLE)
    assert all(rep.degree(xv(i)) == 2 == rep.degree(yv(i)) for i in range(3))
    bare = build_bipartite_rep(Digraph(3))
    assert edge_set(bare) == {frozenset((xv(i), yv(i))) for i in range(3)}


def test_mark_m0():
    rep = build_bipartite_rep(complete_symmetric(4))
    assert mark_m0(rep, range(4)).unmarked == frozenset()
    assert mark_m0(rep, []).marked == frozenset()
    D = Digraph(4, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 3), (3, 0)])
    marked = mark_m0(build_bipartite_rep(D), [0, 1])
    d = min_semi_degree(D, [0, 1])
    assert marked.min_marked_degree() == d + 1


def test_digon_cycle_to_dicycle():
    rep = build_bipartite_rep(DIGON)
    C = FeasibleCycle.from_vertices(rep, [xv(0), yv(1), xv(1), yv(0)])
    assert alt_cycle_to_dicycle(rep, C) == (0, 1)


def _alternating_cycles(rep: BipartiteRep, length: int) -> set[frozenset]:
    """Alternating cycles of the given vertex count, by plain enumeration on
    the undirected graph."""
    G = nx.Graph()
    G.add_edges_from(tuple(e) for e in edge_set(rep))
    found = set()
    for cyc in nx.simple_cycles(G, length_bound=length):
        if len(cyc) != length:
            continue
        matched = sum((cyc[i] ^ 1) == cyc[(i + 1) % length] for i in range(length))
        if 2 * matched == length:
            found.add(frozenset(cyc))
    return found


def test_triangle_has_one_alternating_six_cycle():
    rep = build_bipartite_rep(TRIANGLE)
    sixes = _alternating_cycles(rep, 6)
    assert len(sixes) == 1
    (only,) = sixes
    G = nx.Graph([tuple(e) for e in edge_set(rep)])
    order = nx.find_cycle(G.subgraph(only))
    seq = [a for a, _ in order]
    C = FeasibleCycle.from_vertices(rep, seq)
    assert alt_cycle_to_dicycle(rep, C) == (0, 1, 2)


def test_dicycle_round_trip():
    rep = build_bipartite_rep(TRIANGLE)
    C = dicycle_to_alt_cycle(rep, (1, 2, 0))
    assert alt_cycle_to_dicycle(rep, C) == (0, 1, 2)
    assert dicycle_to_alt_cycle(rep, alt_cycle_to_dicycle(rep, C)) == C


def test_dicycle_with_missing_arc_rejected():
    rep = build_bipartite_rep(TRIANGLE)
    with pytest.raises(PreconditionError):
        dicycle_to_alt_cycle(rep, (0, 2, 1))


def test_fact1_examples():
    K = build_bipartite_rep(complete_symmetric(4))
    assert fact1_reduce(K) == K
    D = Digraph(4, [(2, 3), (0, 1), (1, 0), (0, 2)])
    rep = mark_m0(build_bipartite_rep(D), [0, 1])
    reduced = fact1_reduce(rep)
    assert not reduced.has_edge(xv(2), yv(3))
    assert reduced.cross == {(0, 1), (1, 0), (0, 2)}


@settings(max_examples=60)
@given(digraphs(max_n=6), st.data())
def test_fact1_cycles_survive_in_original(D, data):
    W = data.draw(st.lists(st.integers(0, D.n - 1), unique=True))
    rep = mark_m0(build_bipartite_rep(D), W)
    reduced = fact1_reduce(rep)
    assert reduced.cross <= rep.cross
    assert fact1_reduce(reduced) == reduced
    for i in reduced.marked:
        assert reduced.degree(xv(i)) == rep.degree(xv(i))
        assert reduced.degree(yv(i)) == rep.degree(yv(i))
    for u, v in reduced.cross:
        assert u in rep.marked or v in rep.marked
    rD = reduced.digraph
    for cyc in nx.simple_cycles(nx.DiGraph(list(rD.arcs))):
        dicycle_to_alt_cycle(rep, cyc)


def _spanning_paths(rep: BipartiteRep, pairs) -> list[tuple[int, ...]]:
    out = []
    for perm in itertools.permutations(pairs):
        if perm[0] in rep.marked and perm[-1] in rep.marked and all(
            rep.joined(perm[i], perm[i + 1]) for i in range(len(perm) - 1)
        ):
            out.append(perm)
    return out


def test_good_path_without_chords_is_itself():
    D = Digraph(3, [(1, 0), (2, 1)])
    rep = build_bipartite_rep(D)
    P = FeasiblePath.of(rep, (0, 1, 2))
    assert select_good_feasible_path(rep, P) == P


def test_good_path_prefers_lighter_endpoints():
    D = Digraph(3, [(0, 2), (1, 0), (1, 2), (2, 1)])
    rep = build_bipartite_rep(D)
    P = FeasiblePath.of(rep, (0, 1, 2))
    candidates = _spanning_paths(rep, (0, 1, 2))
    cost = {c: endpoint_degree(rep, c[0], c[-1], c) for c in candidates}
    best = min(cost.values())
    expected = min(c for c in candidates if cost[c] == best)
    assert cost[P.pairs] > best
    got = select_good_feasible_path(rep, P)
    assert got.pairs == expected
    assert not is_good_path(rep, P)
    assert is_good_path(rep, got)


@settings(max_examples=80)
@given(digraphs(max_n=6), st.data())
def test_good_path_is_minimal(D, data):
    W = data.draw(st.lists(st.integers(0, D.n - 1), min_size=1, unique=True))
    rep = mark_m0(build_bipartite_rep(D), W)
    start = data.draw(st.sampled_from(sorted(rep.marked)))
    path = [start]
    while True:
        options = [q for q in range(D.n) if q not in path and rep.joined(path[-1], q)]
        if not options or not data.draw(st.booleans()):
            break
        path.append(data.draw(st.sampled_from(options)))
    while path[-1] not in rep.marked:
        path.pop()
    P = FeasiblePath.of(rep, path)
    got = select_good_feasible_path(rep, P)
    assert sorted(got.pairs) == sorted(P.pairs)
    value = endpoint_degree(rep, got.pairs[0], got.pairs[-1], got.pairs)
    for other in _spanning_paths(rep, P.pairs):
        assert value <= endpoint_degree(rep, other[0], other[-1], other)


def test_good_path_size_cap():
    rep = build_bipartite_rep(complete_symmetric(13))
    with pytest.raises(PreconditionError):
        select_good_feasible_path(rep, FeasiblePath.of(rep, range(13)))


def test_m0_length_examples():
    rep = mark_m0(build_bipartite_rep(complete_symmetric(4)), [0, 1])
    assert m0_length(FeasibleCycle.of(rep, (0, 1))) == 2
    full = build_bipartite_rep(complete_symmetric(4))
    assert m0_length(FeasiblePath.of(full, (0, 1, 2))) == 3
    with pytest.raises(PreconditionError):
        FeasibleCycle.of(rep, (2, 3))


def test_path_must_end_on_marked_edges():
    rep = mark_m0(build_bipartite_rep(complete_symmetric(4)), [0, 1])
    with pytest.raises(PreconditionError):
        FeasiblePath.of(rep, (0, 2))


def test_dump_lists_flags_then_edges():
    rep = mark_m0(build_bipartite_rep(DIGON), [0])
    assert rep.dump() == "n 2\nx0 y0 M0\nx1 y1 M1\nx0 y1\nx1 y0\n"


@given(digraphs(max_n=12))
def test_edge_count_and_degree_shift(D):
    rep = build_bipartite_rep(D)
    assert len(edge_set(rep)) == len(D.arcs) + D.n
    assert rep.digraph == D
    for v in range(D.n):
        assert rep.degree(xv(v)) == out_degree(D, v) + 1
        assert rep.degree(yv(v)) == in_degree(D, v) + 1
