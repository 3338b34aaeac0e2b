"""Brute-force deciders for small instances.

Deliberately plain: the only pruning is canonical rooting (each cycle is
grown from the smallest uncovered W-vertex) and a semi-degree dead-end cut.
This module depends on :mod:`dcf.digraph` alone so its verdicts stay
independent of the solvers.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import networkx as nx

from .digraph import CycleFactorCertificate, Digraph, Partition, VertexSet, collapse_digons

DEFAULT_BUDGET = 2_000_000


class Status(str, enum.Enum):
    YES = "yes"
    NO = "no"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class Verdict:
    status: Status
    certificate: CycleFactorCertificate | None = None
    cycle: tuple[int, ...] | None = None
    nodes: int = 0

    @property
    def yes(self) -> bool:
        return self.status is Status.YES

    @property
    def no(self) -> bool:
        return self.status is Status.NO


class _OutOfBudget(Exception):
    pass


def oracle_factor_exists(
    D: Digraph,
    W: Iterable[int],
    parts: Iterable[int],
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Decide whether ``D`` has disjoint cycles whose W-counts are exactly ``parts``.

    Since the counts sum to ``|W|``, every W-vertex is covered; the search
    always extends from the smallest uncovered one.
    """
    wset = VertexSet(W, D.n)
    want = Partition(parts, total=len(wset))
    is_w = [False] * D.n
    for w in wset:
        is_w[w] = True
    nodes = 0

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _OutOfBudget

    def cycles_through(root: int, used: set[int], allowed_counts: set[int]):
        top = max(allowed_counts)
        path = [root]
        on_path = {root}

        def grow(v: int, count: int):
            tick()
            for u in sorted(D.succ[v]):
                if u == root and len(path) >= 2 and count in allowed_counts:
                    yield list(path), count
                if u in used or u in on_path:
                    continue
                c = count + is_w[u]
                if c > top:
                    continue
                path.append(u)
                on_path.add(u)
                yield from grow(u, c)
                path.pop()
                on_path.discard(u)

        yield from grow(root, 1)

    def solve(used: set[int], remaining: Counter) -> list[list[int]] | None:
        tick()
        uncovered = [w for w in wset if w not in used]
        if not uncovered:
            return []
        for w in uncovered:
            if D.succ[w] <= used or D.pred[w] <= used:
                return None
        root = uncovered[0]
        counts = {c for c, m in remaining.items() if m > 0}
        for cyc, count in cycles_through(root, used, counts):
            remaining[count] -= 1
            rest = solve(used | set(cyc), remaining)
            remaining[count] += 1
            if rest is not None:
                return [cyc] + rest
        return None

    try:
        found = solve(set(), Counter(want))
    except _OutOfBudget:
        return Verdict(Status.BUDGET_EXCEEDED, nodes=nodes)
    if found is None:
        return Verdict(Status.NO, nodes=nodes)
    return Verdict(Status.YES, CycleFactorCertificate.from_cycles(found, wset), nodes=nodes)


def oracle_cyclable(D: Digraph, W: Iterable[int], budget: int = DEFAULT_BUDGET) -> Verdict:
    """Decide whether a single directed cycle contains every vertex of ``W``.

    With ``W`` empty the question becomes whether ``D`` has any cycle.
    """
    wset = VertexSet(W, D.n)
    roots = [wset[0]] if wset else list(range(D.n))
    need = set(wset)
    nodes = 0

    def search(root: int) -> list[int] | None:
        path = [root]
        on_path = {root}

        def grow(v: int) -> list[int] | None:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise _OutOfBudget
            if len(path) >= 2 and root in D.succ[v] and need <= on_path:
                return list(path)
            for u in sorted(D.succ[v]):
                if u in on_path or (not wset and u < root):
                    continue
                path.append(u)
                on_path.add(u)
                got = grow(u)
                if got is not None:
                    return got
                path.pop()
                on_path.discard(u)
            return None

        return grow(root)

    try:
        for root in roots:
            cyc = search(root)
            if cyc is not None:
                return Verdict(Status.YES, cycle=tuple(cyc), nodes=nodes)
    except _OutOfBudget:
        return Verdict(Status.BUDGET_EXCEEDED, nodes=nodes)
    return Verdict(Status.NO, nodes=nodes)


def oracle_digon_factor(D: Digraph) -> Verdict:
    """Whether the vertex set splits into disjoint digons (a perfect matching
    of the graph formed by the digons)."""
    if D.n % 2:
        return Verdict(Status.NO)
    G = nx.Graph()
    G.add_nodes_from(range(D.n))
    G.add_edges_from(tuple(e) for e in collapse_digons(D))
    matching = nx.max_weight_matching(G, maxcardinality=True)
    if 2 * len(matching) != D.n:
        return Verdict(Status.NO)
    cycles = [sorted(e) for e in matching]
    return Verdict(Status.YES, CycleFactorCertificate.from_cycles(cycles, range(D.n)))
