"""Bitmask dynamic programs over small vertex sets (local ids ``0..m-1``).

``adj[i]`` is a bitmask of the local vertices that may follow ``i``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence


def ham_path_lex_least(adj: Sequence[int], start: int, end: int, within: int | None = None) -> list[int] | None:
    """Lexicographically least Hamiltonian path of ``within`` from ``start`` to
    ``end`` (both included), or ``None``."""
    m = len(adj)
    full = (1 << m) - 1 if within is None else within
    if not (full >> start) & 1 or not (full >> end) & 1:
        return None
    if start == end:
        return [start] if full == 1 << start else None

    @lru_cache(maxsize=None)
    def completes(visited: int, v: int) -> bool:
        if visited == full:
            return v == end
        options = adj[v] & full & ~visited
        if visited | (1 << end) != full:
            options &= ~(1 << end)
        while options:
            low = options & -options
            w = low.bit_length() - 1
            if completes(visited | low, w):
                return True
            options ^= low
        return False

    if not completes(1 << start, start):
        return None
    path = [start]
    visited = 1 << start
    v = start
    while visited != full:
        options = adj[v] & full & ~visited
        if visited | (1 << end) != full:
            options &= ~(1 << end)
        while options:
            low = options & -options
            w = low.bit_length() - 1
            if completes(visited | low, w):
                break
            options ^= low
        path.append(w)
        visited |= 1 << w
        v = w
    return path


def ham_cycle_lex_least(adj: Sequence[int], within: int | None = None) -> list[int] | None:
    """Lexicographically least Hamiltonian cycle of ``within`` rooted at its
    smallest vertex, or ``None``.  Needs at least two vertices."""
    m = len(adj)
    full = (1 << m) - 1 if within is None else within
    if full.bit_count() < 2:
        return None
    root = (full & -full).bit_length() - 1
    best: list[int] | None = None
    preds = [j for j in range(m) if (full >> j) & 1 and j != root and (adj[j] >> root) & 1]
    for last in preds:
        path = ham_path_lex_least(adj, root, last, full)
        if path is not None and (best is None or path < best):
            best = path
    return best
