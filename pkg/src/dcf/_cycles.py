"""Depth-bounded enumeration of alternating cycles in pair order.

``nxt[a]`` is the bitmask of pair indices ``b`` that may follow ``a`` (the
edge ``y_a x_b`` exists).  For a :class:`BipartiteRep` that is ``in_mask``.
Cycles come out as tuples rooted at a prescribed or minimal pair.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .digraph import bits


def cycles_from_root(
    nxt: Sequence[int],
    root: int,
    allowed: int,
    length: int,
    marked: int,
    m0_lo: int = 0,
    m0_hi: int | None = None,
) -> Iterator[tuple[int, ...]]:
    """Cycles of exactly ``length`` pairs through ``root`` using only pairs in
    ``allowed`` (``root`` is always allowed), in lexicographic order, with
    M0-length in ``[m0_lo, m0_hi]``."""
    if length < 2:
        return
    hi = length if m0_hi is None else m0_hi
    path = [root]
    start_m0 = (marked >> root) & 1
    allowed &= ~(1 << root)

    def rec(v: int, visited: int, m0: int) -> Iterator[tuple[int, ...]]:
        if len(path) == length:
            if (nxt[v] >> root) & 1 and m0_lo <= m0 <= hi:
                yield tuple(path)
            return
        left = length - len(path)
        for w in bits(nxt[v] & allowed & ~visited):
            m = m0 + ((marked >> w) & 1)
            if m > hi or m + left - 1 < m0_lo:
                continue
            path.append(w)
            yield from rec(w, visited | (1 << w), m)
            path.pop()

    yield from rec(root, 1 << root, start_m0)


def rooted_cycles(
    nxt: Sequence[int],
    allowed: int,
    length: int,
    marked: int,
    m0_lo: int = 0,
    m0_hi: int | None = None,
) -> Iterator[tuple[int, ...]]:
    """All cycles of ``length`` pairs inside ``allowed``, each reported once,
    rooted at its smallest pair."""
    rest = allowed
    for root in bits(allowed):
        rest &= ~(1 << root)
        yield from cycles_from_root(nxt, root, rest, length, marked, m0_lo, m0_hi)


def mask_of(items: Sequence[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def shortest_disjoint_pair(
    nxt: Sequence[int], allowed: int, marked: int, below: int
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Two disjoint cycles of M0-length >= 2 inside ``allowed`` with fewer than
    ``below`` pairs in total, preferring the smallest total and then the
    lexicographically first pair; ``None`` if none exists."""
    for total in range(4, below):
        for la in range(2, total // 2 + 1):
            lb = total - la
            for a in rooted_cycles(nxt, allowed, la, marked, 2):
                rest = allowed & ~mask_of(a)
                for b in rooted_cycles(nxt, rest, lb, marked, 2):
                    return a, b
    return None
