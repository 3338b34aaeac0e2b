"""Instance families: extremal constructions, random digraphs, exhaustive
enumeration."""

from __future__ import annotations

import json
import random
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterator

from .digraph import Digraph, VertexSet, complete_symmetric, min_semi_degree
from .errors import DcfError, PreconditionError

ENUMERATION_LIMIT = 4
HUGE_ENUMERATION_LIMIT = 5


def load_orientation_table(path: str | Path | None = None) -> dict:
    """The part layout and domination directions for the block constructions.

    Each part size is ``a*k + b`` given as ``[name, a, b]``; each domination
    ``[P, Q]`` adds every arc from part ``P`` to part ``Q``.
    """
    if path is None:
        text = resources.files("dcf").joinpath("data/orientations.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _from_table(entry: dict, k: int) -> tuple[Digraph, dict[str, range]]:
    parts: dict[str, range] = {}
    start = 0
    for name, a, b in entry["parts"]:
        size = a * k + b
        if size < 1:
            raise PreconditionError(f"part {name} would be empty for k={k}")
        parts[name] = range(start, start + size)
        start += size
    arcs: set[tuple[int, int]] = set()
    for name in entry.get("complete_within", []):
        block = parts[name]
        arcs.update((u, v) for u in block for v in block if u != v)
    for src, dst in entry.get("dominations", []):
        arcs.update((u, v) for u in parts[src] for v in parts[dst])
    D = Digraph(start, sorted(arcs))
    a, b = entry["min_semi_degree"]
    measured = min_semi_degree(D, range(D.n))
    if measured != a * k + b:
        raise DcfError(f"orientation table gives min semi-degree {measured}, expected {a * k + b}")
    return D, parts


def gen_d1(k: int, table: dict | None = None) -> Digraph:
    """Four complete symmetric blocks U, X (order 4k-1) and Y, Z (order 4k);
    order 16k-2, minimum semi-degree 12k-3, and no spanning set of disjoint
    digons."""
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    return _from_table((table or load_orientation_table())["d1"], k)[0]


def d1_parts(k: int, table: dict | None = None) -> dict[str, range]:
    return _from_table((table or load_orientation_table())["d1"], k)[1]


def gen_d2(k: int, table: dict | None = None) -> Digraph:
    """A complete symmetric block of order 2k-1 joined both ways to an
    independent set of order k+1."""
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    return _from_table((table or load_orientation_table())["d2"], k)[0]


def d2_parts(k: int, table: dict | None = None) -> dict[str, range]:
    return _from_table((table or load_orientation_table())["d2"], k)[1]


def gen_complete_bipartite_sym(a: int, b: int) -> Digraph:
    """Symmetric complete bipartite digraph with sides ``0..a-1`` and ``a..a+b-1``."""
    if a < 1 or b < 1:
        raise PreconditionError(f"side sizes must be >= 1, got {a}, {b}")
    arcs = [(u, v) for u in range(a) for v in range(a, a + b)]
    arcs += [(v, u) for u, v in arcs]
    return Digraph(a + b, arcs)


def gen_random(n: int, arc_probability: float, seed: int) -> Digraph:
    """Each of the ``n(n-1)`` possible arcs independently, in sorted order."""
    if not 0.0 <= arc_probability <= 1.0:
        raise PreconditionError(f"arc probability must lie in [0, 1], got {arc_probability}")
    if arc_probability == 1.0:
        return complete_symmetric(n)
    rng = random.Random(seed)
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < arc_probability])


def gen_random_min_semidegree(
    n: int,
    w_size: int,
    target: int,
    seed: int,
    max_tries: int = 10_000,
) -> tuple[Digraph, VertexSet]:
    """Random ``(D, W)`` with ``|W| = w_size`` and ``min_semi_degree(D, W) >= target``.

    Each try draws one density for arcs touching W (at least the density that
    makes the target the expected degree) and an independent density for the
    remaining arcs, then rejects until the gate holds.
    """
    if not 0 <= w_size <= n:
        raise PreconditionError(f"|W| = {w_size} does not fit in n = {n}")
    if w_size == 0:
        raise PreconditionError("W must be nonempty")
    if target > n - 1:
        raise PreconditionError(f"target {target} exceeds n - 1 = {n - 1}")
    rng = random.Random(seed)
    W = VertexSet(rng.sample(range(n), w_size))
    in_w = set(W)
    low = max(0.0, target / (n - 1)) if n > 1 else 0.0
    for _ in range(max_tries):
        p_w = low + (1.0 - low) * rng.random()
        p_free = rng.random()
        arcs = []
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                p = p_w if (u in in_w or v in in_w) else p_free
                if rng.random() < p:
                    arcs.append((u, v))
        D = Digraph(n, arcs)
        if min_semi_degree(D, W) >= target:
            return D, W
    raise DcfError(f"no instance with min semi-degree >= {target} after {max_tries} tries")


def enumeration_size(n: int) -> int:
    return 1 << (n * (n - 1))


def enumerate_digraphs(
    n: int,
    huge: bool = False,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[Digraph]:
    """Every labeled digraph on ``n`` vertices exactly once.

    Instance ``i`` includes the ``j``-th arc of the sorted list of all
    ``n(n-1)`` ordered pairs iff bit ``m-1-j`` of ``i`` is set, so instances
    come out in lexicographic order of their arc-indicator vectors.
    ``start``/``stop`` select an index range for splitting across workers.
    """
    limit = HUGE_ENUMERATION_LIMIT if huge else ENUMERATION_LIMIT
    if n > limit:
        raise PreconditionError(f"enumeration at n={n} needs the huge flag (limit {limit})")
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = len(pairs)
    total = 1 << m
    stop = total if stop is None else min(stop, total)
    if start == 0 and stop == total:
        for picks in product((False, True), repeat=m):
            yield Digraph(n, [a for a, keep in zip(pairs, picks) if keep])
        return
    for i in range(start, stop):
        yield Digraph(n, [pairs[j] for j in range(m) if (i >> (m - 1 - j)) & 1])
