"""Rewrite moves on alternating cycles and paths.

Every move separates two failure kinds: :class:`PreconditionError` when the
caller's input does not meet the move's guard, and :class:`TheoremViolation`
when the guard holds but the promised object cannot be found.  Moves never
mutate their inputs and re-validate their outputs structurally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from ._cycles import cycles_from_root, mask_of, shortest_disjoint_pair
from ._paths import ham_cycle_lex_least, ham_path_lex_least
from .bipartite import (
    DEFAULT_SIZE_CAP,
    BipartiteRep,
    FeasibleCycle,
    FeasiblePath,
    endpoint_degree,
    is_good_path,
    local_join_masks,
    select_good_feasible_path,
    xv,
    yv,
)
from .digraph import bits
from .errors import BudgetExceeded, PreconditionError, TheoremViolation

log = logging.getLogger("dcf.moves")


def repro_bundle(rep: BipartiteRep, **extra: object) -> dict:
    bundle = {"n": rep.n, "cross": sorted(rep.cross), "marked": sorted(rep.marked)}
    bundle.update(extra)
    return bundle


def trace(move: str, inputs: object, outputs: object) -> None:
    """Detail line for a move evaluated inside a larger search."""
    log.debug("%s in=%s out=%s", move, inputs, outputs)


def log_move(move: str, inputs: object, outputs: object) -> None:
    """One line per move a solver actually applies."""
    log.info("%s in=%s out=%s", move, inputs, outputs)


# -- insertion of one marked pair -------------------------------------------------


def insertion_slots(rep: BipartiteRep, pairs: tuple[int, ...], f: int) -> list[int]:
    """Positions ``i`` such that ``y_{a_i} x_f`` and ``y_f x_{a_{i+1}}`` are both
    edges (indices cyclic)."""
    r = len(pairs)
    return [i for i in range(r) if rep.joined(pairs[i], f) and rep.joined(f, pairs[(i + 1) % r])]


def lemma1_insert(rep: BipartiteRep, C: FeasibleCycle, f: int) -> FeasibleCycle:
    """Splice the marked matching edge ``x_f y_f`` into ``C``.

    Requires ``e({x_f, y_f}, C) >= r + 1``; each consecutive pair
    ``(y_{a_i}, x_{a_{i+1}})`` absorbs at most one of those edges unless it is
    fully joined to ``{x_f, y_f}``, so a slot must exist.
    """
    if f not in rep.marked:
        raise PreconditionError(f"x{f}y{f} is not an M0 edge")
    if f in C.pairs:
        raise PreconditionError(f"x{f}y{f} already lies on the cycle")
    r = C.r
    degree = rep.e((xv(f), yv(f)), C.vertices)
    if degree < r + 1:
        raise PreconditionError(f"e({{x{f},y{f}}}, C) = {degree} < r + 1 = {r + 1}")
    slots = insertion_slots(rep, C.pairs, f)
    if not slots:
        raise TheoremViolation(
            "no insertion slot despite e >= r + 1",
            repro_bundle(rep, cycle=list(C.pairs), f=f),
        )
    i = slots[0]
    out = FeasibleCycle.of(rep, C.pairs[: i + 1] + (f,) + C.pairs[i + 1 :])
    trace("lemma1_insert", f"r={r}", f"r={out.r}")
    return out


# -- shortening a pair of cycles ----------------------------------------------------


@dataclass(frozen=True)
class ShortenResult:
    first: FeasibleCycle
    second: FeasibleCycle
    m0_decreased: bool


def lemma2_guard(rep: BipartiteRep, C1: FeasibleCycle, C2: FeasibleCycle) -> bool:
    """True iff the pair satisfies the shortening hypothesis (integer form)."""
    s, t = C1.m0, C2.m0
    if set(C1.pairs) & set(C2.pairs):
        return False
    if not (t >= s >= 2 and t >= 3):
        return False
    c1 = set(C1.vertices)
    sigma = sum(rep.e((xv(f), yv(f)), c1) for f in C2.pairs if f in rep.marked)
    # sigma > (3/4) * t * l(C1) with l(C1) = 2 r1
    return 2 * sigma > 3 * t * C1.r


def lemma2_shorten(rep: BipartiteRep, C1: FeasibleCycle, C2: FeasibleCycle) -> ShortenResult:
    """Two disjoint feasible cycles inside ``[V(C1 u C2)]`` with strictly smaller
    total length; the shortest such pair (then lexicographically first)."""
    if set(C1.pairs) & set(C2.pairs):
        raise PreconditionError("cycles are not disjoint")
    if not lemma2_guard(rep, C1, C2):
        raise PreconditionError(
            f"shortening guard fails (s={C1.m0}, t={C2.m0}, need t>=s>=2, t>=3 and the cross-edge bound)"
        )
    allowed = mask_of(C1.pairs) | mask_of(C2.pairs)
    found = shortest_disjoint_pair(rep.in_mask, allowed, rep.marked_mask, C1.r + C2.r)
    if found is None:
        raise TheoremViolation(
            "no shorter disjoint pair despite the shortening guard",
            repro_bundle(rep, c1=list(C1.pairs), c2=list(C2.pairs)),
        )
    a, b = (FeasibleCycle.of(rep, p) for p in found)
    result = ShortenResult(a, b, a.m0 + b.m0 < C1.m0 + C2.m0)
    trace("lemma2_shorten", f"r={C1.r}+{C2.r}", f"r={a.r}+{b.r}")
    return result


# -- auxiliary oriented bipartite graphs ------------------------------------------


@dataclass(frozen=True)
class OrientedBipartite:
    """Orientation of a bipartite graph: sides ``0..left-1`` and
    ``left..left+right-1``."""

    left: int
    right: int
    arcs: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, left: int, right: int, arcs: Iterable[tuple[int, int]]) -> OrientedBipartite:
        arcs = frozenset((int(u), int(v)) for u, v in arcs)
        size = left + right
        for u, v in arcs:
            if not (0 <= u < size and 0 <= v < size) or (u < left) == (v < left):
                raise PreconditionError(f"arc ({u},{v}) does not cross the bipartition")
            if (v, u) in arcs:
                raise PreconditionError(f"digon between {u} and {v}: not an oriented graph")
        return cls(left, right, arcs)

    @property
    def order(self) -> int:
        return self.left + self.right


def lemma3_find_arc(B: OrientedBipartite) -> tuple[int, int] | None:
    """First arc ``uv`` (lexicographic) with ``d^-(u) + d^+(v) < r/2``.

    ``None`` when ``B`` has no arcs, and also on the equality boundary where
    every arc attains exactly ``r/2`` (for instance the directed 4-cycle).
    """
    size = B.order
    outdeg = [0] * size
    indeg = [0] * size
    for u, v in B.arcs:
        if (v, u) in B.arcs:
            raise PreconditionError(f"digon between {u} and {v}: not an oriented graph")
        outdeg[u] += 1
        indeg[v] += 1
    for u, v in sorted(B.arcs):
        if 2 * (indeg[u] + outdeg[v]) < size:
            return (u, v)
    return None


# -- closing a path into a spanning cycle ---------------------------------------


def has_shorter_same_m0_path(rep: BipartiteRep, P: FeasiblePath) -> bool:
    """Whether ``[V(P)]`` holds a feasible path with the marked edges of ``P``
    but fewer matching edges."""
    pairs = list(P.pairs)
    if len(pairs) == 1:
        return False
    adj = local_join_masks(rep, pairs)
    marked_local = [k for k, p in enumerate(pairs) if p in rep.marked]
    unmarked_local = [k for k, p in enumerate(pairs) if p not in rep.marked]
    base = mask_of(marked_local)
    for size in range(len(unmarked_local)):
        for extra in combinations(unmarked_local, size):
            within = base | mask_of(extra)
            if len(marked_local) == 1 and within == base:
                return True
            for s in marked_local:
                for t in marked_local:
                    if s != t and ham_path_lex_least(adj, s, t, within) is not None:
                        return True
    return False


def _merge_cycles(rep: BipartiteRep, c1: tuple[int, ...], c2: tuple[int, ...]) -> tuple[int, ...] | None:
    """Join two disjoint alternating cycles by exchanging one non-matching edge
    of each for two cross edges."""
    for j in range(len(c1)):
        c, c_next = c1[j], c1[(j + 1) % len(c1)]
        for l in range(len(c2)):
            d, d_next = c2[l], c2[(l + 1) % len(c2)]
            if rep.joined(c, d_next) and rep.joined(d, c_next):
                first = c1[j + 1 :] + c1[: j + 1]
                second = c2[l + 1 :] + c2[: l + 1]
                return first + second
    return None


def auxiliary_orientation(rep: BipartiteRep, c1: tuple[int, ...], c2: tuple[int, ...]) -> OrientedBipartite:
    """Oriented bipartite graph on the non-matching edges of two cycles.

    Left vertex ``j`` is the edge ``y_{c1[j]} x_{c1[j+1]}``; right vertex
    ``len(c1) + l`` is ``y_{c2[l]} x_{c2[l+1]}``.  Left-to-right arcs record
    ``x_{c1[j+1]} y_{c2[l]}``; right-to-left arcs record ``x_{c2[l+1]} y_{c1[j]}``.
    A would-be digon is exactly a merge, so callers build this only after
    :func:`_merge_cycles` has failed.
    """
    left, right = len(c1), len(c2)
    arcs = []
    for j in range(left):
        for l in range(right):
            if rep.joined(c2[l], c1[(j + 1) % left]):
                arcs.append((j, left + l))
            if rep.joined(c1[j], c2[(l + 1) % right]):
                arcs.append((left + l, j))
    return OrientedBipartite.of(left, right, arcs)


def _alternative_path(
    c1: tuple[int, ...], c2: tuple[int, ...], arc: tuple[int, int]
) -> tuple[int, ...]:
    """Spanning alternating path whose endpoints are the edge dual to ``arc``."""
    left = len(c1)
    u, v = arc
    if u < left:
        j, l = u, v - left
        return c2[l + 1 :] + c2[: l + 1] + c1[j + 1 :] + c1[: j + 1]
    l, j = u - left, v
    return c1[j + 1 :] + c1[: j + 1] + c2[l + 1 :] + c2[: l + 1]


def lemma4_close_path(
    rep: BipartiteRep,
    P: FeasiblePath,
    size_cap: int = DEFAULT_SIZE_CAP,
    check: bool = True,
) -> FeasibleCycle:
    """Feasible cycle on exactly ``V(P)`` for a good path with heavy endpoints.

    Tries the closing edge, then every crossing split of ``P`` into two cycles
    followed by an edge-exchange merge; when a split admits no merge the
    auxiliary orientation is consulted for a path with lighter endpoints.
    Exhaustive Hamiltonian search inside ``[V(P)]`` is the last resort.
    """
    if 2 * P.r > size_cap:
        raise PreconditionError(f"[V(P)] has {2 * P.r} vertices, above the cap of {size_cap}")
    if P.r < 2:
        raise PreconditionError("a spanning cycle needs at least two matching edges")
    ends = endpoint_degree(rep, P.pairs[0], P.pairs[-1], P.pairs)
    if check:
        if 2 * ends < 3 * P.r:
            raise PreconditionError(f"e(ends, P) = {ends} < 3r/2 with r = {P.r}")
        if not is_good_path(rep, P, size_cap):
            raise PreconditionError("path is not a good feasible path")
        if has_shorter_same_m0_path(rep, P):
            raise PreconditionError("[V(P)] holds a shorter feasible path with the same M0 edges")

    seen: set[tuple[int, ...]] = set()
    current = P.pairs
    while current not in seen:
        seen.add(current)
        r = len(current)
        if rep.joined(current[-1], current[0]):
            out = FeasibleCycle.of(rep, current)
            trace("lemma4_close_path/direct", f"r={r}", f"r={out.r}")
            return out
        lighter: tuple[int, ...] | None = None
        current_ends = endpoint_degree(rep, current[0], current[-1], current)
        for i in range(2, r - 1):
            if not (rep.joined(current[i - 1], current[0]) and rep.joined(current[-1], current[i])):
                continue
            c1, c2 = current[:i], current[i:]
            merged = _merge_cycles(rep, c1, c2)
            if merged is not None:
                out = FeasibleCycle.of(rep, merged)
                trace("lemma4_close_path/crossing", f"r={r}", f"r={out.r}")
                return out
            arc = lemma3_find_arc(auxiliary_orientation(rep, c1, c2))
            if arc is not None and lighter is None:
                alt = _alternative_path(c1, c2, arc)
                if (
                    alt[0] in rep.marked
                    and alt[-1] in rep.marked
                    and endpoint_degree(rep, alt[0], alt[-1], alt) < current_ends
                ):
                    lighter = alt
        if lighter is None:
            break
        current = lighter

    pairs = sorted(P.pairs)
    cyc = ham_cycle_lex_least(local_join_masks(rep, pairs))
    if cyc is None:
        raise TheoremViolation(
            "no feasible cycle spans V(P)",
            repro_bundle(rep, path=list(P.pairs)),
        )
    out = FeasibleCycle.of(rep, [pairs[k] for k in cyc])
    trace("lemma4_close_path/exhaustive", f"r={P.r}", f"r={out.r}")
    return out


# -- base packing ------------------------------------------------------------------


def _two_marked_cycle(rep: BipartiteRep, w: int, free: int, max_len: int) -> tuple[int, ...] | None:
    """Shortest, then lexicographically least, cycle through ``w`` inside
    ``free`` carrying exactly two marked edges."""
    for length in range(2, max_len + 1):
        for cyc in cycles_from_root(rep.in_mask, w, free, length, rep.marked_mask, 2, 2):
            return cyc
    return None


def _two_disjoint(rep: BipartiteRep, pool: int, max_len: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    marked = rep.marked_mask
    for w in bits(pool & marked):
        for length in range(2, max_len + 1):
            for a in cycles_from_root(rep.in_mask, w, pool, length, marked, 2, 2):
                rest = pool & ~mask_of(a)
                for w2 in bits(rest & marked):
                    b = _two_marked_cycle(rep, w2, rest, max_len)
                    if b is not None:
                        return a, b
    return None


def claim1_base_packing(
    rep: BipartiteRep,
    check: bool = True,
    budget: int = 100_000,
    stats: dict | None = None,
) -> list[FeasibleCycle]:
    """``floor(|M0|/2)`` disjoint feasible cycles of M0-length exactly 2.

    Greedy seeding first; then a repacking move that frees one cycle and looks
    for two disjoint replacements among the freed and uncovered vertices; then
    exact backtracking within ``budget`` explored nodes.
    """
    target = len(rep.marked) // 2
    if target == 0:
        return []
    if check:
        delta = rep.min_marked_degree()
        if 4 * delta < 3 * rep.n + 1:
            raise PreconditionError(f"delta(M0) = {delta} below (3n+1)/4 with n = {rep.n}")
    max_len = rep.n
    stats = stats if stats is not None else {}
    free = (1 << rep.n) - 1
    chosen: list[tuple[int, ...]] = []
    for w in sorted(rep.marked):
        if len(chosen) == target:
            break
        if not (free >> w) & 1:
            continue
        cyc = _two_marked_cycle(rep, w, free, max_len)
        if cyc is not None:
            chosen.append(cyc)
            free &= ~mask_of(cyc)
    stats["base_greedy"] = len(chosen)

    improved = True
    while len(chosen) < target and improved:
        improved = False
        for k, cyc in enumerate(chosen):
            pool = free | mask_of(cyc)
            pair = _two_disjoint(rep, pool, max_len)
            if pair is not None:
                a, b = pair
                chosen[k : k + 1] = [a, b]
                free = pool & ~mask_of(a) & ~mask_of(b)
                stats["base_repack"] = stats.get("base_repack", 0) + 1
                trace("claim1_repack", f"cycles={len(chosen) - 1}", f"cycles={len(chosen)}")
                improved = True
                break

    if len(chosen) < target:
        stats["base_exact"] = True
        chosen = _exact_packing(rep, target, budget)
        if chosen is None:
            raise TheoremViolation(
                "base packing does not exist",
                repro_bundle(rep, target=target),
            )
    out = [FeasibleCycle.of(rep, c) for c in chosen]
    if any(c.m0 != 2 for c in out) or len({p for c in out for p in c.pairs}) != sum(c.r for c in out):
        raise TheoremViolation("base packing failed structural re-validation", repro_bundle(rep))
    return out


def _exact_packing(rep: BipartiteRep, target: int, budget: int) -> list[tuple[int, ...]] | None:
    marked = sorted(rep.marked)
    spare = len(marked) - 2 * target
    nodes = 0

    def rec(idx: int, used: int, skips: int, acc: list[tuple[int, ...]]) -> list[tuple[int, ...]] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"base packing search exceeded {budget} nodes")
        if len(acc) == target:
            return list(acc)
        while idx < len(marked) and (used >> marked[idx]) & 1:
            idx += 1
        if idx == len(marked):
            return None
        w = marked[idx]
        free = ~used & ((1 << rep.n) - 1)
        for length in range(2, rep.n + 1):
            for cyc in cycles_from_root(rep.in_mask, w, free, length, rep.marked_mask, 2, 2):
                acc.append(cyc)
                got = rec(idx + 1, used | mask_of(cyc), skips, acc)
                acc.pop()
                if got is not None:
                    return got
        if skips > 0:
            return rec(idx + 1, used | (1 << w), skips - 1, acc)
        return None

    return rec(0, 0, spare, [])
