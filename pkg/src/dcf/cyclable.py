"""Cycles through a prescribed vertex set, and the greedy factor for large
host digraphs.

Paths and cycles here are plain vertex lists of the digraph.  A cycle
``[c_0, ..., c_{m-1}]`` uses the arcs ``c_i -> c_{i+1}`` and the wrap arc.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Literal, Sequence

from .digraph import (
    CycleFactorCertificate,
    Digraph,
    Partition,
    VertexSet,
    canonical_cycle,
    min_semi_degree,
    validate_certificate,
)
from .errors import BelowThresholdError, BudgetExceeded, DcfError, PreconditionError, TheoremViolation
from .exchange import log_move

Mode = Literal["guaranteed", "best_effort"]

DEFAULT_BUDGET = 200_000
ORACLE_ORDER = 8
BYPASS_DEPTH = 3


class MergeError(DcfError):
    """No insertion order exists for the requested set."""


def _bundle(D: Digraph, **extra: object) -> dict:
    bundle = {"n": D.n, "arcs": D.sorted_arcs()}
    bundle.update(extra)
    return bundle


def cyclable_gate(delta: int, n: int) -> bool:
    return 2 * delta >= n


# -- short paths between W-vertices ----------------------------------------------


def short_connecting_paths(
    D: Digraph, W: Iterable[int], u: int, v: int, check: bool = True
) -> tuple[list[int], list[int]]:
    """Internally disjoint paths ``u -> v`` and ``v -> u`` of length at most 2."""
    W = VertexSet(W, D.n)
    if u == v or u not in W or v not in W:
        raise PreconditionError(f"need two distinct W-vertices, got {u} and {v}")
    if check:
        delta = min_semi_degree(D, W)
        if not cyclable_gate(delta, D.n):
            raise BelowThresholdError(
                f"min semi-degree {delta} below n/2 with n = {D.n}", measured=delta, required=-(-D.n // 2)
            )

    def options(a: int, b: int) -> list[list[int]]:
        out = [[a, b]] if D.has_arc(a, b) else []
        out += [[a, w, b] for w in sorted(D.succ[a] & D.pred[b])]
        return out

    for p1 in options(u, v):
        for p2 in options(v, u):
            if not set(p1[1:-1]) & set(p2[1:-1]):
                return p1, p2
    if check:
        raise TheoremViolation("no short connecting paths under the degree gate", _bundle(D, u=u, v=v))
    raise DcfError(f"no internally disjoint short paths between {u} and {v}")


# -- insertion ------------------------------------------------------------------------


def path_degree(D: Digraph, P: Sequence[int], u: int) -> int:
    on = set(P)
    return len(D.succ[u] & on) + len(D.pred[u] & on)


def insert_vertex(D: Digraph, P: Sequence[int], u: int) -> list[int]:
    """Put ``u`` between some consecutive ``v_i, v_{i+1}`` of ``P`` with
    ``v_i -> u -> v_{i+1}``.

    Needs ``d_P(u) >= p + 2`` with ``p`` the number of vertices of ``P``.  At
    most ``p + 1`` arcs fit without a slot: one per consecutive pair plus
    ``u -> v_0`` and ``v_last -> u``.
    """
    if u in P:
        raise PreconditionError(f"vertex {u} already on the path")
    p = len(P)
    d = path_degree(D, P, u)
    if d < p + 2:
        raise PreconditionError(f"d_P({u}) = {d} < p + 2 = {p + 2}")
    for i in range(p - 1):
        if D.has_arc(P[i], u) and D.has_arc(u, P[i + 1]):
            return list(P[: i + 1]) + [u] + list(P[i + 1 :])
    raise TheoremViolation("no insertion slot despite d_P(u) >= p + 2", _bundle(D, path=list(P), u=u))


def _slots(D: Digraph, seq: Sequence[int], first: int, last: int, cyclic: bool) -> list[int]:
    m = len(seq)
    stop = m if cyclic else m - 1
    return [i for i in range(stop) if D.has_arc(seq[i], first) and D.has_arc(last, seq[(i + 1) % m])]


def _insertable(D: Digraph, seq: Sequence[int], z: int, cyclic: bool = False) -> bool:
    return bool(_slots(D, seq, z, z, cyclic))


def _merge_chains(
    D: Digraph, seq: list[int], K: Sequence[int], host: Sequence[int], cyclic: bool
) -> list[int] | None:
    """Insert every vertex of ``K`` by splicing in subpaths of ``host``.

    A subpath ``host[a..b]`` that avoids ``seq`` goes between ``seq[i]`` and
    ``seq[i+1]`` when ``seq[i] -> host[a]`` and ``host[b] -> seq[i+1]``.
    Shortest subpaths are preferred, so a vertex insertable on its own is
    inserted alone.
    """
    seq = list(seq)
    index = {h: i for i, h in enumerate(host)}
    pending = [z for z in host if z in set(K)]
    while pending:
        on = set(seq)
        pending = [z for z in pending if z not in on]
        if not pending:
            break
        progress = False
        for z in pending:
            at = index[z]
            best = None
            for span in range(len(host)):
                for a in range(max(0, at - span), at + 1):
                    b = a + span
                    if b >= len(host):
                        continue
                    chunk = host[a : b + 1]
                    if on & set(chunk):
                        continue
                    slots = _slots(D, seq, chunk[0], chunk[-1], cyclic)
                    if slots:
                        best = (slots[0], chunk)
                        break
                if best is not None:
                    break
            if best is not None:
                i, chunk = best
                seq = seq[: i + 1] + list(chunk) + seq[i + 1 :]
                progress = True
                break
        if not progress:
            return None
    return seq


def merge_insertable_set(
    D: Digraph,
    Q: Sequence[int],
    K: Iterable[int],
    host_path: Sequence[int] | None = None,
) -> list[int]:
    """A path with the endpoints of ``Q`` spanning at least ``K`` and ``V(Q)``.

    Without ``host_path`` the vertices of ``K`` are inserted one at a time,
    trying every order for ``|K| <= 6`` and most-constrained-first with
    backtracking beyond that.  With ``host_path`` (a path of ``D`` disjoint
    from ``Q`` that contains ``K``) whole subpaths of the host may be spliced
    in, which is what makes a set insertable when its members compete for
    the same slot.
    """
    K = list(dict.fromkeys(K))
    Q = list(Q)
    if set(K) & set(Q):
        raise PreconditionError("K must be disjoint from Q")
    if not K:
        return Q
    if host_path is not None:
        host = list(host_path)
        if not set(K) <= set(host) or set(host) & set(Q):
            raise PreconditionError("host path must contain K and avoid Q")
        for i in range(len(host) - 1):
            if not D.has_arc(host[i], host[i + 1]):
                raise PreconditionError(f"host path misses arc ({host[i]},{host[i + 1]})")
        merged = _merge_chains(D, Q, K, host, cyclic=False)
        if merged is None:
            raise MergeError(f"could not splice {K} into the path")
        return merged
    for z in K:
        if not _insertable(D, Q, z):
            raise PreconditionError(f"vertex {z} cannot be inserted into the path")

    def attempt(order: Sequence[int]) -> list[int] | None:
        seq = Q
        for z in order:
            s = _slots(D, seq, z, z, False)
            if not s:
                return None
            seq = seq[: s[0] + 1] + [z] + seq[s[0] + 1 :]
        return seq

    if len(K) <= 6:
        for order in permutations(K):
            got = attempt(order)
            if got is not None:
                return got
        raise MergeError(f"no insertion order for {K}")

    def backtrack(seq: list[int], left: list[int]) -> list[int] | None:
        if not left:
            return seq
        ranked = sorted(left, key=lambda z: (len(_slots(D, seq, z, z, False)), z))
        z = ranked[0]
        for i in _slots(D, seq, z, z, False):
            got = backtrack(seq[: i + 1] + [z] + seq[i + 1 :], [y for y in left if y != z])
            if got is not None:
                return got
        return None

    got = backtrack(Q, K)
    if got is None:
        raise MergeError(f"no insertion order for {K}")
    return got


# -- bypasses -------------------------------------------------------------------------


@dataclass(frozen=True)
class Bypass:
    """Path leaving the cycle at ``x`` and re-entering at ``y`` through the
    off-cycle vertex ``v``; ``x == y`` is allowed."""

    path: tuple[int, ...]
    v: int
    x_index: int
    y_index: int
    cycle_length: int

    @property
    def x(self) -> int:
        return self.path[0]

    @property
    def y(self) -> int:
        return self.path[-1]

    @property
    def first_leg(self) -> tuple[int, ...]:
        return self.path[: self.path.index(self.v) + 1]

    @property
    def second_leg(self) -> tuple[int, ...]:
        return self.path[self.path.index(self.v) :]

    @property
    def skipped(self) -> int:
        """Number of cycle vertices strictly between ``x`` and ``y``."""
        if self.x_index == self.y_index:
            return self.cycle_length - 1
        return (self.y_index - self.x_index - 1) % self.cycle_length


def _legs(D: Digraph, on_cycle: set[int], v: int, forward: bool, depth: int) -> list[list[int]]:
    """Paths from ``v`` whose interior avoids the cycle and whose last vertex
    is on it (reversed when ``forward`` is false), up to ``depth`` arcs."""
    out: list[list[int]] = []
    step = D.succ if forward else D.pred

    def rec(path: list[int]) -> None:
        for u in sorted(step[path[-1]]):
            if u in path:
                continue
            if u in on_cycle:
                out.append(path + [u])
            elif len(path) < depth:
                rec(path + [u])

    rec([v])
    return out if forward else [list(reversed(p)) for p in out]


def bypasses(D: Digraph, cycle: Sequence[int], v: int, depth: int = BYPASS_DEPTH) -> list[Bypass]:
    """All bypasses through ``v`` whose legs have at most ``depth`` arcs,
    fewest skipped cycle vertices first, then shortest, then lexicographic."""
    pos = {c: i for i, c in enumerate(cycle)}
    on = set(cycle)
    into = _legs(D, on, v, False, depth)
    out_of = _legs(D, on, v, True, depth)
    found = []
    for p1 in into:
        inner1 = set(p1[1:-1])
        for p2 in out_of:
            if inner1 & set(p2[1:-1]):
                continue
            path = tuple(p1 + p2[1:])
            found.append(Bypass(path, v, pos[path[0]], pos[path[-1]], len(cycle)))
    found.sort(key=lambda b: (b.skipped, len(b.path), b.path))
    return found


def find_bypass(
    D: Digraph, W: Iterable[int], C: Sequence[int], v: int, check: bool = True, depth: int | None = None
) -> Bypass:
    W = VertexSet(W, D.n)
    if v not in W or v in C:
        raise PreconditionError(f"{v} must be a W-vertex off the cycle")
    if check:
        if sum(c in W for c in C) < 2:
            raise PreconditionError("the cycle must hold at least two W-vertices")
        delta = min_semi_degree(D, W)
        if not cyclable_gate(delta, D.n):
            raise BelowThresholdError(
                f"min semi-degree {delta} below n/2 with n = {D.n}", measured=delta, required=-(-D.n // 2)
            )
    found = bypasses(D, C, v, depth if depth is not None else D.n)
    if not found:
        if check:
            raise TheoremViolation("no bypass under the degree gate", _bundle(D, cycle=list(C), v=v))
        raise DcfError(f"no bypass through {v}")
    return found[0]


def _rotate_to(cycle: Sequence[int], i: int) -> list[int]:
    return list(cycle[i:]) + list(cycle[:i])


def _apply_bypass(D: Digraph, wset: set[int], cycle: list[int], b: Bypass) -> list[int] | None:
    """Replace the skipped segment by the bypass, then splice the skipped
    W-vertices back in along the old segment.  ``None`` unless the result
    holds strictly more W-vertices."""
    m = len(cycle)
    if b.x_index == b.y_index:
        skipped = _rotate_to(cycle, (b.x_index + 1) % m)[: m - 1]
        new = list(b.path[:-1])
    else:
        seg = _rotate_to(cycle, (b.x_index + 1) % m)
        skipped = seg[: b.skipped]
        back = _rotate_to(cycle, b.y_index)
        back = back[: (b.x_index - b.y_index) % m + 1]
        new = list(b.path[:-1]) + back[:-1]
    lost = [s for s in skipped if s in wset]
    if lost:
        merged = _merge_chains(D, new, lost, skipped, cyclic=True)
        if merged is None:
            return None
        new = merged
    before = sum(c in wset for c in cycle)
    after = sum(c in wset for c in new)
    return new if after > before else None


# -- the cycle search ----------------------------------------------------------------


@dataclass
class NoCycleReport:
    reason: str
    best_cycle: tuple[int, ...]
    missing: tuple[int, ...]
    oracle_verdict: str | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def _seed(D: Digraph, W: VertexSet) -> list[int] | None:
    u, v = W[0], W[1]
    try:
        p1, p2 = short_connecting_paths(D, W, u, v, check=False)
        return p1 + p2[1:-1]
    except DcfError:
        pass
    # shortest cycle through u
    parent = {u: None}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        for b in sorted(D.succ[a]):
            if b == u:
                path = [a]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return list(reversed(path))
            if b not in parent:
                parent[b] = a
                queue.append(b)
    return None


def _improve(D: Digraph, wset: set[int], W: VertexSet, cycle: list[int], stats: dict) -> list[int]:
    while True:
        on = set(cycle)
        missing = [w for w in W if w not in on]
        if not missing:
            return cycle
        moved = False
        for v in missing:
            slots = _slots(D, cycle, v, v, cyclic=True)
            if slots:
                i = slots[0]
                new = cycle[: i + 1] + [v] + cycle[i + 1 :]
                log_move("insert_vertex", f"len={len(cycle)}", f"len={len(new)}")
                stats["moves"]["insert"] = stats["moves"].get("insert", 0) + 1
                cycle, moved = new, True
                break
        if moved:
            continue
        for v in missing:
            for b in bypasses(D, cycle, v):
                new = _apply_bypass(D, wset, cycle, b)
                if new is not None:
                    log_move("bypass", f"len={len(cycle)} skipped={b.skipped}", f"len={len(new)}")
                    stats["moves"]["bypass"] = stats["moves"].get("bypass", 0) + 1
                    cycle, moved = new, True
                    break
            if moved:
                break
        if not moved:
            return cycle


def _exhaustive_w_cycle(D: Digraph, W: VertexSet, budget: int) -> list[int] | None:
    """Depth-first over simple paths from the smallest W-vertex, cutting a
    branch as soon as some unvisited W-vertex can no longer be entered or
    left."""
    root = W[0]
    need = set(W)
    nodes = 0
    path = [root]
    on = {root}

    def dead() -> bool:
        tail = path[-1]
        for w in need:
            if w in on:
                continue
            if not any(p not in on or p == tail for p in D.pred[w]):
                return True
            if not any(s not in on or s == root for s in D.succ[w]):
                return True
        return False

    def rec() -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"cycle search exceeded {budget} nodes")
        v = path[-1]
        if need <= on and len(path) >= 2 and D.has_arc(v, root):
            return list(path)
        if dead():
            return None
        for u in sorted(D.succ[v]):
            if u in on:
                continue
            path.append(u)
            on.add(u)
            got = rec()
            path.pop()
            on.discard(u)
            if got is not None:
                return got
        return None

    return rec()


def _validate_w_cycle(D: Digraph, W: VertexSet, cycle: Sequence[int]) -> tuple[int, ...]:
    cyc = canonical_cycle(cycle)
    ok = (
        len(cyc) >= 2
        and len(set(cyc)) == len(cyc)
        and all(D.has_arc(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))
        and set(W) <= set(cyc)
    )
    if not ok:
        raise TheoremViolation("cycle failed structural validation", _bundle(D, cycle=list(cycle)))
    return cyc


def find_w_cycle(
    D: Digraph,
    W: Iterable[int],
    mode: Mode = "guaranteed",
    budget: int = DEFAULT_BUDGET,
    stats: dict | None = None,
) -> tuple[int, ...] | NoCycleReport:
    """A directed cycle through every vertex of ``W``, rotated to start at its
    smallest vertex.

    Seeds with two short connecting paths, then absorbs missing W-vertices by
    direct insertion or by bypasses with re-insertion of the skipped
    W-vertices; each accepted move raises the number of W-vertices covered.
    Exhaustive search backs this up.
    """
    if mode not in ("guaranteed", "best_effort"):
        raise PreconditionError(f"unknown mode {mode!r}")
    W = VertexSet(W, D.n)
    if len(W) < 2:
        raise PreconditionError("W needs at least two vertices")
    delta = min_semi_degree(D, W)
    if mode == "guaranteed" and not cyclable_gate(delta, D.n):
        raise BelowThresholdError(
            f"min semi-degree of W is {delta}; the guarantee needs at least {-(-D.n // 2)}",
            measured=delta,
            required=-(-D.n // 2),
        )
    stats = stats if stats is not None else {}
    stats.setdefault("moves", {})
    stats.setdefault("fallback", False)
    wset = set(W)
    cycle = _seed(D, W)
    if cycle is not None:
        cycle = _improve(D, wset, W, cycle, stats)
        if wset <= set(cycle):
            return _validate_w_cycle(D, W, cycle)
    stats["fallback"] = True
    try:
        found = _exhaustive_w_cycle(D, W, budget)
    except BudgetExceeded:
        if mode == "guaranteed":
            raise
        found = None
        stats["budget_exceeded"] = True
    if found is not None:
        return _validate_w_cycle(D, W, found)
    if mode == "guaranteed":
        raise TheoremViolation("W is not cyclable although the degree gate holds", _bundle(D, W=list(W)))
    verdict = None
    if D.n <= ORACLE_ORDER:
        from .oracle import oracle_cyclable

        verdict = oracle_cyclable(D, W).status.value
    best = tuple(cycle) if cycle else ()
    return NoCycleReport(
        "no W-spanning cycle found", best, tuple(w for w in W if w not in set(best)), verdict, stats
    )


# -- greedy factor for hosts with many spare vertices -------------------------------


def theorem5_gate(delta: int, n: int, w: int) -> bool:
    return n >= 2 * w and 2 * delta >= n + 2 * w - 2


def theorem5_factor(D: Digraph, W: Iterable[int], parts: Iterable[int]) -> CycleFactorCertificate:
    """Chain each part's W-vertices into a cycle, linking consecutive ones by
    an arc or through a fresh common neighbour outside ``W``."""
    W = VertexSet(W, D.n)
    parts = Partition(parts, total=len(W))
    n = D.n
    if n < 2 * len(W):
        raise PreconditionError(f"n = {n} < 2|W| = {2 * len(W)}")
    delta = min_semi_degree(D, W)
    if 2 * delta < n + 2 * len(W) - 2:
        raise BelowThresholdError(
            f"min semi-degree {delta} below n/2 + |W| - 1 with n = {n}, |W| = {len(W)}",
            measured=delta,
            required=-(-(n + 2 * len(W) - 2) // 2),
        )
    wset = set(W)
    used: set[int] = set()
    cycles = []
    start = 0
    for size in parts:
        group = list(W[start : start + size])
        start += size
        cycle: list[int] = []
        for j, a in enumerate(group):
            b = group[(j + 1) % size]
            cycle.append(a)
            if D.has_arc(a, b):
                continue
            middle = sorted((D.succ[a] & D.pred[b]) - wset - used)
            if not middle:
                raise TheoremViolation(
                    "ran out of intermediate vertices", _bundle(D, W=list(W), parts=list(parts))
                )
            used.add(middle[0])
            cycle.append(middle[0])
        cycles.append(cycle)
    cert = CycleFactorCertificate.from_cycles(cycles, W)
    report = validate_certificate(D, W, parts, cert)
    if not report:
        raise TheoremViolation(f"greedy factor failed validation: {report}", _bundle(D, W=list(W)))
    return cert
