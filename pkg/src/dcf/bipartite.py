"""Balanced bipartite representation of a digraph with a marked perfect matching.

Vertex ``v`` of the digraph becomes the matched pair ``x_v, y_v``; an arc
``u -> v`` becomes the edge ``x_u y_v``.  Bipartite vertices are encoded as
integers, ``x_i = 2*i`` and ``y_i = 2*i + 1``, so the matching partner of any
vertex ``b`` is ``b ^ 1``.

Alternating structures are stored by their pair-index sequence
``(a_1, ..., a_r)``, read as ``x_{a_1} y_{a_1} x_{a_2} y_{a_2} ... x_{a_r} y_{a_r}``.
The non-matching edge between consecutive pairs is ``y_{a_i} x_{a_{i+1}}``,
i.e. the arc ``a_{i+1} -> a_i``; a pair sequence therefore lists the
corresponding directed path or cycle backwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._paths import ham_path_lex_least
from .digraph import Digraph, bits, canonical_cycle
from .errors import PreconditionError

DEFAULT_SIZE_CAP = 24


def xv(i: int) -> int:
    return 2 * i


def yv(i: int) -> int:
    return 2 * i + 1


def vertex_name(b: int) -> str:
    return f"{'y' if b & 1 else 'x'}{b >> 1}"


class BipartiteRep:
    """G(X, Y) with perfect matching ``{x_i y_i}`` and marked subset M0.

    ``cross`` holds the non-matching edges as digraph arcs ``(u, v)`` meaning
    ``x_u y_v``.  M1 (the unmarked matching edges) is always derived.
    """

    __slots__ = ("n", "cross", "marked", "out_mask", "in_mask", "__dict__")

    def __init__(self, n: int, cross: Iterable[tuple[int, int]], marked: Iterable[int]) -> None:
        self.n = n
        self.cross = frozenset(cross)
        self.marked = frozenset(marked)
        out_mask = [0] * n
        in_mask = [0] * n
        for u, v in self.cross:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"bad cross edge x{u}y{v}")
            out_mask[u] |= 1 << v
            in_mask[v] |= 1 << u
        bad = [i for i in self.marked if not 0 <= i < n]
        if bad:
            raise PreconditionError(f"marked indices {bad} out of range")
        # out_mask[u]: indices v with edge x_u y_v; in_mask[v]: indices u likewise
        self.out_mask = tuple(out_mask)
        self.in_mask = tuple(in_mask)

    @property
    def unmarked(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.marked

    @cached_property
    def marked_mask(self) -> int:
        m = 0
        for i in self.marked:
            m |= 1 << i
        return m

    @cached_property
    def digraph(self) -> Digraph:
        """The digraph whose arcs are the current non-matching edges."""
        return Digraph(self.n, self.cross)

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(2 * self.n)]
        for i in range(self.n):
            nbrs[xv(i)].add(yv(i))
            nbrs[yv(i)].add(xv(i))
        for u, v in self.cross:
            nbrs[xv(u)].add(yv(v))
            nbrs[yv(v)].add(xv(u))
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj[a]

    def joined(self, i: int, j: int) -> bool:
        """Whether ``y_i x_j`` is an edge (the arc ``j -> i``)."""
        return (self.out_mask[j] >> i) & 1 == 1

    def degree(self, b: int) -> int:
        return len(self.adj[b])

    def e(self, A: Iterable[int], B: Iterable[int]) -> int:
        """Number of edges from vertices of ``A`` into ``B`` (sum of degrees
        into ``B``; edges inside ``A`` are counted from both ends)."""
        target = set(B)
        return sum(len(self.adj[a] & target) for a in A)

    def min_marked_degree(self) -> int:
        """Minimum bipartite degree over the endpoints of M0 edges."""
        if not self.marked:
            raise PreconditionError("M0 is empty")
        return min(min(self.degree(xv(i)), self.degree(yv(i))) for i in self.marked)

    def with_marked(self, marked: Iterable[int]) -> BipartiteRep:
        return BipartiteRep(self.n, self.cross, marked)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BipartiteRep)
            and self.n == other.n
            and self.cross == other.cross
            and self.marked == other.marked
        )

    def __hash__(self) -> int:
        return hash((self.n, self.cross, self.marked))

    def dump(self) -> str:
        """Text listing: matching edges flagged M0/M1, then non-matching edges."""
        lines = [f"n {self.n}"]
        for i in range(self.n):
            lines.append(f"x{i} y{i} {'M0' if i in self.marked else 'M1'}")
        for u, v in sorted(self.cross):
            lines.append(f"x{u} y{v}")
        return "\n".join(lines) + "\n"


def build_bipartite_rep(D: Digraph) -> BipartiteRep:
    """G(X, Y) of ``D``; every matching edge starts out marked."""
    return BipartiteRep(D.n, D.arcs, range(D.n))


def mark_m0(rep: BipartiteRep, W: Iterable[int]) -> BipartiteRep:
    return rep.with_marked(W)


def fact1_reduce(rep: BipartiteRep) -> BipartiteRep:
    """Drop every non-matching edge joining two distinct M1 edges.

    Degrees of M0 endpoints are untouched, so any degree hypothesis stated on
    M0 survives, and cycles found afterwards are cycles of the original graph.
    """
    keep = [(u, v) for u, v in rep.cross if u in rep.marked or v in rep.marked]
    if len(keep) == len(rep.cross):
        return rep
    return BipartiteRep(rep.n, keep, rep.marked)


def _check_pairs(rep: BipartiteRep, pairs: Sequence[int], closed: bool) -> None:
    if len(set(pairs)) != len(pairs):
        raise PreconditionError(f"repeated matching edge in {list(pairs)}")
    for i in pairs:
        if not 0 <= i < rep.n:
            raise PreconditionError(f"pair index {i} out of range")
    links = list(zip(pairs, pairs[1:]))
    if closed:
        links.append((pairs[-1], pairs[0]))
    for a, b in links:
        if not rep.joined(a, b):
            raise PreconditionError(f"non-matching edge y{a}x{b} absent")


@dataclass(frozen=True)
class FeasiblePath:
    """M-alternating path ``x_{a_1} y_{a_1} ... x_{a_r} y_{a_r}`` whose two end
    matching edges are marked."""

    pairs: tuple[int, ...]
    m0: int

    @classmethod
    def of(cls, rep: BipartiteRep, pairs: Sequence[int]) -> FeasiblePath:
        pairs = tuple(pairs)
        if not pairs:
            raise PreconditionError("empty path")
        _check_pairs(rep, pairs, closed=False)
        if pairs[0] not in rep.marked or pairs[-1] not in rep.marked:
            raise PreconditionError(f"path {list(pairs)} does not start and end on M0 edges")
        return cls(pairs, sum(i in rep.marked for i in pairs))

    @classmethod
    def from_dipath(cls, rep: BipartiteRep, path: Sequence[int]) -> FeasiblePath:
        return cls.of(rep, tuple(reversed(path)))

    @property
    def r(self) -> int:
        return len(self.pairs)

    @property
    def length(self) -> int:
        return 2 * len(self.pairs)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(b for i in self.pairs for b in (xv(i), yv(i)))

    @property
    def ends(self) -> tuple[int, int]:
        """The end vertices ``x_{a_1}`` and ``y_{a_r}``."""
        return xv(self.pairs[0]), yv(self.pairs[-1])

    def dipath(self) -> tuple[int, ...]:
        return tuple(reversed(self.pairs))


@dataclass(frozen=True)
class FeasibleCycle:
    """Closed M-alternating cycle with at least two marked matching edges."""

    pairs: tuple[int, ...]
    m0: int

    @classmethod
    def of(cls, rep: BipartiteRep, pairs: Sequence[int], feasible: bool = True) -> FeasibleCycle:
        pairs = tuple(pairs)
        if len(pairs) < 2:
            raise PreconditionError("an alternating cycle needs at least two matching edges")
        _check_pairs(rep, pairs, closed=True)
        m0 = sum(i in rep.marked for i in pairs)
        if feasible and m0 < 2:
            raise PreconditionError(f"cycle {list(pairs)} has M0-length {m0} < 2")
        return cls(pairs, m0)

    @classmethod
    def from_dicycle(cls, rep: BipartiteRep, cycle: Sequence[int], feasible: bool = True) -> FeasibleCycle:
        return cls.of(rep, tuple(reversed(canonical_cycle(cycle))), feasible)

    @classmethod
    def from_vertices(cls, rep: BipartiteRep, seq: Sequence[int], feasible: bool = True) -> FeasibleCycle:
        """Accept any rotation or direction of a closed alternating sequence."""
        m = len(seq)
        if m < 4 or m % 2 or len(set(seq)) != m:
            raise PreconditionError(f"not an even simple cycle: {list(seq)}")
        succ: dict[int, int] = {}
        matched = 0
        for k in range(m):
            a, b = seq[k], seq[(k + 1) % m]
            if (a ^ 1) == b:
                matched += 1
                continue
            if (a & 1) == (b & 1):
                raise PreconditionError(f"{vertex_name(a)}{vertex_name(b)} joins one side")
            x, y = (a, b) if a & 1 == 0 else (b, a)
            if not rep.has_edge(x, y):
                raise PreconditionError(f"edge {vertex_name(x)}{vertex_name(y)} absent")
            succ[x >> 1] = y >> 1
        if matched * 2 != m or len(succ) * 2 != m:
            raise PreconditionError("sequence does not alternate matching and non-matching edges")
        start = min(succ)
        cycle = [start]
        while succ[cycle[-1]] != start:
            cycle.append(succ[cycle[-1]])
        return cls.from_dicycle(rep, cycle, feasible)

    @property
    def r(self) -> int:
        return len(self.pairs)

    @property
    def length(self) -> int:
        return 2 * len(self.pairs)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(b for i in self.pairs for b in (xv(i), yv(i)))

    def dicycle(self) -> tuple[int, ...]:
        return canonical_cycle(tuple(reversed(self.pairs)))

    def canonical(self) -> tuple[int, ...]:
        return canonical_cycle(self.pairs)


def m0_length(obj: FeasiblePath | FeasibleCycle) -> int:
    return obj.m0


def alt_cycle_to_dicycle(rep: BipartiteRep, C: FeasibleCycle) -> tuple[int, ...]:
    """Contract each matching edge ``x_i y_i`` to ``i``: a directed cycle of
    ``D`` with ``l(C)/2`` vertices, rotated to start at its smallest vertex."""
    _check_pairs(rep, C.pairs, closed=True)
    return C.dicycle()


def dicycle_to_alt_cycle(rep: BipartiteRep, cycle: Sequence[int]) -> FeasibleCycle:
    return FeasibleCycle.from_dicycle(rep, cycle, feasible=False)


def endpoint_degree(rep: BipartiteRep, s: int, t: int, pairs: Iterable[int]) -> int:
    """``e({x_s, y_t}, [pairs])``."""
    inside = 0
    for i in pairs:
        inside |= 1 << i
    # x_s sees y_i for i == s or s -> i; y_t sees x_i for i == t or i -> t
    return ((rep.out_mask[s] | (1 << s)) & inside).bit_count() + (
        (rep.in_mask[t] | (1 << t)) & inside
    ).bit_count()


def local_join_masks(rep: BipartiteRep, pairs: Sequence[int]) -> list[int]:
    """``adj[k]`` = local indices ``l`` with ``y_{pairs[k]} x_{pairs[l]}`` an edge."""
    index = {p: k for k, p in enumerate(pairs)}
    out = []
    for p in pairs:
        m = 0
        for q in bits(rep.in_mask[p]):
            k = index.get(q)
            if k is not None:
                m |= 1 << k
        out.append(m)
    return out


def select_good_feasible_path(
    rep: BipartiteRep, P: FeasiblePath, size_cap: int = DEFAULT_SIZE_CAP
) -> FeasiblePath:
    """Among feasible paths spanning ``V(P)`` (hence with the same M0 set),
    return one minimizing ``e({x_1, y_r}, [V(P)])``; ties go to the
    lexicographically least vertex sequence.  Exact, by bitmask search."""
    if 2 * P.r > size_cap:
        raise PreconditionError(f"[V(P)] has {2 * P.r} vertices, above the cap of {size_cap}")
    if P.r == 1:
        return P
    pairs = sorted(P.pairs)
    adj = local_join_masks(rep, pairs)
    marked_local = [k for k, p in enumerate(pairs) if p in rep.marked]
    by_cost: dict[int, list[tuple[int, int]]] = {}
    for s in marked_local:
        for t in marked_local:
            if s != t:
                cost = endpoint_degree(rep, pairs[s], pairs[t], pairs)
                by_cost.setdefault(cost, []).append((s, t))
    for cost in sorted(by_cost):
        best: list[int] | None = None
        for s, t in by_cost[cost]:
            found = ham_path_lex_least(adj, s, t)
            if found is not None:
                seq = [pairs[k] for k in found]
                if best is None or seq < best:
                    best = seq
        if best is not None:
            return FeasiblePath.of(rep, best)
    raise AssertionError("the input path itself is always a candidate")


def is_good_path(rep: BipartiteRep, P: FeasiblePath, size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    best = select_good_feasible_path(rep, P, size_cap)
    return endpoint_degree(rep, P.pairs[0], P.pairs[-1], P.pairs) <= endpoint_degree(
        rep, best.pairs[0], best.pairs[-1], best.pairs
    )
