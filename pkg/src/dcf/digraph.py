"""Simple digraphs over dense integer vertex ids, plus the value types that
travel with them (vertex sets, partitions, cycle-factor certificates)."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from .errors import PreconditionError

Arc = tuple[int, int]


class Digraph:
    """Immutable loop-free digraph on vertices ``0..n-1``.

    Adjacency is kept three ways: the arc set, per-vertex successor and
    predecessor frozensets, and integer bitmask rows (bit ``v`` of
    ``out_mask[u]`` is set iff ``u -> v``).  Digons are allowed.
    """

    __slots__ = ("n", "arcs", "succ", "pred", "out_mask", "in_mask", "_hash")

    def __init__(self, n: int, arcs: Iterable[Sequence[int]] = ()) -> None:
        if not isinstance(n, int) or n < 0:
            raise PreconditionError(f"order must be a non-negative integer, got {n!r}")
        seen: set[Arc] = set()
        out_mask = [0] * n
        in_mask = [0] * n
        for arc in arcs:
            u, v = int(arc[0]), int(arc[1])
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"arc ({u},{v}) out of range for n={n}")
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            if (u, v) in seen:
                raise PreconditionError(f"duplicate arc ({u},{v})")
            seen.add((u, v))
            out_mask[u] |= 1 << v
            in_mask[v] |= 1 << u
        self.n = n
        self.arcs = frozenset(seen)
        self.out_mask = tuple(out_mask)
        self.in_mask = tuple(in_mask)
        self.succ = tuple(frozenset(_bits(m)) for m in out_mask)
        self.pred = tuple(frozenset(_bits(m)) for m in in_mask)
        self._hash = hash((n, self.arcs))

    @classmethod
    def from_masks(cls, out_mask: Sequence[int]) -> Digraph:
        n = len(out_mask)
        return cls(n, ((u, v) for u in range(n) for v in _bits(out_mask[u])))

    def has_arc(self, u: int, v: int) -> bool:
        return (self.out_mask[u] >> v) & 1 == 1

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)

    def relabel(self, perm: Sequence[int]) -> Digraph:
        """Return the digraph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise PreconditionError("relabeling must be a permutation of 0..n-1")
        return Digraph(self.n, ((perm[u], perm[v]) for u, v in self.arcs))

    def without_arcs(self, drop: Iterable[Arc]) -> Digraph:
        drop = set(drop)
        return Digraph(self.n, (a for a in self.arcs if a not in drop))

    def induced(self, vertices: Iterable[int]) -> tuple[Digraph, list[int]]:
        """Induced subdigraph relabeled to ``0..m-1``; also returns the
        original id of each new vertex."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        arcs = ((index[u], index[v]) for u, v in self.arcs if u in index and v in index)
        return Digraph(len(keep), arcs), keep

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Digraph) and self.n == other.n and self.arcs == other.arcs

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.sorted_arcs()})"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    return list(_bits(mask))


def _check_vertex(D: Digraph, v: int) -> None:
    if not 0 <= v < D.n:
        raise PreconditionError(f"vertex {v} out of range for n={D.n}")


def out_degree(D: Digraph, v: int) -> int:
    _check_vertex(D, v)
    return D.out_mask[v].bit_count()


def in_degree(D: Digraph, v: int) -> int:
    _check_vertex(D, v)
    return D.in_mask[v].bit_count()


class VertexSet(tuple):
    """Sorted duplicate-free tuple of vertex ids, optionally range-checked."""

    def __new__(cls, members: Iterable[int] = (), n: int | None = None) -> VertexSet:
        items = [int(v) for v in members]
        if len(set(items)) != len(items):
            raise PreconditionError(f"vertex set has duplicates: {items}")
        if n is not None:
            bad = [v for v in items if not 0 <= v < n]
            if bad:
                raise PreconditionError(f"vertex ids {bad} out of range for n={n}")
        return super().__new__(cls, sorted(items))

    @property
    def mask(self) -> int:
        m = 0
        for v in self:
            m |= 1 << v
        return m


class Partition(tuple):
    """Part sizes ``n_1..n_k`` of a W-cycle-factor request.

    Parts below 2 are rejected: no cycle can carry exactly one vertex of W
    when W is the whole vertex set, and the same floor is enforced for every W.
    """

    def __new__(cls, parts: Iterable[int], total: int | None = None) -> Partition:
        items = [int(p) for p in parts]
        if not items:
            raise PreconditionError("partition needs at least one part")
        small = [p for p in items if p < 2]
        if small:
            raise PreconditionError(f"partition parts must be >= 2, got {items}")
        if total is not None and sum(items) != total:
            raise PreconditionError(f"partition {items} sums to {sum(items)}, expected |W|={total}")
        return super().__new__(cls, items)

    @classmethod
    def parse(cls, text: str, total: int | None = None) -> Partition:
        try:
            parts = [int(tok) for tok in text.split(",") if tok.strip()]
        except ValueError as exc:
            raise PreconditionError(f"malformed partition {text!r}") from exc
        return cls(parts, total)


def min_semi_degree(D: Digraph, W: Iterable[int]) -> int:
    """Minimum over ``v`` in W of ``min(out_degree(v), in_degree(v))``."""
    members = list(W)
    if not members:
        raise PreconditionError("minimum semi-degree of an empty vertex set is undefined")
    for v in members:
        _check_vertex(D, v)
    return min(min(D.out_mask[v].bit_count(), D.in_mask[v].bit_count()) for v in members)


def build_symmetric(n: int, edges: Iterable[Sequence[int]]) -> Digraph:
    """Symmetric digraph G*: each undirected edge becomes a digon."""
    seen: set[frozenset[int]] = set()
    arcs: list[Arc] = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        key = frozenset((u, v))
        if u == v:
            raise PreconditionError(f"loop edge at {u}")
        if key in seen:
            raise PreconditionError(f"duplicate edge {u}-{v}")
        seen.add(key)
        arcs += [(u, v), (v, u)]
    return Digraph(n, arcs)


def complete_symmetric(n: int) -> Digraph:
    return Digraph(n, ((u, v) for u in range(n) for v in range(n) if u != v))


def collapse_digons(D: Digraph) -> set[frozenset[int]]:
    """Undirected edges formed by the digons of ``D``."""
    return {frozenset(a) for a in D.arcs if (a[1], a[0]) in D.arcs}


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate a directed cycle so that its smallest vertex comes first."""
    if not cycle:
        return ()
    i = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[i:]) + tuple(cycle[:i])


@dataclass(frozen=True)
class CycleFactorCertificate:
    """Vertex-disjoint directed cycles together with their W-counts.

    ``stats`` carries solver bookkeeping (moves, backtracking, fallback) and is
    ignored by equality.
    """

    cycles: tuple[tuple[int, ...], ...]
    w_counts: tuple[int, ...]
    stats: dict[str, Any] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_cycles(
        cls,
        cycles: Iterable[Sequence[int]],
        W: Iterable[int],
        stats: dict[str, Any] | None = None,
    ) -> CycleFactorCertificate:
        wset = set(W)
        cyc = tuple(sorted((canonical_cycle(c) for c in cycles), key=lambda c: c[0] if c else -1))
        return cls(cyc, tuple(sum(v in wset for v in c) for c in cyc), stats)


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "PASS"
        return "FAIL\n" + "\n".join(f"  - {v}" for v in self.violations)


def validate_certificate(
    D: Digraph,
    W: Iterable[int],
    parts: Iterable[int],
    cert: CycleFactorCertificate,
) -> ValidationReport:
    """Check every clause of the W-cycle-factor contract; never raises."""
    wset = set(W)
    problems: list[str] = []
    if len(cert.w_counts) != len(cert.cycles):
        problems.append(f"{len(cert.cycles)} cycles but {len(cert.w_counts)} w_counts")
    owner: dict[int, int] = {}
    for i, cyc in enumerate(cert.cycles):
        if len(cyc) < 2:
            problems.append(f"cycle {i} has length {len(cyc)} < 2")
        out_of_range = [v for v in cyc if not 0 <= v < D.n]
        if out_of_range:
            problems.append(f"cycle {i} uses out-of-range vertices {out_of_range}")
            continue
        repeated = sorted(v for v, c in Counter(cyc).items() if c > 1)
        if repeated:
            problems.append(f"cycle {i} repeats vertices {repeated}")
        for j in range(len(cyc)):
            u, v = cyc[j], cyc[(j + 1) % len(cyc)]
            if len(cyc) >= 2 and not D.has_arc(u, v):
                problems.append(f"cycle {i} uses missing arc ({u},{v})")
        for v in set(cyc):
            if v in owner:
                problems.append(f"cycles {owner[v]} and {i} share vertex {v}")
            else:
                owner[v] = i
        actual = sum(v in wset for v in cyc)
        if i < len(cert.w_counts) and cert.w_counts[i] != actual:
            problems.append(f"cycle {i} declares w_count {cert.w_counts[i]} but holds {actual} W-vertices")
    actual_counts = sorted(sum(v in wset for v in c) for c in cert.cycles)
    if actual_counts != sorted(parts):
        problems.append(f"W-counts {actual_counts} do not match partition {sorted(parts)}")
    return ValidationReport(not problems, problems)
