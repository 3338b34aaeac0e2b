"""W-cycle-factors with prescribed W-counts.

The solver works in the bipartite representation: W-vertices are the marked
matching edges, a cycle with ``t`` W-vertices is a feasible cycle of
M0-length ``t``.  It starts from ``k`` disjoint cycles of M0-length 2 and
raises each cycle's marked count one unit at a time towards its target,
largest deficit first.  Every accepted move lowers the potential
``(total deficit, total length)`` lexicographically.  Move choices are
explored depth-first with a node budget; exact search over feasible cycles
is the last resort.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Literal

from ._cycles import cycles_from_root, mask_of
from ._paths import ham_cycle_lex_least
from .bipartite import (
    BipartiteRep,
    FeasibleCycle,
    FeasiblePath,
    build_bipartite_rep,
    endpoint_degree,
    fact1_reduce,
    local_join_masks,
    mark_m0,
    select_good_feasible_path,
    xv,
    yv,
)
from .digraph import (
    CycleFactorCertificate,
    Digraph,
    Partition,
    VertexSet,
    bits,
    min_semi_degree,
    validate_certificate,
)
from .errors import BelowThresholdError, BudgetExceeded, DcfError, PreconditionError, TheoremViolation
from .exchange import (
    claim1_base_packing,
    has_shorter_same_m0_path,
    insertion_slots,
    lemma1_insert,
    lemma2_guard,
    lemma2_shorten,
    lemma4_close_path,
    log_move,
    repro_bundle,
)

Mode = Literal["guaranteed", "best_effort"]

DEFAULT_BUDGET = 10_000
EXACT_BUDGET = 2_000_000
ORACLE_ORDER = 8
CLOSE_SIZE_CAP = 24


def factor_gate(delta: int, n: int) -> bool:
    """``delta >= (3n - 3) / 4`` in integers."""
    return 4 * delta >= 3 * n - 3


def required_degree(n: int) -> int:
    return max(0, -(-(3 * n - 3) // 4))


@dataclass(frozen=True)
class PackingState:
    """Disjoint feasible cycles with their target M0-lengths, plus an optional
    open feasible path that is being grown towards ``path_target``."""

    cycles: tuple[FeasibleCycle, ...]
    targets: tuple[int, ...]
    open_path: FeasiblePath | None = None
    path_target: int = 0

    @property
    def deficit(self) -> int:
        total = sum(t - c.m0 for c, t in zip(self.cycles, self.targets))
        if self.open_path is not None:
            total += self.path_target - self.open_path.m0
        return total

    @property
    def total_length(self) -> int:
        return sum(c.length for c in self.cycles) + (self.open_path.length if self.open_path else 0)

    @property
    def potential(self) -> tuple[int, int, int]:
        return (self.deficit, self.total_length, int(self.open_path is not None))

    @property
    def used(self) -> int:
        m = 0
        for c in self.cycles:
            m |= mask_of(c.pairs)
        if self.open_path is not None:
            m |= mask_of(self.open_path.pairs)
        return m

    def key(self) -> tuple:
        cycles = frozenset((c.canonical(), t) for c, t in zip(self.cycles, self.targets))
        return (cycles, self.open_path.pairs if self.open_path else None, self.path_target)

    def check(self, rep: BipartiteRep) -> None:
        """Recompute every invariant from scratch; raises on any breach."""
        seen: set[int] = set()
        for c, t in zip(self.cycles, self.targets):
            again = FeasibleCycle.of(rep, c.pairs)
            if again.m0 != c.m0 or c.m0 > t:
                raise TheoremViolation("packing state bookkeeping drifted", repro_bundle(rep))
            if seen & set(c.pairs):
                raise TheoremViolation("packing state cycles overlap", repro_bundle(rep))
            seen |= set(c.pairs)
        if self.open_path is not None and seen & set(self.open_path.pairs):
            raise TheoremViolation("open path meets a cycle", repro_bundle(rep))

    def dump(self, rep: BipartiteRep) -> str:
        lines = [rep.dump().rstrip("\n")]
        for c, t in zip(self.cycles, self.targets):
            lines.append(f"cycle {' '.join(map(str, c.pairs))} m0 {c.m0} target {t}")
        if self.open_path is not None:
            lines.append(f"path {' '.join(map(str, self.open_path.pairs))} m0 {self.open_path.m0}")
        return "\n".join(lines) + "\n"


@dataclass
class NoFactorReport:
    """Outcome of a best-effort solve that found no certificate."""

    reason: str
    state_dump: str
    oracle_verdict: str | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


class _Stalled(DcfError):
    pass


# -- moves ---------------------------------------------------------------------------


def _replace(state: PackingState, updates: dict[int, tuple[int, ...]], rep: BipartiteRep) -> PackingState:
    cycles = list(state.cycles)
    for j, pairs in updates.items():
        cycles[j] = FeasibleCycle.of(rep, pairs)
    return PackingState(tuple(cycles), state.targets)


def _detours(rep: BipartiteRep, a: int, b: int, f: int, free: int) -> Iterator[tuple[int, ...]]:
    """Short alternating detours ``a -> (u) f (u') -> b`` through free
    unmarked pairs, shortest first."""
    unmarked_free = free & ~rep.marked_mask & ~(1 << f)
    before = [u for u in bits(unmarked_free & rep.in_mask[a]) if rep.joined(u, f)]
    after = [u for u in bits(unmarked_free & rep.in_mask[f]) if rep.joined(u, b)]
    if rep.joined(a, f):
        for u in after:
            yield (f, u)
    if rep.joined(f, b):
        for u in before:
            yield (u, f)
    for u in before:
        for w in after:
            if u != w:
                yield (u, f, w)


def _insert_moves(rep: BipartiteRep, pairs: tuple[int, ...], f: int, free: int) -> Iterator[tuple[str, tuple[int, ...]]]:
    r = len(pairs)
    for i in insertion_slots(rep, pairs, f):
        yield "insert", pairs[: i + 1] + (f,) + pairs[i + 1 :]
    for i in range(r):
        for d in _detours(rep, pairs[i], pairs[(i + 1) % r], f, free):
            yield "detour", pairs[: i + 1] + d + pairs[i + 1 :]


def _close_move(rep: BipartiteRep, pairs: tuple[int, ...], f: int) -> tuple[str, tuple[int, ...]] | None:
    """Open the cycle into a feasible path ending at ``f`` and close it again
    over the same vertices."""
    r = len(pairs)
    if 2 * (r + 1) > CLOSE_SIZE_CAP:
        return None
    path = None
    for i in range(r):
        nxt = pairs[(i + 1) % r]
        if rep.joined(pairs[i], f) and nxt in rep.marked:
            path = pairs[i + 1 :] + pairs[: i + 1] + (f,)
            break
        if rep.joined(f, nxt) and pairs[i] in rep.marked:
            path = (f,) + pairs[i + 1 :] + pairs[: i + 1]
            break
    if path is None:
        return None
    P = select_good_feasible_path(rep, FeasiblePath.of(rep, path), CLOSE_SIZE_CAP)
    ends = endpoint_degree(rep, P.pairs[0], P.pairs[-1], P.pairs)
    if 2 * ends >= 3 * P.r and not has_shorter_same_m0_path(rep, P):
        C = lemma4_close_path(rep, P, CLOSE_SIZE_CAP, check=False)
        return "lemma4_close", C.pairs
    local = sorted(path)
    cyc = ham_cycle_lex_least(local_join_masks(rep, local))
    if cyc is None:
        return None
    return "respan", tuple(local[k] for k in cyc)


def _drop(pairs: tuple[int, ...], i: int) -> tuple[int, ...]:
    return pairs[:i] + pairs[i + 1 :]


def _path_moves(rep: BipartiteRep, state: PackingState, free: int) -> Iterator[tuple[str, PackingState]]:
    """Grow the open path at its tail, or close it once it reaches its target."""
    P = state.open_path
    assert P is not None
    if P.m0 < state.path_target:
        tail = P.pairs[-1]
        for f in bits(free & rep.marked_mask):
            if rep.joined(tail, f):
                yield "extend", replace(state, open_path=FeasiblePath.of(rep, P.pairs + (f,)))
            for u in bits(free & ~rep.marked_mask & rep.in_mask[tail]):
                if rep.joined(u, f):
                    yield "extend", replace(state, open_path=FeasiblePath.of(rep, P.pairs + (u, f)))
        return
    if P.r < 2:
        return
    if rep.joined(P.pairs[-1], P.pairs[0]):
        closed, name = FeasibleCycle.of(rep, P.pairs), "close"
    else:
        good = select_good_feasible_path(rep, P, CLOSE_SIZE_CAP)
        ends = endpoint_degree(rep, good.pairs[0], good.pairs[-1], good.pairs)
        if 2 * ends >= 3 * good.r and not has_shorter_same_m0_path(rep, good):
            closed, name = lemma4_close_path(rep, good, CLOSE_SIZE_CAP, check=False), "lemma4_close"
        else:
            local = sorted(P.pairs)
            cyc = ham_cycle_lex_least(local_join_masks(rep, local))
            if cyc is None:
                return
            closed, name = FeasibleCycle.of(rep, [local[k] for k in cyc]), "respan"
    yield name, PackingState(state.cycles + (closed,), state.targets + (state.path_target,))


def _moves(rep: BipartiteRep, state: PackingState) -> Iterator[tuple[str, PackingState]]:
    """Successor states in priority order."""
    cycles, targets = state.cycles, state.targets
    deficits = [t - c.m0 for c, t in zip(cycles, targets)]
    all_pairs = (1 << rep.n) - 1
    used = state.used
    free = all_pairs & ~used
    spare = bits(free & rep.marked_mask)
    if state.open_path is not None:
        yield from _path_moves(rep, state, free)
        return

    if max(deficits, default=0) > 0:
        j = max(range(len(cycles)), key=lambda i: (deficits[i], -i))
        C = cycles[j]
        for f in spare:
            if rep.e((xv(f), yv(f)), C.vertices) >= C.r + 1:
                out = lemma1_insert(rep, C, f)
                yield "lemma1_insert", _replace(state, {j: out.pairs}, rep)
        for f in spare:
            for name, pairs in _insert_moves(rep, C.pairs, f, free):
                yield name, _replace(state, {j: pairs}, rep)
        for f in spare:
            got = _close_move(rep, C.pairs, f)
            if got is not None:
                yield got[0], _replace(state, {j: got[1]}, rep)
        # hand a marked edge g from another cycle to C, refilling that cycle with a spare f
        for l, other in enumerate(cycles):
            if l == j:
                continue
            q = other.pairs
            r = len(q)
            for i, g in enumerate(q):
                if g not in rep.marked:
                    continue
                prev, nxt = q[i - 1], q[(i + 1) % r]
                for f in spare:
                    if rep.joined(prev, f) and rep.joined(f, nxt):
                        swapped = q[:i] + (f,) + q[i + 1 :]
                        rest = free & ~(1 << f) | (1 << g)
                        for name, pairs in _insert_moves(rep, C.pairs, g, rest):
                            yield f"swap+{name}", _replace(state, {l: swapped, j: pairs}, rep)
                if r >= 3 and rep.joined(prev, nxt):
                    shrunk = _drop(q, i)
                    for slot in insertion_slots(rep, C.pairs, g):
                        grown = C.pairs[: slot + 1] + (g,) + C.pairs[slot + 1 :]
                        for f in spare:
                            for k in insertion_slots(rep, shrunk, f):
                                refilled = shrunk[: k + 1] + (f,) + shrunk[k + 1 :]
                                yield "exchange", _replace(state, {l: refilled, j: grown}, rep)

    for l, other in enumerate(cycles):
        q = other.pairs
        for i, p in enumerate(q):
            if p not in rep.marked and len(q) >= 3 and rep.joined(q[i - 1], q[(i + 1) % len(q)]):
                yield "tighten", _replace(state, {l: _drop(q, i)}, rep)

    for a in range(len(cycles)):
        for b in range(len(cycles)):
            if a == b or not lemma2_guard(rep, cycles[a], cycles[b]):
                continue
            res = lemma2_shorten(rep, cycles[a], cycles[b])
            if sorted((res.first.m0, res.second.m0)) == sorted((cycles[a].m0, cycles[b].m0)):
                first, second = (res.first, res.second) if res.first.m0 == cycles[a].m0 else (res.second, res.first)
                yield "lemma2_shorten", _replace(state, {a: first.pairs, b: second.pairs}, rep)


def grow_step(state: PackingState, rep: BipartiteRep) -> tuple[PackingState, str]:
    """Apply the first move that lowers the potential and name it; raises
    when none applies."""
    for name, nxt in _moves(rep, state):
        if nxt.potential < state.potential:
            return nxt, name
    raise _Stalled("no applicable move")


def _sizes(state: PackingState) -> str:
    return "[" + ",".join(f"{c.r}/{c.m0}" for c in state.cycles) + "]"


def _search(rep: BipartiteRep, start: PackingState, budget: int, stats: dict) -> PackingState | None:
    """Depth-first over move choices; every edge lowers the potential."""
    seen: set[frozenset] = set()
    nodes = 0

    def rec(state: PackingState, depth: int) -> PackingState | None:
        nonlocal nodes
        if state.deficit == 0:
            return state
        key = state.key()
        if key in seen:
            return None
        seen.add(key)
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"move search exceeded {budget} nodes")
        for name, nxt in _moves(rep, state):
            if nxt.potential >= state.potential:
                continue
            log_move(name, _sizes(state), _sizes(nxt))
            stats["moves"][name] += 1
            got = rec(nxt, depth + 1)
            if got is not None:
                return got
            stats["backtracks"] += 1
        return None

    try:
        return rec(start, 0)
    finally:
        stats["search_nodes"] = stats.get("search_nodes", 0) + nodes


def exact_factor(
    rep: BipartiteRep, parts: Iterable[int], budget: int = EXACT_BUDGET
) -> list[tuple[int, ...]] | None:
    """Exact search for disjoint feasible cycles with M0-lengths ``parts``
    covering every marked edge; ``None`` when none exist."""
    remaining = Counter(parts)
    marked = sorted(rep.marked)
    full = (1 << rep.n) - 1
    nodes = 0

    def rec(used: int) -> list[tuple[int, ...]] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"exact factor search exceeded {budget} nodes")
        root = next((w for w in marked if not (used >> w) & 1), None)
        if root is None:
            return []
        free = full & ~used
        for t in sorted(c for c, m in remaining.items() if m > 0):
            remaining[t] -= 1
            for length in range(max(t, 2), free.bit_count() + 1):
                for cyc in cycles_from_root(rep.in_mask, root, free, length, rep.marked_mask, t, t):
                    rest = rec(used | mask_of(cyc))
                    if rest is not None:
                        remaining[t] += 1
                        return [cyc] + rest
            remaining[t] += 1
        return None

    return rec(0)


def _to_certificate(
    D: Digraph, W: VertexSet, parts: Partition, rep: BipartiteRep, cycles: Iterable[tuple[int, ...]], stats: dict
) -> CycleFactorCertificate:
    dicycles = [FeasibleCycle.of(rep, c).dicycle() for c in cycles]
    cert = CycleFactorCertificate.from_cycles(dicycles, W, stats)
    report = validate_certificate(D, W, parts, cert)
    if not report:
        raise TheoremViolation(f"solver produced an invalid certificate: {report}", repro_bundle(rep))
    return cert


def _new_stats() -> dict:
    return {"moves": Counter(), "backtracks": 0, "fallback": False, "search_nodes": 0}


def _initial_state(rep: BipartiteRep, parts: Partition, check: bool, stats: dict) -> PackingState:
    base = claim1_base_packing(rep, check=check, stats=stats)
    k = len(parts)
    if len(base) < k:
        raise _Stalled("base packing too small")
    targets = tuple(sorted(parts, reverse=True))
    return PackingState(tuple(base[:k]), targets)


def solve_w_cycle_factor(
    D: Digraph,
    W: Iterable[int],
    parts: Iterable[int],
    mode: Mode = "guaranteed",
    budget: int = DEFAULT_BUDGET,
    exact_budget: int = EXACT_BUDGET,
) -> CycleFactorCertificate | NoFactorReport:
    """Disjoint cycles ``C_1..C_k`` of ``D`` with ``|V(C_i) & W| = parts[i]``.

    ``guaranteed`` mode insists on ``4 * delta0(W) >= 3n - 3`` and treats any
    failure as a contradiction.  ``best_effort`` accepts any input and returns
    a :class:`NoFactorReport` when nothing is found.
    """
    if mode not in ("guaranteed", "best_effort"):
        raise PreconditionError(f"unknown mode {mode!r}")
    W = VertexSet(W, D.n)
    parts = Partition(parts, total=len(W))
    delta = min_semi_degree(D, W)
    if mode == "guaranteed" and not factor_gate(delta, D.n):
        raise BelowThresholdError(
            f"min semi-degree of W is {delta}; the guarantee needs at least {required_degree(D.n)}",
            measured=delta,
            required=required_degree(D.n),
        )
    stats = _new_stats()
    full_rep = mark_m0(build_bipartite_rep(D), W)
    rep = fact1_reduce(full_rep)

    state: PackingState | None = None
    try:
        state = _initial_state(rep, parts, mode == "guaranteed", stats)
        found = _search(rep, state, budget, stats)
        if found is not None:
            found.check(rep)
            return _to_certificate(D, W, parts, rep, (c.pairs for c in found.cycles), stats)
    except (_Stalled, BudgetExceeded):
        pass
    except TheoremViolation:
        if mode == "guaranteed":
            raise

    stats["fallback"] = True
    exact_rep = rep if mode == "guaranteed" else full_rep
    try:
        cycles = exact_factor(exact_rep, parts, exact_budget)
    except BudgetExceeded:
        if mode == "guaranteed":
            raise
        cycles = None
        stats["exact_budget_exceeded"] = True
    if cycles is not None:
        return _to_certificate(D, W, parts, exact_rep, cycles, stats)
    if mode == "guaranteed":
        raise TheoremViolation(
            "no W-cycle-factor although the degree gate holds",
            repro_bundle(rep, parts=list(parts)),
        )
    verdict = None
    if D.n <= ORACLE_ORDER:
        from .oracle import oracle_factor_exists

        verdict = oracle_factor_exists(D, W, parts).status.value
    dump = state.dump(rep) if state is not None else full_rep.dump()
    return NoFactorReport("no certificate found", dump, verdict, stats)
