"""Hypothesis sweeps: run a solver on every gated instance of a family and
cross-check it against the brute-force oracles."""

from __future__ import annotations

import os
import random
import subprocess
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from multiprocessing import Pool
from pathlib import Path
from typing import Iterator, Literal

from .cyclable import find_w_cycle, theorem5_factor
from .digraph import Digraph, VertexSet, min_semi_degree, validate_certificate
from .errors import BudgetExceeded, DcfError, PreconditionError, TheoremViolation
from .factor import NoFactorReport, solve_w_cycle_factor
from .generators import enumerate_digraphs, enumeration_size, gen_random_min_semidegree
from .io import format_digraph
from .oracle import oracle_cyclable, oracle_factor_exists

Target = Literal["theorem1", "theorem3", "theorem5", "conjecture8"]
TARGETS = ("theorem1", "theorem3", "theorem5", "conjecture8")
POLICIES = ("all", "balanced", "pairs")
ALL_PARTITIONS_CAP = 8


def min_part(target: str) -> int:
    return 3 if target == "conjecture8" else 2


def gate(target: str, delta: int, n: int, w: int) -> bool:
    """Integer form of each hypothesis."""
    if target == "theorem1":
        return 4 * delta >= 3 * n - 3
    if target == "theorem3":
        return 2 * delta >= n
    if target == "theorem5":
        return n >= 2 * w and 2 * delta >= n + 2 * w - 2
    if target == "conjecture8":
        return 3 * delta >= 2 * n
    raise PreconditionError(f"unknown sweep target {target!r}")


def gate_degree(target: str, n: int, w: int) -> int:
    """Smallest semi-degree passing :func:`gate`."""
    return next(d for d in range(n + 1) if gate(target, d, n, w) or d == n)


def integer_partitions(total: int, smallest: int = 2, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``total`` into parts ``>= smallest``, parts non-increasing."""
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), smallest - 1, -1):
        for rest in integer_partitions(total - first, smallest, first):
            yield (first,) + rest


def partitions_for(policy: str, w: int, smallest: int = 2) -> list[tuple[int, ...]]:
    """Partition shapes tried for ``|W| = w``.

    ``balanced`` splits into two near-equal halves when both reach
    ``2 * smallest`` total, else one part; ``pairs`` uses parts of the
    minimum size plus one larger part for the remainder.
    """
    if w < smallest:
        return []
    if policy == "all":
        if w > ALL_PARTITIONS_CAP:
            return partitions_for("balanced", w, smallest)
        return list(integer_partitions(w, smallest))
    if policy == "balanced":
        if w >= 2 * smallest:
            return [((w + 1) // 2, w // 2)]
        return [(w,)]
    if policy == "pairs":
        k, rem = divmod(w, smallest)
        parts = [smallest] * k
        parts[-1] += rem
        return [tuple(sorted(parts, reverse=True))]
    raise PreconditionError(f"unknown partition policy {policy!r}")


@dataclass
class SweepConfig:
    target: str
    n_values: list[int]
    mode: Literal["exhaustive", "random"] = "exhaustive"
    seed: int = 0
    count: int = 1000
    policy: str = "all"
    oracle_max_n: int = 8
    huge: bool = False
    workers: int | None = None
    budget: int = 10_000
    out_dir: str | None = None

    def validate(self) -> None:
        if self.target not in TARGETS:
            raise PreconditionError(f"target must be one of {TARGETS}, got {self.target!r}")
        if self.mode not in ("exhaustive", "random"):
            raise PreconditionError(f"mode must be exhaustive or random, got {self.mode!r}")
        if self.policy not in POLICIES:
            raise PreconditionError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not self.n_values or min(self.n_values) < 2:
            raise PreconditionError("n values must be >= 2")
        if self.mode == "random" and self.count < 1:
            raise PreconditionError("random sweeps need count >= 1")
        if self.mode == "exhaustive":
            limit = 5 if self.huge else 4
            if max(self.n_values) > limit:
                raise PreconditionError(f"exhaustive sweeps above n={limit} need the huge flag")


@dataclass
class SweepSummary:
    target: str
    seed: int
    build: str
    instances: int = 0
    gated: int = 0
    runs: int = 0
    successes: int = 0
    failures: int = 0
    backtracking: int = 0
    fallback: int = 0
    oracle_checked: int = 0
    oracle_disagreements: int = 0
    counterexamples: int = 0
    wall_time: float = 0.0
    failure_samples: list[dict] = field(default_factory=list)
    counterexample_files: list[str] = field(default_factory=list)

    def merge(self, part: dict) -> None:
        for key in (
            "instances",
            "gated",
            "runs",
            "successes",
            "failures",
            "backtracking",
            "fallback",
            "oracle_checked",
            "oracle_disagreements",
            "counterexamples",
        ):
            setattr(self, key, getattr(self, key) + part[key])
        self.failure_samples.extend(part["failure_samples"][: max(0, 10 - len(self.failure_samples))])

    def lines(self) -> list[str]:
        out = [
            f"target {self.target}",
            f"seed {self.seed}",
            f"build {self.build}",
            f"instances {self.instances}",
            f"gated {self.gated}",
            f"runs {self.runs}",
            f"successes {self.successes}",
            f"failures {self.failures}",
            f"backtracking {self.backtracking}",
            f"fallback {self.fallback}",
            f"oracle_checked {self.oracle_checked}",
            f"oracle_disagreements {self.oracle_disagreements}",
            f"counterexamples {self.counterexamples}",
            f"wall_time {self.wall_time:.2f}s",
        ]
        out += [f"failure {f}" for f in self.failure_samples]
        out += [f"counterexample_file {p}" for p in self.counterexample_files]
        return out


def build_id() -> str:
    try:
        res = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if res.returncode == 0 and res.stdout.strip():
            return res.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unknown"


def _empty_part() -> dict:
    return {
        "instances": 0,
        "gated": 0,
        "runs": 0,
        "successes": 0,
        "failures": 0,
        "backtracking": 0,
        "fallback": 0,
        "oracle_checked": 0,
        "oracle_disagreements": 0,
        "counterexamples": 0,
        "failure_samples": [],
        "counterexample_arcs": [],
    }


def _record_failure(acc: dict, D: Digraph, W, parts, message: str) -> None:
    acc["failures"] += 1
    if len(acc["failure_samples"]) < 10:
        acc["failure_samples"].append(
            {"n": D.n, "arcs": D.sorted_arcs(), "w": list(W), "parts": list(parts or []), "error": message}
        )


def _check_instance(cfg: SweepConfig, D: Digraph, W: VertexSet, acc: dict) -> None:
    """Run the target solver on every partition shape for ``(D, W)``."""
    n = D.n
    if cfg.target == "theorem3":
        acc["runs"] += 1
        stats: dict = {}
        try:
            cyc = find_w_cycle(D, W, "guaranteed", stats=stats)
            if not set(W) <= set(cyc):
                raise TheoremViolation("cycle misses W")
            if len(set(cyc)) != len(cyc) or not all(D.has_arc(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1])):
                raise TheoremViolation("returned sequence is not a directed cycle")
            acc["successes"] += 1
            found = True
        except (DcfError, BudgetExceeded) as exc:
            _record_failure(acc, D, W, None, repr(exc))
            found = False
        acc["fallback"] += bool(stats.get("fallback"))
        if n <= cfg.oracle_max_n:
            acc["oracle_checked"] += 1
            verdict = oracle_cyclable(D, W)
            if verdict.yes != found:
                acc["oracle_disagreements"] += 1
        return

    for parts in partitions_for(cfg.policy, len(W), min_part(cfg.target)):
        acc["runs"] += 1
        if cfg.target == "theorem5":
            try:
                cert = theorem5_factor(D, W, parts)
                if not validate_certificate(D, W, parts, cert):
                    raise TheoremViolation("invalid certificate")
                acc["successes"] += 1
            except DcfError as exc:
                _record_failure(acc, D, W, parts, repr(exc))
            continue
        mode = "guaranteed" if cfg.target == "theorem1" else "best_effort"
        try:
            result = solve_w_cycle_factor(D, W, parts, mode=mode, budget=cfg.budget)
        except DcfError as exc:
            _record_failure(acc, D, W, parts, repr(exc))
            continue
        found = not isinstance(result, NoFactorReport)
        if found:
            if not validate_certificate(D, W, parts, result):
                _record_failure(acc, D, W, parts, "invalid certificate")
                continue
            acc["successes"] += 1
            acc["backtracking"] += result.stats["backtracks"] > 0
            acc["fallback"] += bool(result.stats["fallback"])
        elif cfg.target == "theorem1":
            _record_failure(acc, D, W, parts, "no factor")
        if n <= cfg.oracle_max_n:
            acc["oracle_checked"] += 1
            verdict = oracle_factor_exists(D, W, parts)
            if verdict.yes != found:
                acc["oracle_disagreements"] += 1
            if cfg.target == "conjecture8" and verdict.no:
                acc["counterexamples"] += 1
                acc["counterexample_arcs"].append((D.n, D.sorted_arcs(), list(W), list(parts)))
        elif cfg.target == "conjecture8" and not found:
            acc["counterexamples"] += 1
            acc["counterexample_arcs"].append((D.n, D.sorted_arcs(), list(W), list(parts)))


def _w_sets(target: str, n: int) -> Iterator[tuple[int, ...]]:
    smallest = min_part(target)
    for size in range(smallest, n + 1):
        yield from combinations(range(n), size)


def _exhaustive_chunk(args: tuple[SweepConfig, int, int, int]) -> dict:
    cfg, n, start, stop = args
    acc = _empty_part()
    w_sets = list(_w_sets(cfg.target, n))
    for D in enumerate_digraphs(n, huge=cfg.huge, start=start, stop=stop):
        acc["instances"] += 1
        semi = [min(D.out_mask[v].bit_count(), D.in_mask[v].bit_count()) for v in range(n)]
        for W in w_sets:
            delta = min(semi[v] for v in W)
            if not gate(cfg.target, delta, n, len(W)):
                continue
            acc["gated"] += 1
            _check_instance(cfg, D, VertexSet(W), acc)
    return acc


def random_instance(cfg: SweepConfig, index: int) -> tuple[Digraph, VertexSet] | None:
    """Instance ``index`` of a random sweep: deterministic in ``(seed, index)``."""
    rng = random.Random(f"{cfg.seed}:{index}")
    n = cfg.n_values[index % len(cfg.n_values)]
    smallest = min_part(cfg.target)
    hi = n // 2 if cfg.target == "theorem5" else n
    if hi < smallest:
        return None
    w = rng.randint(smallest, hi)
    target = gate_degree(cfg.target, n, w)
    if target > n - 1:
        return None
    return gen_random_min_semidegree(n, w, target, rng.randrange(1 << 30))


def _random_chunk(args: tuple[SweepConfig, int, int]) -> dict:
    cfg, start, stop = args
    acc = _empty_part()
    for i in range(start, stop):
        inst = random_instance(cfg, i)
        acc["instances"] += 1
        if inst is None:
            continue
        D, W = inst
        if not gate(cfg.target, min_semi_degree(D, W), D.n, len(W)):
            continue
        acc["gated"] += 1
        _check_instance(cfg, D, W, acc)
    return acc


def worker_count(cfg: SweepConfig) -> int:
    env = os.environ.get("DCF_WORKERS")
    if env:
        return max(1, int(env))
    if cfg.workers:
        return cfg.workers
    return os.cpu_count() or 1


def run_sweep(cfg: SweepConfig) -> SweepSummary:
    """Execute a sweep; counts are aggregated order-independently."""
    cfg.validate()
    t0 = time.perf_counter()
    summary = SweepSummary(cfg.target, cfg.seed, build_id())
    workers = worker_count(cfg)
    if cfg.mode == "exhaustive":
        jobs = []
        for n in cfg.n_values:
            total = enumeration_size(n)
            step = max(1, -(-total // (workers * 8)))
            jobs += [(cfg, n, s, min(total, s + step)) for s in range(0, total, step)]
        fn = _exhaustive_chunk
    else:
        step = max(1, -(-cfg.count // (workers * 8)))
        jobs = [(cfg, s, min(cfg.count, s + step)) for s in range(0, cfg.count, step)]
        fn = _random_chunk
    if workers == 1:
        parts = [fn(job) for job in jobs]
    else:
        with Pool(workers) as pool:
            parts = pool.map(fn, jobs)
    found: list = []
    for part in parts:
        summary.merge(part)
        found.extend(part["counterexample_arcs"])
    if cfg.out_dir and found:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, (n, arcs, W, parts_) in enumerate(sorted(found)):
            path = out / f"{cfg.target}_counterexample_{i:04d}.txt"
            comment = f"W {' '.join(map(str, W))} parts {','.join(map(str, parts_))}"
            path.write_text(format_digraph(Digraph(n, arcs), comment))
            summary.counterexample_files.append(str(path))
    summary.wall_time = time.perf_counter() - t0
    return summary
