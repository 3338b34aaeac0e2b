"""Edge-list and W-file parsing; certificate rendering as JSON or DOT."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .digraph import CycleFactorCertificate, Digraph, Partition, VertexSet, validate_certificate
from .errors import ParseError, PreconditionError

DOT_PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan")


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based columns."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def _int_token(tok: str, col: int, lineno: int, source: str) -> int:
    if not tok.isdigit():
        raise ParseError(f"expected a non-negative integer, got {tok!r}", lineno, col, source)
    return int(tok)


def parse_digraph(text: str, source: str = "<input>") -> Digraph:
    """Parse ``n <N>`` followed by ``u v`` arc lines; ``#`` lines are comments."""
    n: int | None = None
    arcs: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    last = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        last = lineno
        toks = _tokens(line)
        if not toks or toks[0][0].startswith("#"):
            continue
        if n is None:
            if toks[0][0] != "n" or len(toks) != 2:
                raise ParseError("expected header 'n <N>'", lineno, toks[0][1], source)
            n = _int_token(*toks[1], lineno, source)
            continue
        if len(toks) != 2:
            col = toks[2][1] if len(toks) > 2 else len(line) + 1
            raise ParseError("expected exactly two vertex ids 'u v'", lineno, col, source)
        (tu, cu), (tv, cv) = toks
        u = _int_token(tu, cu, lineno, source)
        v = _int_token(tv, cv, lineno, source)
        if u >= n:
            raise ParseError(f"vertex {u} out of range for n={n}", lineno, cu, source)
        if v >= n:
            raise ParseError(f"vertex {v} out of range for n={n}", lineno, cv, source)
        if u == v:
            raise ParseError(f"loop at vertex {u}", lineno, cu, source)
        if (u, v) in seen:
            raise ParseError(f"duplicate arc {u} {v} (first on line {seen[(u, v)]})", lineno, cu, source)
        seen[(u, v)] = lineno
        arcs.append((u, v))
    if n is None:
        raise ParseError("missing header 'n <N>'", max(last, 1), 1, source)
    return Digraph(n, arcs)


def parse_digraph_file(path: str | Path) -> Digraph:
    return parse_digraph(Path(path).read_text(), str(path))


def parse_w(text: str, n: int | None = None, source: str = "<input>") -> VertexSet:
    """Whitespace-separated vertex ids; ``#`` starts a comment line."""
    ids: list[int] = []
    where: dict[int, tuple[int, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if toks and toks[0][0].startswith("#"):
            continue
        for tok, col in toks:
            v = _int_token(tok, col, lineno, source)
            if n is not None and v >= n:
                raise ParseError(f"vertex {v} out of range for n={n}", lineno, col, source)
            if v in where:
                raise ParseError(f"duplicate vertex {v}", lineno, col, source)
            where[v] = (lineno, col)
            ids.append(v)
    return VertexSet(ids)


def parse_w_file(path: str | Path, n: int | None = None) -> VertexSet:
    return parse_w(Path(path).read_text(), n, str(path))


def format_digraph(D: Digraph, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(f"n {D.n}")
    lines += [f"{u} {v}" for u, v in D.sorted_arcs()]
    return "\n".join(lines) + "\n"


def certificate_json(D: Digraph, W: Iterable[int], cert: CycleFactorCertificate) -> dict:
    W = VertexSet(W, D.n)
    cycles = sorted(cert.cycles, key=lambda c: min(c))
    wset = set(W)
    return {
        "n": D.n,
        "w": list(W),
        "cycles": [{"vertices": list(c), "w_count": sum(v in wset for v in c)} for c in cycles],
    }


def emit_certificate(
    D: Digraph,
    W: Iterable[int],
    parts: Iterable[int],
    cert: CycleFactorCertificate,
    fmt: str = "json",
) -> str:
    """Render a certificate; refuses one that does not validate."""
    W = VertexSet(W, D.n)
    report = validate_certificate(D, W, Partition(parts, total=len(W)) if W else list(parts), cert)
    if not report:
        raise PreconditionError(f"refusing to emit an invalid certificate: {report}")
    if fmt == "json":
        return json.dumps(certificate_json(D, W, cert)) + "\n"
    if fmt == "dot":
        return cycles_dot(D.n, W, sorted(cert.cycles, key=min))
    raise PreconditionError(f"unknown format {fmt!r}")


def cycles_dot(n: int, W: Iterable[int], cycles: Iterable[Iterable[int]]) -> str:
    """Directed rings, one colour per cycle; W-vertices filled."""
    wset = set(W)
    lines = ["digraph certificate {", "  node [shape=circle];"]
    for v in range(n):
        style = ' [style=filled, fillcolor="lightgray"]' if v in wset else ""
        lines.append(f"  {v}{style};")
    for i, cyc in enumerate(cycles):
        cyc = list(cyc)
        color = DOT_PALETTE[i % len(DOT_PALETTE)]
        for j, u in enumerate(cyc):
            lines.append(f'  {u} -> {cyc[(j + 1) % len(cyc)]} [color="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
