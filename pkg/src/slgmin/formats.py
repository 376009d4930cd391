"""Text formats: problem files, cut graph files and trace CSVs.

Problem files are line oriented with ``#`` comments::

    n 3
    c 0.5 -0.3 0            # dense, exactly n floats
    c sparse 0:0.5 2:-0.3   # or sparse index:value pairs
    threshold d=2 y=1 0:1 1:1
    concave 0:0.5 2:1 | curve (0,0);(0.75,0.6);(1.5,0.9)

The ``n`` line must come first; ``c`` may appear once (zeros when absent).
Tokens are whitespace separated and floats accept scientific notation.
Errors carry the offending line and column.

Cut graphs use a DIMACS-like grammar: ``c`` comment lines, one
``p cut <nodes> <edges>`` header, then 1-indexed ``e <u> <v> <weight>``
lines.  Duplicate edges sum their weights; the declared edge count must
match the number of ``e`` lines.

Traces are UTF-8 CSV with header ``iter,f_mu,gap,best_f,cert_gap,ms``; the
certificate column is empty on iterations without a check.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional

import numpy as np

from .errors import ParseError
from .model import (ConcaveCurve, ConcavePotential, DecomposableFunction,
                    ThresholdPotential)
from .reformulate import WeightedGraph
from .solver import TraceRow

TRACE_HEADER = "iter,f_mu,gap,best_f,cert_gap,ms"

_TOKEN = re.compile(r"\S+")
_CURVE_POINT = re.compile(r"^\(([^,()]+),([^,()]+)\)$")


def _fmt(x: float) -> str:
    return repr(float(x))


def _tokens(line: str):
    """(column, token) pairs, 1-based columns, comment tail stripped."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]


def _parse_float(tok: str, lineno: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", lineno, col) from None


def _parse_pair(tok: str, lineno: int, col: int):
    head, sep, tail = tok.partition(":")
    if not sep:
        raise ParseError(f"expected index:value, got {tok!r}", lineno, col)
    try:
        idx = int(head)
    except ValueError:
        raise ParseError(f"bad index in {tok!r}", lineno, col) from None
    return idx, _parse_float(tail, lineno, col)


def _parse_keyed(tok: str, key: str, lineno: int, col: int) -> float:
    if not tok.startswith(key + "="):
        raise ParseError(f"expected {key}=<value>, got {tok!r}", lineno, col)
    return _parse_float(tok[len(key) + 1:], lineno, col)


def _parse_curve(tokens, lineno: int) -> ConcaveCurve:
    if not tokens or tokens[0][1] != "curve":
        col = tokens[0][0] if tokens else 1
        raise ParseError("expected 'curve' after '|'", lineno, col)
    col = tokens[0][0]
    blob = "".join(tok for _, tok in tokens[1:])
    if not blob:
        raise ParseError("empty curve", lineno, col)
    points = []
    for chunk in blob.split(";"):
        m = _CURVE_POINT.match(chunk)
        if not m:
            raise ParseError(f"bad curve point {chunk!r}", lineno, col)
        points.append((_parse_float(m.group(1), lineno, col),
                       _parse_float(m.group(2), lineno, col)))
    try:
        return ConcaveCurve.from_points(points)
    except ValueError as exc:
        raise ParseError(str(exc), lineno, col) from None


def parse_problem(text: str) -> DecomposableFunction:
    """Parse a problem file into a validated function."""
    n: Optional[int] = None
    c: Optional[np.ndarray] = None
    thresholds: list[ThresholdPotential] = []
    concaves: list[ConcavePotential] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokens(line)
        if not tokens:
            continue
        col0, head = tokens[0]
        rest = tokens[1:]
        if head == "n":
            if n is not None:
                raise ParseError("duplicate n line", lineno, col0)
            if len(rest) != 1:
                raise ParseError("n takes exactly one integer", lineno, col0)
            try:
                n = int(rest[0][1])
            except ValueError:
                raise ParseError(f"bad ground set size {rest[0][1]!r}",
                                 lineno, rest[0][0]) from None
            if n < 1:
                raise ParseError("n must be >= 1", lineno, rest[0][0])
            continue
        if n is None:
            raise ParseError("the n line must come first", lineno, col0)
        if head == "c":
            if c is not None:
                raise ParseError("duplicate c line", lineno, col0)
            c = np.zeros(n)
            if rest and rest[0][1] == "sparse":
                for col, tok in rest[1:]:
                    idx, val = _parse_pair(tok, lineno, col)
                    if not 0 <= idx < n:
                        raise ParseError(f"index {idx} out of range", lineno, col)
                    c[idx] = val
            else:
                if len(rest) != n:
                    raise ParseError(f"c needs {n} values, got {len(rest)}",
                                     lineno, col0)
                for i, (col, tok) in enumerate(rest):
                    c[i] = _parse_float(tok, lineno, col)
            continue
        if head == "threshold":
            if len(rest) < 2:
                raise ParseError("threshold needs d=, y= and weights", lineno, col0)
            d = _parse_keyed(rest[0][1], "d", lineno, rest[0][0])
            y = _parse_keyed(rest[1][1], "y", lineno, rest[1][0])
            idxs, ws = _parse_weight_list(rest[2:], n, lineno, col0)
            try:
                thresholds.append(ThresholdPotential(idxs, ws, y=y, d=d))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col0) from None
            continue
        if head == "concave":
            split = next((i for i, (_, tok) in enumerate(rest) if tok == "|"), None)
            if split is None:
                raise ParseError("concave needs '| curve ...'", lineno, col0)
            idxs, ws = _parse_weight_list(rest[:split], n, lineno, col0)
            curve = _parse_curve(rest[split + 1:], lineno)
            try:
                concaves.append(ConcavePotential(idxs, ws, curve))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col0) from None
            continue
        raise ParseError(f"unknown directive {head!r}", lineno, col0)

    if n is None:
        raise ParseError("missing n line", 1, 1)
    if c is None:
        c = np.zeros(n)
    return DecomposableFunction(n, c, thresholds=tuple(thresholds),
                                concaves=tuple(concaves))


def _parse_weight_list(tokens, n: int, lineno: int, col0: int):
    if not tokens:
        raise ParseError("empty weight list", lineno, col0)
    idxs, ws = [], []
    for col, tok in tokens:
        idx, val = _parse_pair(tok, lineno, col)
        if not 0 <= idx < n:
            raise ParseError(f"index {idx} out of range for n={n}", lineno, col)
        if idx in idxs:
            raise ParseError(f"duplicate index {idx}", lineno, col)
        idxs.append(idx)
        ws.append(val)
    return np.array(idxs, dtype=np.intp), np.array(ws)


def serialize_problem(f: DecomposableFunction) -> str:
    """Canonical text form; parses back to an eval-identical function."""
    lines = [f"n {f.n}"]
    lines.append("c " + " ".join(_fmt(v) for v in f.c))
    for p in f.thresholds:
        pairs = " ".join(f"{int(i)}:{_fmt(w)}"
                         for i, w in zip(p.indices, p.weights))
        lines.append(f"threshold d={_fmt(p.d)} y={_fmt(p.y)} {pairs}".rstrip())
    for p in f.concaves:
        pairs = " ".join(f"{int(i)}:{_fmt(w)}"
                         for i, w in zip(p.indices, p.weights))
        pts = ";".join(f"({_fmt(t)},{_fmt(v)})"
                       for t, v in zip(p.curve.ts, p.curve.vs))
        lines.append(f"concave {pairs} | curve {pts}")
    if f.offset:
        lines.append(f"# constant offset {_fmt(f.offset)} excluded from values")
    return "\n".join(lines) + "\n"


def parse_dimacs_cut(text: str) -> WeightedGraph:
    """Parse a cut graph file; duplicate edges are summed."""
    n = None
    declared = None
    weights: dict[tuple, float] = {}
    e_lines = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokens(line)
        if not tokens:
            continue
        col0, head = tokens[0]
        if head == "c":
            continue
        if head == "p":
            if n is not None:
                raise ParseError("duplicate problem header", lineno, col0)
            if len(tokens) != 4 or tokens[1][1] != "cut":
                raise ParseError("expected 'p cut <nodes> <edges>'", lineno, col0)
            try:
                n = int(tokens[2][1])
                declared = int(tokens[3][1])
            except ValueError:
                raise ParseError("bad problem header counts", lineno, col0) from None
            if n < 1 or declared < 0:
                raise ParseError("bad problem header counts", lineno, col0)
            continue
        if head == "e":
            if n is None:
                raise ParseError("edge before the problem header", lineno, col0)
            if len(tokens) != 4:
                raise ParseError("expected 'e <u> <v> <weight>'", lineno, col0)
            try:
                u = int(tokens[1][1])
                v = int(tokens[2][1])
            except ValueError:
                raise ParseError("bad edge endpoints", lineno, col0) from None
            w = _parse_float(tokens[3][1], lineno, tokens[3][0])
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"edge ({u}, {v}) out of range for {n} nodes",
                                 lineno, col0)
            if u == v:
                raise ParseError(f"self-loop at node {u}", lineno, col0)
            key = (min(u, v) - 1, max(u, v) - 1)
            weights[key] = weights.get(key, 0.0) + w
            e_lines += 1
            continue
        raise ParseError(f"unknown line type {head!r}", lineno, col0)
    if n is None:
        raise ParseError("missing 'p cut' header", 1, 1)
    if e_lines != declared:
        raise ParseError(f"header declares {declared} edges, found {e_lines}", 1, 1)
    edges = tuple((k, l, w) for (k, l), w in sorted(weights.items()))
    try:
        return WeightedGraph(n, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_trace(rows: Iterable[TraceRow]) -> str:
    out = [TRACE_HEADER]
    for r in rows:
        cert = "" if r.cert_gap is None else _fmt(r.cert_gap)
        out.append(f"{r.t},{_fmt(r.f_mu)},{_fmt(r.gap)},{_fmt(r.best_value)},"
                   f"{cert},{r.ms:.3f}")
    return "\n".join(out) + "\n"


def write_trace(path, rows: Iterable[TraceRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_trace(rows))


def parse_point(text: str, n: int) -> np.ndarray:
    """Comma-separated floats for CLI --point arguments."""
    parts = [p for p in (chunk.strip() for chunk in text.split(",")) if p]
    if len(parts) != n:
        raise ValueError(f"point needs {n} comma-separated values, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ValueError(f"bad point value: {exc}") from None


def parse_index_set(text: str, n: int) -> frozenset:
    """Comma-separated indices for CLI --set arguments; empty means the empty set."""
    parts = [p for p in (chunk.strip() for chunk in text.split(",")) if p]
    try:
        members = frozenset(int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"bad set index: {exc}") from None
    if any(k < 0 or k >= n for k in members):
        raise ValueError(f"set index out of range for n={n}")
    return members
