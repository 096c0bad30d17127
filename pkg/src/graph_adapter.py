"""Reading and writing graphs, vertex sets, decompositions and JSON artifacts.

Edge-list text: a header ``n m [directed] [weighted]`` followed by m lines
``u v [w]`` with 0-based ids; ``#`` starts a comment. Weights are exact
rationals (``3``, ``1/2``, ``0.25``).
"""
import io
import json
from fractions import Fraction
from pathlib import Path

import pandas as pd

from src.audit import log_info, log_warning
from src.errors import DegenerateInput, ParseError
from src.graph_core import Graph
from src.tree_decomposition import from_pace, to_pace

FLAGS = ("directed", "weighted")


def _text_of(source):
    path = Path(source)
    try:
        return path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc


def parse_header(line):
    parts = line.split()
    if len(parts) < 2:
        raise ParseError(f"header must read 'n m [directed] [weighted]', got {line!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ParseError(f"header counts are not integers: {line!r}") from exc
    unknown = [p for p in parts[2:] if p not in FLAGS]
    if unknown:
        raise ParseError(f"unknown header flags {unknown}; expected some of {FLAGS}")
    if n < 0 or m < 0:
        raise ParseError(f"negative counts in header {line!r}")
    return n, m, "directed" in parts[2:], "weighted" in parts[2:]


def _rational(token, lineno):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"edge {lineno}: weight {token!r} is not a rational") from exc


class GraphDataAdapter:
    def __init__(self, source_type, source):
        """
        source_type: 'edgelist' (path to a file) or 'text' (edge-list contents)
        """
        self.source_type = source_type
        self.source = source
        self.header = None
        self.edges_df = None

    def read_data(self):
        if self.source_type == "edgelist":
            text = _text_of(self.source)
        elif self.source_type == "text":
            text = self.source
        else:
            raise NotImplementedError(f"{self.source_type} not supported yet.")
        lines = [ln for ln in (raw.split("#", 1)[0].strip() for raw in text.splitlines()) if ln]
        if not lines:
            raise ParseError("empty edge list")
        self.header = parse_header(lines[0])
        n, m, directed, weighted = self.header
        width = 3 if weighted else 2
        body = "\n".join(lines[1:])
        if body:
            try:
                self.edges_df = pd.read_csv(io.StringIO(body), sep=r"\s+", header=None, dtype=str)
            except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
                raise ParseError(f"malformed edge lines: {exc}") from exc
        else:
            self.edges_df = pd.DataFrame(columns=list(range(width)), dtype=str)
        if len(self.edges_df) != m:
            raise ParseError(f"header announces {m} edges, found {len(self.edges_df)}")
        if self.edges_df.shape[1] != width:
            raise ParseError(f"edge lines need {width} fields, found {self.edges_df.shape[1]}")
        if self.edges_df.isna().any().any():
            raise ParseError("edge lines have missing fields")
        return self

    def to_graph(self):
        if self.edges_df is None:
            self.read_data()
        n, m, directed, weighted = self.header
        pairs, weights = [], {}
        for lineno, row in enumerate(self.edges_df.itertuples(index=False), start=1):
            try:
                u, v = int(row[0]), int(row[1])
            except ValueError as exc:
                raise ParseError(f"edge {lineno}: ids must be integers, got {row[0]!r} {row[1]!r}") from exc
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge {lineno}: {u}-{v} outside 0..{n - 1}")
            pairs.append((u, v))
            if weighted:
                key = (u, v) if directed else (min(u, v), max(u, v))
                weights[key] = _rational(row[2], lineno)
        try:
            if directed:
                g = Graph.from_edges(n, [], arcs=pairs, weights=weights or None)
            else:
                g = Graph.from_edges(n, pairs, weights=weights or None)
        except DegenerateInput as exc:
            raise ParseError(str(exc)) from exc
        if len(set(pairs)) != len(pairs):
            log_warning(f"{self.source_type} input repeats edges; duplicates were merged")
        log_info(f"read graph: n={g.n} m={g.m} directed={directed} weighted={weighted}")
        return g


def read_graph(path):
    return GraphDataAdapter("edgelist", path).to_graph()


def parse_graph(text):
    return GraphDataAdapter("text", text).to_graph()


def format_edgelist(g):
    flags = [name for name, on in (("directed", g.directed), ("weighted", bool(g.weights))) if on]
    pairs = sorted(g.arcs) if g.directed else sorted(g.edges())
    lines = [" ".join([str(g.n), str(len(pairs))] + flags)]
    for u, v in pairs:
        fields = [str(u), str(v)]
        if g.weights:
            fields.append(str(g.weight(u, v)))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def read_vertex_set(path):
    """A JSON array of ids, or one id per line."""
    text = _text_of(path).strip()
    try:
        if text.startswith("["):
            values = json.loads(text)
        else:
            values = [ln.strip() for ln in text.splitlines() if ln.strip()]
        return frozenset(int(v) for v in values)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: not a vertex set") from exc


def read_decomposition(path):
    return from_pace(_text_of(path))


def write_decomposition(path, td, n):
    Path(path).write_text(to_pace(td, n))


def dumps(payload):
    """Stable JSON: sorted keys so equal seeds give byte-identical artifacts."""
    return json.dumps(payload, sort_keys=True, default=str)


def write_json(path, payload):
    Path(path).write_text(dumps(payload) + "\n")


def read_json(path):
    try:
        return json.loads(_text_of(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from exc
