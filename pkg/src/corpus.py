"""Fixture graphs: grids, cylinders, paths, random trees and stacked triangulations.

All generators are planar by construction. Planted fixtures add a connected
pattern X of size k, a directed k-path (with every other edge oriented at
random) or an orientation with no directed path on three vertices.
"""
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from src.errors import BadParams
from src.graph_core import Graph

KINDS = ("grid", "cylinder", "path", "tree", "random-planar-like")
PLANTS = ("pattern", "directed-path", "unsatisfiable")


@dataclass(frozen=True)
class CorpusItem:
    kind: str
    graph: Graph
    params: dict
    pattern: Optional[frozenset] = None
    path: Optional[tuple] = None

    def to_dict(self):
        body = {"kind": self.kind, "params": dict(self.params), "n": self.graph.n, "m": self.graph.m}
        if self.pattern is not None:
            body["pattern"] = sorted(self.pattern)
        if self.path is not None:
            body["path"] = list(self.path)
        return body


def _need(params, name, least):
    value = params.get(name)
    if value is None:
        raise BadParams(f"missing parameter {name!r}")
    value = int(value)
    if value < least:
        raise BadParams(f"{name} must be at least {least}, got {value}")
    return value


def _grid(rows, cols, periodic=False):
    G = nx.grid_2d_graph(rows, cols, periodic=(False, periodic))
    return nx.relabel_nodes(G, {(r, c): r * cols + c for r, c in G.nodes})


def _stacked_triangulation(n, rng):
    """Start from a triangle and drop each new vertex into a uniformly chosen face."""
    G = nx.Graph([(0, 1), (1, 2), (0, 2)])
    faces = [(0, 1, 2)]
    for v in range(3, n):
        i = int(rng.integers(len(faces)))
        a, b, c = faces[i]
        G.add_edges_from([(v, a), (v, b), (v, c)])
        faces[i] = (a, b, v)
        faces.extend([(b, c, v), (a, c, v)])
    return G


def _build(kind, params, rng):
    if kind == "grid":
        return _grid(_need(params, "rows", 1), _need(params, "cols", 1))
    if kind == "cylinder":
        return _grid(_need(params, "rows", 1), _need(params, "cols", 3), periodic=True)
    if kind == "path":
        return nx.path_graph(_need(params, "n", 1))
    if kind == "tree":
        n = _need(params, "n", 1)
        G = nx.empty_graph(n)
        G.add_edges_from((v, int(rng.integers(v))) for v in range(1, n))
        return G
    if kind == "random-planar-like":
        return _stacked_triangulation(_need(params, "n", 3), rng)
    raise BadParams(f"kind must be one of {KINDS}, got {kind!r}")


def plant_pattern(g, k, rng):
    """Random connected k-set grown from a uniform start vertex."""
    if not 1 <= k <= g.n:
        raise BadParams(f"cannot plant {k} vertices in a graph of {g.n}")
    order = g.sorted_vertices()
    for _ in range(100):
        X = {order[int(rng.integers(len(order)))]}
        frontier = set()
        for v in X:
            frontier.update(g.neighbors(v))
        while len(X) < k and frontier - X:
            options = sorted(frontier - X)
            v = options[int(rng.integers(len(options)))]
            X.add(v)
            frontier.update(g.neighbors(v))
        if len(X) == k:
            return frozenset(X)
    raise BadParams(f"no connected set of {k} vertices found")


def plant_path(g, k, rng, attempts=200):
    """Random simple path on k vertices by self-avoiding walks with restarts."""
    order = g.sorted_vertices()
    for _ in range(attempts):
        walk = [order[int(rng.integers(len(order)))]]
        while len(walk) < k:
            options = sorted(w for w in g.neighbors(walk[-1]) if w not in walk)
            if not options:
                break
            walk.append(options[int(rng.integers(len(options)))])
        if len(walk) == k:
            return tuple(walk)
    raise BadParams(f"no simple path on {k} vertices found in {attempts} attempts")


def orient_along(g, path, rng):
    forward = set(zip(path, path[1:]))
    arcs = set()
    for u, v in g.edges():
        if (u, v) in forward or (v, u) in forward:
            arcs.add((u, v) if (u, v) in forward else (v, u))
        elif rng.random() < 0.5:
            arcs.add((u, v))
        else:
            arcs.add((v, u))
    return Graph(nx.Graph(g.nx), next_id=g.next_id, arcs=arcs)


def orient_bipartite(g):
    """Every arc leaves colour class 0, so no directed path has more than two vertices."""
    if not nx.is_bipartite(g.nx):
        raise BadParams("unsatisfiable orientation needs a bipartite graph")
    colour = {}
    for comp in sorted(nx.connected_components(g.nx), key=min):
        sub = g.nx.subgraph(comp)
        for v, d in nx.single_source_shortest_path_length(sub, min(comp)).items():
            colour[v] = d % 2
    arcs = {(u, v) if colour[u] == 0 else (v, u) for u, v in g.edges()}
    return Graph(nx.Graph(g.nx), next_id=g.next_id, arcs=arcs)


def gen_corpus(kind, params, rng, k=None, plant=None):
    g = Graph(_build(kind, params, rng))
    if plant is None:
        return CorpusItem(kind, g, dict(params))
    if plant not in PLANTS:
        raise BadParams(f"plant must be one of {PLANTS}, got {plant!r}")
    if plant == "unsatisfiable":
        return CorpusItem(kind, orient_bipartite(g), dict(params))
    if k is None:
        raise BadParams(f"planting a {plant} needs k")
    if plant == "pattern":
        return CorpusItem(kind, g, dict(params), pattern=plant_pattern(g, k, rng))
    path = plant_path(g, k, rng)
    return CorpusItem(kind, orient_along(g, path, rng), dict(params), pattern=frozenset(path), path=path)
