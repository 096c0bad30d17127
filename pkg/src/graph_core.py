"""Graph values with ghost-vertex semantics.

A ``Graph`` wraps a frozen ``networkx.Graph``; every operation returns a new
value. Vertex ids are integers handed out by a per-graph counter
(``next_id``), so ids are never reused after contraction and a contraction
result keeps the id of the vertex it was contracted onto.
"""
import math
from fractions import Fraction
from itertools import combinations

import networkx as nx

from src.errors import BadParams, DegenerateInput, Disconnected, NoAttachment, NotAnEdge

INF = math.inf

# Ghost markings are plain frozensets of vertex ids.
GhostMarking = frozenset


class Graph:
    __slots__ = ("_nx", "next_id", "arcs", "weights")

    def __init__(self, nx_graph, next_id=None, arcs=None, weights=None):
        if nx.number_of_selfloops(nx_graph):
            raise DegenerateInput("graphs must be simple: self-loop found")
        self._nx = nx.freeze(nx_graph)
        top = max(nx_graph.nodes, default=-1) + 1
        self.next_id = top if next_id is None else max(next_id, top)
        self.arcs = frozenset(arcs) if arcs is not None else None
        self.weights = dict(weights) if weights else None

    @classmethod
    def from_edges(cls, n, edges, arcs=None, weights=None):
        G = nx.Graph()
        G.add_nodes_from(range(n))
        for u, v in edges:
            if u == v:
                raise DegenerateInput(f"self-loop on vertex {u}")
            G.add_edge(u, v)
        if arcs is not None:
            for u, v in arcs:
                if u == v:
                    raise DegenerateInput(f"self-loop on vertex {u}")
                G.add_edge(u, v)
        return cls(G, next_id=n, arcs=arcs, weights=weights)

    @property
    def nx(self):
        return self._nx

    @property
    def directed(self):
        return self.arcs is not None

    @property
    def n(self):
        return self._nx.number_of_nodes()

    @property
    def m(self):
        return self._nx.number_of_edges()

    def vertices(self):
        return frozenset(self._nx.nodes)

    def sorted_vertices(self):
        return sorted(self._nx.nodes)

    def edges(self):
        return [(min(u, v), max(u, v)) for u, v in self._nx.edges]

    def has_vertex(self, v):
        return v in self._nx

    def has_edge(self, u, v):
        return self._nx.has_edge(u, v)

    def has_arc(self, u, v):
        if self.arcs is None:
            return self._nx.has_edge(u, v)
        return (u, v) in self.arcs

    def neighbors(self, v):
        return self._nx.adj[v]

    def degree(self, v):
        return self._nx.degree[v]

    def weight(self, u, v):
        if not self.weights:
            return Fraction(1)
        key = (u, v) if self.arcs is not None else (min(u, v), max(u, v))
        return self.weights.get(key, Fraction(1))

    def induced(self, keep):
        keep = set(keep)
        sub = nx.Graph(self._nx.subgraph(keep))
        arcs = None
        if self.arcs is not None:
            arcs = {(u, v) for u, v in self.arcs if u in keep and v in keep}
        weights = None
        if self.weights:
            weights = {e: w for e, w in self.weights.items() if e[0] in keep and e[1] in keep}
        return Graph(sub, next_id=self.next_id, arcs=arcs, weights=weights)

    def without(self, drop):
        drop = set(drop)
        return self.induced(v for v in self._nx.nodes if v not in drop)

    def underlying(self):
        return Graph(nx.Graph(self._nx), next_id=self.next_id)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, next_id={self.next_id})"


def _rebuild(g, nx_graph, next_id=None):
    return Graph(nx_graph, next_id=g.next_id if next_id is None else next_id)


def _outside_neighbors(g, s):
    out = set()
    for x in s:
        out.update(g.nx.adj[x])
    return out - set(s)


def contract_edge(g, u, v, keep):
    if not g.has_edge(u, v):
        raise NotAnEdge(f"{u}-{v} is not an edge")
    if keep not in (u, v):
        raise BadParams(f"keep vertex {keep} must be an endpoint of {u}-{v}")
    other = v if keep == u else u
    H = nx.contracted_nodes(g.nx, keep, other, self_loops=False, copy=True)
    H.nodes[keep].pop("contraction", None)
    return _rebuild(g, H)


def _merge(g, s, target):
    nbrs = _outside_neighbors(g, s)
    nbrs.discard(target)
    H = nx.Graph(g.nx)
    H.remove_nodes_from(s)
    H.add_edges_from((target, w) for w in nbrs)
    return _rebuild(g, H)


def contract_set_onto(g, s, target):
    s = set(s)
    if target in s:
        raise BadParams(f"target {target} must not belong to the contracted set")
    if not s:
        raise NoAttachment("nothing to contract")
    if not nx.is_connected(g.nx.subgraph(s)):
        raise Disconnected(f"contracted set {sorted(s)} is not connected")
    if not any(w in s for w in g.nx.adj[target]):
        raise NoAttachment(f"target {target} has no neighbor in the contracted set")
    return _merge(g, s, target)


def absorb_into(g, s, target):
    """Contract every component of g[s] onto target; s together with target must be connected."""
    s = set(s) - {target}
    if not s:
        return g
    for comp in nx.connected_components(g.nx.subgraph(s)):
        if not any(w in comp for w in g.nx.adj[target]):
            raise NoAttachment(f"component {sorted(comp)} does not touch {target}")
    return _merge(g, s, target)


def contract_to_fresh(g, s):
    s = set(s)
    if not s:
        raise NoAttachment("cannot contract an empty set")
    if not nx.is_connected(g.nx.subgraph(s)):
        raise Disconnected(f"contracted set {sorted(s)} is not connected")
    fresh = g.next_id
    nbrs = _outside_neighbors(g, s)
    H = nx.Graph(g.nx)
    H.remove_nodes_from(s)
    H.add_node(fresh)
    H.add_edges_from((fresh, w) for w in nbrs)
    return _rebuild(g, H, next_id=fresh + 1), fresh


def ghost_distances(g, R, source, cutoff=None):
    """Ghost-aware distances from source: non-ghost vertices on the path, minus one."""

    def enter(u, v, d):
        return 0 if v in R else 1

    offset = 1 if source in R else 0
    limit = None if cutoff is None else cutoff + offset
    raw = nx.single_source_dijkstra_path_length(g.nx, source, cutoff=limit, weight=enter)
    return {v: max(0, d - offset) for v, d in raw.items()}


def ghost_distance(g, R, x, y):
    return ghost_distances(g, R, x).get(y, INF)


def ball(g, R, v, r):
    return frozenset(ghost_distances(g, R, v, cutoff=r))


def reach(g, u):
    return frozenset(nx.node_connected_component(g.nx, u))


def torso(g, R):
    H = nx.Graph(g.nx)
    for ghost in sorted(v for v in R if v in H):
        nbrs = list(H.adj[ghost])
        H.add_edges_from(combinations(nbrs, 2))
        H.remove_node(ghost)
    return _rebuild(g, H)


def normalize_ghosts(g, R, root):
    R = set(v for v in R if g.has_vertex(v))
    if root in R:
        raise BadParams(f"root {root} cannot be a ghost")
    while True:
        at_root = sorted(w for w in g.neighbors(root) if w in R)
        if at_root:
            g = contract_edge(g, root, at_root[0], keep=root)
            R.discard(at_root[0])
            continue
        pair = min(
            ((min(a, b), max(a, b)) for a in R for b in g.neighbors(a) if b in R),
            default=None,
        )
        if pair is None:
            return g, GhostMarking(R)
        g = contract_edge(g, pair[0], pair[1], keep=pair[0])
        R.discard(pair[1])
