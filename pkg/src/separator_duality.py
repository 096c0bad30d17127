"""Separator chains versus nearly-disjoint paths, decided by one min-cost flow.

Every vertex v other than s and t is replaced by two copies: v0 (capacity 1,
cost 0) and v1 (unbounded, cost 1), each split into an in-node and an
out-node carrying that capacity and cost. Each edge uv becomes zero-cost,
unbounded arcs from every out-copy of u to every in-copy of v and back. We
push 2q units from s to t. A cheap flow (cost at most 2pq) decomposes into q
paths that share at most 4p internal vertices each; an expensive one yields
dual potentials y, z whose level sets {v : z_v = 1, y_v0 = j} form a chain
of p separators.
"""
import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from src.audit import log_debug
from src.errors import BadParams, ExtractionFailed, Infeasible
from src.validation import ValidationReport

INFINITE = float("inf")


@dataclass
class FlowNetwork:
    s: int
    t: int
    q: int
    labels: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    head: list = field(default_factory=list)
    cap: list = field(default_factory=list)
    cost: list = field(default_factory=list)
    unbounded: list = field(default_factory=list)
    adj: list = field(default_factory=list)

    @property
    def supply(self):
        return 2 * self.q

    @property
    def cap_inf(self):
        return 2 * self.q

    def node(self, label):
        if label not in self.index:
            self.index[label] = len(self.labels)
            self.labels.append(label)
            self.adj.append([])
        return self.index[label]

    def add_arc(self, a, b, capacity, cost, unbounded=False):
        for frm, to, c, w in ((a, b, capacity, cost), (b, a, 0, -cost)):
            self.adj[frm].append(len(self.head))
            self.head.append(to)
            self.cap.append(c)
            self.cost.append(w)
            self.unbounded.append(unbounded and c > 0)

    def tail(self, arc):
        return self.head[arc ^ 1]

    def in_nodes(self, v):
        if v in (self.s, self.t):
            return [self.index[("st", v)]]
        return [self.index[(v, 0, "in")], self.index[(v, 1, "in")]]

    def out_nodes(self, v):
        if v in (self.s, self.t):
            return [self.index[("st", v)]]
        return [self.index[(v, 0, "out")], self.index[(v, 1, "out")]]

    def vertex_of(self, node):
        label = self.labels[node]
        return label[1] if label[0] == "st" else label[0]


@dataclass
class FlowSolution:
    flow: list
    cost: int
    y: list
    z: dict


@dataclass(frozen=True)
class SeparatorChain:
    chain: tuple

    def to_dict(self):
        return {"chain": [sorted(c) for c in self.chain]}


@dataclass(frozen=True)
class PathFamily:
    paths: tuple
    public: tuple

    def private(self, i):
        return frozenset(self.paths[i][1:-1]) - self.public[i]

    def to_dict(self):
        return {"paths": [list(p) for p in self.paths], "public": [sorted(x) for x in self.public]}


@dataclass(frozen=True)
class DualityOutcome:
    kind: str  # "chain" | "paths"
    chain: Optional[SeparatorChain] = None
    paths: Optional[PathFamily] = None
    cost: int = 0

    def to_dict(self):
        body = self.chain.to_dict() if self.kind == "chain" else self.paths.to_dict()
        body["cost"] = self.cost
        return body


def build_network(g, s, t, q):
    if s == t:
        raise BadParams("s and t must differ")
    if q < 1:
        raise BadParams(f"q must be positive, got {q}")
    net = FlowNetwork(s=s, t=t, q=q)
    net.node(("st", s))
    net.node(("st", t))
    inner = [v for v in g.sorted_vertices() if v not in (s, t)]
    for v in inner:
        for copy in (0, 1):
            net.node((v, copy, "in"))
            net.node((v, copy, "out"))
    for v in inner:
        net.add_arc(net.index[(v, 0, "in")], net.index[(v, 0, "out")], 1, 0)
        net.add_arc(net.index[(v, 1, "in")], net.index[(v, 1, "out")], net.cap_inf, 1, unbounded=True)
    for u, v in sorted(g.edges()):
        for a, b in ((u, v), (v, u)):
            for x in net.out_nodes(a):
                for y in net.in_nodes(b):
                    net.add_arc(x, y, net.cap_inf, 0, unbounded=True)
    return net


def _dijkstra(net, flow, pi, source):
    """Reduced-cost shortest paths; on equal distance the settled predecessor with the smaller node id wins."""
    dist = [INFINITE] * len(net.labels)
    prev = [None] * len(net.labels)
    done = [False] * len(net.labels)
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for arc in net.adj[x]:
            if net.cap[arc] - flow[arc] <= 0:
                continue
            y = net.head[arc]
            if done[y]:
                continue
            nd = d + net.cost[arc] + pi[x] - pi[y]
            if nd < dist[y]:
                dist[y] = nd
                prev[y] = arc
                heapq.heappush(heap, (nd, y))
            elif nd == dist[y] and x < net.tail(prev[y]):
                prev[y] = arc
    return dist, prev


def _residual_distances(net, flow, source):
    """Label-correcting shortest paths; unbounded arcs are always usable forwards."""
    n = len(net.labels)
    dist = [INFINITE] * n
    dist[source] = 0
    queue, queued = deque([source]), [False] * n
    queued[source] = True
    budget = n * len(net.head) + n
    while queue:
        budget -= 1
        if budget < 0:
            raise ExtractionFailed("negative cycle in the final residual network")
        x = queue.popleft()
        queued[x] = False
        for arc in net.adj[x]:
            if not (net.unbounded[arc] or net.cap[arc] - flow[arc] > 0):
                continue
            y = net.head[arc]
            nd = dist[x] + net.cost[arc]
            if nd < dist[y]:
                dist[y] = nd
                if not queued[y]:
                    queued[y] = True
                    queue.append(y)
    return dist


def min_cost_flow(net):
    s, t = net.index[("st", net.s)], net.index[("st", net.t)]
    flow = [0] * len(net.head)
    pi = [0] * len(net.labels)
    pushed = 0
    while pushed < net.supply:
        dist, prev = _dijkstra(net, flow, pi, s)
        if dist[t] == INFINITE:
            raise Infeasible(f"only {pushed} of {net.supply} units reach t; is the graph connected?")
        for x in range(len(pi)):
            pi[x] += min(dist[x], dist[t])
        amount, x = net.supply - pushed, t
        while x != s:
            arc = prev[x]
            amount = min(amount, net.cap[arc] - flow[arc])
            x = net.tail(arc)
        x = t
        while x != s:
            arc = prev[x]
            flow[arc] += amount
            flow[arc ^ 1] -= amount
            x = net.tail(arc)
        pushed += amount
    total = sum(flow[a] * net.cost[a] for a in range(0, len(net.head), 2))

    y = _residual_distances(net, flow, s)
    if any(d == INFINITE for d in y):
        raise ExtractionFailed("some network node is unreachable in the residual network")
    z = {}
    for label, node in net.index.items():
        if label[0] != "st" and label[1:] == (0, "in"):
            gap = y[net.index[(label[0], 0, "out")]] - y[node]
            z[label[0]] = max(0, gap)
            if z[label[0]] > 1:
                raise ExtractionFailed(f"dual value z={z[label[0]]} > 1 at vertex {label[0]}")
    dual = net.supply * (y[t] - y[s]) - sum(z.values())
    if dual != total:
        raise ExtractionFailed(f"strong duality fails: cost {total} != dual {dual}")
    log_debug(f"min-cost flow: 2q={net.supply} cost={total} y_t={y[t]}")
    return FlowSolution(flow=flow, cost=total, y=y, z=z)


def _unit_paths(net, flow):
    """Decompose the flow into unit s-t node sequences, cancelling cycles on the way."""
    s, t = net.index[("st", net.s)], net.index[("st", net.t)]
    left = {a: flow[a] for a in range(0, len(net.head), 2) if flow[a] > 0}
    paths = []
    for _ in range(net.supply):
        nodes, arcs = [s], []
        position = {s: 0}
        while nodes[-1] != t:
            x = nodes[-1]
            out = [a for a in net.adj[x] if a % 2 == 0 and left.get(a, 0) > 0]
            if not out:
                raise ExtractionFailed(f"flow does not continue from node {net.labels[x]}")
            arc = min(out, key=lambda a: net.head[a])
            y = net.head[arc]
            if y in position:
                j = position[y]
                for a in arcs[j:] + [arc]:
                    left[a] -= 1
                for node in nodes[j + 1:]:
                    del position[node]
                del nodes[j + 1:]
                del arcs[j:]
                continue
            position[y] = len(nodes)
            nodes.append(y)
            arcs.append(arc)
        for a in arcs:
            left[a] -= 1
        paths.append(nodes)
    return paths


def _check_tight(net, sol, nodes):
    y = sol.y
    for a, b in zip(nodes, nodes[1:]):
        step = y[b] - y[a]
        label = net.labels[b]
        if label[0] != "st" and label[2] == "out":
            expected = 1 if label[1] == 1 else sol.z[label[0]]
        else:
            expected = 0
        if step != expected:
            raise ExtractionFailed(f"complementary slackness fails between {net.labels[a]} and {label}")


def project(net, nodes):
    """Map a network node sequence to a simple path of the original graph."""
    walk = []
    for node in nodes:
        v = net.vertex_of(node)
        if not walk or walk[-1] != v:
            walk.append(v)
    path, seen = [], {}
    for v in walk:
        if v in seen:
            cut = seen[v] + 1
            for w in path[cut:]:
                del seen[w]
            del path[cut:]
            continue
        seen[v] = len(path)
        path.append(v)
    return path


def _sharing(paths, s, t):
    count = {}
    for path in paths:
        for v in set(path) - {s, t}:
            count[v] = count.get(v, 0) + 1
    return [frozenset(v for v in set(p) - {s, t} if count[v] > 1) for p in paths]


def separates(g, s, t, cut):
    if s in cut or t in cut:
        return False
    rest = g.nx.subgraph(v for v in g.nx if v not in cut)
    return t not in nx.node_connected_component(rest, s)


def minimalize(g, s, t, cut):
    cut = set(cut)
    for v in sorted(cut):
        if separates(g, s, t, cut - {v}):
            cut.discard(v)
    return frozenset(cut)


def duality(g, s, t, p, q):
    if p < 1:
        raise BadParams(f"p must be positive, got {p}")
    net = build_network(g, s, t, q)
    sol = min_cost_flow(net)
    units = _unit_paths(net, sol.flow)
    for nodes in units:
        _check_tight(net, sol, nodes)
    projected = [project(net, nodes) for nodes in units]

    if sol.cost <= 2 * p * q:
        shared = _sharing(projected, s, t)
        if sum(len(x) for x in shared) > 2 * sol.cost:
            raise ExtractionFailed("path sharing exceeds twice the flow cost")
        order = sorted(range(len(projected)), key=lambda i: (len(shared[i]), i))[:q]
        chosen = [projected[i] for i in sorted(order)]
        family = PathFamily(tuple(tuple(path) for path in chosen), tuple(_sharing(chosen, s, t)))
        report = validate_paths(g, s, t, family.paths, p)
        if not report.ok:
            raise ExtractionFailed(f"path family invalid: {report.first}")
        return DualityOutcome("paths", paths=family, cost=sol.cost)

    t_node = net.index[("st", t)]
    if sol.y[t_node] <= p:
        raise ExtractionFailed(f"expensive flow but y_t={sol.y[t_node]} <= p={p}")
    chain = []
    for j in range(1, p + 1):
        level = {v for v, zv in sol.z.items() if zv == 1 and sol.y[net.index[(v, 0, "out")]] == j}
        chain.append(minimalize(g, s, t, level))
    for path in projected:
        for j, cut in enumerate(chain, start=1):
            if len(cut & set(path)) != 1:
                raise ExtractionFailed(f"separator {j} meets a flow path {len(cut & set(path))} times")
    report = validate_chain(g, s, t, chain, q)
    if not report.ok:
        raise ExtractionFailed(f"separator chain invalid: {report.first}")
    return DualityOutcome("chain", chain=SeparatorChain(tuple(chain)), cost=sol.cost)


def validate_chain(g, s, t, chain, q=None):
    report = ValidationReport()
    chain = [frozenset(c) for c in chain]
    seen = {}
    for j, cut in enumerate(chain):
        if s in cut or t in cut:
            report.fail(f"separator {j + 1} contains s or t")
            continue
        for v in cut:
            if v in seen:
                report.fail(f"separators {seen[v] + 1} and {j + 1} share vertex {v}")
            seen[v] = j
        if q is not None and len(cut) > 2 * q:
            report.fail(f"separator {j + 1} has {len(cut)} > 2q vertices")
        if not separates(g, s, t, cut):
            report.fail(f"separator {j + 1} does not separate s from t")
            continue
        for v in sorted(cut):
            if separates(g, s, t, cut - {v}):
                report.fail(f"separator {j + 1} is not minimal: {v} is redundant")
                break
    if not report.ok:
        return report
    for j, a in enumerate(chain):
        for b in chain[j + 1:]:
            near_s = nx.node_connected_component(g.nx.subgraph(v for v in g.nx if v not in b), s)
            near_t = nx.node_connected_component(g.nx.subgraph(v for v in g.nx if v not in a), t)
            if not a <= near_s or not b <= near_t:
                report.fail(f"separators {sorted(a)} and {sorted(b)} are out of order")
    return report


def validate_paths(g, s, t, paths, p):
    report = ValidationReport()
    for i, path in enumerate(paths):
        if not path or path[0] != s or path[-1] != t:
            report.fail(f"path {i} does not run from s to t")
            continue
        if len(set(path)) != len(path):
            report.fail(f"path {i} repeats a vertex")
        for a, b in zip(path, path[1:]):
            if not g.has_edge(a, b):
                report.fail(f"path {i} uses non-edge {a}-{b}")
                break
    if not report.ok:
        return report
    for i, public in enumerate(_sharing(paths, s, t)):
        if len(public) > 4 * p:
            report.fail(f"path {i} has {len(public)} > 4p public vertices")
    return report
