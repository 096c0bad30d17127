"""Rooted tree decompositions: validation, balanced separators, providers, PACE I/O."""
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree, treewidth_min_fill_in

from src import config
from src.audit import log_debug
from src.errors import InvariantViolation, ParseError
from src.validation import ValidationReport


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple
    parent: tuple
    root: int = 0

    @classmethod
    def single_bag(cls, bag):
        return cls(bags=(frozenset(bag),), parent=(None,), root=0)

    @classmethod
    def join(cls, root_bag, children):
        """Fresh root bag with each child decomposition hung below it."""
        bags = [frozenset(root_bag)]
        parent = [None]
        for child in children:
            offset = len(bags)
            bags.extend(child.bags)
            for i, p in enumerate(child.parent):
                parent.append(0 if i == child.root else p + offset)
        return cls(bags=tuple(bags), parent=tuple(parent), root=0)

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def root_bag(self):
        return self.bags[self.root]

    def vertices(self):
        out = set()
        for b in self.bags:
            out |= b
        return frozenset(out)

    def children(self):
        kids = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(i)
        return kids

    def postorder(self):
        kids = self.children()
        order, stack = [], [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                order.append(x)
                continue
            stack.append((x, True))
            for c in reversed(kids[x]):
                stack.append((c, False))
        return order

    def restrict(self, keep):
        keep = frozenset(keep)
        return TreeDecomposition(tuple(b & keep for b in self.bags), self.parent, self.root)

    def rerooted(self, new_root):
        adj = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                adj[i].append(p)
                adj[p].append(i)
        parent = [None] * len(self.bags)
        seen = {new_root}
        queue = deque([new_root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)
        return TreeDecomposition(self.bags, tuple(parent), new_root)

    def to_dict(self):
        return {
            "root": self.root,
            "width": self.width,
            "bags": [sorted(b) for b in self.bags],
            "parent": list(self.parent),
        }


def from_nx_tree(tree, root_vertex=None):
    """Root a networkx decomposition tree (frozenset nodes) at a bag holding root_vertex."""
    nodes = sorted(tree.nodes, key=lambda b: (len(b), sorted(b)))
    if not nodes:
        return TreeDecomposition.single_bag(())
    start = nodes[0]
    if root_vertex is not None:
        start = next((b for b in nodes if root_vertex in b), start)
    index = {start: 0}
    bags, parent = [start], [None]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in sorted(tree.adj[x], key=lambda b: (len(b), sorted(b))):
            if y not in index:
                index[y] = len(bags)
                bags.append(y)
                parent.append(index[x])
                queue.append(y)
    return TreeDecomposition(tuple(frozenset(b) for b in bags), tuple(parent), 0)


def validate(g, td):
    report = ValidationReport()
    m = len(td.bags)
    if len(td.parent) != m or not 0 <= td.root < m:
        report.fail("malformed decomposition: parent table does not match bags")
        return report
    roots = [i for i, p in enumerate(td.parent) if p is None]
    if roots != [td.root]:
        report.fail(f"decomposition must have exactly one root, found {roots}")
        return report
    for i in range(m):
        seen, x = set(), i
        while x is not None:
            if x in seen:
                report.fail(f"node {i} lies on a parent cycle")
                return report
            seen.add(x)
            x = td.parent[x]

    holders = {}
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not g.has_vertex(v):
                report.fail(f"bag {i} contains {v}, which is not a vertex")
            holders.setdefault(v, set()).add(i)
    for v in g.sorted_vertices():
        if v not in holders:
            report.fail(f"(T1) vertex {v} is in no bag")
    for u, v in sorted(g.edges()):
        if not holders.get(u, set()) & holders.get(v, set()):
            report.fail(f"(T2) edge {u}-{v} is in no bag")
    for v in sorted(holders):
        tops = [i for i in holders[v] if td.parent[i] is None or td.parent[i] not in holders[v]]
        if len(tops) != 1:
            report.fail(f"(T3) bags containing {v} are not connected")
    return report


def balanced_separator(g, td, w):
    """A bag X such that no component of g - X carries more than half the total weight."""
    total = sum(w.get(v, 0) for v in g.vertices())
    kids = td.children()
    below = [set() for _ in td.bags]
    for x in td.postorder():
        below[x] = set(td.bags[x])
        for c in kids[x]:
            below[x] |= below[c]

    x = td.root
    while True:
        bag = td.bags[x]
        heavy = next(
            (c for c in kids[x] if 2 * sum(w.get(v, 0) for v in below[c] - bag) > total),
            None,
        )
        if heavy is None:
            break
        x = heavy

    bag = td.bags[x]
    rest = g.nx.subgraph(v for v in g.nx if v not in bag)
    for comp in nx.connected_components(rest):
        if 2 * sum(w.get(v, 0) for v in comp) > total:
            raise InvariantViolation(f"bag {x} leaves a component heavier than half")
    return frozenset(bag)


def decompose_bounded_radius(g, R=frozenset(), root=None, width_budget=None):
    """Heuristic decomposition: min-fill (size permitting), then min-degree, narrower wins.

    Ghost vertices are ordinary vertices here.
    """
    if g.n == 0:
        return TreeDecomposition.single_bag(())
    best = None
    if g.n <= config.MIN_FILL_LIMIT:
        width, tree = treewidth_min_fill_in(g.nx)
        best = (width, tree, "min-fill")
    if best is None or (width_budget is not None and best[0] > width_budget):
        width, tree = treewidth_min_degree(g.nx)
        if best is None or width < best[0]:
            best = (width, tree, "min-degree")
    log_debug(f"decomposition of {g.n} vertices via {best[2]}: width {best[0]}")
    return from_nx_tree(best[1], root)


def baker_layers(g, root, ell):
    layers = [set() for _ in range(ell)]
    for v, d in nx.single_source_shortest_path_length(g.nx, root).items():
        layers[d % ell].add(v)
    return [frozenset(layer) for layer in layers]


def baker_decompositions(g, root, ell):
    """(i, decomposition of g - L_i) for every layer class of the BFS layering."""
    out = []
    for i, layer in enumerate(baker_layers(g, root, ell)):
        out.append((i, decompose_bounded_radius(g.without(layer))))
    return out


def to_pace(td, n):
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    for i, p in enumerate(td.parent):
        if p is not None:
            lines.append(f"{p + 1} {i + 1}")
    return "\n".join(lines) + "\n"


def from_pace(text):
    header, bags, edges = None, {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if parts[1] != "td":
                    raise ParseError(f"line {lineno}: expected 's td', got {raw!r}")
                header = tuple(int(x) for x in parts[2:5])
            elif parts[0] == "b":
                bags[int(parts[1])] = frozenset(int(v) - 1 for v in parts[2:])
            else:
                edges.append((int(parts[0]), int(parts[1])))
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}") from exc
    if header is None:
        raise ParseError("missing 's td' header")
    count = header[0]
    if sorted(bags) != list(range(1, count + 1)):
        raise ParseError(f"expected bags 1..{count}, found {sorted(bags)}")
    if len(edges) != count - 1:
        raise ParseError(f"a tree on {count} bags needs {count - 1} edges, found {len(edges)}")
    tree = nx.Graph()
    tree.add_nodes_from(range(count))
    tree.add_edges_from((a - 1, b - 1) for a, b in edges)
    if count and not nx.is_tree(tree):
        raise ParseError("decomposition edges do not form a tree")
    parent = [None] * count
    for a, b in (nx.bfs_edges(tree, 0, sort_neighbors=sorted) if count else []):
        parent[b] = a
    return TreeDecomposition(tuple(bags[i + 1] for i in range(count)), tuple(parent), 0)


@dataclass
class NiceNode:
    kind: str  # leaf | introduce | forget | join | edge
    bag: frozenset
    vertex: Optional[int] = None
    edge: Optional[tuple] = None
    children: list = field(default_factory=list)


def nice_decomposition(td, edges):
    """Nice form of td with an empty root bag; every edge gets exactly one introduce-edge node.

    Returns (nodes, root_index). Edges may be ordered pairs (arcs).
    """
    nodes = []

    def add(kind, bag, children, vertex=None):
        nodes.append(NiceNode(kind, frozenset(bag), vertex=vertex, children=list(children)))
        return len(nodes) - 1

    def morph(top, src, dst):
        bag = set(src)
        for v in sorted(src - dst):
            bag.discard(v)
            top = add("forget", bag, [top], v)
        for v in sorted(dst - src):
            bag.add(v)
            top = add("introduce", bag, [top], v)
        return top

    kids = td.children()
    tops = {}
    for x in td.postorder():
        bag = td.bags[x]
        if not kids[x]:
            tops[x] = morph(add("leaf", (), []), frozenset(), bag)
            continue
        joined = None
        for c in kids[x]:
            top = morph(tops[c], td.bags[c], bag)
            joined = top if joined is None else add("join", bag, [joined, top])
        tops[x] = joined
    root = morph(tops[td.root], td.bags[td.root], frozenset())

    depth, forget_at = {root: 0}, {}
    stack = [root]
    while stack:
        x = stack.pop()
        if nodes[x].kind == "forget":
            forget_at[nodes[x].vertex] = x
        for c in nodes[x].children:
            depth[c] = depth[x] + 1
            stack.append(c)

    for e in edges:
        u, v = e
        f = max(forget_at[u], forget_at[v], key=lambda i: depth[i])
        child = nodes[f].children[0]
        nodes.append(NiceNode("edge", nodes[child].bag, edge=tuple(e), children=[child]))
        nodes[f].children = [len(nodes) - 1]
    return nodes, root
