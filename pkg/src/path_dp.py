"""Exact k-path / k-cycle dynamic programming over a nice tree decomposition.

A partial solution below a node is a set of vertex-disjoint path segments.
Its boundary state records, for each chosen bag vertex, its (in, out) degree
(undirected: (degree, 0)); the segments as pairs of endpoints, where an
endpoint already forgotten is a committed token (START/END when directed,
OUT when undirected); the number of chosen vertices; and whether the
solution has been closed into the final path or cycle.
"""
from dataclasses import dataclass
from fractions import Fraction

from src import config
from src.errors import BadParams, WidthTooLarge
from src.tree_decomposition import nice_decomposition

START, END = -1, -2
OUT = -1

KINDS = ("path", "cycle")
OBJECTIVES = ("exists", "min-weight", "max-weight")


@dataclass(frozen=True)
class PathQuery:
    kind: str
    k: int
    directed: bool = False
    objective: str = "exists"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParams(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.objective not in OBJECTIVES:
            raise BadParams(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        least = 3 if self.kind == "cycle" else 2
        if self.k < least:
            raise BadParams(f"a {self.kind} query needs k >= {least}, got {self.k}")

    def better(self, new, old):
        if self.objective == "min-weight":
            return new < old
        if self.objective == "max-weight":
            return new > old
        return False

    def to_dict(self):
        return {"kind": self.kind, "k": self.k, "directed": self.directed, "objective": self.objective}


@dataclass(frozen=True)
class DPResult:
    found: bool
    witness: tuple = ()
    weight: Fraction = None
    width: int = -1


EMPTY = ((), (), 0, False)


def query_edges(g, query):
    if not query.directed:
        return sorted(g.edges())
    if g.arcs is not None:
        return sorted(g.arcs)
    return sorted(g.edges() + [(v, u) for u, v in g.edges()])


def _unpack(state):
    deg_t, segs, count, closed = state
    return {v: (a, b) for v, a, b in deg_t}, list(segs), count, closed


def _pack(deg, segs, count, closed):
    return (tuple(sorted((v, a, b) for v, (a, b) in deg.items())), tuple(sorted(segs)), count, closed)


def _useg(a, b):
    return (a, b) if a <= b else (b, a)


def _committed(seg, directed):
    return seg == (START, END) if directed else seg == (OUT, OUT)


def _tokens_ok(segs, directed):
    if directed:
        return sum(a == START for a, _ in segs) <= 1 and sum(b == END for _, b in segs) <= 1
    return sum((a == OUT) + (b == OUT) for a, b in segs) <= 2


def _introduce(state, v, k):
    yield state
    deg, segs, count, closed = _unpack(state)
    if closed or count >= k:
        return
    deg[v] = (0, 0)
    segs.append((v, v))
    yield _pack(deg, segs, count + 1, closed)


def _forget(state, v, query):
    deg, segs, count, closed = _unpack(state)
    if v not in deg:
        return state
    din, dout = deg.pop(v)
    internal = (din == 1 and dout == 1) if query.directed else din == 2
    if internal:
        return _pack(deg, segs, count, closed)
    if query.kind == "cycle":
        return None
    i = next(j for j, seg in enumerate(segs) if v in seg)
    a, b = segs[i]
    if query.directed:
        a = START if a == v and din == 0 else a
        b = END if b == v and dout == 0 else b
        segs[i] = (a, b)
    else:
        segs[i] = _useg(OUT if a == v else a, OUT if b == v else b)
    if not _tokens_ok(segs, query.directed):
        return None
    if _committed(segs[i], query.directed):
        if len(segs) != 1 or count != query.k:
            return None
        segs, closed = [], True
    return _pack(deg, segs, count, closed)


def _edge(state, edge, query):
    yield state, False
    deg, segs, count, closed = _unpack(state)
    u, v = edge
    if closed or u not in deg or v not in deg:
        return
    if query.directed:
        if deg[u][1] or deg[v][0]:
            return
        iu = next(j for j, seg in enumerate(segs) if seg[1] == u)
        iv = next(j for j, seg in enumerate(segs) if seg[0] == v)
        new = (segs[iu][0], segs[iv][1])
        deg[u] = (deg[u][0], 1)
        deg[v] = (1, deg[v][1])
    else:
        if deg[u][0] >= 2 or deg[v][0] >= 2:
            return
        iu = next(j for j, seg in enumerate(segs) if u in seg)
        iv = next(j for j, seg in enumerate(segs) if v in seg)
        su, sv = segs[iu], segs[iv]
        new = _useg(su[1] if su[0] == u else su[0], sv[1] if sv[0] == v else sv[0])
        deg[u] = (deg[u][0] + 1, 0)
        deg[v] = (deg[v][0] + 1, 0)
    if iu == iv:
        if query.kind != "cycle" or len(segs) != 1 or count != query.k:
            return
        yield _pack(deg, [], count, True), True
        return
    rest = [seg for j, seg in enumerate(segs) if j not in (iu, iv)]
    if _committed(new, query.directed):
        if rest or count != query.k:
            return
        yield _pack(deg, [], count, True), True
        return
    yield _pack(deg, rest + [new], count, closed), True


def _join(left, right, query):
    deg1, segs1, c1, cl1 = _unpack(left)
    deg2, segs2, c2, cl2 = _unpack(right)
    if cl1 and cl2:
        return None
    cap = (1, 1) if query.directed else (2, 0)
    deg = {}
    for v in deg1:
        d = (deg1[v][0] + deg2[v][0], deg1[v][1] + deg2[v][1])
        if d[0] > cap[0] or d[1] > cap[1]:
            return None
        deg[v] = d
    count = c1 + c2 - len(deg)
    if count > query.k:
        return None
    closed = cl1 or cl2

    def token(x, which, side, j):
        return (which, side, j) if x < 0 else x

    links = []
    for side, segs in ((1, segs1), (2, segs2)):
        for j, (a, b) in enumerate(segs):
            if a != b:
                links.append((token(a, "a", side, j), token(b, "b", side, j)))
    merged, cycles = _chain(links, query.directed)
    for v, d in deg.items():
        if d == (0, 0):
            merged.append((v, v))
    if not _tokens_ok(merged, query.directed):
        return None
    if closed and (merged or cycles):
        return None
    if cycles:
        if query.kind != "cycle" or cycles > 1 or merged or count != query.k:
            return None
        return _pack(deg, [], count, True)
    done = [seg for seg in merged if _committed(seg, query.directed)]
    if done:
        if len(merged) != 1 or count != query.k:
            return None
        return _pack(deg, [], count, True)
    return _pack(deg, merged, count, closed)


def _chain(links, directed):
    """Glue segment links at shared bag vertices; returns (segments, number of cycles)."""

    def plain(x):
        if isinstance(x, tuple):
            if not directed:
                return OUT
            return START if x[0] == "a" else END
        return x

    incident = {}
    for i, (a, b) in enumerate(links):
        incident.setdefault(a, []).append(i)
        incident.setdefault(b, []).append(i)
    used = set()
    segments = []
    if directed:
        succ = {a: b for a, b in links}
        heads = {b for _, b in links}
        for a, _ in links:
            if a in heads:
                continue
            x = a
            while x in succ:
                used.add(x)
                x = succ[x]
            segments.append((plain(a), plain(x)))
        cycles = 0
        for a, _ in links:
            if a in used:
                continue
            cycles += 1
            x = a
            while x not in used:
                used.add(x)
                x = succ[x]
        return segments, cycles

    seen = set()
    for start, ids in incident.items():
        if len(ids) != 1 or ids[0] in seen:
            continue
        x, edge = start, ids[0]
        while edge is not None:
            seen.add(edge)
            a, b = links[edge]
            x = b if a == x else a
            edge = next((e for e in incident[x] if e not in seen), None)
        segments.append(_useg(plain(start), plain(x)))
    cycles = 0
    for i in range(len(links)):
        if i in seen:
            continue
        cycles += 1
        x, edge = links[i][0], i
        while edge is not None:
            seen.add(edge)
            a, b = links[edge]
            x = b if a == x else a
            edge = next((e for e in incident[x] if e not in seen), None)
    return [_useg(*s) for s in segments], cycles


def _offer(table, query, state, value, back):
    current = table.get(state)
    if current is None or query.better(value, current[0]):
        table[state] = (value, back)


def _postorder(nodes, root):
    order, stack = [], [(root, False)]
    while stack:
        x, done = stack.pop()
        if done:
            order.append(x)
            continue
        stack.append((x, True))
        for c in nodes[x].children:
            stack.append((c, False))
    return order


def dp_longest_path(g, td, query, width_budget=None):
    budget = config.DP_WIDTH_BUDGET if width_budget is None else width_budget
    if td.width > budget:
        raise WidthTooLarge(td.width, budget)
    nodes, root = nice_decomposition(td, query_edges(g, query))
    tables = {}
    for x in _postorder(nodes, root):
        node, table = nodes[x], {}
        if node.kind == "leaf":
            table[EMPTY] = (Fraction(0), ("leaf",))
        elif node.kind == "introduce":
            for st, (val, _) in tables[node.children[0]].items():
                for ns in _introduce(st, node.vertex, query.k):
                    _offer(table, query, ns, val, ("step", st))
        elif node.kind == "forget":
            for st, (val, _) in tables[node.children[0]].items():
                ns = _forget(st, node.vertex, query)
                if ns is not None:
                    _offer(table, query, ns, val, ("step", st))
        elif node.kind == "edge":
            w = g.weight(*node.edge)
            for st, (val, _) in tables[node.children[0]].items():
                for ns, used in _edge(st, node.edge, query):
                    _offer(table, query, ns, val + w if used else val, ("edge", st, used))
        else:
            left, right = (tables[c] for c in node.children)
            groups = {}
            for st, (val, _) in right.items():
                groups.setdefault(tuple(v for v, _, _ in st[0]), []).append((st, val))
            for st1, (val1, _) in left.items():
                for st2, val2 in groups.get(tuple(v for v, _, _ in st1[0]), ()):
                    ns = _join(st1, st2, query)
                    if ns is not None:
                        _offer(table, query, ns, val1 + val2, ("join", st1, st2))
        tables[x] = table

    finals = [(st, val) for st, (val, _) in tables[root].items() if st[3] and st[2] == query.k]
    if not finals:
        return DPResult(found=False, width=td.width)
    best_state, best_value = finals[0]
    for st, val in finals[1:]:
        if query.better(val, best_value):
            best_state, best_value = st, val
    edges = _collect_edges(nodes, tables, root, best_state)
    witness = order_witness(edges, query)
    return DPResult(found=True, witness=tuple(witness), weight=best_value, width=td.width)


def _collect_edges(nodes, tables, root, state):
    edges, stack = [], [(root, state)]
    while stack:
        x, st = stack.pop()
        back = tables[x][st][1]
        kids = nodes[x].children
        if back[0] == "step":
            stack.append((kids[0], back[1]))
        elif back[0] == "edge":
            if back[2]:
                edges.append(nodes[x].edge)
            stack.append((kids[0], back[1]))
        elif back[0] == "join":
            stack.append((kids[0], back[1]))
            stack.append((kids[1], back[2]))
    return edges


def order_witness(edges, query):
    """Turn the chosen edges into a vertex sequence (cycles start at their smallest vertex)."""
    if query.directed:
        succ = {u: v for u, v in edges}
        if query.kind == "cycle":
            start = min(succ)
        else:
            start = (set(succ) - set(succ.values())).pop()
        seq = [start]
        while len(seq) < query.k:
            seq.append(succ[seq[-1]])
        return seq
    nbrs = {}
    for u, v in edges:
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    if query.kind == "cycle":
        start = min(nbrs)
    else:
        start = min(v for v, ns in nbrs.items() if len(ns) == 1)
    seq, prev = [start], None
    while len(seq) < query.k:
        nxt = min(w for w in nbrs[seq[-1]] if w != prev and w not in seq)
        prev = seq[-1]
        seq.append(nxt)
    return seq
