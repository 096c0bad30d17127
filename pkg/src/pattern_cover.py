"""Randomized sampler of low-treewidth vertex sets covering small connected patterns.

``sample_cover`` picks a uniform root and runs the recursion of
``CoverSampler.solve_instance`` on the root's component. Each level carves
the graph around a margin ball, splits it with balanced separators of the
island-contracted graph and either recurses on the components
(``case_disjoint``) or guesses an island hit by the pattern and shortens the
instance along radial paths or a separator chain (``case_intersect``).
All randomness goes through a decision source, so the trace of a run both
accounts for its probability and replays it.
"""
import math
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from src.audit import log_debug
from src.clustering import cluster
from src.decisions import as_decisions
from src.errors import BadParams, EmptyGraph, InvariantViolation
from src.graph_core import absorb_into, ball, contract_to_fresh, ghost_distances, reach, torso
from src.instance import Instance, far_vertices, lb_value, potentials_of
from src.separator_duality import duality
from src.tree_decomposition import TreeDecomposition, balanced_separator, decompose_bounded_radius, validate


@dataclass(frozen=True)
class CoverResult:
    vertices: frozenset
    td: TreeDecomposition
    trace: tuple = ()
    root: Optional[int] = None
    lb_report: Optional[dict] = None

    @property
    def width(self):
        return self.td.width

    def to_dict(self):
        return {
            "A": sorted(self.vertices),
            "root": self.root,
            "width": self.width,
            "td": self.td.to_dict(),
            "trace": list(self.trace),
            "lb_report": self.lb_report,
        }


@dataclass(frozen=True)
class _Piece:
    vertices: frozenset
    td: TreeDecomposition


def balanced_index_guaranteed(p, k, factor):
    """True when p separators all meeting a k-vertex pattern must contain a balanced one."""
    if factor <= 0 or k <= 1:
        return p >= 1
    return p >= 2 * math.log(k) / math.log1p(1.0 / factor) + 3


def separator_balance(g, r, seps, light, X):
    """Per separator: pattern vertices on the root side (light ones excluded), beyond it, and on it."""
    X = frozenset(X)
    rows = []
    for cut in seps:
        inside = reach(g.without(cut), r)
        outside = g.vertices() - inside - cut
        rows.append((len((X & inside) - light), len((X & outside) - light), len(X & cut)))
    return rows


def has_balanced_index(rows, factor):
    return any(factor * on_cut <= min(inside, outside) for inside, outside, on_cut in rows)


class PatternProbe:
    """Threads a fixed pattern X through one run and records the laws it must obey.

    Tracking stops (``lost``) at the first random decision that is not
    compliant with X; laws are only recorded while tracking.
    """

    def __init__(self, X, constants):
        self.pattern = frozenset(X)
        self.constants = constants
        self.laws = []
        self.lost = []

    def law(self, name, ok, depth, **info):
        self.laws.append({"law": name, "ok": bool(ok), "depth": depth, **info})

    def lose(self, reason, depth):
        self.lost.append({"reason": reason, "depth": depth})
        return None

    @property
    def tracked(self):
        return not self.lost

    @property
    def violations(self):
        return [entry for entry in self.laws if not entry["ok"]]

    def to_dict(self):
        return {
            "pattern": sorted(self.pattern),
            "tracked": self.tracked,
            "lost": list(self.lost),
            "laws": len(self.laws),
            "violations": self.violations,
        }


def _neighborhood(g, part):
    out = set()
    for v in part:
        out.update(g.neighbors(v))
    return frozenset(out - set(part))


def _components(g, keep):
    return sorted((frozenset(c) for c in nx.connected_components(g.nx.subgraph(keep))), key=min)


def _shortcut(walk):
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


def lift_path(g, ghosts, path):
    """Route a torso path through the ghosts it skipped, then drop repeated visits."""
    walk = [path[0]]
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            via = min((w for w in g.neighbors(a) if w in ghosts and g.has_edge(w, b)), default=None)
            if via is None:
                raise InvariantViolation(f"torso edge {a}-{b} has no ghost in common")
            walk.append(via)
        walk.append(b)
    return _shortcut(walk)


class CoverSampler:
    def __init__(self, constants, decisions, probe=None):
        self.constants = constants
        self.decisions = decisions
        self.probe = probe

    def _lose(self, reason, depth):
        if self.probe is not None:
            self.probe.lose(reason, depth)
        return None

    def _law(self, name, ok, depth, **info):
        if self.probe is not None:
            self.probe.law(name, ok, depth, **info)

    def _require(self, instance, where):
        report = instance.check(self.constants)
        if not report.ok:
            raise InvariantViolation(f"{where}: {report.first}")

    def trivial(self, g):
        order = g.sorted_vertices()
        picked = frozenset(
            order[self.decisions.uniform_index("trivial.vertex", len(order))] for _ in range(self.constants.k)
        )
        return _Piece(picked, decompose_bounded_radius(g.induced(picked)))

    def base(self, instance, x, depth, reason):
        kept = frozenset(v for v in instance.terminals if v not in instance.ghosts)
        self.decisions.note("base", reason=reason, size=len(kept))
        if x is not None and not x <= kept:
            self._lose(f"base case ({reason})", depth)
        return _Piece(kept, TreeDecomposition.single_bag(kept))

    def _descend(self, child, parent_gamma, x, depth, where):
        self._require(child, where)
        if child.gamma >= parent_gamma:
            self.decisions.note("stalled", case=where, gamma=child.gamma)
            return self.base(child, x, depth + 1, "stalled")
        return self.solve_instance(child, x, depth + 1)

    def _carve(self, g, ghosts, margin):
        rest = g.without(margin)
        if rest.n == 0:
            return frozenset()
        if len(rest.vertices() - ghosts) <= 1:
            return rest.vertices()
        return cluster(rest, ghosts - margin, self.constants.k, self.decisions).kept

    def solve_instance(self, instance, x=None, depth=0):
        c = self.constants
        instance = instance.normalized()
        self._require(instance, "instance")
        if instance.credit > c.credit_cap:
            piece = self.base(instance, x, depth, "credit")
        elif not instance.free_vertices():
            piece = self.base(instance, x, depth, "no free vertex")
        else:
            piece = self._split(instance, x, depth)
        if not instance.light <= piece.vertices:
            raise InvariantViolation(f"light terminals {sorted(instance.light - piece.vertices)[:5]} left out")
        if not piece.vertices & instance.terminals <= piece.td.root_bag:
            raise InvariantViolation("sampled terminals missing from the root bag")
        return piece

    def _split(self, instance, x, depth):
        c = self.constants
        g, r, ghosts = instance.g, instance.root, instance.ghosts
        margin = ball(g, ghosts, r, c.margin_radius)
        kept = self._carve(g, ghosts, margin)
        if x is not None and not (x - margin) <= kept:
            x = self._lose("clustering", depth)
        comp = reach(g.induced(margin | kept), r)
        inner = Instance(
            g.induced(comp), r, instance.light & comp, instance.heavy & comp, ghosts & comp, instance.credit
        )
        if x is not None and not x <= comp:
            x = self._lose("component", depth)
        if not inner.free_vertices():
            return self.base(inner, x, depth, "no free vertex")

        islands = _components(inner.g, comp - margin)
        H, island_of = inner.g, {}
        for island in islands:
            H, u = contract_to_fresh(H, island)
            island_of[u] = island
        w1, w2 = {}, {}
        for v in H.vertices():
            members = island_of.get(v, (v,))
            w1[v] = sum(1 for u in members if u in inner.terminals)
            w2[v] = sum(1 for u in members if u not in inner.light and u not in inner.ghosts)
        td = decompose_bounded_radius(H, inner.ghosts & H.vertices(), r)
        Z = balanced_separator(H, td, w1) | balanced_separator(H, td, w2) | {r}
        hit = sorted(u for u in Z if u in island_of)
        w_nrm = frozenset(u for u in Z if u not in island_of)
        w_isl = frozenset().union(*(island_of[u] for u in hit))
        log_debug(
            f"depth {depth}: n={g.n} margin={len(margin)} islands={len(islands)} "
            f"separator={len(Z)} width={td.width}"
        )
        if not hit:
            self.decisions.note("branch.forced", case="disjoint")
            return self.case_disjoint(inner, w_nrm, w_isl, x, depth)
        if self.decisions.coin("branch", 1.0 / c.k):
            return self.case_intersect(inner, hit, island_of, w_nrm, w_isl, x, depth)
        return self.case_disjoint(inner, w_nrm, w_isl, x, depth)

    def _charging(self, g, r, comps):
        """Component index each separator vertex is charged to, via BFS over the component-contracted graph."""
        label = {}
        for idx, part in enumerate(comps):
            for v in part:
                label[v] = g.next_id + idx
        L = nx.Graph()
        L.add_nodes_from({label.get(v, v) for v in g.vertices()})
        for u, v in g.edges():
            a, b = label.get(u, u), label.get(v, v)
            if a != b:
                L.add_edge(a, b)
        owner = {g.next_id + idx: idx for idx in range(len(comps))}
        charged = {}
        for parent, child in nx.bfs_edges(L, r, sort_neighbors=sorted):
            if parent in owner and child not in owner:
                charged[child] = owner[parent]
        return charged

    def _child_terminals(self, gD, r, inner, scope, fresh, new_terminals, charged, idx):
        """Split the boundary into light (uncharged) and heavy (charged to this component) terminals.

        An uncharged boundary vertex farther than 3 from the root in the child
        is kept heavy; inherited light terminals never move.
        """
        ghosts = (inner.ghosts & scope) | fresh
        light = set(v for v in new_terminals if charged.get(v) != idx)
        dist = ghost_distances(gD, ghosts, r, cutoff=3)
        demoted = sorted(v for v in light if v not in dist)
        if demoted:
            self.decisions.note("disjoint.demoted", vertices=demoted)
            light.difference_update(demoted)
        light = (inner.light & scope) | frozenset(light)
        heavy = ((inner.heavy & scope) | frozenset(v for v in new_terminals if v not in light)) - light
        return Instance(gD, r, light, heavy, ghosts, inner.credit)

    def _collapse_outside(self, g, scope, r):
        ghosts, to_root = set(), set()
        near_root = set(g.neighbors(r))
        for part in _components(g, g.vertices() - scope):
            if part & near_root:
                to_root |= part
            else:
                g, fresh = contract_to_fresh(g, part)
                ghosts.add(fresh)
        if to_root:
            g = absorb_into(g, to_root, r)
        return g, frozenset(ghosts)

    def case_disjoint(self, inner, w_nrm, w_isl, x, depth):
        g2 = inner.g.without(w_isl)
        r = inner.root
        ghosts = inner.ghosts & g2.vertices()
        if x is not None and x & w_isl:
            x = self._lose("branch: pattern meets a separator island", depth)
        comps = _components(g2, g2.vertices() - w_nrm)
        charged = self._charging(g2, r, comps)
        gamma = inner.gamma
        parts, pieces = [], []
        sums = [0, 0, 0]
        for idx, part in enumerate(comps):
            boundary = _neighborhood(g2, part)
            scope = part | boundary | {r}
            gD, fresh = self._collapse_outside(g2, scope, r)
            new_terminals = boundary - inner.light - ghosts
            child = self._child_terminals(gD, r, inner, scope, fresh, new_terminals, charged, idx)
            interior = len(part - inner.light - ghosts)
            self.decisions.note("disjoint.child", gamma=gamma, child_gamma=child.gamma, interior=interior)
            if 2 * interior > gamma:
                raise InvariantViolation(f"component interior {interior} exceeds half of {gamma}")
            x_child = None if x is None else x & scope
            if x_child is not None:
                pots = potentials_of(child, x_child, self.constants)
                sums[0] += pots.pattern
                sums[1] += pots.graph
                sums[2] += pots.distance
                self._law("disjoint.gamma-halving", 2 * interior <= gamma, depth, interior=interior, gamma=gamma)
            parts.append((part, boundary, scope))
            pieces.append(self._descend(child, gamma, x_child, depth, "disjoint"))
        if x is not None and comps:
            parent = potentials_of(inner, x, self.constants)
            self._law("disjoint.pi", sums[0] <= parent.pattern, depth, parent=parent.pattern, children=sums[0])
            self._law("disjoint.gamma", sums[1] <= parent.graph, depth, parent=parent.graph, children=sums[1])
            self._law("disjoint.phi", sums[2] <= parent.distance, depth, parent=parent.distance, children=sums[2])

        chosen = set()
        for (part, _, _), piece in zip(parts, pieces):
            chosen |= part & piece.vertices
        for v in w_nrm - ghosts:
            if all(v in piece.vertices for (_, boundary, _), piece in zip(parts, pieces) if v in boundary):
                chosen.add(v)
        chosen = frozenset(chosen)
        root_bag = chosen & (inner.terminals | (w_nrm - ghosts))
        td = TreeDecomposition.join(
            root_bag, [piece.td.restrict(chosen & scope) for (_, _, scope), piece in zip(parts, pieces)]
        )
        return _Piece(chosen, td)

    def case_intersect(self, inner, hit, island_of, w_nrm, w_isl, x, depth):
        u = hit[self.decisions.uniform_index("intersect.island", len(hit))]
        island = island_of[u]
        if x is not None and not x & island:
            x = self._lose("island choice", depth)
        ghosts = inner.ghosts
        candidates = sorted(island - ghosts)
        if not candidates:
            self.decisions.note("intersect.ghost-island", island=min(island))
            return self.case_disjoint(inner, w_nrm, w_isl, x, depth)
        sub = inner.g.induced(island)
        local = ghosts & island
        z = min(candidates, key=lambda v: (max(ghost_distances(sub, local, v).values()), v))
        dist = ghost_distances(sub, local, z)
        d = self.decisions.uniform_index("intersect.distance", max(dist.values()) + 1)
        if x is not None and d != min(dist[v] for v in x & island):
            x = self._lose("distance guess", depth)
        radius = max(d, 1)
        squeeze = {v for v, dv in dist.items() if dv < (radius - 1 if v in ghosts else radius)}
        g2 = absorb_into(inner.g, squeeze - {z}, z)
        alive = g2.vertices()
        mid = Instance(g2, inner.root, inner.light, inner.heavy & alive, ghosts & alive, inner.credit)
        outcome = duality(torso(g2, mid.ghosts), inner.root, z, self.constants.chain_p, self.constants.k)
        self.decisions.note("intersect.duality", outcome=outcome.kind, cost=outcome.cost, center=z, d=d)
        log_debug(f"depth {depth}: island of {len(island)} around {z}, d={d}, duality gave {outcome.kind}")
        if outcome.kind == "paths":
            return self.subcase_paths(mid, outcome.paths, z, x, depth)
        return self.subcase_chain(mid, outcome.chain, z, x, depth)

    def subcase_paths(self, mid, family, z, x, depth):
        c = self.constants
        i = self.decisions.uniform_index("paths.index", len(family.paths))
        if x is not None and x & family.private(i):
            x = self._lose("path index", depth)
        public = family.public[i]
        g2, ghosts, r = mid.g, mid.ghosts, mid.root
        walk = lift_path(g2, ghosts, family.paths[i])
        if walk[0] != r or walk[-1] != z:
            raise InvariantViolation(f"lifted path runs {walk[0]} -> {walk[-1]}, expected {r} -> {z}")
        start = max(j for j, v in enumerate(walk) if v in mid.light)
        tail = walk[start:]
        marks = [0] + [j for j in range(1, len(tail) - 1) if tail[j] in public] + [len(tail) - 1]
        H = g2
        for a, b in zip(marks, marks[1:]):
            segment = tail[a + 1:b]
            if not segment:
                continue
            on_ghost = [v for v in segment if v in ghosts]
            if on_ghost:
                H = absorb_into(H, set(segment) - {on_ghost[0]}, on_ghost[0])
            else:
                H = absorb_into(H, segment, tail[a])
        alive = H.vertices()
        child = Instance(H, r, mid.light, mid.heavy & alive, ghosts & alive, mid.credit)
        if x is not None:
            before = potentials_of(mid, x, c)
            after = potentials_of(child, x, c)
            self._law("paths.pi", after.pattern == before.pattern, depth, before=before.pattern, after=after.pattern)
            self._law("paths.gamma", after.graph < before.graph, depth, before=before.graph, after=after.graph)
            far_before, far_after = far_vertices(mid, x, c), far_vertices(child, x, c)
            self._law("paths.far-subset", far_after <= far_before, depth)
            self._check_far_drop(mid, child, x, z, far_before, far_after, depth)
        return self._descend(child, mid.gamma, x, depth, "paths")

    def _check_far_drop(self, mid, child, x, z, far_before, far_after, depth):
        c = self.constants
        drop = c.far_drop
        if drop < 1:
            return
        from_z = ghost_distances(mid.g, mid.ghosts, z, cutoff=1)
        near = [v for v in x if v in from_z]
        if not near:
            return
        from_r = ghost_distances(mid.g, mid.ghosts, mid.root)
        anchor = min(near, key=lambda v: (from_r.get(v, math.inf), v))
        far_anchor = from_r.get(anchor, math.inf) - drop > c.far_threshold
        to_z = ghost_distances(child.g, child.ghosts, child.root).get(z, math.inf)
        if far_anchor and to_z + 1 + drop <= c.far_threshold:
            lost = len(far_before - far_after)
            self._law("paths.far-drop", lost >= drop, depth, dropped=lost, bound=drop)

    def subcase_chain(self, mid, chain, z, x, depth):
        c = self.constants
        seps = list(chain.chain[3:])
        if not seps:
            raise InvariantViolation(f"separator chain of {len(chain.chain)} leaves nothing after the first three")
        g2, r = mid.g, mid.root
        if x is not None:
            rows = separator_balance(g2, r, seps, mid.light, x)
            f = c.balance_factor
            if len(x) <= c.k and all(row[2] >= 1 for row in rows) and balanced_index_guaranteed(len(seps), c.k, f):
                found = has_balanced_index(rows, f)
                self._law("chain.balanced-index", found, depth, separators=len(seps), factor=f)
        i = self.decisions.uniform_index("chain.index", len(seps))
        cut = seps[i]
        if cut & mid.light:
            raise InvariantViolation(f"separator {sorted(cut)} holds a light terminal")
        alpha = 1 + self.decisions.uniform_index("chain.alpha", min(math.ceil(math.sqrt(c.k) / 10), len(cut)))
        guessed = frozenset(self.decisions.subset("chain.subset", sorted(cut), alpha))
        if x is not None and guessed != x & cut:
            x = self._lose("separator guess", depth)

        inside = reach(g2.without(cut), r)
        credit = mid.credit + alpha
        g_out = absorb_into(g2, (inside - {r}) | (cut - guessed), r)
        out_alive = g_out.vertices()
        out = Instance(
            g_out, r, frozenset({r}) | guessed, (mid.heavy & out_alive) - guessed, mid.ghosts & out_alive, credit
        )
        g_in, fresh = g2, set()
        for part in _components(g2, g2.vertices() - inside - guessed):
            g_in, gid = contract_to_fresh(g_in, part)
            fresh.add(gid)
        inn = Instance(
            g_in,
            r,
            mid.light,
            (mid.heavy & g_in.vertices()) | guessed,
            (mid.ghosts & inside) | frozenset(fresh),
            credit,
        )
        x_out = None if x is None else x & out_alive
        x_in = None if x is None else x & g_in.vertices()
        if x is not None:
            parent = potentials_of(mid, x, c)
            p_out, p_in = potentials_of(out, x_out, c), potentials_of(inn, x_in, c)
            self._law("chain.pi", p_out.pattern + p_in.pattern <= parent.pattern, depth)
            self._law("chain.gamma", p_out.graph + p_in.graph <= parent.graph, depth)
            self._law("chain.phi", p_out.distance + p_in.distance <= parent.distance, depth)

        piece_out = self._descend(out, mid.gamma, x_out, depth, "chain.out")
        piece_in = self._descend(inn, mid.gamma, x_in, depth, "chain.in")
        chosen = (piece_out.vertices - guessed) | piece_in.vertices
        root_bag = (mid.terminals | guessed) & chosen
        td = TreeDecomposition.join(root_bag, [piece_out.td.restrict(chosen), piece_in.td])
        return _Piece(chosen, td)


def sample_cover(g0, k, constants, source, probe=None, root=None):
    """With ``root`` given the run is conditioned on that root instead of drawing it."""
    if g0.n == 0:
        raise EmptyGraph("cannot sample from an empty graph")
    if root is not None and not g0.has_vertex(root):
        raise BadParams(f"root {root} is not a vertex")
    constants = constants.with_k(k)
    decisions = as_decisions(source)
    sampler = CoverSampler(constants, decisions, probe)
    lb_report = None
    if k < constants.trivial_threshold:
        root = None
        piece = sampler.trivial(g0)
        if probe is not None:
            probe.lose("trivial sampler", 0)
    else:
        if root is None:
            order = g0.sorted_vertices()
            root = order[decisions.uniform_index("root", len(order))]
        else:
            decisions.note("root.fixed", root=root)
        comp = reach(g0, root)
        start = Instance(g0.induced(comp), root, frozenset({root}))
        x = None
        if probe is not None:
            x = probe.pattern if root in probe.pattern and probe.pattern <= comp else probe.lose("root", 0)
            if x is not None:
                pots = potentials_of(start, x, constants)
                lb_report = {**pots.to_dict(), "n": start.g.n, "log_lb": lb_value(start.g.n, pots.pattern,
                                                                                  pots.graph, pots.distance,
                                                                                  constants)}
        piece = sampler.solve_instance(start, x)
    report = validate(g0.induced(piece.vertices), piece.td)
    if not report.ok:
        raise InvariantViolation(f"sampled decomposition is invalid: {report.first}")
    if probe is not None:
        covered = probe.pattern <= piece.vertices
        if probe.tracked:
            probe.law("covered", covered, 0)
        lb_report = {**(lb_report or {}), "covered": covered, "probe": probe.to_dict()}
    log_debug(f"sampled |A|={len(piece.vertices)} width={piece.td.width} root={root}")
    return CoverResult(piece.vertices, piece.td, tuple(decisions.trace), root, lb_report)


def solve_instance(instance, constants, source, probe=None):
    sampler = CoverSampler(constants, as_decisions(source), probe)
    x = None
    if probe is not None:
        x = probe.pattern
    piece = sampler.solve_instance(instance, x)
    return CoverResult(piece.vertices, piece.td, tuple(sampler.decisions.trace), instance.root)
