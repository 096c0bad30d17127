"""Randomized ball carving.

Repeatedly pick the lowest live vertex v, draw a geometric radius r with
success probability p = 1/(2k^2), keep ball(v, r-1) and delete ball(v, r)
from the live graph. Any radius above 9k^2 lg n aborts the run with nothing
kept. Every kept component then has radius below that cap, and a fixed set
of at most k vertices survives with probability at least 1 - 1/k.
"""
import math
from dataclasses import dataclass, field

import networkx as nx

from src.audit import log_debug
from src.errors import DegenerateInput, InvariantViolation
from src.graph_core import ghost_distances, torso
from src.validation import ValidationReport


@dataclass(frozen=True)
class ClusterResult:
    kept: frozenset
    carve_log: tuple = field(default_factory=tuple)
    aborted: bool = False

    def to_dict(self):
        return {
            "kept": sorted(self.kept),
            "carve_log": [list(step) for step in self.carve_log],
            "aborted": self.aborted,
        }


def success_probability(k):
    return 1.0 / (2 * k * k)


def radius_limit(k, n):
    return 9 * k * k * math.log2(n)


def radius_cap(k, n):
    if n <= 1:
        raise DegenerateInput("radius cap needs n > 1")
    return math.ceil(radius_limit(k, n))


def geometric_radius(u, p):
    """Inverse-CDF geometric draw on {1, 2, ...} from one uniform u in (0, 1]."""
    if p >= 1:
        return 1
    return max(1, math.ceil(math.log(u) / math.log1p(-p)))


def _carve(g, k, decisions):
    n = g.n
    if n <= 1:
        raise DegenerateInput(f"clustering needs more than one vertex, got {n}")
    p = success_probability(k)
    limit = radius_limit(k, n)
    live = set(g.vertices())
    kept, carve_log = set(), []
    while live:
        v = min(live)
        r = decisions.geometric("cluster.radius", p)
        carve_log.append((v, r))
        if r > limit:
            log_debug(f"clustering aborted: radius {r} at center {v} exceeds {limit:.2f}")
            return ClusterResult(frozenset(), tuple(carve_log), True)
        dist = nx.single_source_shortest_path_length(g.nx.subgraph(live), v, cutoff=r)
        inner = {u for u, d in dist.items() if d <= r - 1}
        live.difference_update(dist)
        for u in inner:
            if any(w in live for w in g.nx.adj[u]):
                raise InvariantViolation(f"kept vertex {u} still touches the live graph")
        kept |= inner
    return ClusterResult(frozenset(kept), tuple(carve_log), False)


def cluster(g, R, k, decisions):
    """Carve g; with ghosts, carve their torso and re-attach ghosts that touch a kept vertex."""
    R = frozenset(v for v in R if g.has_vertex(v))
    if not R:
        return _carve(g, k, decisions)
    result = _carve(torso(g, R), k, decisions)
    ghosts = {x for x in R if any(w in result.kept for w in g.neighbors(x))}
    return ClusterResult(result.kept | ghosts, result.carve_log, result.aborted)


def verify_cluster(g, result, k, R=frozenset()):
    """Re-check radius certificates and carve exclusion from scratch."""
    report = ValidationReport()
    if result.aborted:
        if result.kept:
            report.fail("aborted run kept vertices")
        return report
    limit = radius_limit(k, max(g.n - len(R), 2))
    kept = result.kept
    sub = g.induced(kept)
    centers = [v for v, _ in result.carve_log]
    for comp in nx.connected_components(sub.nx):
        inside = [c for c in centers if c in comp]
        if len(inside) != 1:
            report.fail(f"component {sorted(comp)[:5]} holds {len(inside)} carve centers")
            continue
        radius = max(ghost_distances(sub, R, inside[0]).values())
        if radius >= limit:
            report.fail(f"component around {inside[0]} has radius {radius} >= {limit:.2f}")
    return report
