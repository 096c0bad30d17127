"""Recursive instances of the covering problem and their bookkeeping.

An instance is (graph, root, light terminals, heavy terminals, ghosts,
credit). Every numeric constant of the recursion scales with ``scale``; the
credit cap and the pattern size bound do not.
"""
import math
from dataclasses import dataclass, replace
from typing import Optional

import networkx as nx

from src import config
from src.errors import BadParams
from src.graph_core import INF, ghost_distances, normalize_ghosts
from src.validation import ValidationReport


def lg(x):
    return math.log2(x) if x > 0 else 0.0


@dataclass(frozen=True)
class Constants:
    k: int
    scale: float = 1.0
    c_tw: int = 10
    trivial_k: Optional[int] = None
    c1: float = 2.0
    c2: float = 2.0

    def __post_init__(self):
        if self.k < 1:
            raise BadParams(f"k must be positive, got {self.k}")
        if not 0 < self.scale <= 1:
            raise BadParams(f"scale must lie in (0, 1], got {self.scale}")
        if self.c_tw < 1:
            raise BadParams(f"c_tw must be positive, got {self.c_tw}")

    @classmethod
    def from_config(cls, run_config, k=None):
        trivial = int(config.TRIVIAL_K) if config.TRIVIAL_K else None
        return cls(k=k or run_config.k, scale=run_config.scale, c_tw=run_config.c_tw, trivial_k=trivial)

    def with_k(self, k):
        return self if k == self.k else replace(self, k=k)

    @property
    def unit(self):
        return math.sqrt(self.k) * lg(self.k)

    # light terminals sit within 3 of the root, so they are never far; the margin stays beyond far
    @property
    def margin_radius(self):
        return max(4.0, self.scale * 2000 * self.unit)

    @property
    def far_threshold(self):
        return max(3.0, self.scale * 1000 * self.unit)

    @property
    def terminal_cap(self):
        return self.scale * 16014 * self.c_tw * self.unit

    @property
    def width_cap(self):
        return self.scale * 24022 * self.c_tw * self.unit

    @property
    def chain_p(self):
        return max(4, math.ceil(self.scale * 120 * self.unit))

    @property
    def credit_cap(self):
        return math.sqrt(self.k) / 10

    @property
    def far_drop(self):
        return math.floor(self.scale * 511 * self.unit)

    @property
    def balance_factor(self):
        return self.scale * 10 * math.sqrt(self.k)

    @property
    def trivial_threshold(self):
        if self.trivial_k is not None:
            return self.trivial_k
        return max(10, 2 ** self.c_tw) if self.scale == 1 else 2

    def to_dict(self):
        return {
            "k": self.k,
            "scale": self.scale,
            "c_tw": self.c_tw,
            "margin_radius": self.margin_radius,
            "far_threshold": self.far_threshold,
            "terminal_cap": self.terminal_cap,
            "width_cap": self.width_cap,
            "chain_p": self.chain_p,
            "credit_cap": self.credit_cap,
            "trivial_threshold": self.trivial_threshold,
        }


@dataclass(frozen=True)
class Instance:
    g: object
    root: int
    light: frozenset
    heavy: frozenset = frozenset()
    ghosts: frozenset = frozenset()
    credit: int = 0

    @property
    def terminals(self):
        return self.light | self.heavy

    @property
    def gamma(self):
        return sum(1 for v in self.g.vertices() if v not in self.light and v not in self.ghosts)

    def free_vertices(self):
        """Non-ghost, non-terminal vertices."""
        taken = self.terminals | self.ghosts
        return frozenset(v for v in self.g.vertices() if v not in taken)

    def normalized(self):
        g, ghosts = normalize_ghosts(self.g, self.ghosts, self.root)
        return replace(self, g=g, ghosts=ghosts)

    def check(self, constants):
        report = ValidationReport()
        vertices = self.g.vertices()
        if self.root not in self.light:
            report.fail(f"root {self.root} is not a light terminal")
        if self.light & self.heavy:
            report.fail(f"light and heavy terminals overlap: {sorted(self.light & self.heavy)}")
        if self.ghosts & self.terminals:
            report.fail(f"ghost terminals: {sorted(self.ghosts & self.terminals)}")
        stray = (self.terminals | self.ghosts) - vertices
        if stray:
            report.fail(f"terminals or ghosts outside the graph: {sorted(stray)[:5]}")
        if not report.ok:
            return report
        dist = ghost_distances(self.g, self.ghosts, self.root, cutoff=3)
        far = sorted(v for v in self.light if v not in dist)
        if far:
            report.fail(f"light terminals farther than 3 from the root: {far[:5]}")
        if len(self.terminals) > constants.terminal_cap + self.credit:
            report.fail(f"{len(self.terminals)} terminals exceed cap {constants.terminal_cap:.1f} + {self.credit}")
        return report

    def to_dict(self):
        return {
            "n": self.g.n,
            "root": self.root,
            "light": sorted(self.light),
            "heavy": sorted(self.heavy),
            "ghosts": sorted(self.ghosts),
            "credit": self.credit,
        }


@dataclass(frozen=True)
class Potentials:
    pattern: int
    graph: int
    distance: int

    def to_dict(self):
        return {"pi": self.pattern, "gamma": self.graph, "phi": self.distance}


def far_vertices(instance, X, constants):
    dist = ghost_distances(instance.g, instance.ghosts, instance.root)
    return frozenset(u for u in X if dist.get(u, INF) > constants.far_threshold)


def potentials_of(instance, X, constants):
    X = frozenset(X)
    return Potentials(
        pattern=len(X - instance.light),
        graph=instance.gamma,
        distance=len(far_vertices(instance, X, constants)),
    )


def is_pattern(instance, X, constants):
    X = frozenset(X)
    if instance.root not in X or X & instance.ghosts or not X <= instance.g.vertices():
        return False
    if len(X) > constants.k - 10 * math.sqrt(constants.k) * instance.credit:
        return False
    through = instance.g.nx.subgraph(X | instance.ghosts)
    return X <= nx.node_connected_component(through, instance.root)


def lb_value(n, pi, gamma, phi, constants):
    """Natural log of the coverage lower bound; 0.0 stands for probability 1."""
    if pi <= 0:
        return 0.0
    k = constants.k
    if k <= 1:
        return -math.inf
    lg_n = max(lg(n), 1.0)
    spread = (lg(k) + lg(lg_n)) / math.sqrt(k)
    first = -constants.c1 * spread * (pi * lg(pi) + phi)
    second = constants.c2 * pi * lg(max(gamma, 1)) * math.log1p(-1.0 / k)
    return first + second
