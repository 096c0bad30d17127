import unittest

import networkx as nx

from src.clustering import (
    cluster,
    geometric_radius,
    radius_cap,
    radius_limit,
    success_probability,
    verify_cluster,
)
from src.decisions import LiveDecisions, ReplayDecisions, trial_generator
from src.errors import DegenerateInput
from src.graph_core import Graph


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid(rows, cols):
    G = nx.grid_2d_graph(rows, cols)
    return Graph(nx.relabel_nodes(G, {(r, c): r * cols + c for r, c in G.nodes}))


class TestRadiusArithmetic(unittest.TestCase):
    def test_success_probability(self):
        # 1 / (2 * 2^2)
        self.assertEqual(success_probability(2), 1 / 8)

    def test_radius_cap(self):
        # 9 * 4 * lg 4 = 72
        self.assertEqual(radius_cap(2, 4), 72)
        # 9 * 9 * lg 2 = 81
        self.assertEqual(radius_cap(3, 2), 81)
        self.assertAlmostEqual(radius_limit(2, 8), 108.0)

    def test_radius_cap_needs_two_vertices(self):
        with self.assertRaises(DegenerateInput):
            radius_cap(3, 1)

    def test_geometric_radius(self):
        self.assertEqual(geometric_radius(1.0, 0.5), 1)
        self.assertEqual(geometric_radius(0.3, 1.0), 1)
        # ln(0.3) / ln(0.5) = 1.74
        self.assertEqual(geometric_radius(0.3, 0.5), 2)
        # ln(0.2) / ln(0.5) = 2.32
        self.assertEqual(geometric_radius(0.2, 0.5), 3)


class TestCluster(unittest.TestCase):
    def test_single_vertex_rejected(self):
        with self.assertRaises(DegenerateInput):
            cluster(Graph.from_edges(1, []), frozenset(), 2, LiveDecisions(trial_generator(1)))

    def test_certificate_holds(self):
        for g in (path(60), grid(6, 6)):
            for seed in range(20):
                result = cluster(g, frozenset(), 3, LiveDecisions(trial_generator(seed)))
                report = verify_cluster(g, result, 3)
                self.assertTrue(report.ok, report.violations)
                if result.aborted:
                    self.assertEqual(result.kept, frozenset())

    def test_kept_components_are_separated_balls(self):
        g = path(40)
        result = cluster(g, frozenset(), 2, LiveDecisions(trial_generator(7)))
        centers = {v for v, _ in result.carve_log}
        for comp in nx.connected_components(g.nx.subgraph(result.kept)):
            self.assertEqual(len(centers & comp), 1)

    def test_same_seed_same_result(self):
        g = grid(5, 5)
        a = cluster(g, frozenset(), 3, LiveDecisions(trial_generator(11)))
        b = cluster(g, frozenset(), 3, LiveDecisions(trial_generator(11)))
        self.assertEqual(a, b)

    def test_replay(self):
        g = path(30)
        live = LiveDecisions(trial_generator(5))
        first = cluster(g, frozenset(), 2, live)
        again = cluster(g, frozenset(), 2, ReplayDecisions(live.trace))
        self.assertEqual(first.kept, again.kept)
        self.assertEqual(first.carve_log, again.carve_log)

    def test_every_draw_is_traced(self):
        live = LiveDecisions(trial_generator(3))
        result = cluster(path(25), frozenset(), 2, live)
        self.assertEqual(len(live.trace), len(result.carve_log))
        for entry in live.trace:
            self.assertEqual(entry["kind"], "cluster.radius")
            self.assertLessEqual(entry["log_prob"], 0.0)

    def test_ghosts_reattach(self):
        # 0 - 1 - 2 with ghost 1: torso is the edge 0-2, the ghost comes back if a neighbour is kept
        g = path(3)
        result = cluster(g, frozenset({1}), 2, LiveDecisions(trial_generator(0)))
        if result.kept & {0, 2}:
            self.assertIn(1, result.kept)


if __name__ == "__main__":
    unittest.main()
