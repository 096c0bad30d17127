import unittest

import networkx as nx

from src.errors import BadParams
from src.graph_core import Graph
from src.separator_duality import (
    build_network,
    duality,
    min_cost_flow,
    minimalize,
    separates,
    validate_chain,
    validate_paths,
)


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid(rows, cols):
    G = nx.grid_2d_graph(rows, cols)
    return Graph(nx.relabel_nodes(G, {(r, c): r * cols + c for r, c in G.nodes}))


# two vertex-disjoint paths 0-1-3 and 0-2-3
SQUARE = Graph.from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)])


class TestNetwork(unittest.TestCase):
    def test_single_middle_vertex(self):
        net = build_network(path(3), 0, 2, 1)
        # s, t and in/out nodes for the two copies of vertex 1
        self.assertEqual(len(net.labels), 6)
        self.assertEqual(net.supply, 2)

    def test_k4_node_count(self):
        k4 = Graph(nx.complete_graph(4))
        net = build_network(k4, 0, 3, 2)
        # 2 + 2 inner vertices * 2 copies * 2 (in/out)
        self.assertEqual(len(net.labels), 10)

    def test_s_equals_t(self):
        with self.assertRaises(BadParams):
            build_network(path(3), 1, 1, 1)


class TestMinCostFlow(unittest.TestCase):
    def test_forced_through_one_vertex(self):
        # two units through vertex 1: one free, one on the cost-1 copy
        sol = min_cost_flow(build_network(path(3), 0, 2, 1))
        self.assertEqual(sol.cost, 1)

    def test_disjoint_paths_are_free(self):
        sol = min_cost_flow(build_network(SQUARE, 0, 3, 1))
        self.assertEqual(sol.cost, 0)

    def test_ties_go_to_smaller_ids(self):
        # 0 and 4 share three free middle vertices; two units use the two smallest
        fan = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
        net = build_network(fan, 0, 4, 1)
        sol = min_cost_flow(net)
        self.assertEqual(sol.cost, 0)
        used = set()
        for v in (1, 2, 3):
            free_copy = net.index[(v, 0, "in")]
            if any(sol.flow[a] > 0 for a in net.adj[free_copy] if a % 2 == 0):
                used.add(v)
        self.assertEqual(used, {1, 2})

    def test_repeat_runs_agree(self):
        net = build_network(grid(5, 5), 0, 24, 2)
        self.assertEqual(min_cost_flow(net).flow, min_cost_flow(build_network(grid(5, 5), 0, 24, 2)).flow)
        self.assertEqual(duality(grid(5, 5), 0, 24, 2, 2), duality(grid(5, 5), 0, 24, 2, 2))

    def test_strong_duality(self):
        net = build_network(grid(4, 4), 0, 15, 2)
        sol = min_cost_flow(net)
        t = net.index[("st", 15)]
        s = net.index[("st", 0)]
        self.assertEqual(sol.cost, net.supply * (sol.y[t] - sol.y[s]) - sum(sol.z.values()))
        self.assertTrue(all(z in (0, 1) for z in sol.z.values()))


class TestDuality(unittest.TestCase):
    def test_long_path_gives_singleton_chain(self):
        # 4 units through each of 10 inner vertices cost 30 > 2pq = 12
        outcome = duality(path(12), 0, 11, 3, 2)
        self.assertEqual(outcome.kind, "chain")
        self.assertEqual(outcome.cost, 30)
        self.assertEqual(outcome.chain.chain, (frozenset({1}), frozenset({2}), frozenset({3})))

    def test_cheap_flow_gives_paths(self):
        outcome = duality(SQUARE, 0, 3, 1, 1)
        self.assertEqual(outcome.kind, "paths")
        self.assertEqual(len(outcome.paths.paths), 1)
        self.assertEqual(outcome.paths.public, (frozenset(),))
        self.assertTrue(validate_paths(SQUARE, 0, 3, outcome.paths.paths, 1).ok)

    def test_grid_outcomes_validate(self):
        g = grid(5, 5)
        for p in (1, 2, 3):
            for q in (1, 2, 3):
                outcome = duality(g, 0, 24, p, q)
                if outcome.kind == "chain":
                    self.assertEqual(len(outcome.chain.chain), p)
                    self.assertTrue(validate_chain(g, 0, 24, outcome.chain.chain, q).ok)
                    for cut in outcome.chain.chain:
                        self.assertLessEqual(len(cut), 2 * q)
                else:
                    self.assertEqual(len(outcome.paths.paths), q)
                    self.assertTrue(validate_paths(g, 0, 24, outcome.paths.paths, p).ok)
                    for public in outcome.paths.public:
                        self.assertLessEqual(len(public), 4 * p)

    def test_private_vertices(self):
        outcome = duality(SQUARE, 0, 3, 1, 1)
        only = outcome.paths.paths[0]
        self.assertEqual(outcome.paths.private(0), frozenset(only[1:-1]))


class TestValidators(unittest.TestCase):
    def test_singleton_chain(self):
        self.assertTrue(validate_chain(path(3), 0, 2, [{1}]).ok)

    def test_chain_not_disjoint(self):
        report = validate_chain(path(3), 0, 2, [{1}, {1}])
        self.assertFalse(report.ok)

    def test_chain_out_of_order(self):
        report = validate_chain(path(5), 0, 4, [{2}, {1}])
        self.assertFalse(report.ok)

    def test_dropping_a_vertex_breaks_separation(self):
        g = grid(3, 3)
        cut = frozenset({1, 3})
        self.assertTrue(validate_chain(g, 0, 8, [cut]).ok)
        self.assertFalse(validate_chain(g, 0, 8, [{1}]).ok)

    def test_non_minimal(self):
        report = validate_chain(grid(3, 3), 0, 8, [{1, 3, 4}])
        self.assertFalse(report.ok)

    def test_minimalize(self):
        g = grid(3, 3)
        cut = minimalize(g, 0, 8, {1, 3, 4})
        self.assertTrue(separates(g, 0, 8, cut))
        self.assertEqual(cut, frozenset({1, 3}))

    def test_paths_must_use_edges(self):
        report = validate_paths(path(3), 0, 2, [(0, 2)], 1)
        self.assertFalse(report.ok)


if __name__ == "__main__":
    unittest.main()
