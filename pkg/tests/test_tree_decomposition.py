import unittest

import networkx as nx

from src.errors import ParseError
from src.graph_core import Graph
from src.tree_decomposition import (
    TreeDecomposition,
    baker_decompositions,
    baker_layers,
    balanced_separator,
    decompose_bounded_radius,
    from_pace,
    nice_decomposition,
    to_pace,
    validate,
)


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid(rows, cols):
    G = nx.grid_2d_graph(rows, cols)
    return Graph(nx.relabel_nodes(G, {(r, c): r * cols + c for r, c in G.nodes}))


def td_of(bags, parent):
    return TreeDecomposition(tuple(frozenset(b) for b in bags), tuple(parent), 0)


class TestValidate(unittest.TestCase):
    def test_valid_path_decomposition(self):
        td = td_of([{0, 1}, {1, 2}], [None, 0])
        self.assertTrue(validate(path(3), td).ok)
        self.assertEqual(td.width, 1)

    def test_missing_vertex(self):
        report = validate(path(3), td_of([{0, 1}], [None]))
        self.assertFalse(report.ok)
        self.assertIn("(T1)", report.first)

    def test_missing_edge(self):
        report = validate(path(3), td_of([{0, 1}, {2}], [None, 0]))
        self.assertFalse(report.ok)
        self.assertTrue(any("(T2)" in v for v in report.violations))

    def test_disconnected_occurrences(self):
        # vertex 1 sits in bags 0 and 2 but not in bag 1 between them
        td = td_of([{0, 1}, {2}, {1, 2}], [None, 0, 1])
        report = validate(path(3), td)
        self.assertTrue(any("(T3)" in v for v in report.violations))

    def test_two_roots(self):
        td = td_of([{0, 1}, {1, 2}], [None, None])
        self.assertFalse(validate(path(3), td).ok)


class TestConstruction(unittest.TestCase):
    def test_join(self):
        star = Graph.from_edges(3, [(0, 1), (0, 2)])
        td = TreeDecomposition.join({0}, [TreeDecomposition.single_bag({0, 1}), TreeDecomposition.single_bag({0, 2})])
        self.assertEqual(td.parent, (None, 0, 0))
        self.assertTrue(validate(star, td).ok)

    def test_restrict(self):
        td = td_of([{0, 1}, {1, 2}], [None, 0]).restrict({1, 2})
        self.assertEqual(td.bags, (frozenset({1}), frozenset({1, 2})))

    def test_rerooted_stays_valid(self):
        td = td_of([{0, 1}, {1, 2}, {2, 3}], [None, 0, 1]).rerooted(2)
        self.assertEqual(td.root, 2)
        self.assertTrue(validate(path(4), td).ok)

    def test_heuristic_on_grid(self):
        g = grid(3, 3)
        td = decompose_bounded_radius(g)
        self.assertTrue(validate(g, td).ok)
        # the 3x3 grid has treewidth 3
        self.assertGreaterEqual(td.width, 3)

    def test_tree_has_width_one(self):
        g = path(8)
        td = decompose_bounded_radius(g, root=0)
        self.assertTrue(validate(g, td).ok)
        self.assertEqual(td.width, 1)
        self.assertIn(0, td.root_bag)

    def test_empty_graph(self):
        td = decompose_bounded_radius(Graph(nx.Graph()))
        self.assertEqual(td.width, -1)


class TestBalancedSeparator(unittest.TestCase):
    def test_path_split_in_half(self):
        g = path(7)
        td = decompose_bounded_radius(g)
        w = {v: 1 for v in g.vertices()}
        bag = balanced_separator(g, td, w)
        for comp in nx.connected_components(g.nx.subgraph(g.vertices() - bag)):
            self.assertLessEqual(2 * len(comp), 7)

    def test_zero_weights(self):
        g = grid(3, 3)
        td = decompose_bounded_radius(g)
        bag = balanced_separator(g, td, {})
        self.assertIn(bag, td.bags)


class TestBaker(unittest.TestCase):
    def test_layers(self):
        layers = baker_layers(path(6), 0, 3)
        self.assertEqual(layers, [frozenset({0, 3}), frozenset({1, 4}), frozenset({2, 5})])

    def test_decompositions_of_layer_deletions(self):
        g = grid(4, 4)
        out = baker_decompositions(g, 0, 3)
        self.assertEqual([i for i, _ in out], [0, 1, 2])
        for i, td in out:
            rest = g.without(baker_layers(g, 0, 3)[i])
            self.assertTrue(validate(rest, td).ok)


class TestPace(unittest.TestCase):
    def test_read(self):
        text = "c two bags\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n"
        td = from_pace(text)
        # file ids are 1-based
        self.assertEqual(td.bags, (frozenset({0, 1}), frozenset({1, 2})))
        self.assertTrue(validate(path(3), td).ok)

    def test_write_then_read(self):
        td = td_of([{0, 1}, {1, 2}], [None, 0])
        self.assertEqual(from_pace(to_pace(td, 3)).bags, td.bags)

    def test_missing_header(self):
        with self.assertRaises(ParseError):
            from_pace("b 1 1 2\n")

    def test_wrong_edge_count(self):
        with self.assertRaises(ParseError):
            from_pace("s td 2 2 3\nb 1 1 2\nb 2 2 3\n")


class TestNiceDecomposition(unittest.TestCase):
    def test_every_edge_introduced_once(self):
        g = grid(3, 3)
        td = decompose_bounded_radius(g)
        nodes, root = nice_decomposition(td, g.edges())
        self.assertEqual(nodes[root].bag, frozenset())
        introduced = sorted(node.edge for node in nodes if node.kind == "edge")
        self.assertEqual(introduced, sorted(g.edges()))
        for node in nodes:
            if node.kind == "edge":
                self.assertTrue(set(node.edge) <= node.bag)
            if node.kind == "join":
                self.assertEqual(len(node.children), 2)
                self.assertTrue(all(nodes[c].bag == node.bag for c in node.children))

    def test_each_vertex_forgotten_once(self):
        g = path(5)
        nodes, _ = nice_decomposition(decompose_bounded_radius(g), g.edges())
        forgotten = sorted(node.vertex for node in nodes if node.kind == "forget")
        self.assertEqual(forgotten, [0, 1, 2, 3, 4])


if __name__ == "__main__":
    unittest.main()
