import math
import unittest
from fractions import Fraction

from src.corpus import gen_corpus
from src.decisions import trial_generator
from src.errors import TooLarge
from src.graph_core import Graph
from src.instance import Constants
from src.pattern_cover import CoverResult
from src.solvers import (
    PathQuery,
    brute_force_paths,
    covering_family,
    family_coverage,
    family_size_log,
    path_weight,
    solve_with_repetition,
    validate_witness,
)
from src.tree_decomposition import TreeDecomposition

SMALL = Constants(k=2, scale=0.01)


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


class TestWitness(unittest.TestCase):
    def test_valid_path(self):
        self.assertTrue(validate_witness(path(4), PathQuery("path", 3), [1, 2, 3]).ok)

    def test_wrong_length(self):
        self.assertFalse(validate_witness(path(4), PathQuery("path", 3), [0, 1]).ok)

    def test_repeated_vertex(self):
        self.assertFalse(validate_witness(path(4), PathQuery("path", 3), [0, 1, 0]).ok)

    def test_cycle_needs_closing_edge(self):
        self.assertFalse(validate_witness(path(4), PathQuery("cycle", 3), [0, 1, 2]).ok)

    def test_direction_matters(self):
        g = Graph.from_edges(3, [], arcs=[(0, 1), (1, 2)])
        query = PathQuery("path", 3, directed=True)
        self.assertTrue(validate_witness(g, query, [0, 1, 2]).ok)
        self.assertFalse(validate_witness(g, query, [2, 1, 0]).ok)

    def test_weight(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)], weights={(0, 1): Fraction(1, 2)})
        query = PathQuery("path", 3)
        self.assertEqual(path_weight(g, query, [0, 1, 2]), Fraction(3, 2))
        self.assertFalse(validate_witness(g, query, [0, 1, 2], Fraction(2)).ok)


class TestBruteForce(unittest.TestCase):
    def test_cap(self):
        with self.assertRaises(TooLarge):
            brute_force_paths(path(20), PathQuery("path", 3), cap=10)

    def test_longest(self):
        answer = brute_force_paths(path(5), PathQuery("path", 5))
        self.assertTrue(answer.found)
        self.assertEqual(answer.weight, Fraction(4))


class TestSolveWithRepetition(unittest.TestCase):
    def test_single_edge_found_at_once(self):
        # the only sample of a 2-vertex graph is the whole graph
        g = path(2)
        report = solve_with_repetition(g, PathQuery("path", 2), 5, SMALL, 11)
        self.assertTrue(report.found)
        self.assertEqual(report.trials_used, 1)
        self.assertEqual(sorted(report.witness), [0, 1])

    def test_triangle(self):
        g = Graph.from_edges(3, [], arcs=[(0, 1), (1, 2), (2, 0)])
        report = solve_with_repetition(g, PathQuery("cycle", 3, directed=True), 3, Constants(k=3, scale=0.01), 4)
        self.assertTrue(report.found)
        self.assertEqual(report.witness, (0, 1, 2))

    def test_unsatisfiable_orientation(self):
        item = gen_corpus("grid", {"rows": 3, "cols": 3}, trial_generator(0), plant="unsatisfiable")
        query = PathQuery("path", 3, directed=True)
        report = solve_with_repetition(item.graph, query, 4, Constants(k=3, scale=0.01), 2)
        self.assertFalse(report.found)
        self.assertEqual(report.trials_used, 4)
        self.assertEqual(len(report.widths), 4)

    def test_reproducible(self):
        g = path(9)
        query = PathQuery("path", 3)
        a = solve_with_repetition(g, query, 6, Constants(k=3, scale=0.01), 21)
        b = solve_with_repetition(g, query, 6, Constants(k=3, scale=0.01), 21)
        self.assertEqual(a, b)
        if a.found:
            self.assertTrue(validate_witness(g, query, a.witness).ok)


class TestFamily(unittest.TestCase):
    def test_family_members(self):
        g = path(6)
        family = covering_family(g, 3, 4, Constants(k=3, scale=0.01), 8)
        self.assertEqual(len(family), 4)
        for cover in family:
            self.assertTrue(cover.vertices <= g.vertices())

    def test_coverage_table(self):
        family = [
            CoverResult(frozenset({0, 1}), TreeDecomposition.single_bag({0, 1})),
            CoverResult(frozenset({1, 2, 3}), TreeDecomposition.single_bag({1, 2, 3})),
        ]
        table = family_coverage(family, [{1}, {2, 3}, {0, 3}])
        self.assertEqual(list(table["covered_by"]), [2, 1, 0])
        self.assertEqual(list(table["first_member"]), [0, 1, -1])
        self.assertEqual(list(table["covered"]), [True, True, False])

    def test_size_grows_with_k(self):
        c = Constants(k=4)
        small, large = family_size_log(64, 4, c), family_size_log(64, 9, c)
        self.assertTrue(math.isfinite(small))
        self.assertGreater(small, 0)
        self.assertGreater(large, small)


if __name__ == "__main__":
    unittest.main()
