"""
Tests for benchmark instance generators
"""

import networkx as nx
import pytest

from pbsift.constraint import Literal, PBConstraint, is_cardinality, is_clause
from pbsift.errors import InvalidInstanceError
from pbsift.generators import GENERATORS, generate_vertexcover_complete, vertex_cover_constraints

from .helpers import brute_force_satisfiable


class TestVertexCover:
    """Test cases for the vertex cover encodings"""

    def test_complete_graph_on_four(self):
        """Test 6 edge clauses and ~x1 + ~x2 + ~x3 + ~x4 >= 3"""
        formula = generate_vertexcover_complete(4)
        assert len(formula) == 7
        assert all(is_clause(c) for c in formula[:6])
        assert formula[-1] == PBConstraint.of([(1, Literal(v, False)) for v in range(1, 5)], 3)

    def test_complete_graph_on_three(self):
        """Test 3 edge clauses and a bound of 2"""
        formula = generate_vertexcover_complete(3)
        assert len(formula) == 4
        assert is_cardinality(formula[-1])
        assert formula[-1].degree == 2

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
    def test_unsatisfiable(self, n):
        """Test by enumeration that complete graphs have no small cover"""
        assert not brute_force_satisfiable(generate_vertexcover_complete(n), n)

    def test_cover_of_n_minus_one_exists(self):
        """Test that k = n - 1 is satisfiable"""
        assert brute_force_satisfiable(generate_vertexcover_complete(5, k=4), 5)

    def test_other_graphs(self):
        """Test the encoding of a path"""
        formula = vertex_cover_constraints(nx.path_graph([1, 2, 3]), 1)
        assert len(formula) == 3
        assert brute_force_satisfiable(formula, 3)

    @pytest.mark.parametrize("n, k", [(2, None), (0, None), (5, -1)])
    def test_invalid(self, n, k):
        """Test that invalid sizes are rejected"""
        with pytest.raises(InvalidInstanceError):
            generate_vertexcover_complete(n, k)

    def test_registry(self):
        """Test the family name used on the command line"""
        assert GENERATORS["vertexcover-complete"] is generate_vertexcover_complete
