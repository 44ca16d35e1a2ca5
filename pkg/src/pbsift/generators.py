"""
Benchmark instance generators
"""

from __future__ import annotations

from math import ceil
from typing import List, Optional

import networkx as nx

from .constraint import Literal, PBConstraint
from .errors import InvalidInstanceError


def vertex_cover_constraints(graph: nx.Graph, k: int) -> List[PBConstraint]:
    """Encode 'graph has a vertex cover of at most k vertices'

    Nodes must be positive integers; node v is variable xv. One clause per
    edge, then sum(~xv) >= n - k bounds the cover size.
    """
    nodes = sorted(graph.nodes)
    constraints = [
        PBConstraint.of([(1, Literal(u)), (1, Literal(v))], 1) for u, v in sorted(tuple(sorted(e)) for e in graph.edges)
    ]
    bound = len(nodes) - k
    constraints.append(PBConstraint.of([(1, Literal(v, False)) for v in nodes], max(bound, 0)))
    return constraints


def generate_vertexcover_complete(n: int, k: Optional[int] = None) -> List[PBConstraint]:
    """Vertex cover of size k on the complete graph with n vertices

    Every cover of a complete graph needs n - 1 vertices, so the instance is
    unsatisfiable whenever k < n - 1; the default k = ceil(n/2) - 1 is.

    Raises:
        InvalidInstanceError: If n < 3 or k is negative
    """
    if n < 3:
        raise InvalidInstanceError(f"vertexcover-complete needs n >= 3, got {n}")
    if k is None:
        k = ceil(n / 2) - 1
    if k < 0:
        raise InvalidInstanceError(f"cover bound k must be >= 0, got {k}")
    return vertex_cover_constraints(nx.complete_graph(range(1, n + 1)), k)


GENERATORS = {"vertexcover-complete": generate_vertexcover_complete}
