"""Hypergraph change point detection with adapted cardinality-based gadgets."""

from .hypergraph import Hypergraph, HypergraphError
from .reduction import (
    DirectedGraph,
    UndirectedGraph,
    adapted_cb_gadget,
    clique_expansion,
    star_expansion,
    transition_matrix,
)
from .spectral import (
    combinatorial_laplacian,
    normalized_laplacian,
    stationary_distribution,
    top_k_eigenvalues,
)

__version__ = "0.1.0"

__all__ = [
    "DirectedGraph",
    "Hypergraph",
    "HypergraphError",
    "UndirectedGraph",
    "adapted_cb_gadget",
    "clique_expansion",
    "combinatorial_laplacian",
    "normalized_laplacian",
    "star_expansion",
    "stationary_distribution",
    "top_k_eigenvalues",
    "transition_matrix",
]
