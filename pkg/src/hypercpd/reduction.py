"""Hypergraph-to-graph reductions.

The adapted cardinality-based gadget replaces each hyperedge ``e`` by two
auxiliary nodes ``a`` and ``b``::

    v -> a   weight 1     for every v in e
    a -> a   weight 1 - w_e   (omitted when w_e == 1)
    a -> b   weight w_e
    b -> v   weight 1     for every v in e

Node layout of the reduced graph is ``[V | V_a | V_b]``: original nodes
first, then one a-node per edge, then one b-node per edge, both in edge order.
Clique and star expansions are provided as undirected baselines.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .hypergraph import Hypergraph, HypergraphError

ORIGINAL, AUX_A, AUX_B = 0, 1, 2


@dataclass(frozen=True)
class DirectedGraph:
    """Sparse weighted digraph produced by :func:`adapted_cb_gadget`.

    ``roles[i]`` is ORIGINAL, AUX_A or AUX_B; ``source_edge[i]`` is the
    hyperedge an auxiliary node was created for (-1 for original nodes).
    """

    adjacency: scipy.sparse.csr_matrix
    roles: np.ndarray
    source_edge: np.ndarray
    num_original: int

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return self.adjacency.nnz

    def a_node(self, edge: int) -> int:
        return self.num_original + edge

    def b_node(self, edge: int) -> int:
        return self.num_original + (self.num_nodes - self.num_original) // 2 + edge

    def out_degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def edge_list(self) -> list[tuple[int, int, float]]:
        coo = self.adjacency.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def strongly_connected_components(self) -> int:
        count, _ = scipy.sparse.csgraph.connected_components(
            self.adjacency, directed=True, connection="strong"
        )
        return int(count)


@dataclass(frozen=True)
class UndirectedGraph:
    """Symmetric sparse weighted graph.

    ``is_edge_node`` marks the hyperedge nodes of a star expansion; it is
    all False for clique expansions.
    """

    adjacency: scipy.sparse.csr_matrix
    is_edge_node: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]


def adapted_cb_gadget(h: Hypergraph) -> DirectedGraph:
    n, m = h.num_nodes, h.num_edges
    size = n + 2 * m
    rows, cols, data = [], [], []
    for k, members in enumerate(h.edges):
        a, b = n + k, n + m + k
        w = float(h.weights[k])
        for v in members:
            rows += [v, b]
            cols += [a, v]
            data += [1.0, 1.0]
        rows.append(a)
        cols.append(b)
        data.append(w)
        if w < 1.0:
            rows.append(a)
            cols.append(a)
            data.append(1.0 - w)
    adj = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(size, size))
    adj.sum_duplicates()
    roles = np.concatenate([np.full(n, ORIGINAL), np.full(m, AUX_A), np.full(m, AUX_B)])
    source = np.concatenate([np.full(n, -1), np.arange(m), np.arange(m)])
    return DirectedGraph(adj, roles, source, n)


def transition_matrix(g: DirectedGraph) -> scipy.sparse.csr_matrix:
    """Row-normalise the gadget adjacency into a random-walk matrix.

    Original nodes step to each incident a-node with probability
    1/(number of incident edges); this is the unweighted degree, matching the
    unit weights on (v, a).
    """
    out = g.out_degrees()
    if np.any(out <= 0):
        bad = int(np.flatnonzero(out <= 0)[0])
        raise HypergraphError(f"node {bad} has no outgoing weight; transition matrix undefined")
    return scipy.sparse.diags(1.0 / out) @ g.adjacency


def clique_expansion(h: Hypergraph) -> UndirectedGraph:
    """weight(u, v) = sum of w_e over edges containing both u and v."""
    n = h.num_nodes
    rows, cols, data = [], [], []
    for k, members in enumerate(h.edges):
        w = float(h.weights[k])
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                rows += [u, v]
                cols += [v, u]
                data += [w, w]
    adj = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    adj.sum_duplicates()
    return UndirectedGraph(adj, np.zeros(n, dtype=bool))


def star_expansion(h: Hypergraph, unit_weights: bool = False) -> UndirectedGraph:
    """Bipartite node/edge graph with leaf weights w_e / |e|.

    ``unit_weights`` sets every leaf weight to 1 instead.
    """
    n, m = h.num_nodes, h.num_edges
    rows, cols, data = [], [], []
    for k, members in enumerate(h.edges):
        w = 1.0 if unit_weights else float(h.weights[k]) / len(members)
        for v in members:
            rows += [v, n + k]
            cols += [n + k, v]
            data += [w, w]
    adj = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(n + m, n + m))
    adj.sum_duplicates()
    return UndirectedGraph(adj, np.concatenate([np.zeros(n, dtype=bool), np.ones(m, dtype=bool)]))


def _proper_subset(g: DirectedGraph, subset: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.num_nodes, dtype=bool)
    idx = np.fromiter((int(i) for i in subset), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= g.num_nodes):
        raise HypergraphError("subset index out of range")
    mask[idx] = True
    return mask


def directed_cut(g: DirectedGraph, subset: Iterable[int]) -> float:
    """Total weight of edges leaving ``subset``."""
    mask = _proper_subset(g, subset)
    if not mask.any() or mask.all():
        raise HypergraphError("improper subset: must be nonempty and not the full node set")
    coo = g.adjacency.tocoo()
    leaving = mask[coo.row] & ~mask[coo.col]
    return float(coo.data[leaving].sum())


def directed_conductance(g: DirectedGraph, subset: Iterable[int]) -> float:
    """cut(T) / min(vol(T), vol(complement)), volumes from out-degrees."""
    mask = _proper_subset(g, subset)
    cut = directed_cut(g, np.flatnonzero(mask))
    out = g.out_degrees()
    vol_t = out[mask].sum()
    return cut / min(vol_t, out.sum() - vol_t)


def admissible_family_check(g: DirectedGraph, subset: Iterable[int]) -> bool:
    """True when every auxiliary node in ``subset`` touches an original node in it."""
    mask = _proper_subset(g, subset)
    adj = g.adjacency
    adj_t = adj.T.tocsr()
    n = g.num_original
    for u in np.flatnonzero(mask):
        if u < n:
            continue
        nbrs = np.concatenate([adj.indices[adj.indptr[u]:adj.indptr[u + 1]],
                               adj_t.indices[adj_t.indptr[u]:adj_t.indptr[u + 1]]])
        nbrs = nbrs[nbrs < n]
        if not mask[nbrs].any():
            return False
    return True
