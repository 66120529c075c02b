"""Weighted hypergraphs with all-or-nothing cut functions.

Node ids are dense indices ``0..n-1``; the optional ``labels`` sequence maps
them back to external entity names.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np
import scipy.sparse

logger = logging.getLogger(__name__)


class HypergraphError(ValueError):
    """Raised for invalid hypergraph construction or improper subsets."""


def _as_index_set(subset: Iterable[int], n: int) -> frozenset[int]:
    if isinstance(subset, np.ndarray) and subset.dtype == bool:
        if subset.shape != (n,):
            raise HypergraphError(f"boolean mask must have length {n}")
        return frozenset(np.flatnonzero(subset).tolist())
    s = frozenset(int(i) for i in subset)
    for i in s:
        if i < 0 or i >= n:
            raise HypergraphError(f"node index {i} out of range for {n} nodes")
    return s


class Hypergraph:
    """Immutable weighted hypergraph.

    Every hyperedge has at least two distinct members and a weight in (0, 1].
    Identical hyperedges may appear more than once; they are kept as distinct
    edges.
    """

    __slots__ = ("_n", "_edges", "_weights", "_labels", "_incident")

    def __init__(
        self,
        n: int,
        edges: Sequence[Iterable[int]],
        weights: Sequence[float] | None = None,
        labels: Sequence[str] | None = None,
    ):
        if n < 0:
            raise HypergraphError("node count must be nonnegative")
        edge_tuples = []
        for k, e in enumerate(edges):
            members = [int(v) for v in e]
            if len(set(members)) != len(members):
                raise HypergraphError(f"hyperedge {k} has repeated members")
            if len(members) < 2:
                raise HypergraphError(f"hyperedge {k} has fewer than 2 members")
            for v in members:
                if v < 0 or v >= n:
                    raise HypergraphError(f"hyperedge {k} references node {v} outside 0..{n - 1}")
            edge_tuples.append(tuple(sorted(members)))
        if weights is None:
            w = np.ones(len(edge_tuples))
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(edge_tuples),):
                raise HypergraphError("weights must match the number of edges")
            if np.any(~np.isfinite(w)) or np.any(w <= 0) or np.any(w > 1):
                raise HypergraphError("edge weights must lie in (0, 1]")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise HypergraphError("labels must have one entry per node")
        incident: list[list[int]] = [[] for _ in range(n)]
        for k, e in enumerate(edge_tuples):
            for v in e:
                incident[v].append(k)
        w.setflags(write=False)
        self._n = n
        self._edges = tuple(edge_tuples)
        self._weights = w
        self._labels = labels
        self._incident = tuple(tuple(x) for x in incident)

    @classmethod
    def from_weighted_edges(
        cls,
        n: int,
        edges: Sequence[Iterable[int]],
        weights: Sequence[float] | None = None,
        labels: Sequence[str] | None = None,
    ) -> Hypergraph:
        """Build a hypergraph applying the ingestion policy.

        Repeated members inside an edge are rejected, singleton edges are
        dropped with a warning, and weights above 1 trigger division of all
        weights by the global maximum. Zero or negative weights are rejected.
        """
        edges = [list(e) for e in edges]
        w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (len(edges),):
            raise HypergraphError("weights must match the number of edges")
        if np.any(w <= 0):
            raise HypergraphError("edge weights must be positive")
        keep = []
        for k, e in enumerate(edges):
            if len(set(e)) != len(e):
                raise HypergraphError(f"hyperedge {k} has repeated members")
            if len(e) < 2:
                logger.warning("dropping singleton hyperedge %d", k)
                continue
            keep.append(k)
        edges = [edges[k] for k in keep]
        w = w[keep]
        if len(w) and w.max() > 1:
            w = w / w.max()
        return cls(n, edges, w, labels)

    # -- structure ---------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self._edges

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def labels(self) -> tuple[str, ...]:
        if self._labels is None:
            return tuple(str(i) for i in range(self._n))
        return self._labels

    def incident_edges(self, node: int) -> tuple[int, ...]:
        return self._incident[node]

    def edge_sizes(self) -> np.ndarray:
        return np.array([len(e) for e in self._edges], dtype=int)

    def incident_counts(self) -> np.ndarray:
        """Number of hyperedges containing each node (unweighted degree)."""
        return np.array([len(x) for x in self._incident], dtype=int)

    def incidence_matrix(self) -> scipy.sparse.csr_matrix:
        """Unweighted 0/1 node-by-edge incidence matrix."""
        rows = [v for e in self._edges for v in e]
        cols = [k for k, e in enumerate(self._edges) for _ in e]
        data = np.ones(len(rows))
        return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(self._n, self.num_edges))

    def max_edge_size(self) -> int:
        return max((len(e) for e in self._edges), default=0)

    def max_incidence(self) -> int:
        return max((len(x) for x in self._incident), default=0)

    def __repr__(self):
        return f"Hypergraph(n={self._n}, m={self.num_edges})"

    # -- cut functions ------------------------------------------------------

    def splitting_value(self, edge: int, subset: Iterable[int]) -> float:
        """All-or-nothing penalty min(|e & S|, |e - S|, w_e)."""
        s = _as_index_set(subset, self._n)
        members = self._edges[edge]
        inside = sum(1 for v in members if v in s)
        return float(min(inside, len(members) - inside, self._weights[edge]))

    def cut_value(self, subset: Iterable[int]) -> float:
        s = _as_index_set(subset, self._n)
        total = 0.0
        for k, members in enumerate(self._edges):
            inside = sum(1 for v in members if v in s)
            total += min(inside, len(members) - inside, self._weights[k])
        return float(total)

    def degree(self, node: int) -> float:
        """Weighted degree: sum of w_e over edges containing ``node``."""
        return float(sum(self._weights[k] for k in self._incident[node]))

    def degrees(self) -> np.ndarray:
        d = np.zeros(self._n)
        for k, members in enumerate(self._edges):
            d[list(members)] += self._weights[k]
        return d

    def volume(self, subset: Iterable[int]) -> float:
        s = _as_index_set(subset, self._n)
        return float(sum(self.degree(i) for i in s))

    def _proper(self, subset) -> frozenset[int]:
        s = _as_index_set(subset, self._n)
        if not s or len(s) == self._n:
            raise HypergraphError("improper subset: must be nonempty and not the full node set")
        return s

    def conductance(self, subset: Iterable[int]) -> float:
        s = self._proper(subset)
        vol_s = self.volume(s)
        vol_c = float(self.degrees().sum()) - vol_s
        cut = self.cut_value(s)
        if cut == 0:
            return 0.0
        return cut / min(vol_s, vol_c)

    def edge_expansion(self, subset: Iterable[int]) -> float:
        s = self._proper(subset)
        return self.cut_value(s) / min(len(s), self._n - len(s))

    def beta(self) -> int:
        """(max edge size + 1) * (max number of edges at a node)."""
        return (self.max_edge_size() + 1) * self.max_incidence()

    def mu(self, subset: Iterable[int]) -> float:
        """2 cut(S) / (vol(S) + beta |S|)."""
        s = self._proper(subset)
        cut = self.cut_value(s)
        if cut == 0:
            return 0.0
        return 2.0 * cut / (self.volume(s) + self.beta() * len(s))

    # -- connectivity -------------------------------------------------------

    def components(self) -> list[list[int]]:
        """Connected components of the node-edge incidence graph, by node.

        Components are returned largest first; ties go to the component with
        the smallest node index.
        """
        parent = list(range(self._n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for members in self._edges:
            r0 = find(members[0])
            for v in members[1:]:
                r = find(v)
                if r != r0:
                    parent[r] = r0
        groups: dict[int, list[int]] = {}
        for v in range(self._n):
            groups.setdefault(find(v), []).append(v)
        comps = list(groups.values())
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps

    def is_connected(self) -> bool:
        # a graph with at most one node is connected by convention
        return len(self.components()) <= 1

    def subhypergraph(self, nodes: Sequence[int]) -> Hypergraph:
        """Induced hypergraph on ``nodes`` keeping only edges fully inside."""
        nodes = sorted(int(v) for v in nodes)
        remap = {v: i for i, v in enumerate(nodes)}
        keep = [k for k, e in enumerate(self._edges) if all(v in remap for v in e)]
        labels = [self.labels[v] for v in nodes]
        return Hypergraph(
            len(nodes),
            [[remap[v] for v in self._edges[k]] for k in keep],
            self._weights[keep],
            labels,
        )

    def largest_component(self) -> Hypergraph:
        comps = self.components()
        if len(comps) <= 1:
            return self
        return self.subhypergraph(comps[0])
