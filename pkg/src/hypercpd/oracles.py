"""Exhaustive subset enumeration for small instances.

These routines evaluate cut quantities for *every* subset at once using
bitmask arithmetic, independently of the per-subset methods on
:class:`~hypercpd.hypergraph.Hypergraph` and the reduction helpers. They are
exponential and refuse graphs with more than 24 nodes.
"""

from __future__ import annotations

import numpy as np

from .hypergraph import Hypergraph
from .reduction import DirectedGraph

MAX_ENUM_NODES = 24


def _check(n: int) -> None:
    if n > MAX_ENUM_NODES:
        raise ValueError(f"exhaustive enumeration limited to {MAX_ENUM_NODES} nodes, got {n}")


def membership(n: int) -> np.ndarray:
    """Boolean array ``(2**n, n)``; row ``s`` is the bit pattern of mask ``s``."""
    _check(n)
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def hypergraph_tables(h: Hypergraph) -> dict[str, np.ndarray]:
    """cut, volume and size of every node subset, indexed by bitmask."""
    n = h.num_nodes
    bits = membership(n)
    cut = np.zeros(1 << n)
    vol = np.zeros(1 << n)
    for members, w in zip(h.edges, h.weights):
        inside = bits[:, list(members)].sum(axis=1)
        split = (inside > 0) & (inside < len(members))
        cut += np.where(split, w, 0.0)
        for v in members:
            vol += np.where(bits[:, v], w, 0.0)
    size = bits.sum(axis=1)
    return {"cut": cut, "vol": vol, "size": size}


def hypergraph_ratios(h: Hypergraph) -> dict[str, np.ndarray]:
    """conductance, expansion and mu for every proper subset (NaN otherwise)."""
    tab = hypergraph_tables(h)
    n = h.num_nodes
    full = (1 << n) - 1
    cut, vol, size = tab["cut"], tab["vol"], tab["size"].astype(float)
    total = vol[full]
    proper = (size > 0) & (size < n)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(cut == 0, 0.0, cut / np.minimum(vol, total - vol))
        psi = np.where(cut == 0, 0.0, cut / np.minimum(size, n - size))
        beta = (h.max_edge_size() + 1) * h.max_incidence()
        mu = np.where(cut == 0, 0.0, 2 * cut / (vol + beta * size))
    nan = np.full_like(cut, np.nan)
    return {
        **tab,
        "phi": np.where(proper, phi, nan),
        "psi": np.where(proper, psi, nan),
        "mu": np.where(proper, mu, nan),
        "beta": np.array(beta),
        "total_vol": np.array(total),
    }


def directed_tables(g: DirectedGraph) -> dict[str, np.ndarray]:
    """Directed cut, out-volume and admissibility of every node subset."""
    n = g.num_nodes
    bits = membership(n)
    coo = g.adjacency.tocoo()
    cut = np.zeros(1 << n)
    out = np.zeros(n)
    for u, v, w in zip(coo.row, coo.col, coo.data):
        out[u] += w
        if u != v:
            cut += np.where(bits[:, u] & ~bits[:, v], w, 0.0)
    vol = bits.astype(float) @ out
    # aux node u in T needs an original neighbour (either direction) in T
    admissible = np.ones(1 << n, dtype=bool)
    nbrs: dict[int, set[int]] = {}
    for u, v in zip(coo.row, coo.col):
        nbrs.setdefault(int(u), set()).add(int(v))
        nbrs.setdefault(int(v), set()).add(int(u))
    for u in range(g.num_original, n):
        orig = [v for v in nbrs.get(u, ()) if v < g.num_original]
        anchored = bits[:, orig].any(axis=1) if orig else np.zeros(1 << n, dtype=bool)
        admissible &= ~bits[:, u] | anchored
    return {"cut": cut, "vol": vol, "total_vol": np.array(out.sum()), "admissible": admissible}


def original_part(g: DirectedGraph) -> np.ndarray:
    """Bitmask of T & V for every T, assuming originals occupy the low bits."""
    masks = np.arange(1 << g.num_nodes, dtype=np.int64)
    return masks & ((1 << g.num_original) - 1)


def min_lifted_cut(g: DirectedGraph) -> np.ndarray:
    """For each S of V, the minimum directed cut over all U with U & V = S."""
    tab = directed_tables(g)
    low = original_part(g)
    best = np.full(1 << g.num_original, np.inf)
    np.minimum.at(best, low, tab["cut"])
    return best


def conductance_gap(h: Hypergraph, g: DirectedGraph) -> np.ndarray:
    """2 phi_G(T) - mu_H(T & V) over admissible T with proper T & V."""
    dt = directed_tables(g)
    hr = hypergraph_ratios(h)
    low = original_part(g)
    total = dt["total_vol"]
    n_orig = g.num_original
    sel = dt["admissible"] & (low != 0) & (low != (1 << n_orig) - 1)
    cut = dt["cut"][sel]
    vol = dt["vol"][sel]
    phi_g = cut / np.minimum(vol, total - vol)
    return 2 * phi_g - hr["mu"][low[sel]]
