"""Synthetic dynamic hypergraphs with planted change points.

A node partition evolves through a schedule of events; between events it is
frozen and every snapshot is sampled independently from a simple
hypergraph block model: with probability ``p_in`` a hyperedge is drawn from
a single cluster (chosen proportionally to its size), otherwise from all
alive nodes uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph

REASSIGN = "reassign"
ADD_CLUSTER = "add_cluster"
ADD_CLUSTER_WITH_NODES = "add_cluster_with_nodes"
REMOVE_CLUSTER = "remove_cluster"
EVENT_KINDS = (REASSIGN, ADD_CLUSTER, ADD_CLUSTER_WITH_NODES, REMOVE_CLUSTER)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    time: int
    kind: str


@dataclass(frozen=True)
class ScenarioConfig:
    n_initial: int = 60
    k_initial: int = 3
    num_snapshots: int = 150
    schedule: tuple[Event, ...] = (
        Event(30, REASSIGN),
        Event(60, ADD_CLUSTER),
        Event(90, ADD_CLUSTER_WITH_NODES),
        Event(120, REMOVE_CLUSTER),
    )
    edges_per_snapshot: int = 120
    size_range: tuple[int, int] = (2, 5)
    p_in: float = 0.9
    reassign_fraction: float = 0.2
    new_cluster_fraction: float = 0.2
    new_nodes: int = 10
    seed: int = 0

    def __post_init__(self):
        times = [e.time for e in self.schedule]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioError("change times must be strictly increasing")
        if any(t <= 0 or t >= self.num_snapshots for t in times):
            raise ScenarioError("change times must lie strictly inside (0, num_snapshots)")
        for e in self.schedule:
            if e.kind not in EVENT_KINDS:
                raise ScenarioError(f"unknown event kind {e.kind!r}")
        if not (self.p_in > self.p_out > 0):
            raise ScenarioError("need p_in > p_out > 0")
        lo, hi = self.size_range
        if lo < 2 or hi < lo or hi > self.n_initial:
            raise ScenarioError("size range must lie within [2, n]")
        if self.k_initial < 1 or self.n_initial < self.k_initial:
            raise ScenarioError("need 1 <= k_initial <= n_initial")
        for name in ("reassign_fraction", "new_cluster_fraction"):
            if not 0 <= getattr(self, name) <= 1:
                raise ScenarioError(f"{name} must lie in [0, 1]")

    @property
    def p_out(self) -> float:
        """Probability that a hyperedge ignores the block structure."""
        return 1.0 - self.p_in

    @property
    def change_times(self) -> list[int]:
        return [e.time for e in self.schedule]


def default_scenario(seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(seed=seed)


@dataclass
class GroundTruth:
    changes: list[int]
    partitions: list[np.ndarray] = field(repr=False)

    @property
    def n_by_t(self) -> list[int]:
        return [int(p.size) for p in self.partitions]

    def to_json(self) -> dict:
        return {"changes": list(self.changes), "n_by_t": self.n_by_t}


def initial_partition(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Balanced random assignment of ``n`` nodes to ``k`` labels."""
    labels = np.arange(n) % k
    return rng.permutation(labels)


def _reassign(labels, fraction, rng):
    out = labels.copy()
    clusters = np.unique(labels)
    count = int(round(fraction * labels.size))
    if count == 0 or clusters.size < 2:
        return out
    for v in rng.choice(labels.size, size=count, replace=False):
        others = clusters[clusters != labels[v]]
        out[v] = rng.choice(others)
    return out


def apply_event(
    partition: np.ndarray,
    kind: str,
    rng: np.random.Generator,
    fraction: float = 0.2,
    new_nodes: int = 10,
) -> np.ndarray:
    """Return the partition after one scheduled event.

    ``partition[v]`` is the cluster label of node ``v``; node ids are never
    reused and new nodes are appended at the end.
    """
    labels = np.asarray(partition).copy()
    if kind == REASSIGN:
        return _reassign(labels, fraction, rng)
    if kind in (ADD_CLUSTER, ADD_CLUSTER_WITH_NODES):
        new_label = int(labels.max()) + 1 if labels.size else 0
        count = int(round(fraction * labels.size))
        if count:
            labels[rng.choice(labels.size, size=count, replace=False)] = new_label
        if kind == ADD_CLUSTER_WITH_NODES:
            labels = np.concatenate([labels, np.full(new_nodes, new_label, dtype=labels.dtype)])
        return labels
    if kind == REMOVE_CLUSTER:
        clusters = np.unique(labels)
        if clusters.size < 2:
            raise ScenarioError("cannot remove the last cluster")
        victim = rng.choice(clusters)
        survivors = clusters[clusters != victim]
        orphans = np.flatnonzero(labels == victim)
        labels[orphans] = rng.choice(survivors, size=orphans.size)
        return labels
    raise ScenarioError(f"unknown event kind {kind!r}")


def sample_snapshot(
    partition: np.ndarray,
    rng: np.random.Generator,
    num_edges: int = 120,
    size_range: tuple[int, int] = (2, 5),
    p_in: float = 0.9,
) -> Hypergraph:
    labels = np.asarray(partition)
    n = labels.size
    if n == 0:
        raise ScenarioError("partition is empty")
    clusters, sizes = np.unique(labels, return_counts=True)
    members = {c: np.flatnonzero(labels == c) for c in clusters}
    probs = sizes / sizes.sum()
    lo, hi = size_range
    edges = []
    for _ in range(num_edges):
        s = int(rng.integers(lo, hi + 1))
        if rng.random() < p_in:
            c = clusters[rng.choice(clusters.size, p=probs)]
            pool = members[c]
            if pool.size >= s:
                edges.append(rng.choice(pool, size=s, replace=False))
                continue
        edges.append(rng.choice(n, size=min(s, n), replace=False))
    return Hypergraph(n, edges)


def dataset_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))


def generate_sequence(
    config: ScenarioConfig, index: int = 0
) -> tuple[list[Hypergraph], GroundTruth]:
    """Sample all snapshots of one dataset.

    The RNG stream depends only on ``(config.seed, index)``.
    """
    rng = dataset_rng(config.seed, index)
    part = initial_partition(config.n_initial, config.k_initial, rng)
    events = {e.time: e.kind for e in config.schedule}
    snaps, parts = [], []
    for t in range(config.num_snapshots):
        if t in events:
            part = apply_event(
                part,
                events[t],
                rng,
                fraction=config.reassign_fraction if events[t] == REASSIGN else config.new_cluster_fraction,
                new_nodes=config.new_nodes,
            )
        parts.append(part.copy())
        snaps.append(
            sample_snapshot(part, rng, config.edges_per_snapshot, config.size_range, config.p_in)
        )
    return snaps, GroundTruth(config.change_times, parts)


def node_label(v: int) -> str:
    return f"n{v:04d}"


def sequence_records(snaps: list[Hypergraph]) -> list[dict]:
    """Flatten snapshots into temporal hyperedge records (one per edge)."""
    out = []
    for t, h in enumerate(snaps):
        for members, w in zip(h.edges, h.weights):
            rec = {"t": t, "nodes": [node_label(v) for v in members]}
            if w != 1.0:
                rec["w"] = float(w)
            out.append(rec)
    return out
