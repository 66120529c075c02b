"""Temporal hyperedge JSONL ingestion.

Input is UTF-8, one JSON object per line::

    {"t": 1966, "nodes": ["384 U.S. 436", "amend-5"], "w": 1.0}

``w`` is optional (default 1). Files ending in ``.gz`` are decompressed
transparently.
"""

from __future__ import annotations

import gzip
import io
import json
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .hypergraph import Hypergraph


class IngestError(ValueError):
    """Malformed input; ``errors`` holds ``(line_number, message)`` pairs."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = errors
        head = "; ".join(f"line {ln}: {msg}" for ln, msg in errors[:5])
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        super().__init__(f"{len(errors)} malformed record(s): {head}{more}")


@dataclass(frozen=True)
class TemporalHyperedge:
    t: int
    nodes: tuple[str, ...]
    w: float = 1.0

    def to_json(self) -> dict:
        out: dict = {"t": self.t, "nodes": list(self.nodes)}
        if self.w != 1.0:
            out["w"] = self.w
        return out


def _parse_record(obj) -> TemporalHyperedge:
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    if "t" not in obj or "nodes" not in obj:
        raise ValueError("missing field 't' or 'nodes'")
    t = obj["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise ValueError(f"'t' must be an integer, got {t!r}")
    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(x, str) for x in nodes):
        raise ValueError("'nodes' must be a list of strings")
    if len(set(nodes)) != len(nodes):
        raise ValueError("'nodes' contains duplicates")
    if len(nodes) < 2:
        raise ValueError("a hyperedge needs at least 2 nodes")
    w = obj.get("w", 1.0)
    if isinstance(w, bool) or not isinstance(w, (int, float)) or not math.isfinite(w):
        raise ValueError(f"'w' must be a number, got {w!r}")
    if w <= 0:
        raise ValueError("'w' must be positive")
    return TemporalHyperedge(t, tuple(nodes), float(w))


def parse_jsonl(
    stream: Iterable[str], strict: bool = True
) -> tuple[list[TemporalHyperedge], list[tuple[int, str]]]:
    """Parse records; returns ``(records, errors)``.

    With ``strict`` any malformed line raises :class:`IngestError` listing
    every bad line; otherwise bad lines are skipped and reported.
    Blank lines are ignored.
    """
    records, errors = [], []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            records.append(_parse_record(json.loads(line)))
        except (ValueError, json.JSONDecodeError) as exc:
            errors.append((lineno, str(exc)))
    if strict and errors:
        raise IngestError(errors)
    return records, errors


def open_text(path, mode: str = "rt"):
    path = Path(path)
    if path.suffix == ".gz":
        # mtime=0 keeps compressed output byte-identical across runs
        if "w" in mode:
            raw = gzip.GzipFile(path, "wb", mtime=0)
            return io.TextIOWrapper(raw, encoding="utf-8", newline="\n")
        return gzip.open(path, mode, encoding="utf-8")
    return open(path, mode, encoding="utf-8", newline="\n" if "w" in mode else None)


def read_jsonl(path, strict: bool = True) -> list[TemporalHyperedge]:
    with open_text(path) as fh:
        records, _ = parse_jsonl(fh, strict=strict)
    return records


def dumps_record(rec: TemporalHyperedge | dict) -> str:
    obj = rec.to_json() if isinstance(rec, TemporalHyperedge) else rec
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(path, records: Iterable[TemporalHyperedge | dict]) -> None:
    with open_text(path, "wt") as fh:
        for rec in records:
            fh.write(dumps_record(rec) + "\n")


def filter_top_entities(
    records: Sequence[TemporalHyperedge], n: int, window_len: int
) -> list[TemporalHyperedge]:
    """Keep only entities that rank in the top ``n`` of some time window.

    Windows are consecutive blocks of ``window_len`` time units starting at
    the earliest timestamp. Frequency counts one per record occurrence;
    ties are broken by label. Records left with fewer than two members are
    dropped.
    """
    if n < 1 or window_len < 1:
        raise ValueError("n and window_len must be at least 1")
    if not records:
        return []
    t0 = min(r.t for r in records)
    counts: dict[int, Counter] = {}
    for r in records:
        counts.setdefault((r.t - t0) // window_len, Counter()).update(r.nodes)
    keep: set[str] = set()
    for c in counts.values():
        ranked = sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))
        keep.update(label for label, _ in ranked[:n])
    out = []
    for r in records:
        nodes = tuple(x for x in r.nodes if x in keep)
        if len(nodes) >= 2:
            out.append(TemporalHyperedge(r.t, nodes, r.w))
    return out


def filter_active_times(
    records: Sequence[TemporalHyperedge], min_records: int
) -> list[TemporalHyperedge]:
    """Drop time units with at most ``min_records`` records."""
    per_t = Counter(r.t for r in records)
    return [r for r in records if per_t[r.t] > min_records]


@dataclass
class SnapshotSequence:
    """Hypergraphs over a shared node universe, one per time unit."""

    times: list[int]
    snapshots: list[Hypergraph]
    universe: list[str]
    empty: list[bool] = field(default_factory=list)

    def __len__(self):
        return len(self.snapshots)

    def index_of(self, label: str) -> int:
        return self.universe.index(label)


def window_snapshots(
    records: Sequence[TemporalHyperedge], start: int, end: int
) -> SnapshotSequence:
    """One hypergraph per time unit in ``[start, end]``.

    The node universe holds every entity of the records inside the range,
    in order of first appearance, so indices are stable across snapshots.
    Weights above 1 are rescaled by the global maximum.
    """
    if start > end:
        raise ValueError("start must not exceed end")
    inside = [r for r in records if start <= r.t <= end]
    index: dict[str, int] = {}
    for r in sorted(inside, key=lambda r: r.t):
        for x in r.nodes:
            index.setdefault(x, len(index))
    universe = list(index)
    wmax = max((r.w for r in inside), default=1.0)
    scale = wmax if wmax > 1 else 1.0
    by_t: dict[int, list[TemporalHyperedge]] = {}
    for r in inside:
        by_t.setdefault(r.t, []).append(r)
    times, snaps, empty = [], [], []
    for t in range(start, end + 1):
        recs = by_t.get(t, [])
        edges = [[index[x] for x in r.nodes] for r in recs]
        weights = [r.w / scale for r in recs]
        snaps.append(Hypergraph(len(universe), edges, weights, universe))
        times.append(t)
        empty.append(not recs)
    return SnapshotSequence(times, snaps, universe, empty)
