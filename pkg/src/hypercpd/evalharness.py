"""Change point evaluation: tolerance-matched F1 and timing error."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .lad import prediction_count, top_change_points

DEFAULT_GRID = tuple(p / 100 for p in range(3, 16))
TIMING_SENTINEL = float("inf")


def match_predictions(
    pred: Sequence[int], truth: Sequence[int], tol: int = 2
) -> list[tuple[int, int]]:
    """Greedy one-to-one matching of predictions to true change points.

    Candidate pairs within ``tol`` are taken in order of increasing
    distance, ties going to the earlier truth and then the earlier
    prediction. Returns ``(pred, truth)`` pairs.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    cands = sorted(
        (abs(p - g), g, p, i, j)
        for i, p in enumerate(pred)
        for j, g in enumerate(truth)
        if abs(p - g) <= tol
    )
    used_p, used_g, pairs = set(), set(), []
    for _, g, p, i, j in cands:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        pairs.append((p, g))
    return sorted(pairs, key=lambda x: x[1])


def f1_score(pred: Sequence[int], truth: Sequence[int], tol: int = 2) -> float:
    if not truth:
        raise ValueError("ground truth is empty")
    if not pred:
        return 0.0
    hits = len(match_predictions(pred, truth, tol))
    precision = hits / len(pred)
    recall = hits / len(truth)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def f1_at_fraction(
    zhat: Sequence[float],
    truth: Sequence[int],
    fraction: float,
    tol: int = 2,
    count: int | None = None,
) -> float:
    """F1 when the top ``fraction`` of time points (or ``count``) are predicted."""
    if count is None:
        pred = top_change_points(zhat, fraction=fraction)
    else:
        pred = top_change_points(zhat, count=count)
    return f1_score(pred, truth, tol)


def average_f1_range(
    zhat: Sequence[float],
    truth: Sequence[int],
    fractions: Sequence[float] = DEFAULT_GRID,
    tol: int = 2,
) -> float:
    return float(np.mean([f1_at_fraction(zhat, truth, f, tol) for f in fractions]))


def timing_error(pred: Sequence[int], truth: Sequence[int]) -> float:
    """Mean distance from each true change point to its nearest prediction."""
    if not pred or not truth:
        raise ValueError("timing error needs nonempty predictions and truth")
    p = np.asarray(pred)
    return float(np.mean([np.abs(p - g).min() for g in truth]))


@dataclass
class MethodScores:
    f1_at_3pct: float
    f1_at_count: float
    avg_f1: float
    timing_error: float


def score_run(
    zhat: Sequence[float],
    truth: Sequence[int],
    fraction: float = 0.03,
    count: int | None = None,
    fractions: Sequence[float] = DEFAULT_GRID,
    tol: int = 2,
) -> MethodScores:
    """All metrics for one detector run.

    ``count`` defaults to the number of true change points and feeds the
    fixed-count F1 column; timing error uses the fraction-based prediction.
    """
    if count is None:
        count = len(truth)
    pred = top_change_points(zhat, fraction=fraction)
    try:
        te = timing_error(pred, truth)
    except ValueError:
        te = TIMING_SENTINEL
    return MethodScores(
        f1_at_3pct=f1_score(pred, truth, tol),
        f1_at_count=f1_at_fraction(zhat, truth, fraction, tol, count=count),
        avg_f1=average_f1_range(zhat, truth, fractions, tol),
        timing_error=te,
    )


@dataclass
class EvaluationReport:
    """Per-method, per-dataset scores with aggregate means."""

    per_dataset: dict[str, dict[str, MethodScores]] = field(default_factory=dict)

    def add(self, method: str, dataset: str, scores: MethodScores) -> None:
        self.per_dataset.setdefault(method, {})[dataset] = scores

    @property
    def methods(self) -> list[str]:
        return list(self.per_dataset)

    def mean(self, method: str) -> MethodScores:
        rows = list(self.per_dataset[method].values())
        return MethodScores(
            *(float(np.mean([getattr(r, f) for r in rows])) for f in
              ("f1_at_3pct", "f1_at_count", "avg_f1", "timing_error"))
        )

    def write_table(self, path) -> None:
        """Table-shaped CSV of means over datasets, one row per method."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["method", "f1_at_3pct", "f1_at_count", "avg_f1", "timing_error", "datasets"])
            for m in self.methods:
                s = self.mean(m)
                w.writerow([m, f"{s.f1_at_3pct:.6f}", f"{s.f1_at_count:.6f}",
                            f"{s.avg_f1:.6f}", f"{s.timing_error:.6f}", len(self.per_dataset[m])])

    def write_breakdown(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["method", "dataset", "f1_at_3pct", "f1_at_count", "avg_f1", "timing_error"])
            for m in self.methods:
                for d, s in self.per_dataset[m].items():
                    w.writerow([m, d, f"{s.f1_at_3pct:.6f}", f"{s.f1_at_count:.6f}",
                                f"{s.avg_f1:.6f}", f"{s.timing_error:.6f}"])


__all__ = [
    "DEFAULT_GRID",
    "EvaluationReport",
    "MethodScores",
    "average_f1_range",
    "f1_at_fraction",
    "f1_score",
    "match_predictions",
    "prediction_count",
    "score_run",
    "timing_error",
]
