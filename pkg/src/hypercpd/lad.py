"""Laplacian anomaly detection over a sequence of spectra.

Each snapshot is embedded as its normalised top-K eigenvalue vector. The
typical behaviour at time t is the dominant left singular vector of the
previous ``window`` embeddings; the anomaly score is one minus its dot
product with the current embedding, and change scores are built from
consecutive anomaly differences.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

CHANGE_MAX = "max"
CHANGE_MIN = "min"
CHANGE_RAW = "raw"
CHANGE_CONVENTIONS = (CHANGE_MAX, CHANGE_MIN, CHANGE_RAW)


class LADError(ValueError):
    pass


def embed_snapshot(spectrum: Sequence[float], k: int) -> tuple[np.ndarray, bool]:
    """Truncate or zero-pad a descending spectrum to ``k`` and L2-normalise.

    Returns ``(vector, degenerate)``; an all-zero spectrum gives the zero
    vector with ``degenerate=True``.
    """
    s = np.asarray(spectrum, dtype=float)
    if s.size > 1 and np.any(np.diff(s) > 0):
        raise LADError("spectrum must be sorted in descending order")
    v = np.zeros(k)
    m = min(k, s.size)
    v[:m] = s[:m]
    norm = np.linalg.norm(v)
    if norm == 0:
        return v, True
    return v / norm, False


def predict_typical(context: np.ndarray) -> tuple[np.ndarray, bool]:
    """Dominant left singular vector of a ``(K, l)`` context matrix.

    The sign is chosen so the mean dot product with the columns is
    nonnegative. An all-zero context yields ``(0, True)``.
    """
    c = np.asarray(context, dtype=float)
    if c.ndim != 2 or c.shape[1] < 1:
        raise LADError("context must be a 2-D array with at least one column")
    if not np.any(c):
        return np.zeros(c.shape[0]), True
    # left singular vectors of C are eigenvectors of C C^T; use the Gram
    # matrix so the result does not depend on column order
    u, _, _ = np.linalg.svd(c @ c.T, hermitian=True)
    v = u[:, 0]
    if (v @ c).mean() < 0:
        v = -v
    return v / np.linalg.norm(v), False


def anomaly_scores(embeddings: np.ndarray, window: int) -> np.ndarray:
    """Z_t = 1 - v_t . vhat_t; the first ``window`` entries are 0."""
    emb = np.asarray(embeddings, dtype=float)
    t_len = emb.shape[0]
    if window < 1:
        raise LADError("window must be at least 1")
    if t_len < window + 1:
        raise LADError(f"series of length {t_len} too short for window {window}")
    z = np.zeros(t_len)
    for t in range(window, t_len):
        vhat, _ = predict_typical(emb[t - window:t].T)
        z[t] = 1.0 - float(emb[t] @ vhat)
    return z


def change_scores(z: np.ndarray, window: int, convention: str = CHANGE_MAX) -> np.ndarray:
    if convention not in CHANGE_CONVENTIONS:
        raise LADError(f"unknown change-score convention {convention!r}")
    z = np.asarray(z, dtype=float)
    zhat = np.zeros_like(z)
    diff = z[window + 1:] - z[window:-1]
    if convention == CHANGE_MAX:
        diff = np.maximum(diff, 0.0)
    elif convention == CHANGE_MIN:
        diff = np.minimum(diff, 0.0)
    zhat[window + 1:] = diff
    return zhat


def anomaly_and_change_scores(
    embeddings: np.ndarray, window: int = 20, convention: str = CHANGE_MAX
) -> tuple[np.ndarray, np.ndarray]:
    z = anomaly_scores(embeddings, window)
    return z, change_scores(z, window, convention)


def prediction_count(fraction: float, length: int) -> int:
    if not 0 < fraction <= 1:
        raise LADError("fraction must lie in (0, 1]")
    # round before ceil so 0.03 * 100 does not become 4
    return math.ceil(round(fraction * length, 9))


def top_change_points(
    zhat: Sequence[float], fraction: float | None = None, count: int | None = None
) -> list[int]:
    """Indices of the largest |zhat| values, sorted by time.

    Exactly one of ``fraction`` (converted with a ceiling) or ``count``
    must be given. Ties go to the earlier time.
    """
    z = np.abs(np.asarray(zhat, dtype=float))
    if (fraction is None) == (count is None):
        raise LADError("pass exactly one of fraction or count")
    if count is None:
        count = prediction_count(fraction, z.size)
    count = max(0, min(count, z.size))
    order = np.lexsort((np.arange(z.size), -z))
    return sorted(order[:count].tolist())


class LADDetector:
    """Stateless configuration holder for running LAD on spectra."""

    def __init__(self, k: int = 100, window: int = 20, convention: str = CHANGE_MAX):
        if k < 1 or window < 1:
            raise LADError("k and window must be at least 1")
        if convention not in CHANGE_CONVENTIONS:
            raise LADError(f"unknown change-score convention {convention!r}")
        self.k = k
        self.window = window
        self.convention = convention

    def embed(self, spectra: Sequence[Sequence[float]]) -> tuple[np.ndarray, np.ndarray]:
        pairs = [embed_snapshot(s, self.k) for s in spectra]
        emb = np.array([p[0] for p in pairs]).reshape(len(pairs), self.k)
        degenerate = np.array([p[1] for p in pairs], dtype=bool)
        return emb, degenerate

    def score(self, spectra: Sequence[Sequence[float]]) -> tuple[np.ndarray, np.ndarray]:
        emb, _ = self.embed(spectra)
        return anomaly_and_change_scores(emb, self.window, self.convention)
