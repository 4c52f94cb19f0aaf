"""Leave-one-out k-nearest-neighbor error estimation.

The hot kernel (neighbor votes for every held-out point) runs in a compiled
Cython extension when available; otherwise a chunked numpy implementation
is used.  Set HUSE_FORCE_PYTHON=1 to force the fallback.  Both paths follow
the same contract: L2 distance, self-exclusion, distance ties at the k-th
radius broken by ascending point index.

brute_force_loo is an independent pure-Python re-implementation kept solely
as a testing oracle; it must never share code with the fast paths.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _loo_numpy

try:  # compiled kernel is optional
    from . import _loo_cy  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build environment
    _loo_cy = None

TIE_POLICIES = ("half_error", "predict_model")


def _use_compiled() -> bool:
    return _loo_cy is not None and os.environ.get("HUSE_FORCE_PYTHON", "") != "1"


def kernel_name() -> str:
    """Which vote kernel is active ("compiled" or "numpy")."""
    return "compiled" if _use_compiled() else "numpy"


@dataclass(frozen=True)
class KnnConfig:
    k: int = 16
    tie_policy: str = "half_error"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.tie_policy not in TIE_POLICIES:
            raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")


def _validate(points: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array (n, d)")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (points.shape[0],):
        raise ValueError("labels must align with points")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0 or 1")
    if k >= points.shape[0]:
        raise ValueError(f"k={k} must be smaller than the number of points ({points.shape[0]})")
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")
    return points, labels


def loo_votes(points: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Per point, number of label-1 examples among its k nearest other points."""
    points, labels = _validate(points, labels, k)
    if _use_compiled():
        return _loo_cy.loo_votes(points, labels, k)
    return _loo_numpy.loo_votes(points, labels, k)


def _error_from_votes(votes: np.ndarray, labels: np.ndarray, config: KnnConfig) -> float:
    k = config.k
    ties = votes * 2 == k
    pred_one = votes * 2 > k
    is_ref = labels == 1
    if config.tie_policy == "half_error":
        wrong = (~ties) & (pred_one != is_ref)
        total = wrong.sum() + 0.5 * ties.sum()
    else:  # predict_model: a tied vote predicts label 0
        wrong = (pred_one != is_ref) & ~(ties & ~is_ref)
        total = float(wrong.sum())
    return float(total) / len(labels)


def loo_error(points: np.ndarray, labels: np.ndarray, config: KnnConfig = KnnConfig()) -> float:
    """Fraction of points misclassified by the majority of their k nearest others.

    Under the half_error tie policy an exact vote tie contributes 0.5.
    Deterministic given inputs.
    """
    votes = loo_votes(points, labels, config.k)
    return _error_from_votes(votes, np.asarray(labels, dtype=np.int64), config)


def knn_confidence(
    points: np.ndarray,
    labels: np.ndarray,
    query: np.ndarray,
    exclude: Optional[int] = None,
    config: KnnConfig = KnnConfig(),
) -> float:
    """Fraction of the k nearest (non-excluded) points labeled 1 at ``query``."""
    # the query is not one of the candidate points, so k may equal n when
    # nothing is excluded (a global vote)
    points, labels = _validate(points, labels, 1)
    available = points.shape[0] - (0 if exclude is None else 1)
    if config.k > available:
        raise ValueError(f"k={config.k} exceeds available neighbors ({available})")
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    if query.shape[0] != points.shape[1]:
        raise ValueError("query dimension mismatch")
    diff = points - query
    dist = (diff * diff).sum(axis=1)
    if exclude is not None:
        dist[exclude] = np.inf
    order = np.lexsort((np.arange(len(dist)), dist))
    return float(labels[order[: config.k]].sum()) / config.k


def batch_confidence(
    points: np.ndarray, labels: np.ndarray, queries: np.ndarray, config: KnnConfig = KnnConfig()
) -> np.ndarray:
    """Vectorized knn_confidence over query rows (no exclusion)."""
    points, labels = _validate(points, labels, config.k)
    queries = np.asarray(queries, dtype=np.float64)
    out = np.empty(queries.shape[0], dtype=np.float64)
    for i, q in enumerate(queries):
        out[i] = knn_confidence(points, labels, q, config=config)
    return out


def brute_force_loo(
    points: Sequence[Sequence[float]], labels: Sequence[int], config: KnnConfig = KnnConfig()
) -> float:
    """Exhaustive pure-Python oracle with the same contract as loo_error."""
    pts = [[float(v) for v in row] for row in np.asarray(points, dtype=np.float64)]
    labs = [int(v) for v in labels]
    n = len(pts)
    if config.k >= n:
        raise ValueError(f"k={config.k} must be smaller than the number of points ({n})")
    for row in pts:
        if len(row) != len(pts[0]):
            raise ValueError("dimension mismatch")
    total = 0.0
    for i in range(n):
        dists = []
        for j in range(n):
            if j == i:
                continue
            d = 0.0
            for a, b in zip(pts[i], pts[j]):
                d += (a - b) * (a - b)
            dists.append((d, j))
        dists.sort()
        ones = sum(labs[j] for _, j in dists[: config.k])
        if 2 * ones == config.k:
            if config.tie_policy == "half_error":
                total += 0.5
            else:
                total += 1.0 if labs[i] == 1 else 0.0
        else:
            predicted = 1 if 2 * ones > config.k else 0
            if predicted != labs[i]:
                total += 1.0
    return total / n
