"""Numpy fallback for the leave-one-out neighbor-vote kernel.

Chunked so the pairwise distance matrix never exceeds chunk x n.  Distance
ties at the k-th neighbor radius are resolved by ascending point index,
matching the compiled kernel bit for bit.
"""

from __future__ import annotations

import numpy as np


def loo_votes(points: np.ndarray, labels: np.ndarray, k: int, chunk: int = 256) -> np.ndarray:
    """For each point, count of label-1 examples among its k nearest others.

    Neighbors are ordered by (squared L2 distance, point index); the held-out
    point is never its own neighbor.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    labels_f = np.asarray(labels, dtype=np.float64)
    n = points.shape[0]
    votes = np.empty(n, dtype=np.float64)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        diff = points[start:stop, None, :] - points[None, :, :]
        dist = (diff * diff).sum(axis=-1)
        for i in range(start, stop):
            dist[i - start, i] = np.inf  # self-exclusion
        kth = np.partition(dist, k - 1, axis=1)[:, k - 1]
        closer = dist < kth[:, None]
        at_radius = dist == kth[:, None]
        votes_chunk = closer @ labels_f
        need = (k - closer.sum(axis=1))[:, None]
        # fill remaining slots from the tied radius in ascending index order
        take = at_radius & (np.cumsum(at_radius, axis=1) <= need)
        votes_chunk += take @ labels_f
        votes[start:stop] = votes_chunk
    return votes
