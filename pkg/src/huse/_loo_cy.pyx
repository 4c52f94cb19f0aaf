# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled leave-one-out neighbor-vote kernel.

Maintains, per held-out point, the k best neighbors ordered by
(squared L2 distance, point index) via insertion into a fixed-size list.
Semantics match huse._loo_numpy.loo_votes exactly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def loo_votes(points, labels, int k):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] y = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] votes = np.empty(n, dtype=np.float64)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_d = np.empty(k, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] best_i = np.empty(k, dtype=np.int64)

    cdef Py_ssize_t i, j, m, pos, slot
    cdef double dist, diff, worst
    cdef Py_ssize_t filled
    cdef double vote_count

    for i in range(n):
        filled = 0
        worst = 0.0
        for j in range(n):
            if j == i:
                continue
            dist = 0.0
            for m in range(d):
                diff = X[i, m] - X[j, m]
                dist = dist + diff * diff
            if filled == k:
                # (dist, j) must beat the current worst (largest) entry;
                # j always exceeds stored indices on exact distance ties
                # because candidates arrive in ascending index order.
                if dist >= best_d[k - 1]:
                    continue
            # insertion position: after all entries with smaller (dist, idx)
            pos = filled
            while pos > 0 and best_d[pos - 1] > dist:
                pos = pos - 1
            if filled < k:
                slot = filled
                filled = filled + 1
            else:
                slot = k - 1
            while slot > pos:
                best_d[slot] = best_d[slot - 1]
                best_i[slot] = best_i[slot - 1]
                slot = slot - 1
            best_d[pos] = dist
            best_i[pos] = j
        vote_count = 0.0
        for m in range(filled):
            vote_count = vote_count + y[best_i[m]]
        votes[i] = vote_count
    return votes
