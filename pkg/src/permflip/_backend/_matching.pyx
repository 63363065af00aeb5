# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled greedy extraction of permutation terms from a doubly stochastic matrix.

Mirror of ``matching_py``; both backends must produce identical output.
"""

from libc.stdint cimport int64_t

import numpy as np


cdef bint _augment(double[:, ::1] st, double tol, Py_ssize_t j,
                   signed char[::1] visited, int64_t[::1] col_match,
                   int64_t[::1] row_match) noexcept:
    # Augmenting-path search from column j; scans rows in ascending order.
    cdef Py_ssize_t i, n = st.shape[0]
    for i in range(n):
        if st[j, i] > tol and not visited[i]:
            visited[i] = 1
            if row_match[i] < 0 or _augment(st, tol, row_match[i],
                                            visited, col_match, row_match):
                row_match[i] = j
                col_match[j] = i
                return True
    return False


def greedy_birkhoff(s, double tol, Py_ssize_t max_terms):
    """Peel permutations off ``s`` by repeated min-entry extraction.

    Returns ``(weights, maps, ok, residual)`` where ``maps[t, j]`` is the
    matched row of column j in term t, ``ok`` is False when the support
    lost a perfect matching or ``max_terms`` was hit, and ``residual`` is
    the largest remaining entry.
    """
    st_arr = np.ascontiguousarray(np.asarray(s, dtype=np.float64).T)
    cdef double[:, ::1] st = st_arr
    cdef Py_ssize_t n = st.shape[0]
    cdef Py_ssize_t i, j
    cdef double residual, w
    cdef bint ok = True

    col_match_arr = np.full(n, -1, dtype=np.int64)
    row_match_arr = np.full(n, -1, dtype=np.int64)
    visited_arr = np.zeros(n, dtype=np.int8)
    cdef int64_t[::1] col_match = col_match_arr
    cdef int64_t[::1] row_match = row_match_arr
    cdef signed char[::1] visited = visited_arr

    weights = []
    maps = []

    while True:
        residual = 0.0
        for j in range(n):
            for i in range(n):
                if st[j, i] > residual:
                    residual = st[j, i]
        if residual < tol:
            break
        if len(weights) >= max_terms:
            ok = False
            break

        for j in range(n):
            if col_match[j] < 0:
                for i in range(n):
                    visited[i] = 0
                if not _augment(st, tol, j, visited, col_match, row_match):
                    ok = False
                    break
        if not ok:
            break

        w = st[0, col_match[0]]
        for j in range(1, n):
            if st[j, col_match[j]] < w:
                w = st[j, col_match[j]]
        weights.append(w)
        maps.append(col_match_arr.copy())

        for j in range(n):
            i = col_match[j]
            st[j, i] -= w
            if st[j, i] <= tol:
                row_match[i] = -1
                col_match[j] = -1

    if weights:
        maps_out = np.stack(maps)
        weights_out = np.asarray(weights, dtype=np.float64)
    else:
        maps_out = np.empty((0, n), dtype=np.int64)
        weights_out = np.empty(0, dtype=np.float64)
    return weights_out, maps_out, bool(ok), float(residual)
