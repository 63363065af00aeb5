"""Pure-Python greedy extraction of permutation terms.

Fallback used when the compiled module is unavailable. Must stay
algorithmically identical to ``_matching.pyx`` (same scan order, same
tie handling) so results do not depend on the backend.
"""

from __future__ import annotations

import sys

import numpy as np


def _augment(st, tol, j, visited, col_match, row_match):
    n = st.shape[0]
    row = st[j]
    for i in range(n):
        if row[i] > tol and not visited[i]:
            visited[i] = True
            if row_match[i] < 0 or _augment(st, tol, row_match[i],
                                            visited, col_match, row_match):
                row_match[i] = j
                col_match[j] = i
                return True
    return False


def greedy_birkhoff(s, tol, max_terms):
    """Peel permutations off ``s`` by repeated min-entry extraction.

    Returns ``(weights, maps, ok, residual)``; see the compiled twin for
    the exact contract.
    """
    st = np.ascontiguousarray(np.asarray(s, dtype=np.float64).T)
    n = st.shape[0]
    col_match = np.full(n, -1, dtype=np.int64)
    row_match = np.full(n, -1, dtype=np.int64)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * n + 100))
    try:
        weights = []
        maps = []
        ok = True
        while True:
            residual = float(st.max()) if n else 0.0
            if residual < tol:
                break
            if len(weights) >= max_terms:
                ok = False
                break

            for j in range(n):
                if col_match[j] < 0:
                    visited = np.zeros(n, dtype=bool)
                    if not _augment(st, tol, j, visited, col_match, row_match):
                        ok = False
                        break
            if not ok:
                break

            matched = st[np.arange(n), col_match]
            w = float(matched.min())
            weights.append(w)
            maps.append(col_match.copy())

            st[np.arange(n), col_match] = matched - w
            broken = np.nonzero(matched - w <= tol)[0]
            for j in broken:
                row_match[col_match[j]] = -1
                col_match[j] = -1
    finally:
        sys.setrecursionlimit(old_limit)

    if weights:
        maps_out = np.stack(maps)
        weights_out = np.asarray(weights, dtype=np.float64)
    else:
        maps_out = np.empty((0, n), dtype=np.int64)
        weights_out = np.empty(0, dtype=np.float64)
    return weights_out, maps_out, bool(ok), float(residual)
