"""Shared fixtures and independent dense oracles.

The oracles below build matrices with plain Python loops so they stay
independent of the vectorized paths they are used to check.
"""

import numpy as np
import pytest

import permflip._backend as backend_mod


def dense_term_oracle(alpha, zmask, perm_map):
    """Dense matrix of alpha * Z^zmask * P, entry by entry."""
    size = len(perm_map)
    out = np.zeros((size, size), dtype=np.complex128)
    for col in range(size):
        row = int(perm_map[col])
        sign = -1.0 if bin(row & zmask).count("1") % 2 else 1.0
        out[row, col] += alpha * sign
    return out


def dense_permsum_oracle(a):
    out = np.zeros((a.size, a.size), dtype=np.complex128)
    for t in a.terms:
        out += dense_term_oracle(t.alpha, t.zmask, t.perm.map)
    return out


def lu_determinant(m):
    """Determinant by Gaussian elimination with partial pivoting."""
    m = np.array(m, dtype=np.complex128)
    size = m.shape[0]
    det = 1.0 + 0.0j
    for k in range(size):
        pivot = k + int(np.argmax(np.abs(m[k:, k])))
        if pivot != k:
            m[[k, pivot]] = m[[pivot, k]]
            det = -det
        if m[k, k] == 0:
            return 0.0 + 0.0j
        det *= m[k, k]
        m[k + 1:, k:] -= np.outer(m[k + 1:, k] / m[k, k], m[k, k:])
    return complex(det)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=["compiled", "pure-python"])
def matching_backend(request, monkeypatch):
    """Run the decorated test under each kernel backend."""
    if request.param == "compiled":
        if backend_mod._compiled is None:
            pytest.skip("compiled kernel not built")
        monkeypatch.setattr(backend_mod, "_active", backend_mod._compiled)
    else:
        monkeypatch.setattr(backend_mod, "_active", backend_mod.matching_py)
    return request.param
