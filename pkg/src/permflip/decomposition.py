"""Ingestion of positive matrices into permutation-sum form.

A strictly positive matrix is scaled to doubly stochastic form by
alternating row/column normalization, then peeled into a convex
combination of permutations by greedy min-entry extraction with
augmenting-path matchings (provided by the compiled kernel or its
pure-Python twin).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from permflip import _backend
from permflip.exceptions import ConvergenceError, DecompositionError
from permflip.operator_model import PermSum, SignedPermTerm
from permflip.perm_core import Permutation

SINKHORN_TOL = 1e-12
SINKHORN_MAX_ITER = 10_000
BIRKHOFF_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ScalingPair:
    """Diagonals of two positive scaling matrices D1 (left), D2 (right)."""

    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        for name in ("d1", "d2"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a vector")
            if not np.all(arr > 0.0):
                raise ValueError(f"{name} must be strictly positive")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True, eq=False)
class BirkhoffResult:
    """Extracted (weight, permutation) terms and the leftover mass."""

    terms: tuple
    residual: float


def apply_scalings(sp: ScalingPair, m: np.ndarray) -> np.ndarray:
    """diag(d1) @ m @ diag(d2)."""
    m = np.asarray(m)
    return sp.d1[:, None] * m * sp.d2[None, :]


def _as_square_real(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def _sum_deviation(s: np.ndarray) -> float:
    return max(
        float(np.abs(s.sum(axis=1) - 1.0).max()),
        float(np.abs(s.sum(axis=0) - 1.0).max()),
    )


def sinkhorn(m, tol: float = SINKHORN_TOL, max_iter: int = SINKHORN_MAX_ITER):
    """Scale a strictly positive matrix to doubly stochastic form.

    Returns ``(scalings, s)`` with diag(d1) @ m @ diag(d2) = s and every
    row/column sum of ``s`` within ``tol`` of 1. The (c, 1/c) gauge
    freedom is removed by fixing d1[0] = 1.
    """
    m = _as_square_real(m)
    if not np.all(m > 0.0):
        raise ValueError("sinkhorn requires strictly positive entries")
    size = m.shape[0]
    d1 = np.ones(size)
    d2 = np.ones(size)
    s = m.copy()

    deviation = _sum_deviation(s)
    window_dev = deviation
    for it in range(max_iter):
        if deviation < tol:
            break
        row = s.sum(axis=1)
        s /= row[:, None]
        d1 /= row
        col = s.sum(axis=0)
        s /= col[None, :]
        d2 /= col
        deviation = _sum_deviation(s)
        if (it + 1) % 10 == 0:
            if deviation > window_dev * (1.0 + 1e-9) + 1e-15:
                raise ConvergenceError(
                    f"deviation rose from {window_dev:.3e} to {deviation:.3e}",
                    partial=(ScalingPair(d1, d2), s),
                )
            window_dev = deviation
    else:
        raise ConvergenceError(
            f"no convergence to {tol:.1e} within {max_iter} iterations "
            f"(deviation {deviation:.3e})",
            partial=(ScalingPair(d1, d2), s),
        )
    gauge = d1[0]
    return ScalingPair(d1 / gauge, d2 * gauge), s


def _qubits_for_dim(size: int) -> int:
    n = max(size.bit_length() - 1, 1)
    if 1 << n != size:
        raise ValueError(f"dimension {size} is not a power of two")
    return n


def birkhoff(s, tol: float = BIRKHOFF_TOL) -> BirkhoffResult:
    """Decompose a doubly stochastic matrix into weighted permutations.

    Greedy loop: perfect matching on the support (entries > tol), peel
    off the minimum matched entry, repeat until everything left is
    below ``tol``. Term count is bounded by N^2 - 2N + 2.
    """
    s = _as_square_real(s)
    size = s.shape[0]
    n = _qubits_for_dim(size)
    if float(s.min()) < -1e-12:
        raise ValueError(f"negative entry {s.min():.3e} in doubly stochastic input")
    if _sum_deviation(s) > 1e-6:
        raise ValueError("row/column sums deviate from 1 by more than 1e-6")

    max_terms = max(size * size - 2 * size + 2, 1)
    kernel = _backend.implementation()
    weights, maps, ok, residual = kernel.greedy_birkhoff(s, tol, max_terms)
    terms = tuple(
        (float(w), Permutation(n, mp)) for w, mp in zip(weights, maps)
    )
    result = BirkhoffResult(terms=terms, residual=residual)
    if not ok:
        raise DecompositionError(
            f"no perfect matching on the remaining support "
            f"(residual {residual:.3e}, {len(terms)} terms found)",
            partial=result,
        )
    return result


def ingest(m, tol: float = BIRKHOFF_TOL):
    """Positive matrix -> scalings + permutation sum.

    Returns ``(scalings, permsum)`` such that
    diag(d1) @ materialize(permsum) @ diag(d2) reproduces ``m``; the
    permutation sum has positive weights and no phase masks.
    """
    m = _as_square_real(m)
    n = _qubits_for_dim(m.shape[0])
    sink_tol = min(tol, SINKHORN_TOL)
    if _sum_deviation(m) <= sink_tol:
        # already doubly stochastic (e.g. a permutation matrix, which the
        # strict-positivity requirement of sinkhorn would reject)
        scalings = ScalingPair(np.ones(m.shape[0]), np.ones(m.shape[0]))
        s = m
    else:
        sink_scalings, s = sinkhorn(m, tol=sink_tol)
        # sinkhorn gives diag(r) m diag(c) = s; invert to write m around the sum
        scalings = ScalingPair(1.0 / sink_scalings.d1, 1.0 / sink_scalings.d2)
    result = birkhoff(s, tol=tol)
    terms = tuple(
        SignedPermTerm(complex(w), 0, perm) for w, perm in result.terms
    )
    return scalings, PermSum(n, terms)


def read_matrix_csv(path) -> np.ndarray:
    """Read a dense matrix stored as plain comma-separated rows."""
    try:
        m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: not a numeric CSV matrix ({exc})") from exc
    return m
