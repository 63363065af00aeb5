"""Eigenvalues, spectral error metrics, and Gershgorin-disk analysis.

The eigensolver wraps LAPACK's general (non-Hermitian) routine and
certifies every returned eigenvalue with a residual check against
1e-8 * ||M||_F; outputs failing the check raise, carrying the partial
spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from permflip.exceptions import NumericalFailureError, ResourceLimitError
from permflip.operator_model import DEFAULT_DIM_CAP, ErrorSpec

RESIDUAL_TOL_FACTOR = 1e-8


@dataclass(frozen=True, eq=False)
class Spectrum:
    """All eigenvalues of one matrix plus the worst certified residual."""

    eigenvalues: np.ndarray
    residual_bound: float

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.complex128).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    def __len__(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class GershgorinDisk:
    center: complex
    radius: float


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def eigenvalues(m, max_dim: int = DEFAULT_DIM_CAP) -> Spectrum:
    """Residual-verified spectrum of a general complex matrix."""
    m = _as_square(m)
    n = m.shape[0]
    if n > max_dim:
        raise ResourceLimitError(f"dimension {n} exceeds cap {max_dim}")
    try:
        vals, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver did not converge: {exc}") from exc
    col_norms = np.linalg.norm(vecs, axis=0)
    col_norms[col_norms == 0] = 1.0
    residuals = np.linalg.norm(m @ vecs - vecs * vals, axis=0) / col_norms
    bound = float(residuals.max()) if n else 0.0
    spectrum = Spectrum(vals, bound)
    tol = RESIDUAL_TOL_FACTOR * np.linalg.norm(m)
    if bound > tol:
        raise NumericalFailureError(
            f"eigenpair residual {bound:.3e} exceeds {tol:.3e}", partial=spectrum
        )
    return spectrum


def hermitian_eigenvalues(m, max_dim: int = DEFAULT_DIM_CAP) -> Spectrum:
    """Residual-verified spectrum of a Hermitian matrix (ascending)."""
    m = _as_square(m)
    n = m.shape[0]
    if n > max_dim:
        raise ResourceLimitError(f"dimension {n} exceeds cap {max_dim}")
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver did not converge: {exc}") from exc
    residuals = np.linalg.norm(m @ vecs - vecs * vals, axis=0)
    bound = float(residuals.max()) if n else 0.0
    spectrum = Spectrum(vals.astype(np.complex128), bound)
    tol = RESIDUAL_TOL_FACTOR * np.linalg.norm(m)
    if bound > tol:
        raise NumericalFailureError(
            f"eigenpair residual {bound:.3e} exceeds {tol:.3e}", partial=spectrum
        )
    return spectrum


def dominant(s: Spectrum) -> complex:
    """Largest-modulus eigenvalue; ties broken by real then imaginary part."""
    if len(s) == 0:
        raise ValueError("empty spectrum")
    return complex(max(s.eigenvalues, key=lambda z: (abs(z), z.real, z.imag)))


def relative_error(lam_a: complex, lam_b: complex) -> float:
    """|lam_a - lam_b| / |lam_a|."""
    denom = abs(lam_a)
    if denom == 0.0:
        raise ZeroDivisionError("reference eigenvalue is zero")
    return abs(lam_a - lam_b) / denom


def nmse(eigs_a: Spectrum, eigs_b: Spectrum, squared_denominator: bool = False) -> float:
    """Mean squared eigenvalue error after optimal pairing, normalized.

    Eigenvalues are paired by a minimum-total-cost assignment on
    |lam_i - mu_j|, so the value does not depend on output order. The
    normalization divides by |dominant| to first power by default;
    ``squared_denominator`` switches to the second power for
    sensitivity studies.
    """
    a = eigs_a.eigenvalues
    b = eigs_b.eigenvalues
    if a.shape != b.shape:
        raise ValueError(f"spectra differ in length: {a.shape} vs {b.shape}")
    lam_max = abs(dominant(eigs_a))
    if lam_max == 0.0:
        raise ZeroDivisionError("dominant eigenvalue of the reference is zero")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    mse = float(np.mean(np.abs(a[rows] - b[cols]) ** 2))
    return mse / (lam_max * lam_max if squared_denominator else lam_max)


def gershgorin_radii(m) -> np.ndarray:
    """Per-row off-diagonal absolute sums."""
    m = _as_square(m)
    return np.abs(m).sum(axis=1) - np.abs(np.diagonal(m))


def gershgorin(m) -> list:
    """Row disks (center a_ii, radius = off-diagonal absolute row sum)."""
    m = _as_square(m)
    radii = gershgorin_radii(m)
    return [
        GershgorinDisk(complex(c), float(r))
        for c, r in zip(np.diagonal(m), radii)
    ]


def bitflip_radius_bound(e: ErrorSpec, alphas) -> float:
    """Worst-case change of any Gershgorin radius under the bit-flip
    mixture: sum of 2 p_i |alpha_i| (each term moves one entry per row)."""
    alphas = np.asarray(alphas, dtype=np.complex128)
    if alphas.shape != e.p.shape:
        raise ValueError("alphas and error spec differ in length")
    return float(np.sum(2.0 * e.p * np.abs(alphas)))


def phaseflip_radius_bound(e: ErrorSpec, alphas) -> float:
    """Same bound as bit-flips with the phase probabilities q_i."""
    alphas = np.asarray(alphas, dtype=np.complex128)
    if alphas.shape != e.q.shape:
        raise ValueError("alphas and error spec differ in length")
    return float(np.sum(2.0 * e.q * np.abs(alphas)))


def radius_deltas(a, b) -> np.ndarray:
    """Per-row |R_j(B) - R_j(A)| of the off-diagonal Gershgorin radii."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return np.abs(gershgorin_radii(b) - gershgorin_radii(a))
