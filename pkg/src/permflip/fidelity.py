"""State-fidelity metrics and singular-value bound chains.

Two fidelities are exposed: an overlap form that ignores global phase
and is deliberately not clamped to [0, 1], and a relative-error form
that is phase sensitive. Singular extremes come from the Hermitian
eigenproblem of M^H M rather than a full SVD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from permflip.perm_core import check_qubits
from permflip.spectral import dominant, gershgorin_radii, hermitian_eigenvalues

_SYMMETRY_RTOL = 1e-12
_REAL_SPECTRUM_TOL = 1e-8


def parse_state_mode(mode: str):
    """Split a mode tag into ("positive"|"mixed"|"sparse", sparsity)."""
    if mode == "positive" or mode == "mixed":
        return mode, None
    if mode.startswith("sparse:"):
        try:
            s = float(mode.split(":", 1)[1])
        except ValueError as exc:
            raise ValueError(f"bad sparsity in mode {mode!r}") from exc
        if not 0.0 <= s < 1.0 + 1e-15:
            raise ValueError(f"sparsity must lie in [0, 1), got {s}")
        return "sparse", s
    raise ValueError(f"unknown state mode {mode!r}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex state with the draw mode it came from."""

    amplitudes: np.ndarray
    mode: str

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        if amps.ndim != 1:
            raise ValueError(f"amplitudes must be 1-D, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} is not 1 within 1e-12")
        kind, s = parse_state_mode(self.mode)
        if kind == "sparse":
            allowed = math.ceil((1.0 - s) * amps.shape[0])
            nonzeros = int(np.count_nonzero(amps))
            if nonzeros > allowed:
                raise ValueError(
                    f"sparse({s}) state has {nonzeros} nonzeros, allowed {allowed}"
                )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def random_state(n: int, mode: str, rng: np.random.Generator) -> StateVector:
    """Draw a normalized state: positive U[0,1] amplitudes, mixed U[-1,1],
    or a mixed draw with floor(s*N) random indices zeroed for sparse(s)."""
    n = check_qubits(n)
    size = 1 << n
    kind, s = parse_state_mode(mode)
    if kind == "sparse" and int(s * size) >= size:
        raise ValueError(f"sparsity {s} leaves no support at N={size}")
    for _ in range(100):
        if kind == "positive":
            amps = rng.random(size)
        else:
            amps = rng.uniform(-1.0, 1.0, size)
        if kind == "sparse":
            zeroed = rng.choice(size, size=int(s * size), replace=False)
            amps[zeroed] = 0.0
        norm = np.linalg.norm(amps)
        if norm > 0.0:
            return StateVector(amps / norm, mode)
    raise RuntimeError("random state draw kept producing the zero vector")


def _amps(psi) -> np.ndarray:
    if isinstance(psi, StateVector):
        return psi.amplitudes
    return np.asarray(psi, dtype=np.complex128)


def f_overlap(a_dense, b_dense, psi) -> float:
    """|<A psi | B psi>| / ||A psi||^2; exactly 1 for B = A, insensitive
    to a global phase on B, and legitimately above 1 when ||B psi|| is
    larger than ||A psi||."""
    v = _amps(psi)
    phi = np.asarray(a_dense, dtype=np.complex128) @ v
    phi_t = np.asarray(b_dense, dtype=np.complex128) @ v
    denom = abs(np.vdot(phi, phi))
    if denom == 0.0:
        raise ZeroDivisionError("A psi is the zero vector")
    return float(abs(np.vdot(phi, phi_t)) / denom)


def f_re(a_dense, b_dense, psi) -> float:
    """1 - ||(A - B) psi|| / ||A psi||; phase sensitive (B = -A gives -1)."""
    v = _amps(psi)
    a = np.asarray(a_dense, dtype=np.complex128)
    b = np.asarray(b_dense, dtype=np.complex128)
    ref = np.linalg.norm(a @ v)
    if ref == 0.0:
        raise ZeroDivisionError("A psi is the zero vector")
    return float(1.0 - np.linalg.norm((a - b) @ v) / ref)


def singular_extremes(m) -> tuple:
    """(sigma_min, sigma_max) from the residual-verified eigenvalues of M^H M."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    gram = m.conj().T @ m
    spec = hermitian_eigenvalues(gram)
    vals = spec.eigenvalues.real
    return float(np.sqrt(max(vals[0], 0.0))), float(np.sqrt(max(vals[-1], 0.0)))


@dataclass(frozen=True)
class FidelityReport:
    """Observed fidelities plus the singular-value bound chain."""

    f_overlap: float
    f_re: float
    relative_error: float
    bound_lower: float
    bound_upper: float
    bound_upper_loose: float
    sigma_min_a: float
    sigma_max_a: float
    sigma_max_b: float


def relative_error_bounds(a_dense, b_dense, psi) -> FidelityReport:
    """Bound chain for r = ||(A-B) psi|| / ||A psi||.

    bound_lower = | ||A psi|| - ||B psi|| | / ||A psi||   (reverse triangle)
    bound_upper = sigma_max(A - B) / sigma_min(A)
    bound_upper_loose = (sigma_max(A) + sigma_max(B)) / sigma_min(A)

    Upper bounds degenerate to +inf when sigma_min(A) = 0.
    """
    v = _amps(psi)
    a = np.asarray(a_dense, dtype=np.complex128)
    b = np.asarray(b_dense, dtype=np.complex128)
    a_psi = np.linalg.norm(a @ v)
    if a_psi == 0.0:
        raise ZeroDivisionError("A psi is the zero vector")
    b_psi = np.linalg.norm(b @ v)
    r = float(np.linalg.norm((a - b) @ v) / a_psi)

    sigma_min_a, sigma_max_a = singular_extremes(a)
    sigma_max_b = singular_extremes(b)[1]
    sigma_max_diff = singular_extremes(a - b)[1]
    if sigma_min_a > 0.0:
        bound_upper = sigma_max_diff / sigma_min_a
        bound_loose = (sigma_max_a + sigma_max_b) / sigma_min_a
    else:
        bound_upper = math.inf
        bound_loose = math.inf
    return FidelityReport(
        f_overlap=f_overlap(a, b, v),
        f_re=1.0 - r,
        relative_error=r,
        bound_lower=float(abs(a_psi - b_psi) / a_psi),
        bound_upper=float(bound_upper),
        bound_upper_loose=float(bound_loose),
        sigma_min_a=sigma_min_a,
        sigma_max_a=sigma_max_a,
        sigma_max_b=sigma_max_b,
    )


def _check_real_symmetric(m, name) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if np.iscomplexobj(m) and np.abs(m.imag).max(initial=0.0) != 0.0:
        raise ValueError(f"{name} must be real")
    m = m.real.astype(np.float64) if np.iscomplexobj(m) else m.astype(np.float64)
    scale = np.abs(m).max(initial=0.0)
    if np.abs(m - m.T).max(initial=0.0) > _SYMMETRY_RTOL * max(scale, 1.0):
        raise ValueError(f"{name} is not symmetric")
    return m


def symmetric_fre_floor(a_dense, b_dense) -> float:
    """Floor on f_re for symmetric A, B with equal diagonals.

    When psi aligns with A's dominant eigenvector, ||(A-B) psi|| is at
    most the spectral norm of A - B, which Gershgorin bounds by the
    largest off-diagonal absolute row sum of A - B (the diagonal of the
    difference is zero by hypothesis). Hence
    f_re >= 1 - max_j R_j(A - B) / |lambda_max(A)|.
    """
    a = _check_real_symmetric(a_dense, "A")
    b = _check_real_symmetric(b_dense, "B")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1.0)
    diag_gap = np.abs(np.diagonal(a) - np.diagonal(b)).max(initial=0.0)
    if diag_gap > _SYMMETRY_RTOL * scale:
        raise ValueError("A and B must have equal diagonals")
    lam_max = abs(dominant(hermitian_eigenvalues(a)))
    if lam_max == 0.0:
        raise ZeroDivisionError("dominant eigenvalue of A is zero")
    return float(1.0 - gershgorin_radii(a - b).max() / lam_max)


def overlap_floor_symmetric(a_dense, b_dense):
    """|lambda_max(A^T B)| / sigma_max(A)^2 for real symmetric A, B.

    Valid only when A^T B has a real spectrum; returns None when a
    complex eigenvalue is detected, since the Rayleigh-quotient step
    does not apply.
    """
    a = _check_real_symmetric(a_dense, "A")
    b = _check_real_symmetric(b_dense, "B")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    vals = np.linalg.eigvals(a.T @ b)
    if np.abs(vals.imag).max(initial=0.0) >= _REAL_SPECTRUM_TOL:
        return None
    sigma_max_a = singular_extremes(a)[1]
    if sigma_max_a == 0.0:
        raise ZeroDivisionError("A is the zero matrix")
    return float(np.abs(vals).max() / sigma_max_a**2)
