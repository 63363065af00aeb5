"""Operators as linear combinations of signed permutation terms.

A term (alpha, zmask, perm) stands for alpha * Z^zmask * P. The three
perturbation channels are deterministic mixtures: each term splits into
weighted subterms, X applied after the permutation and Z applied after
X. Bernoulli sampling of single realizations is a separate operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from permflip.exceptions import ResourceLimitError
from permflip.perm_core import (
    Permutation,
    apply_x_mask,
    check_mask,
    check_qubits,
    z_signs,
)

# Largest dense matrix this package will materialize by default.
DEFAULT_DIM_CAP = 1 << 12


@dataclass(frozen=True)
class SignedPermTerm:
    """One term alpha * Z^zmask * P."""

    alpha: complex
    zmask: int
    perm: Permutation

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "zmask", check_mask(self.zmask, self.perm.n))


@dataclass(frozen=True, eq=False)
class PermSum:
    """A sum of signed permutation terms on a fixed qubit count."""

    n: int
    terms: tuple

    def __post_init__(self):
        n = check_qubits(self.n)
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("a PermSum needs at least one term")
        for t in terms:
            if not isinstance(t, SignedPermTerm):
                raise ValueError(f"terms must be SignedPermTerm, got {type(t).__name__}")
            if t.perm.n != n:
                raise ValueError(f"term qubit count {t.perm.n} != {n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", terms)

    @property
    def k(self) -> int:
        return len(self.terms)

    @property
    def size(self) -> int:
        return 1 << self.n

    def alphas(self) -> np.ndarray:
        return np.array([t.alpha for t in self.terms], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class ErrorSpec:
    """Per-term flip probabilities and target masks.

    p[i]/b[i] drive bit-flips, q[i]/phi[i] drive phase-flips. Mask range
    is checked against the operator when a channel is applied.
    """

    p: np.ndarray
    b: np.ndarray
    q: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.int64)
        phi = np.asarray(self.phi, dtype=np.int64)
        if not (p.shape == q.shape == b.shape == phi.shape) or p.ndim != 1:
            raise ValueError("p, b, q, phi must be 1-D arrays of equal length")
        for name, probs in (("p", p), ("q", q)):
            if np.any(probs < 0) or np.any(probs > 1) or not np.all(np.isfinite(probs)):
                raise ValueError(f"{name} probabilities must lie in [0, 1]")
        if np.any(b < 0) or np.any(phi < 0):
            raise ValueError("masks must be non-negative")
        for name, arr in (("p", p), ("b", b), ("q", q), ("phi", phi)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.p.shape[0]

    @classmethod
    def zeros(cls, k: int) -> "ErrorSpec":
        z = np.zeros(k)
        return cls(p=z, b=np.zeros(k, dtype=np.int64), q=z, phi=np.zeros(k, dtype=np.int64))

    @classmethod
    def bit_only(cls, p, b) -> "ErrorSpec":
        k = len(p)
        return cls(p=p, b=b, q=np.zeros(k), phi=np.zeros(k, dtype=np.int64))

    @classmethod
    def phase_only(cls, q, phi) -> "ErrorSpec":
        k = len(q)
        return cls(p=np.zeros(k), b=np.zeros(k, dtype=np.int64), q=q, phi=phi)


def _check_spec(a: PermSum, e: ErrorSpec) -> None:
    if len(e) != a.k:
        raise ValueError(f"error spec length {len(e)} != term count {a.k}")
    top = 1 << a.n
    if np.any(e.b >= top) or np.any(e.phi >= top):
        raise ValueError(f"masks out of range for n={a.n}")


def materialize(a: PermSum, max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Dense complex matrix of the operator; capped at ``max_dim``."""
    size = a.size
    if size > max_dim:
        raise ResourceLimitError(f"dimension {size} exceeds cap {max_dim}")
    out = np.zeros((size, size), dtype=np.complex128)
    cols = np.arange(size)
    for t in a.terms:
        out[t.perm.map, cols] += t.alpha * z_signs(t.perm.map, t.zmask)
    return out


def perturb_bitflip(a: PermSum, e: ErrorSpec) -> PermSum:
    """Mixture channel: term i becomes (1-p_i) the original plus p_i with
    a NOT on the b_i qubits applied after the permutation. q/phi ignored."""
    _check_spec(a, e)
    terms = []
    for t, p, b in zip(a.terms, e.p, e.b):
        if p == 0.0:
            terms.append(t)
            continue
        flipped = apply_x_mask(t.perm, int(b))
        if p != 1.0:
            terms.append(SignedPermTerm((1.0 - p) * t.alpha, t.zmask, t.perm))
        terms.append(SignedPermTerm(p * t.alpha, t.zmask, flipped))
    return PermSum(a.n, tuple(terms))


def perturb_phaseflip(a: PermSum, e: ErrorSpec) -> PermSum:
    """Mixture channel: term i becomes (1-q_i) the original plus q_i with
    Z on the phi_i qubits composed into the phase mask. p/b ignored."""
    _check_spec(a, e)
    terms = []
    for t, q, phi in zip(a.terms, e.q, e.phi):
        if q == 0.0:
            terms.append(t)
            continue
        if q != 1.0:
            terms.append(SignedPermTerm((1.0 - q) * t.alpha, t.zmask, t.perm))
        terms.append(SignedPermTerm(q * t.alpha, t.zmask ^ int(phi), t.perm))
    return PermSum(a.n, tuple(terms))


def perturb_combined(a: PermSum, e: ErrorSpec) -> PermSum:
    """Both channels at once; X first, then Z on the post-X image.

    Each term expands to the subterms with weights (1-q)(1-p), (1-q)p,
    q(1-p), qp in that order; zero-weight subterms are dropped.
    """
    _check_spec(a, e)
    terms = []
    for t, p, b, q, phi in zip(a.terms, e.p, e.b, e.q, e.phi):
        if p == 0.0 and q == 0.0:
            terms.append(t)
            continue
        flipped = apply_x_mask(t.perm, int(b)) if p != 0.0 else t.perm
        zus = t.zmask ^ int(phi)
        for weight, zmask, perm in (
            ((1.0 - q) * (1.0 - p), t.zmask, t.perm),
            ((1.0 - q) * p, t.zmask, flipped),
            (q * (1.0 - p), zus, t.perm),
            (q * p, zus, flipped),
        ):
            if weight != 0.0:
                terms.append(SignedPermTerm(weight * t.alpha, zmask, perm))
    return PermSum(a.n, tuple(terms))


def sample_realization(a: PermSum, e: ErrorSpec, rng: np.random.Generator) -> PermSum:
    """One Bernoulli draw of the combined channel; always K terms.

    Per term the bit-flip is drawn first, then the phase-flip, so a
    seeded generator reproduces the trajectory.
    """
    _check_spec(a, e)
    terms = []
    for t, p, b, q, phi in zip(a.terms, e.p, e.b, e.q, e.phi):
        perm = apply_x_mask(t.perm, int(b)) if rng.random() < p else t.perm
        zmask = t.zmask ^ int(phi) if rng.random() < q else t.zmask
        terms.append(SignedPermTerm(t.alpha, zmask, perm))
    return PermSum(a.n, tuple(terms))


def swap_coefficients(a: PermSum, control_mask: int) -> PermSum:
    """Move the coefficient of term i to term i XOR control_mask.

    Models a bit-flip on a control register that indexes the terms;
    the permutations themselves stay in place. K must be a power of two.
    """
    k = a.k
    if k & (k - 1):
        raise ValueError(f"term count {k} is not a power of two")
    if not 0 <= control_mask < k:
        raise ValueError(f"control mask {control_mask} out of range for K={k}")
    terms = tuple(
        SignedPermTerm(a.terms[i ^ control_mask].alpha, t.zmask, t.perm)
        for i, t in enumerate(a.terms)
    )
    return PermSum(a.n, terms)


def column_sums(a: PermSum) -> np.ndarray:
    """Column sums of the dense matrix, computed without materializing.

    Column j receives alpha_i * z_sign(map_i[j], zmask_i) from term i;
    with all-zero phase masks every column sums to sum(alpha_i).
    """
    sums = np.zeros(a.size, dtype=np.complex128)
    for t in a.terms:
        sums += t.alpha * z_signs(t.perm.map, t.zmask)
    return sums


# --- JSON wire format ---------------------------------------------------
# PermSum: {"n": int, "terms": [{"alpha": [re, im], "zmask": int, "perm": [ints]}]}
# ErrorSpec: {"p": [...], "b": [...], "q": [...], "phi": [...]}


def permsum_to_dict(a: PermSum) -> dict:
    return {
        "n": a.n,
        "terms": [
            {
                "alpha": [t.alpha.real, t.alpha.imag],
                "zmask": t.zmask,
                "perm": t.perm.map.tolist(),
            }
            for t in a.terms
        ],
    }


def permsum_from_dict(data: dict) -> PermSum:
    try:
        n = data["n"]
        terms = tuple(
            SignedPermTerm(
                complex(t["alpha"][0], t["alpha"][1]),
                int(t["zmask"]),
                Permutation(n, np.asarray(t["perm"], dtype=np.int64)),
            )
            for t in data["terms"]
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed operator JSON: {exc}") from exc
    return PermSum(n, terms)


def errorspec_to_dict(e: ErrorSpec) -> dict:
    return {
        "p": e.p.tolist(),
        "b": e.b.tolist(),
        "q": e.q.tolist(),
        "phi": e.phi.tolist(),
    }


def errorspec_from_dict(data: dict) -> ErrorSpec:
    try:
        return ErrorSpec(p=data["p"], b=data["b"], q=data["q"], phi=data["phi"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed error-spec JSON: {exc}") from exc


def save_permsum(a: PermSum, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(permsum_to_dict(a), fh)
        fh.write("\n")


def load_permsum(path) -> PermSum:
    with open(path, "r", encoding="utf-8") as fh:
        return permsum_from_dict(json.load(fh))


def save_errorspec(e: ErrorSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(errorspec_to_dict(e), fh)
        fh.write("\n")


def load_errorspec(path) -> ErrorSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return errorspec_from_dict(json.load(fh))
