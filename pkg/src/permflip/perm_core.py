"""Permutation algebra on n-qubit basis indices.

Basis index j encodes the register bitwise, qubit 0 in the least
significant bit. A permutation is stored as its index map in column
convention: the dense matrix has a 1 at row ``map[j]``, column j, so
applying the operator to a state is a gather-scatter.

Qubit masks are plain non-negative integers (bit k set = qubit k
targeted) and serialize as integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Index arithmetic must stay inside int64.
MAX_QUBITS = 62


def check_qubits(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"qubit count must be an integer, got {n!r}")
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"qubit count {n} exceeds the supported maximum {MAX_QUBITS}")
    return int(n)


def check_mask(bits, n: int) -> int:
    """Validate a qubit bitmask against an n-qubit register."""
    if isinstance(bits, bool) or not isinstance(bits, (int, np.integer)):
        raise ValueError(f"qubit mask must be an integer, got {bits!r}")
    if not 0 <= bits < (1 << n):
        raise ValueError(f"qubit mask {bits} out of range for n={n}")
    return int(bits)


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection on {0, ..., 2^n - 1} stored as an index map."""

    n: int
    map: np.ndarray

    def __post_init__(self):
        n = check_qubits(self.n)
        size = 1 << n
        arr = np.asarray(self.map, dtype=np.int64)
        if arr.shape != (size,):
            raise ValueError(f"map must have length {size}, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= size
                         or np.bincount(arr, minlength=size).max() != 1):
            raise ValueError("map is not a bijection on the basis indices")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "map", arr)

    @property
    def size(self) -> int:
        return 1 << self.n

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.map, other.map)

    def __repr__(self):
        return f"Permutation(n={self.n}, map={self.map.tolist()})"


def identity(n: int) -> Permutation:
    """The identity permutation on n qubits."""
    n = check_qubits(n)
    return Permutation(n, np.arange(1 << n, dtype=np.int64))


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """Uniformly random permutation (unbiased shuffle, deterministic per seed)."""
    n = check_qubits(n)
    return Permutation(n, rng.permutation(1 << n))


def apply_x_mask(p: Permutation, b: int) -> Permutation:
    """Compose a NOT on the masked qubits after ``p``: map[j] -> map[j] XOR b."""
    b = check_mask(b, p.n)
    return Permutation(p.n, p.map ^ b)


def z_sign(index: int, phi: int) -> int:
    """Sign picked up by basis state ``index`` under Z on the masked qubits."""
    if index < 0 or phi < 0:
        raise ValueError("index and mask must be non-negative")
    return -1 if (int(index) & int(phi)).bit_count() & 1 else 1


def z_signs(indices: np.ndarray, phi: int) -> np.ndarray:
    """Vectorized ``z_sign`` over an index array; returns floats in {+1, -1}."""
    parity = np.bitwise_count(indices & np.int64(phi)) & 1
    return 1.0 - 2.0 * parity


def apply_to_state(p: Permutation, phi: int, v: np.ndarray) -> np.ndarray:
    """Apply the signed permutation Z^phi P to a state vector in O(N).

    out[map[j]] = z_sign(map[j], phi) * v[j]
    """
    phi = check_mask(phi, p.n)
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (p.size,):
        raise ValueError(f"state must have length {p.size}, got shape {v.shape}")
    out = np.empty_like(v)
    out[p.map] = z_signs(p.map, phi) * v
    return out
