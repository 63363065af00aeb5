"""Seeded Monte-Carlo sweeps over error probability grids.

Every (grid point, trial) pair owns a private generator derived from
the sweep seed, so records are reproducible bit-for-bit regardless of
how many workers execute them. Results serialize to CSV with 17
significant digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
from threadpoolctl import threadpool_limits

from permflip.exceptions import NumericalFailureError
from permflip.fidelity import f_overlap, f_re, parse_state_mode, random_state
from permflip.operator_model import (
    ErrorSpec,
    PermSum,
    SignedPermTerm,
    materialize,
    perturb_bitflip,
    perturb_combined,
    perturb_phaseflip,
)
from permflip.perm_core import check_qubits, random_permutation
from permflip.spectral import dominant, eigenvalues, nmse, relative_error

CSV_HEADER = "pmax,trial,re,nmse,f_overlap_mean,f_re_mean,seed_used"

ALPHA_RANGES = ("positive", "mixed")
CHANNELS = ("bit", "phase", "both")

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    """splitmix64 finalizer; stable across platforms."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_trial_seed(seed: int, grid_index: int, trial: int) -> int:
    """Per-trial stream seed: sweep seed XOR a mix of the grid/trial indices."""
    return (seed ^ _mix64((grid_index << 32) | trial)) & _MASK64


def _matrix_seed(seed: int, trial: int) -> int:
    # distinct tag bit keeps fixed-matrix streams off the per-trial ones
    return (seed ^ _mix64((1 << 48) | trial)) & _MASK64


def default_pmax_grid() -> tuple:
    return tuple(i * 0.05 for i in range(21))


@dataclass
class SweepConfig:
    """Parameters of one sweep; figure-style defaults."""

    n: int = 8
    terms: int = 16
    alpha_range: str = "positive"
    channel: str = "bit"
    pmax_grid: tuple = field(default_factory=default_pmax_grid)
    gmax: int | None = None
    trials: int = 30
    states_per_trial: int = 30
    state_mode: str = "positive"
    seed: int = 0
    fixed_matrix: bool = False

    def validate(self) -> "SweepConfig":
        check_qubits(self.n)
        if self.terms < 1:
            raise ValueError(f"terms must be >= 1, got {self.terms}")
        if self.alpha_range not in ALPHA_RANGES:
            raise ValueError(f"alpha_range must be one of {ALPHA_RANGES}")
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")
        grid = tuple(float(p) for p in self.pmax_grid)
        if not grid:
            raise ValueError("pmax_grid is empty")
        if any(not 0.0 <= p <= 1.0 for p in grid):
            raise ValueError("pmax grid values must lie in [0, 1]")
        gmax = self.n if self.gmax is None else self.gmax
        if not 1 <= gmax <= self.n:
            raise ValueError(f"gmax must lie in [1, {self.n}], got {gmax}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.states_per_trial < 1:
            raise ValueError(f"states_per_trial must be >= 1, got {self.states_per_trial}")
        parse_state_mode(self.state_mode)
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        return replace(self, pmax_grid=grid, gmax=gmax, seed=self.seed & _MASK64)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        if "pmax_grid" in data:
            cfg.pmax_grid = tuple(data["pmax_grid"])
        return cfg

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrialRecord:
    """One row of sweep output; absent metrics stay None."""

    pmax: float
    trial: int
    re: float | None
    nmse: float | None
    f_overlap_mean: float | None
    f_re_mean: float | None
    seed_used: int

    def __post_init__(self):
        for name in ("re", "nmse", "f_overlap_mean", "f_re_mean"):
            value = getattr(self, name)
            if value is not None and not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.re is not None and self.re < 0:
            raise ValueError(f"re must be >= 0, got {self.re}")


def random_permsum(n: int, k: int, alpha_range: str, rng: np.random.Generator) -> PermSum:
    """Fresh operator: k random permutations with coefficients drawn
    uniformly from [0, 1] (positive) or [-1, 1] (mixed); no phase masks."""
    if alpha_range == "positive":
        alphas = rng.random(k)
    elif alpha_range == "mixed":
        alphas = rng.uniform(-1.0, 1.0, k)
    else:
        raise ValueError(f"alpha_range must be one of {ALPHA_RANGES}")
    terms = tuple(
        SignedPermTerm(complex(alphas[i]), 0, random_permutation(n, rng))
        for i in range(k)
    )
    return PermSum(n, terms)


def draw_mask(n: int, gmax: int, rng: np.random.Generator) -> int:
    """Mask of c distinct qubits, c uniform on {1..gmax}."""
    count = int(rng.integers(1, gmax + 1))
    mask = 0
    for qubit in rng.choice(n, size=count, replace=False):
        mask |= 1 << int(qubit)
    return mask


def draw_error_spec(config: SweepConfig, pmax: float, rng: np.random.Generator) -> ErrorSpec:
    """Per-term probabilities uniform in [0, pmax] for the active
    channel(s) and fresh random qubit masks for every term."""
    k = config.terms
    gmax = config.n if config.gmax is None else config.gmax
    p = rng.uniform(0.0, pmax, k) if config.channel in ("bit", "both") else np.zeros(k)
    b = np.array([draw_mask(config.n, gmax, rng) for _ in range(k)], dtype=np.int64)
    q = rng.uniform(0.0, pmax, k) if config.channel in ("phase", "both") else np.zeros(k)
    phi = np.array([draw_mask(config.n, gmax, rng) for _ in range(k)], dtype=np.int64)
    return ErrorSpec(p=p, b=b, q=q, phi=phi)


def apply_channel(a: PermSum, e: ErrorSpec, channel: str) -> PermSum:
    if channel == "bit":
        return perturb_bitflip(a, e)
    if channel == "phase":
        return perturb_phaseflip(a, e)
    if channel == "both":
        return perturb_combined(a, e)
    raise ValueError(f"channel must be one of {CHANNELS}")


def _trial_inputs(config, grid_index, pmax, trial):
    seed_used = derive_trial_seed(config.seed, grid_index, trial)
    rng = np.random.default_rng(seed_used)
    if config.fixed_matrix:
        matrix_rng = np.random.default_rng(_matrix_seed(config.seed, trial))
        a = random_permsum(config.n, config.terms, config.alpha_range, matrix_rng)
    else:
        a = random_permsum(config.n, config.terms, config.alpha_range, rng)
    e = draw_error_spec(config, pmax, rng)
    b = apply_channel(a, e, config.channel)
    return seed_used, rng, a, b


def _spectral_trial(config, grid_index, pmax, trial) -> TrialRecord:
    seed_used, _, a, b = _trial_inputs(config, grid_index, pmax, trial)
    try:
        spec_a = eigenvalues(materialize(a))
        spec_b = eigenvalues(materialize(b))
        re = relative_error(dominant(spec_a), dominant(spec_b))
        err = nmse(spec_a, spec_b)
    except (NumericalFailureError, ZeroDivisionError):
        re = err = None
    return TrialRecord(pmax, trial, re, err, None, None, seed_used)


def _fidelity_trial(config, grid_index, pmax, trial) -> TrialRecord:
    seed_used, rng, a, b = _trial_inputs(config, grid_index, pmax, trial)
    dense_a = materialize(a)
    dense_b = materialize(b)
    floor = 1e-12 * max(1.0, float(np.linalg.norm(dense_a)))
    overlaps = []
    res = []
    failed = False
    for _ in range(config.states_per_trial):
        psi = None
        for _ in range(20):
            candidate = random_state(config.n, config.state_mode, rng)
            if np.linalg.norm(dense_a @ candidate.amplitudes) > floor:
                psi = candidate
                break
        if psi is None:
            failed = True
            break
        overlaps.append(f_overlap(dense_a, dense_b, psi))
        res.append(f_re(dense_a, dense_b, psi))
    if failed:
        mean_overlap = mean_re = None
    else:
        mean_overlap = float(np.mean(overlaps))
        mean_re = float(np.mean(res))
    return TrialRecord(pmax, trial, None, None, mean_overlap, mean_re, seed_used)


def _run_sweep(config: SweepConfig, trial_fn, workers: int) -> list:
    config = config.validate()
    tasks = [
        (grid_index, pmax, trial)
        for grid_index, pmax in enumerate(config.pmax_grid)
        for trial in range(config.trials)
    ]
    # Kernels are pinned to one thread for every worker count: records must
    # not depend on parallelism, and trial-level workers replace BLAS
    # threads (oversubscribing both ways thrashes badly on small hosts).
    with threadpool_limits(limits=1):
        if workers <= 1:
            return [trial_fn(config, *task) for task in tasks]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda task: trial_fn(config, *task), tasks))


def run_spectral_sweep(config: SweepConfig, workers: int = 1) -> list:
    """Dominant-eigenvalue relative error and eigenvalue NMSE per trial."""
    return _run_sweep(config, _spectral_trial, workers)


def run_fidelity_sweep(config: SweepConfig, workers: int = 1) -> list:
    """Mean overlap/relative-error fidelities over fresh states per trial."""
    return _run_sweep(config, _fidelity_trial, workers)


def _format_cell(value) -> str:
    if value is None:
        return ""
    return f"{value:.17g}"


def write_csv(records, path) -> None:
    """Write records under the fixed header; 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.pmax:.17g},{r.trial},{_format_cell(r.re)},{_format_cell(r.nmse)},"
                f"{_format_cell(r.f_overlap_mean)},{_format_cell(r.f_re_mean)},"
                f"{r.seed_used}\n"
            )


def read_csv(path) -> list:
    """Parse a sweep CSV back into records (exact float round-trip)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or wrong header")
    records = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 7:
            raise ValueError(f"{path}: expected 7 fields, got {len(cells)}")
        records.append(
            TrialRecord(
                pmax=float(cells[0]),
                trial=int(cells[1]),
                re=float(cells[2]) if cells[2] else None,
                nmse=float(cells[3]) if cells[3] else None,
                f_overlap_mean=float(cells[4]) if cells[4] else None,
                f_re_mean=float(cells[5]) if cells[5] else None,
                seed_used=int(cells[6]),
            )
        )
    return records
