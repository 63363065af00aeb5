"""Perturbation analysis for operators written as sums of permutations."""

from permflip.decomposition import (
    BirkhoffResult,
    ScalingPair,
    apply_scalings,
    birkhoff,
    ingest,
    sinkhorn,
)
from permflip.fidelity import (
    FidelityReport,
    StateVector,
    f_overlap,
    f_re,
    overlap_floor_symmetric,
    random_state,
    relative_error_bounds,
    singular_extremes,
    symmetric_fre_floor,
)
from permflip.harness import (
    SweepConfig,
    TrialRecord,
    draw_error_spec,
    random_permsum,
    read_csv,
    run_fidelity_sweep,
    run_spectral_sweep,
    write_csv,
)
from permflip.operator_model import (
    ErrorSpec,
    PermSum,
    SignedPermTerm,
    column_sums,
    load_errorspec,
    load_permsum,
    materialize,
    perturb_bitflip,
    perturb_combined,
    perturb_phaseflip,
    sample_realization,
    save_errorspec,
    save_permsum,
    swap_coefficients,
)
from permflip.perm_core import (
    Permutation,
    apply_to_state,
    apply_x_mask,
    identity,
    random_permutation,
    z_sign,
    z_signs,
)
from permflip.spectral import (
    GershgorinDisk,
    Spectrum,
    bitflip_radius_bound,
    dominant,
    eigenvalues,
    gershgorin,
    nmse,
    phaseflip_radius_bound,
    radius_deltas,
    relative_error,
)

__version__ = "0.1.0"
