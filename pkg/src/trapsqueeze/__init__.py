"""Gaussian motional states of trapped ions in ramped Paul-trap potentials."""

from .analysis import (
    SeriesRow,
    StabilityMap,
    epr_quadratures,
    instability_onset,
    log_negativity,
    series_from,
    squeezing_min_eig,
    stability_classify,
)
from .errors import (
    ConfigError,
    DivergenceDetected,
    InvalidSchedule,
    InvalidState,
    NoSecularWell,
    TrapSqueezeError,
    UnknownPreset,
    UnstableHamiltonian,
    UnsupportedDimension,
)
from .experiments import CATALOG, Preset, preset, preset_names, run_preset
from .gaussian import (
    ground_state_cm,
    partial_transpose,
    purity,
    symplectic_eigenvalues,
    symplectic_form,
    validate_cm,
)
from .propagation import (
    PropagationResult,
    drift_matrix,
    expm,
    expm_step,
    is_stable,
    monodromy,
    propagate,
    rk4_step,
)
from .trap import (
    RampSchedule,
    TrapField,
    TrapParams,
    coeffs_at,
    initial_state,
    quad_form_pair,
    quad_form_single,
    secular_frequency,
)

__version__ = "0.1.0"
