"""Resonance interaction between two identical two-level atoms driven by
the coherence between their single-excitation states."""

from .coherence import (
    CoherenceReport,
    coherence_report,
    concurrence,
    dipole_expectation,
    is_nonpolar,
    l1_coherence,
    quantum_classicality,
    reduced_state,
)
from .core import (
    DEFAULT_TOL,
    DomainError,
    Geometry,
    Tolerances,
    TransitionDipole,
    TwoAtomState,
    ket_state,
    product_state,
    pure_state,
    validate_state,
    werner_state,
)
from .energy import (
    ConsistencyError,
    EnergyResult,
    atomic_correlation,
    dimensionless,
    energy_scale,
    interaction_energy,
    oscillating_amplitude,
    steady_energy,
    time_averaged_energy,
)
from .oracle import (
    OracleConfig,
    OracleNonConvergence,
    OracleResult,
    UnsupportedInputError,
    chi_time_domain,
    chi_wightman,
    oracle_steady_energy,
)
from .tensor import InteractionTensor, chi_kernel, dipole_tensor, far_zone_tensor, near_zone_tensor

__version__ = "0.1.0"
