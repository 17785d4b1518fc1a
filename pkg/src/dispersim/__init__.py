"""Frequency-domain fiber dispersion simulator with an iterative
dispersion-compensating structure built from strongly dispersive
same-sign fiber sub-systems."""

__version__ = "0.1.0"

from .compensator import (
    CompensatorSpec,
    SubsystemSpec,
    band_residual,
    compensate,
    compensation_latency,
    compensator_tf,
    default_gain,
    match_pcf,
    subsystem_error_tf,
    subsystem_tf,
)
from .convergence import RegionQuery, region_table, stable, z_max
from .fiber import (
    FiberParams,
    beta2_to_d,
    d_to_beta2,
    dispersion_tf,
    group_delay,
    propagate,
)
from .iterative import (
    CONTRACTION_MARGIN,
    IterationSpec,
    error_tf,
    feedback_run,
    neumann_sum_tf,
    operator_norm,
)
from .signal import (
    Envelope,
    FrequencyGrid,
    GridMismatchError,
    Spectrum,
    TransferFunction,
    WIDTH_METRIC,
    WindowError,
    WraparoundError,
    apply_tf,
    broadening_factor,
    check_wraparound,
    identity_tf,
    intensity_fwhm,
    linear_phase_tf,
    make_gaussian_pulse,
    make_sinc_pulse,
    occupied_bandwidth,
    to_envelope,
    to_spectrum,
)

__all__ = [
    "CONTRACTION_MARGIN",
    "CompensatorSpec",
    "Envelope",
    "FiberParams",
    "FrequencyGrid",
    "GridMismatchError",
    "IterationSpec",
    "RegionQuery",
    "Spectrum",
    "SubsystemSpec",
    "TransferFunction",
    "WIDTH_METRIC",
    "WindowError",
    "WraparoundError",
    "apply_tf",
    "band_residual",
    "beta2_to_d",
    "broadening_factor",
    "check_wraparound",
    "compensate",
    "compensation_latency",
    "compensator_tf",
    "d_to_beta2",
    "default_gain",
    "dispersion_tf",
    "error_tf",
    "feedback_run",
    "group_delay",
    "identity_tf",
    "intensity_fwhm",
    "linear_phase_tf",
    "make_gaussian_pulse",
    "make_sinc_pulse",
    "match_pcf",
    "neumann_sum_tf",
    "occupied_bandwidth",
    "operator_norm",
    "propagate",
    "region_table",
    "stable",
    "subsystem_error_tf",
    "subsystem_tf",
    "to_envelope",
    "to_spectrum",
    "z_max",
]
