"""Source seeking from time-periodic signal fields.

A mobile sensor moving at constant speed steers against the local phase
gradient of a periodic signal to find its source. The package supplies the
signal fields, the windowed spectral estimator, the closed-loop agent, the
reduced-dynamics analysis (conserved quantity, fixed points, bounds,
convergence classes), and tooling for gridded signal bundles.
"""

from .fields import (
    TWO_PI,
    Field,
    OriginSingularityError,
    RadialField,
    RadialFieldParams,
    SpectralTruth,
    TravelingWaveField,
    TravelingWaveMode,
    alignment_error,
    radial_field_eval,
    radial_spectral_truth,
    synth_traveling_field,
    wrap_angle,
    wrap_phase,
)
from .sensing import (
    DegenerateMagnitudeError,
    QuasiSteadyWarning,
    SensingConfig,
    SpectralSample,
    analytic_sample,
    check_quasi_steady,
    dft_first_mode,
    magnitude_phase,
    phase_gradient,
    sample_window,
    sensory_output,
    spectral_sample,
)
from .agent import (
    AgentState,
    GainKind,
    GainLaw,
    PolarState,
    PolarTrajectory,
    Trajectory,
    from_polar,
    gain_value,
    heading_rate,
    radial_m_field,
    simulate,
    simulate_polar,
    step,
    to_polar,
)
from .analysis import (
    FixedPoint,
    LambertBranch,
    LambertDomainError,
    NoSaddleError,
    NoTransitionError,
    PortraitGrid,
    PortraitReport,
    QOutOfRangeError,
    RadialBounds,
    bifurcation_scan,
    classify_convergence,
    closed_form_eigenvalues,
    conserved_quantity,
    critical_q,
    fixed_points,
    jacobian_eigenvalues,
    lambert_w,
    lambert_w0,
    lambert_wm1,
    portrait,
    radial_bounds,
    radial_envelope,
    radial_velocity,
    radial_vector_field,
)
from .wake import (
    BundleField,
    BundleFormatError,
    GridFieldBundle,
    GridPeriodError,
    SpectralGrids,
    field_from_bundle,
    load_bundle,
    save_bundle,
    spectral_grids,
    synth_wake,
)

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "alignment_error",
    "analytic_sample",
    "bifurcation_scan",
    "BundleField",
    "BundleFormatError",
    "check_quasi_steady",
    "classify_convergence",
    "closed_form_eigenvalues",
    "conserved_quantity",
    "critical_q",
    "DegenerateMagnitudeError",
    "dft_first_mode",
    "Field",
    "field_from_bundle",
    "fixed_points",
    "FixedPoint",
    "from_polar",
    "gain_value",
    "GainKind",
    "GainLaw",
    "GridFieldBundle",
    "GridPeriodError",
    "heading_rate",
    "jacobian_eigenvalues",
    "lambert_w",
    "lambert_w0",
    "lambert_wm1",
    "LambertBranch",
    "LambertDomainError",
    "load_bundle",
    "magnitude_phase",
    "NoSaddleError",
    "NoTransitionError",
    "OriginSingularityError",
    "phase_gradient",
    "PolarState",
    "PolarTrajectory",
    "portrait",
    "PortraitGrid",
    "PortraitReport",
    "QOutOfRangeError",
    "QuasiSteadyWarning",
    "radial_bounds",
    "radial_envelope",
    "radial_field_eval",
    "radial_m_field",
    "radial_spectral_truth",
    "radial_vector_field",
    "radial_velocity",
    "RadialBounds",
    "RadialField",
    "RadialFieldParams",
    "sample_window",
    "save_bundle",
    "SensingConfig",
    "sensory_output",
    "simulate",
    "simulate_polar",
    "spectral_grids",
    "spectral_sample",
    "SpectralGrids",
    "SpectralSample",
    "SpectralTruth",
    "step",
    "synth_traveling_field",
    "synth_wake",
    "to_polar",
    "Trajectory",
    "TravelingWaveField",
    "TravelingWaveMode",
    "TWO_PI",
    "wrap_angle",
    "wrap_phase",
]
