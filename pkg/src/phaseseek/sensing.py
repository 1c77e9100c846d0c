"""Onboard spectral sensing: windowed single-bin DFT estimates of m, phi,
grad phi, and the scalar steering signal s.

The sensor holds still for one signal period, samples the field uniformly,
and projects onto the first temporal mode. Phase gradients come from
repeating that estimate on a small cross-shaped stencil and differencing
the wrapped phases.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fields import TWO_PI, wrap_angle, wrap_phase


class DegenerateMagnitudeError(RuntimeError):
    """First-mode magnitude fell below the floor; phase is meaningless there."""


class QuasiSteadyWarning(UserWarning):
    """The sensor moves a non-negligible fraction of a wavelength per window."""


@dataclass(frozen=True)
class SensingConfig:
    """Estimator settings.

    Attributes
    ----------
    n_samples : int
        Samples per window, at least 8.
    stencil_h : float
        Half-width of the gradient stencil, 0 < h <= 0.1.
    mode_index : int
        Temporal mode to extract; only the first mode is supported.
    m_floor : float
        Magnitude below which the phase is treated as degenerate.
    """

    n_samples: int = 64
    stencil_h: float = 0.01
    mode_index: int = 1
    m_floor: float = 1e-9

    def __post_init__(self):
        if self.n_samples < 8:
            raise ValueError(f"n_samples must be at least 8, got {self.n_samples}")
        if not 0.0 < self.stencil_h <= 0.1:
            raise ValueError(f"stencil_h must lie in (0, 0.1], got {self.stencil_h}")
        if self.mode_index != 1:
            raise ValueError("only the first temporal mode is supported")
        if not self.m_floor > 0:
            raise ValueError("m_floor must be positive")


@dataclass
class SpectralSample:
    """One onboard spectral estimate.

    m is the first-mode magnitude, phi the phase in [0, 2*pi) referenced to
    absolute time t = 0, grad_phi the stencil phase gradient, s the steering
    signal in [-1, 1], and saturated flags an inverse-gain magnitude clamp.
    """

    m: float
    phi: float
    grad_phi: np.ndarray
    s: float
    saturated: bool = False


def sample_window(field, x, t0, config):
    """Uniform one-period window f(x, t0 + k*T/N), k = 0..N-1.

    The sensor is treated as frozen at x for the whole window.
    """
    return field.eval_window(x, t0, config.n_samples)


def dft_first_mode(series, period):
    """Single-bin DFT of one uniformly sampled period.

    Returns (1/N) * sum_k series[k] * exp(-i * omega1 * t_k) with
    t_k = k * period / N and omega1 = 2*pi / period. For a pure tone
    2 m cos(omega1 t - phi0) this is exactly m * exp(-i phi0).
    """
    series = np.asarray(series, dtype=float)
    n = series.shape[0]
    if n < 8:
        raise ValueError(f"window must hold at least 8 samples, got {n}")
    omega1 = TWO_PI / period
    t = np.arange(n) * (period / n)
    return complex(np.mean(series * np.exp(-1j * omega1 * t)))


def magnitude_phase(coeff):
    """Split a complex first-mode coefficient into (m, phi) with phi in [0, 2*pi)."""
    m = abs(coeff)
    if m == 0.0:
        return 0.0, 0.0
    return m, wrap_phase(math.atan2(coeff.imag, coeff.real))


def _window_coeff(field, x, t0, config):
    return dft_first_mode(sample_window(field, x, t0, config), field.period)


def phase_gradient(field, x, t0, config):
    """Stencil estimate of grad phi at x.

    Four probes at x +/- h e_x and x +/- h e_y are spectrally sampled and
    their wrapped phase differences centred. All probe magnitudes must stay
    above config.m_floor. Probe phases share the window start t0, so the
    absolute time reference cancels in the differences.
    """
    x = np.asarray(x, dtype=float)
    h = config.stencil_h
    probes = (
        x + np.array([h, 0.0]),
        x - np.array([h, 0.0]),
        x + np.array([0.0, h]),
        x - np.array([0.0, h]),
    )
    coeffs = [_window_coeff(field, p, t0, config) for p in probes]
    mags = [abs(c) for c in coeffs]
    if min(mags) < config.m_floor:
        raise DegenerateMagnitudeError(
            f"stencil magnitude {min(mags):.3e} below floor {config.m_floor:.3e}"
        )
    phis = [math.atan2(c.imag, c.real) for c in coeffs]
    gx = wrap_angle(phis[0] - phis[1]) / (2.0 * h)
    gy = wrap_angle(phis[2] - phis[3]) / (2.0 * h)
    return np.array([gx, gy])


def sensory_output(grad_phi, theta):
    """Projection of the unit phase-gradient onto the body lateral axis.

    s = (grad phi / ||grad phi||) . (-sin theta, cos theta), clipped to [-1, 1]
    against roundoff.
    """
    gx = float(grad_phi[0])
    gy = float(grad_phi[1])
    norm = math.hypot(gx, gy)
    if norm == 0.0:
        raise ValueError("zero phase gradient has no direction")
    s = (-gx * math.sin(theta) + gy * math.cos(theta)) / norm
    return min(1.0, max(-1.0, s))


def spectral_sample(field, x, t0, theta, config):
    """Full onboard estimate at pose (x, theta) from a window starting at t0.

    Five spectral windows are taken: the centre point for (m, phi) and four
    stencil probes for grad phi. The centre phase is rotated by
    exp(-i omega1 t0) so estimates are referenced to absolute time t = 0
    regardless of when the window starts.
    """
    x = np.asarray(x, dtype=float)
    centre = _window_coeff(field, x, t0, config)
    m = abs(centre)
    if m < config.m_floor:
        raise DegenerateMagnitudeError(
            f"magnitude {m:.3e} below floor {config.m_floor:.3e}"
        )
    grad = phase_gradient(field, x, t0, config)
    omega1 = TWO_PI / field.period
    phi = wrap_phase(math.atan2(centre.imag, centre.real) - omega1 * t0)
    s = sensory_output(grad, theta)
    return SpectralSample(m=m, phi=phi, grad_phi=grad, s=s, saturated=False)


def analytic_sample(field, x, theta):
    """Idealized sample from the field's exact spectra (no windowing error)."""
    truth = field.analytic_spectra(x)
    s = sensory_output(truth.grad_phi, theta)
    return SpectralSample(
        m=truth.m, phi=truth.phi, grad_phi=truth.grad_phi, s=s, saturated=False
    )


def check_quasi_steady(speed, period, grad_norm, fraction=0.1):
    """Warn when the sensor crosses more than `fraction` of a wavelength per window.

    The windowed estimator assumes the sensor is effectively frozen while it
    samples; V * T small against the local wavelength 2*pi/||grad phi|| is the
    operating regime. Violation degrades the estimate but is not an error.
    """
    if grad_norm <= 0.0:
        return False
    wavelength = TWO_PI / grad_norm
    if speed * period > fraction * wavelength:
        warnings.warn(
            f"sensor travels {speed * period:.3g} per window against a local "
            f"wavelength of {wavelength:.3g}; windowed estimates degrade",
            QuasiSteadyWarning,
            stacklevel=2,
        )
        return True
    return False
