"""Time-periodic signal fields and their spectral ground truth.

A field is any scalar signal f(x, t) that repeats with period T in time.
For source-seeking purposes the quantity of interest is not f itself but
its first temporal Fourier mode at each point: a magnitude m(x), a phase
phi(x), and the spatial phase gradient grad phi(x) whose direction encodes
where the signal is coming from.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class OriginSingularityError(ValueError):
    """A direction is undefined at the requested point (radius zero)."""


def wrap_angle(a):
    """Wrap an angle (or array of angles) to (-pi, pi]."""
    return math.pi - (math.pi - a) % TWO_PI


def wrap_phase(a):
    """Wrap a phase (or array of phases) to [0, 2*pi)."""
    return a % TWO_PI


@dataclass(frozen=True)
class SpectralTruth:
    """Exact first-mode spectrum of a field at one point.

    Attributes
    ----------
    m : float
        First-mode magnitude, m >= 0.
    phi : float
        First-mode phase in [0, 2*pi).
    grad_phi : np.ndarray
        Spatial gradient of the unwrapped phase, shape (2,).
    """

    m: float
    phi: float
    grad_phi: np.ndarray


class Field(ABC):
    """Abstract time-periodic scalar field."""

    #: temporal period T > 0
    period: float
    #: whether analytic_spectra() is available
    has_analytic_spectra: bool = False

    @abstractmethod
    def eval(self, x, t):
        """Signal value at position x = (x, y) and time t."""

    def eval_window(self, x, t0, n):
        """Sample one period: f(x, t0 + k*T/n) for k = 0..n-1."""
        step = self.period / n
        return np.array([self.eval(x, t0 + k * step) for k in range(n)], dtype=float)

    def analytic_spectra(self, x) -> SpectralTruth:
        """Exact first-mode spectrum at x, if the field supports it."""
        raise NotImplementedError(f"{type(self).__name__} has no analytic spectra")

    def in_domain(self, x) -> bool:
        """Whether x lies inside the field's valid domain."""
        return True

    def describe(self) -> dict:
        """Small JSON-friendly summary of the field, for run records."""
        return {"kind": type(self).__name__}


# ----------------------------------------------------------------------
# Radially symmetric source field
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RadialFieldParams:
    """Parameters of the radially symmetric source field.

    The field is f(r, t) = 2 exp(-r / ell) cos(r - t): an outgoing wave of
    unit angular frequency and unit wavenumber whose amplitude decays on
    the length scale ell. Time period is 2*pi.
    """

    ell: float

    def __post_init__(self):
        if not self.ell > 0:
            raise ValueError(f"ell must be positive, got {self.ell}")


def radial_field_eval(params, x, t):
    """Evaluate the radial field at position x and time t."""
    r = math.hypot(x[0], x[1])
    return 2.0 * math.exp(-r / params.ell) * math.cos(r - t)


def radial_spectral_truth(params, x):
    """Exact first-mode spectrum of the radial field at x.

    m = exp(-r / ell), phi = (-r) mod 2*pi, grad phi = -x / ||x||.
    The gradient direction is undefined at the origin.
    """
    r = math.hypot(x[0], x[1])
    if r == 0.0:
        raise OriginSingularityError("phase gradient undefined at the source")
    m = math.exp(-r / params.ell)
    phi = wrap_phase(-r)
    grad = np.array([-x[0] / r, -x[1] / r])
    return SpectralTruth(m=m, phi=phi, grad_phi=grad)


class RadialField(Field):
    """The radially symmetric source field f(r, t) = 2 exp(-r/ell) cos(r - t)."""

    has_analytic_spectra = True

    def __init__(self, ell):
        if isinstance(ell, RadialFieldParams):
            self.params = ell
        else:
            self.params = RadialFieldParams(float(ell))
        self.period = TWO_PI

    @property
    def ell(self):
        return self.params.ell

    def eval(self, x, t):
        return radial_field_eval(self.params, x, t)

    def eval_window(self, x, t0, n):
        r = math.hypot(x[0], x[1])
        t = t0 + np.arange(n) * (self.period / n)
        return 2.0 * math.exp(-r / self.params.ell) * np.cos(r - t)

    def analytic_spectra(self, x):
        return radial_spectral_truth(self.params, x)

    def spectral_magnitude(self, r):
        """First-mode magnitude as a function of radius alone."""
        return math.exp(-r / self.params.ell)

    def describe(self):
        return {"kind": "radial", "ell": self.params.ell}


# ----------------------------------------------------------------------
# Superposition of plane traveling waves
# ----------------------------------------------------------------------

@dataclass
class TravelingWaveMode:
    """One plane traveling-wave component.

    Contributes alpha*cos(u) + beta*sin(u) with u = k_vec . (x - x_base) - omega_n * t.
    """

    alpha: float
    beta: float
    omega_n: float
    k_vec: np.ndarray

    def __post_init__(self):
        if not self.omega_n > 0:
            raise ValueError(f"omega_n must be positive, got {self.omega_n}")
        self.k_vec = np.asarray(self.k_vec, dtype=float)
        if self.k_vec.shape != (2,):
            raise ValueError("k_vec must be a 2-vector")


class TravelingWaveField(Field):
    """Finite superposition of plane traveling waves sharing a common period.

    Mode frequencies must be integer multiples of a common fundamental;
    the field period is 2*pi over that fundamental.
    """

    has_analytic_spectra = True

    def __init__(self, modes, base_point=(0.0, 0.0)):
        if not modes:
            raise ValueError("at least one traveling-wave mode is required")
        self.modes = list(modes)
        self.base_point = np.asarray(base_point, dtype=float)
        omega1 = min(mode.omega_n for mode in self.modes)
        for mode in self.modes:
            ratio = mode.omega_n / omega1
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(
                    "mode frequencies must be integer multiples of the fundamental"
                )
        self.omega1 = omega1
        self.period = TWO_PI / omega1

    def eval(self, x, t):
        dx = float(x[0]) - self.base_point[0]
        dy = float(x[1]) - self.base_point[1]
        total = 0.0
        for mode in self.modes:
            u = mode.k_vec[0] * dx + mode.k_vec[1] * dy - mode.omega_n * t
            total += mode.alpha * math.cos(u) + mode.beta * math.sin(u)
        return total

    def eval_window(self, x, t0, n):
        dx = float(x[0]) - self.base_point[0]
        dy = float(x[1]) - self.base_point[1]
        t = t0 + np.arange(n) * (self.period / n)
        total = np.zeros(n)
        for mode in self.modes:
            u = mode.k_vec[0] * dx + mode.k_vec[1] * dy - mode.omega_n * t
            total += mode.alpha * np.cos(u) + mode.beta * np.sin(u)
        return total

    def analytic_spectra(self, x):
        # Only modes at the fundamental frequency land in the first bin.
        dx = float(x[0]) - self.base_point[0]
        dy = float(x[1]) - self.base_point[1]
        c = 0.0 + 0.0j
        dc = np.zeros(2, dtype=complex)
        for mode in self.modes:
            if abs(mode.omega_n / self.omega1 - 1.0) > 1e-9:
                continue
            coeff = 0.5 * (mode.alpha + 1j * mode.beta)
            phase = mode.k_vec[0] * dx + mode.k_vec[1] * dy
            term = coeff * np.exp(-1j * phase)
            c += term
            dc += -1j * mode.k_vec * term
        m = abs(c)
        if m == 0.0:
            raise ValueError("first-mode amplitude vanishes; phase undefined")
        phi = wrap_phase(np.angle(c))
        grad = (np.conj(c) * dc).imag / (m * m)
        return SpectralTruth(m=m, phi=float(phi), grad_phi=grad)

    def describe(self):
        return {
            "kind": "traveling_wave",
            "n_modes": len(self.modes),
            "omega1": self.omega1,
        }


def synth_traveling_field(modes, base_point=(0.0, 0.0)):
    """Build a TravelingWaveField from (alpha, beta, omega_n, k_vec) tuples or modes."""
    built = []
    for m in modes:
        if isinstance(m, TravelingWaveMode):
            built.append(m)
        else:
            alpha, beta, omega_n, k_vec = m
            built.append(TravelingWaveMode(alpha, beta, omega_n, k_vec))
    return TravelingWaveField(built, base_point=base_point)


# ----------------------------------------------------------------------
# Alignment error
# ----------------------------------------------------------------------

def alignment_error(x, grad_phi, source=(0.0, 0.0)):
    """Signed angle delta from the source bearing to the phase-gradient direction.

    The source bearing c1 points from x toward the source. delta is measured
    counterclockwise from c1 to grad_phi and lies in (-pi, pi]. A field whose
    phase gradient points exactly at the source gives delta = 0.
    """
    ux = float(source[0]) - float(x[0])
    uy = float(source[1]) - float(x[1])
    if ux == 0.0 and uy == 0.0:
        raise OriginSingularityError("source bearing undefined at the source itself")
    gx = float(grad_phi[0])
    gy = float(grad_phi[1])
    if gx == 0.0 and gy == 0.0:
        raise ValueError("zero phase gradient has no direction")
    # atan2(cross, dot) is scale invariant; no need to normalize first
    delta = math.atan2(ux * gy - uy * gx, ux * gx + uy * gy)
    if delta == -math.pi:
        delta = math.pi
    return delta
