"""Gridded time-periodic signal bundles.

Covers the WAVF1 binary container for sampled fields, a synthetic wake
generator with known spectra, per-gridpoint first-mode spectral maps, and
a space/time interpolating Field over a bundle.

WAVF1 layout (little endian):

    offset  size  content
    0       4     magic b"WAVF"
    4       1     version byte 0x01
    5       12    u32 nx, ny, nt
    17      64    f64 x0, y0, dx, dy, dt, meta_re, meta_st, meta_a
    81      -     nt frames of ny*nx f64, row major, x fastest

Unset metadata slots are stored as NaN. Frames must be finite.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import TWO_PI, Field, alignment_error, wrap_angle, wrap_phase
from .sensing import dft_first_mode

MAGIC = b"WAVF"
VERSION = 1
_HEADER = struct.Struct("<III8d")
_HEADER_SIZE = 5 + _HEADER.size


class BundleFormatError(ValueError):
    """The bytes are not a well-formed WAVF1 bundle."""


class GridPeriodError(ValueError):
    """Frame spacing and count do not tile one temporal period."""


@dataclass
class GridFieldBundle:
    """One period of a scalar field sampled on a regular space/time grid.

    frames has shape (nt, ny, nx); the temporal period is nt * dt and frame
    nt would repeat frame 0. meta_re, meta_st and meta_a are optional
    provenance numbers (e.g. Reynolds number, Strouhal number, forcing
    amplitude) and default to unset.
    """

    nx: int
    ny: int
    nt: int
    x0: float
    y0: float
    dx: float
    dy: float
    dt: float
    frames: np.ndarray
    meta_re: float | None = None
    meta_st: float | None = None
    meta_a: float | None = None

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if self.nt < 8:
            raise ValueError(f"need at least 8 frames per period, got {self.nt}")
        for name in ("x0", "y0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("dx", "dy", "dt"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite")
        for name in ("meta_re", "meta_st", "meta_a"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite or None")
        self.frames = np.ascontiguousarray(self.frames, dtype=np.float64)
        if self.frames.shape != (self.nt, self.ny, self.nx):
            raise ValueError(
                f"frames shape {self.frames.shape} does not match "
                f"(nt, ny, nx) = {(self.nt, self.ny, self.nx)}"
            )
        if not np.isfinite(self.frames).all():
            raise ValueError("frames must be finite everywhere")

    @property
    def period(self):
        return self.nt * self.dt

    @property
    def x_coords(self):
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def y_coords(self):
        return self.y0 + self.dy * np.arange(self.ny)


def save_bundle(bundle, path):
    """Write a bundle to disk in WAVF1 form. Round-trips bit exactly."""
    def meta(value):
        return math.nan if value is None else float(value)

    header = MAGIC + bytes([VERSION]) + _HEADER.pack(
        bundle.nx, bundle.ny, bundle.nt,
        bundle.x0, bundle.y0, bundle.dx, bundle.dy, bundle.dt,
        meta(bundle.meta_re), meta(bundle.meta_st), meta(bundle.meta_a),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bundle.frames.tobytes(order="C"))


def load_bundle(path):
    """Read a WAVF1 bundle, validating the header and payload size."""
    data = Path(path).read_bytes()
    if len(data) < 5:
        raise BundleFormatError(f"file holds {len(data)} bytes, no header")
    if data[:4] != MAGIC:
        raise BundleFormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if data[4] != VERSION:
        raise BundleFormatError(f"unsupported version {data[4]}, expected {VERSION}")
    if len(data) < _HEADER_SIZE:
        raise BundleFormatError("truncated header")
    nx, ny, nt, x0, y0, dx, dy, dt, m_re, m_st, m_a = _HEADER.unpack(
        data[5:_HEADER_SIZE]
    )
    for name, value in (("x0", x0), ("y0", y0), ("dx", dx), ("dy", dy), ("dt", dt)):
        if not math.isfinite(value):
            raise BundleFormatError(f"non-finite header field {name}")
    expected = nt * ny * nx * 8
    body = len(data) - _HEADER_SIZE
    if body != expected:
        raise BundleFormatError(
            f"payload holds {body} bytes, header promises {expected}"
        )
    frames = np.frombuffer(data, dtype="<f8", offset=_HEADER_SIZE)
    frames = frames.reshape((nt, ny, nx)).copy()

    def meta(value):
        if math.isnan(value):
            return None
        if not math.isfinite(value):
            raise BundleFormatError("non-finite metadata field")
        return value

    return GridFieldBundle(
        nx=nx, ny=ny, nt=nt, x0=x0, y0=y0, dx=dx, dy=dy, dt=dt,
        frames=frames, meta_re=meta(m_re), meta_st=meta(m_st), meta_a=meta(m_a),
    )


# ----------------------------------------------------------------------
# Synthetic wake
# ----------------------------------------------------------------------

def synth_wake(a_w=2.0, k_x=1.0, omega=1.0, sigma=2.0, decay_l=10.0,
               x0=-2.0, y0=-6.0, dx=0.2, dy=0.2, nx=81, ny=61, nt=64,
               dt=None, meta_re=None, meta_st=None, meta_a=None):
    """Gaussian-envelope traveling wake sampled into a bundle.

    w(x, y, t) = a_w exp(-y^2 / 2 sigma^2) exp(-x / decay_l) cos(k_x x - omega t)
    for x >= 0, zero upstream. Its first-mode spectrum is known in closed
    form inside the wake: m = (a_w / 2) exp(-y^2/2 sigma^2) exp(-x / decay_l),
    phi = (-k_x x) mod 2*pi, grad phi = (-k_x, 0).

    dt defaults to 2*pi / (omega * nt) so the frames tile one period; an
    explicit dt that does not is rejected. k_x * dx must stay below pi or
    the sampled phase would alias between columns.
    """
    for name, value in (("a_w", a_w), ("omega", omega), ("sigma", sigma),
                        ("decay_l", decay_l)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    period = TWO_PI / omega
    if dt is None:
        dt = period / nt
    elif abs(nt * dt - period) > 1e-9:
        raise GridPeriodError(
            f"nt * dt = {nt * dt:.6g} does not tile the period {period:.6g}"
        )
    if not abs(k_x) * dx < math.pi:
        raise ValueError(
            f"column phase step |k_x| dx = {abs(k_x) * dx:.6g} reaches pi; "
            "the grid cannot resolve the wave"
        )

    xs = x0 + dx * np.arange(nx)
    ys = y0 + dy * np.arange(ny)
    envelope = (
        a_w
        * np.exp(-ys[:, None] ** 2 / (2.0 * sigma * sigma))
        * np.exp(-np.maximum(xs[None, :], 0.0) / decay_l)
        * (xs[None, :] >= 0.0)
    )
    frames = np.empty((nt, ny, nx))
    for k in range(nt):
        t = k * dt
        frames[k] = envelope * np.cos(k_x * xs[None, :] - omega * t)
    return GridFieldBundle(
        nx=nx, ny=ny, nt=nt, x0=x0, y0=y0, dx=dx, dy=dy, dt=dt,
        frames=frames, meta_re=meta_re, meta_st=meta_st, meta_a=meta_a,
    )


# ----------------------------------------------------------------------
# Per-gridpoint spectra
# ----------------------------------------------------------------------

@dataclass
class SpectralGrids:
    """First-mode spectral maps over a bundle's spatial grid.

    m_grid and phi_grid have shape (ny, nx); grad_phi_grid stacks the two
    gradient components as (ny, nx, 2). delta_grid (alignment error against
    a known source) is present only when a source was given. Entries where
    the magnitude sits below the floor are NaN in the gradient and delta
    maps.
    """

    x: np.ndarray
    y: np.ndarray
    m_grid: np.ndarray
    phi_grid: np.ndarray
    grad_phi_grid: np.ndarray
    delta_grid: np.ndarray | None = None

    def write_csv(self, path):
        lines = ["x,y,m,phi,gx,gy,delta"]
        ny, nx = self.m_grid.shape
        for j in range(ny):
            for i in range(nx):
                delta = (
                    self.delta_grid[j, i] if self.delta_grid is not None
                    else math.nan
                )
                values = (
                    self.x[i], self.y[j], self.m_grid[j, i],
                    self.phi_grid[j, i], self.grad_phi_grid[j, i, 0],
                    self.grad_phi_grid[j, i, 1], delta,
                )
                lines.append(",".join(
                    "nan" if math.isnan(float(v)) else repr(float(v))
                    for v in values
                ))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _wrapped_gradient(phi, spacing, axis):
    """Gradient of a wrapped-phase grid along one axis.

    Adjacent one-step differences are wrapped to (-pi, pi] and averaged in
    the interior (equal to a central difference whenever no wrap occurs
    between the two steps); edges keep the single wrapped one-step
    difference. Valid while the true phase step per cell stays below pi.
    """
    steps = wrap_angle(np.diff(phi, axis=axis)) / spacing
    grad = np.empty_like(phi)
    if axis == 1:
        grad[:, 1:-1] = 0.5 * (steps[:, 1:] + steps[:, :-1])
        grad[:, 0] = steps[:, 0]
        grad[:, -1] = steps[:, -1]
    else:
        grad[1:-1, :] = 0.5 * (steps[1:, :] + steps[:-1, :])
        grad[0, :] = steps[0, :]
        grad[-1, :] = steps[-1, :]
    return grad, steps


def spectral_grids(bundle, source=None, m_floor=1e-9):
    """First-mode m, phi, grad phi (and optionally delta) over the grid.

    Each gridpoint's time series goes through the same single-bin DFT the
    onboard sensor uses, so pointwise values agree exactly with
    sensing.dft_first_mode. Phase gradients use wrapped differences; points
    whose magnitude (or any contributing neighbour's) falls below m_floor
    are masked to NaN in the gradient and delta maps.
    """
    period = bundle.period
    ny, nx = bundle.ny, bundle.nx
    coeff = np.empty((ny, nx), dtype=complex)
    for j in range(ny):
        for i in range(nx):
            coeff[j, i] = dft_first_mode(bundle.frames[:, j, i], period)
    m = np.abs(coeff)
    phi = np.where(m > 0.0, wrap_phase(np.angle(coeff)), 0.0)

    gx, steps_x = _wrapped_gradient(phi, bundle.dx, axis=1)
    gy, steps_y = _wrapped_gradient(phi, bundle.dy, axis=0)

    healthy = m >= m_floor
    # a gradient entry is trustworthy only if the point and the neighbours
    # it differenced against are all above the floor
    ok_x = healthy.copy()
    ok_x[:, 1:-1] &= healthy[:, 2:] & healthy[:, :-2]
    ok_x[:, 0] &= healthy[:, 1]
    ok_x[:, -1] &= healthy[:, -2]
    ok_y = healthy.copy()
    ok_y[1:-1, :] &= healthy[2:, :] & healthy[:-2, :]
    ok_y[0, :] &= healthy[1, :]
    ok_y[-1, :] &= healthy[-2, :]
    ok = ok_x & ok_y

    big_x = np.abs(steps_x * bundle.dx) > 0.95 * math.pi
    big_y = np.abs(steps_y * bundle.dy) > 0.95 * math.pi
    near_x = big_x & (healthy[:, 1:] & healthy[:, :-1])
    near_y = big_y & (healthy[1:, :] & healthy[:-1, :])
    if near_x.any() or near_y.any():
        warnings.warn(
            "wrapped phase steps approach pi between healthy gridpoints; "
            "the grid is too coarse for reliable phase gradients",
            UserWarning,
            stacklevel=2,
        )

    grad = np.stack([gx, gy], axis=-1)
    grad[~ok] = np.nan

    delta = None
    if source is not None:
        sx, sy = float(source[0]), float(source[1])
        delta = np.full((ny, nx), np.nan)
        xs = bundle.x_coords
        ys = bundle.y_coords
        for j in range(ny):
            for i in range(nx):
                if not ok[j, i]:
                    continue
                gvec = grad[j, i]
                if not np.isfinite(gvec).all():
                    continue
                px, py = xs[i], ys[j]
                if px == sx and py == sy:
                    continue
                if gvec[0] == 0.0 and gvec[1] == 0.0:
                    continue
                delta[j, i] = alignment_error((px, py), gvec, source=(sx, sy))

    return SpectralGrids(
        x=bundle.x_coords, y=bundle.y_coords, m_grid=m, phi_grid=phi,
        grad_phi_grid=grad, delta_grid=delta,
    )


# ----------------------------------------------------------------------
# Interpolating field over a bundle
# ----------------------------------------------------------------------

class BundleField(Field):
    """Bilinear-in-space, periodic-linear-in-time view of a bundle.

    Outside the spatial grid the signal is zero and in_domain() is False;
    a simulation driver treats leaving the grid as a termination, not an
    error. Queries landing exactly on a node and frame return the stored
    value.
    """

    has_analytic_spectra = False

    def __init__(self, bundle):
        self.bundle = bundle
        self.period = bundle.period
        self._x_max = bundle.x0 + bundle.dx * (bundle.nx - 1)
        self._y_max = bundle.y0 + bundle.dy * (bundle.ny - 1)

    def in_domain(self, x):
        b = self.bundle
        return (b.x0 <= x[0] <= self._x_max) and (b.y0 <= x[1] <= self._y_max)

    def _spatial_cell(self, px, py):
        b = self.bundle
        u = (px - b.x0) / b.dx
        v = (py - b.y0) / b.dy
        i0 = min(max(int(math.floor(u)), 0), b.nx - 2)
        j0 = min(max(int(math.floor(v)), 0), b.ny - 2)
        return i0, j0, u - i0, v - j0

    def _corner_series(self, px, py):
        """Bilinear weights applied to every frame at once: shape (nt,)."""
        b = self.bundle
        i0, j0, fu, fv = self._spatial_cell(px, py)
        c00 = b.frames[:, j0, i0]
        c10 = b.frames[:, j0, i0 + 1]
        c01 = b.frames[:, j0 + 1, i0]
        c11 = b.frames[:, j0 + 1, i0 + 1]
        return ((1 - fu) * (1 - fv) * c00 + fu * (1 - fv) * c10
                + (1 - fu) * fv * c01 + fu * fv * c11)

    def eval(self, x, t):
        if not self.in_domain(x):
            return 0.0
        series = self._corner_series(float(x[0]), float(x[1]))
        s = (t % self.period) / self.bundle.dt
        k0 = int(math.floor(s)) % self.bundle.nt
        k1 = (k0 + 1) % self.bundle.nt
        w = s - math.floor(s)
        return float((1.0 - w) * series[k0] + w * series[k1])

    def eval_window(self, x, t0, n):
        if not self.in_domain(x):
            return np.zeros(n)
        series = self._corner_series(float(x[0]), float(x[1]))
        t = t0 + np.arange(n) * (self.period / n)
        s = (t % self.period) / self.bundle.dt
        k0 = np.floor(s).astype(int) % self.bundle.nt
        k1 = (k0 + 1) % self.bundle.nt
        w = s - np.floor(s)
        return (1.0 - w) * series[k0] + w * series[k1]

    def describe(self):
        b = self.bundle
        return {
            "kind": "bundle",
            "nx": b.nx, "ny": b.ny, "nt": b.nt,
            "x0": b.x0, "y0": b.y0, "dx": b.dx, "dy": b.dy, "dt": b.dt,
        }


def field_from_bundle(bundle):
    """Field view over a bundle (bilinear space, periodic linear time)."""
    return BundleField(bundle)
