"""Closed-form analysis of the zero-alignment-error seeking loop.

With the steering gain written as a function of radius alone, the planar
closed loop reduces to

    dr/dt   = -V cos(psi)
    dpsi/dt = (V / r - G(r)) sin(psi)

and carries an integral of motion Q = (r / rho) sin(psi) exp(-int G/V dr),
rho = V / G0. Everything here (fixed points, eigenvalues, radial bounds,
the saddle-node scan, convergence classification, phase portraits) is a
consequence of that structure. A hand-rolled two-branch Lambert W supplies
the closed-form radii.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# ----------------------------------------------------------------------
# Gain-law kinds and classification labels (string constants)
# ----------------------------------------------------------------------

STATIC = "static"
PROPORTIONAL = "proportional"
INVERSE = "inverse"
GAIN_KINDS = (STATIC, PROPORTIONAL, INVERSE)

CENTER = "center"
SADDLE = "saddle"
DEGENERATE = "degenerate"

BOUNDED = "bounded"
UNBOUNDED = "unbounded"
CONDITIONAL = "conditional"

UNCONDITIONAL = "unconditional"
CONDITIONAL_BOUNDED = "conditional_bounded"
CONDITIONAL_UNBOUNDED = "conditional_unbounded"
DIVERGENT = "divergent"
INDETERMINATE = "indeterminate"

_INV_E = math.exp(-1.0)


class LambertDomainError(ValueError):
    """Argument outside the requested Lambert branch's real domain."""


class NoSaddleError(ValueError):
    """The parameter regime has no saddle point (and so no critical level)."""


class NoTransitionError(RuntimeError):
    """A parameter scan found no change in fixed-point count."""


class QOutOfRangeError(ValueError):
    """No orbit exists at this value of the conserved quantity."""


def _kind_str(kind):
    """Accept plain strings or string-valued enums for the gain kind."""
    kind = getattr(kind, "value", kind)
    if kind not in GAIN_KINDS:
        raise ValueError(f"unknown gain kind {kind!r}, expected one of {GAIN_KINDS}")
    return kind


def _require_ell(kind, ell):
    if kind != STATIC:
        if ell is None or not ell > 0:
            raise ValueError(f"{kind} gain needs a positive decay length ell")
    return ell


# ----------------------------------------------------------------------
# Lambert W, both real branches
# ----------------------------------------------------------------------

class LambertBranch(Enum):
    W0 = "W0"
    WM1 = "Wm1"


def _lambert_guess_w0(z):
    if z < -0.25:
        # branch-point expansion about z = -1/e
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        return -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p ** 3
    if z < 0.0:
        return z * (1.0 - z + 1.5 * z * z)
    return math.log1p(z)


def _lambert_guess_wm1(z):
    if z < -0.25:
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        return -1.0 - p - p * p / 3.0 - (11.0 / 72.0) * p ** 3
    # asymptotic form near 0-
    l1 = math.log(-z)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def lambert_w(branch, z, tol=5e-13, max_iter=50):
    """Real Lambert W on the principal (W0) or lower (Wm1) branch.

    Solves w * exp(w) = z by Halley iteration from a branch-specific initial
    guess, stopping when |w e^w - z| <= tol. W0 is defined on [-1/e, inf),
    Wm1 on [-1/e, 0). Arguments within 1e-12 below -1/e are snapped to the
    branch point.

    Parameters
    ----------
    branch : LambertBranch, "W0", "Wm1", 0 or -1
    z : float
    tol : float
        Absolute residual target.
    max_iter : int

    Returns
    -------
    float
    """
    if isinstance(branch, LambertBranch):
        b = branch
    elif branch in ("W0", 0):
        b = LambertBranch.W0
    elif branch in ("Wm1", -1):
        b = LambertBranch.WM1
    else:
        raise ValueError(f"unknown Lambert branch {branch!r}")

    z = float(z)
    if z < -_INV_E:
        if z > -_INV_E - 1e-12:
            z = -_INV_E
        else:
            raise LambertDomainError(f"z = {z} below the branch point -1/e")
    if b is LambertBranch.WM1 and z >= 0.0:
        raise LambertDomainError(f"Wm1 needs z in [-1/e, 0), got {z}")
    if z == -_INV_E:
        return -1.0
    if z == 0.0:
        return 0.0

    # The iteration loses its footing right at the branch point where
    # W' blows up; the series is already past machine accuracy there.
    if abs(z + _INV_E) < 1e-9:
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        if b is LambertBranch.WM1:
            p = -p
        return -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p ** 3

    # for huge |z| the absolute target is below float resolution of w e^w
    floor = max(tol, 4e-16 * abs(z))
    w = _lambert_guess_w0(z) if b is LambertBranch.W0 else _lambert_guess_wm1(z)
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - z
        if abs(f) <= floor:
            return w
        w1 = w + 1.0
        denom = ew * w1 - (w + 2.0) * f / (2.0 * w1)
        step = f / denom
        w -= step
        # steps at rounding level mean w is as good as float64 allows
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            return w
    raise RuntimeError(f"Lambert W failed to converge for branch {b}, z = {z}")


def lambert_w0(z, **kwargs):
    return lambert_w(LambertBranch.W0, z, **kwargs)


def lambert_wm1(z, **kwargs):
    return lambert_w(LambertBranch.WM1, z, **kwargs)


# ----------------------------------------------------------------------
# Conserved quantity and the radial envelope
# ----------------------------------------------------------------------

def _gain_integral_factor(kind, r, rho, ell=None):
    """exp(-int_0^r G(u)/V du), the integrating factor of the closed loop.

    static:        exp(-r / rho)
    proportional:  exp((ell / rho) exp(-r / ell))
    inverse:       exp(-(ell / rho) exp(r / ell))

    Works elementwise on arrays.
    """
    if kind == STATIC:
        return np.exp(-np.asarray(r) / rho)
    if kind == PROPORTIONAL:
        return np.exp((ell / rho) * np.exp(-np.asarray(r) / ell))
    return np.exp(-(ell / rho) * np.exp(np.asarray(r) / ell))


def conserved_quantity(kind, r, psi, rho, ell=None):
    """Integral of motion Q = (r / rho) sin(psi) exp(-int G/V dr).

    Constant along closed-loop trajectories for every gain law.
    """
    kind = _kind_str(kind)
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    ell = _require_ell(kind, ell)
    return float((r / rho) * math.sin(psi) * _gain_integral_factor(kind, r, rho, ell))


def radial_envelope(kind, r, rho, ell=None):
    """h(r) = (r / rho) exp(-int G/V dr): the largest |Q| reachable at radius r.

    Orbits with conserved level Q satisfy |Q| <= h(r) wherever they go, with
    equality exactly at radial turning points.
    """
    return (np.asarray(r) / rho) * _gain_integral_factor(kind, r, rho, ell)


def radial_velocity(kind, r, q, rho, ell=None, v=1.0):
    """Magnitude of dr/dt on the orbit with conserved level q, at radius r.

    |dr/dt| = V sqrt(1 - q^2 / h(r)^2) with h the radial envelope. Radicands
    within 1e-12 of zero count as turning points and return 0.
    """
    kind = _kind_str(kind)
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    ell = _require_ell(kind, ell)
    h = float(radial_envelope(kind, r, rho, ell))
    radicand = 1.0 - (q / h) ** 2
    if radicand < -1e-12:
        raise QOutOfRangeError(
            f"no orbit with |Q| = {abs(q):.6g} reaches r = {r:.6g} "
            f"(envelope {h:.6g})"
        )
    return v * math.sqrt(max(radicand, 0.0))


# ----------------------------------------------------------------------
# Closed-loop vector field, fixed points, eigenvalues
# ----------------------------------------------------------------------

def gain_profile(kind, r, rho, ell=None, v=1.0):
    """G(r) for the zero-alignment-error loop: V/rho times the law's m-shaping."""
    if kind == STATIC:
        return v / rho
    if kind == PROPORTIONAL:
        return (v / rho) * math.exp(-r / ell)
    return (v / rho) * math.exp(r / ell)


def radial_vector_field(kind, rho, ell=None, v=1.0):
    """Return f(r, psi) -> (dr/dt, dpsi/dt) for the reduced closed loop."""
    kind = _kind_str(kind)
    ell = _require_ell(kind, ell)

    def f(r, psi):
        g = gain_profile(kind, r, rho, ell, v)
        return (-v * math.cos(psi), (v / r - g) * math.sin(psi))

    return f


@dataclass
class FixedPoint:
    """Equilibrium of the reduced (r, psi) flow.

    kind is "center", "saddle" or "degenerate"; eigenvalues holds the
    numerically derived linearization pair.
    """

    r_star: float
    psi_star: float
    kind: str
    eigenvalues: np.ndarray


def _numerical_jacobian(f, r, psi, h=None):
    if h is None:
        h = 1e-5 * max(1.0, abs(r))
    fr_p = f(r + h, psi)
    fr_m = f(r - h, psi)
    fp_p = f(r, psi + h)
    fp_m = f(r, psi - h)
    return np.array(
        [
            [(fr_p[0] - fr_m[0]) / (2 * h), (fp_p[0] - fp_m[0]) / (2 * h)],
            [(fr_p[1] - fr_m[1]) / (2 * h), (fp_p[1] - fp_m[1]) / (2 * h)],
        ]
    )


def _sorted_eigs(values):
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def _eigs_at(kind, r, psi, rho, ell, v):
    f = radial_vector_field(kind, rho, ell, v)
    jac = _numerical_jacobian(f, r, psi)
    return _sorted_eigs(np.linalg.eigvals(jac))


def jacobian_eigenvalues(kind, fixed_point, rho, ell=None, v=1.0):
    """Eigenvalues of the numerically differenced Jacobian at a fixed point.

    Central differences with step 1e-5 * max(1, r*); returned sorted by
    (real, imag) for determinism.
    """
    kind = _kind_str(kind)
    ell = _require_ell(kind, ell)
    return _eigs_at(kind, fixed_point.r_star, fixed_point.psi_star, rho, ell, v)


def closed_form_eigenvalues(kind, r_star, rho, ell=None, v=1.0):
    """Linearization eigenvalues from lambda^2 = -V^2/r^2 - V G'(r).

    Static:        lambda^2 = -(V / rho)^2
    Proportional:  lambda^2 = V^2 (r - ell) / (ell r^2)
    Inverse:       lambda^2 = -V^2 (ell + r) / (ell r^2)

    Magnitudes are the cross-check target; the numerical Jacobian is the
    ground truth for signs.
    """
    kind = _kind_str(kind)
    ell = _require_ell(kind, ell)
    if kind == STATIC:
        lam2 = -((v / rho) ** 2)
    elif kind == PROPORTIONAL:
        lam2 = v * v * (r_star - ell) / (ell * r_star * r_star)
    else:
        lam2 = -v * v * (ell + r_star) / (ell * r_star * r_star)
    lam = complex(lam2) ** 0.5
    return _sorted_eigs([lam, -lam])


def fixed_points(kind, rho, ell=None, v=1.0, degenerate_tol=1e-9):
    """All equilibria of the reduced flow, sorted by radius then psi.

    Equilibria sit at sin-psi = +/-1 and radii solving V/r = G(r):

    static:        r* = rho (centers)
    proportional:  r* = -ell Wm1(-rho/ell) (saddles) and
                   r** = -ell W0(-rho/ell) (centers), for ell > rho e;
                   none for ell < rho e; one degenerate pair within
                   degenerate_tol of ell = rho e
    inverse:       r* = ell W0(rho/ell) (centers)
    """
    kind = _kind_str(kind)
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not v > 0:
        raise ValueError(f"speed must be positive, got {v}")
    ell = _require_ell(kind, ell)

    radii = []
    if kind == STATIC:
        radii.append((rho, CENTER))
    elif kind == PROPORTIONAL:
        ell_c = rho * math.e
        if abs(ell - ell_c) < degenerate_tol:
            radii.append((ell, DEGENERATE))
        elif ell > ell_c:
            z = -rho / ell
            radii.append((-ell * lambert_w0(z), CENTER))
            radii.append((-ell * lambert_wm1(z), SADDLE))
    else:
        radii.append((ell * lambert_w0(rho / ell), CENTER))

    points = []
    for r_star, label in sorted(radii):
        for psi_star in (math.pi / 2, -math.pi / 2):
            eigs = _eigs_at(kind, r_star, psi_star, rho, ell, v)
            points.append(
                FixedPoint(r_star=r_star, psi_star=psi_star, kind=label,
                           eigenvalues=eigs)
            )
    return points


# ----------------------------------------------------------------------
# Critical level, radial bounds, bifurcation scan
# ----------------------------------------------------------------------

def critical_q(rho, ell):
    """Envelope value at the proportional-gain saddle.

    |Q_cr| = (ell / rho) |Wm1(-rho/ell)| exp(-1 / Wm1(-rho/ell)); orbits with
    |Q| above this level (inside the saddle radius) are trapped. Requires the
    saddle to exist, i.e. ell > rho e.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not ell > rho * math.e:
        raise NoSaddleError(
            f"no saddle for ell = {ell} <= rho e = {rho * math.e:.6g}"
        )
    w = lambert_wm1(-rho / ell)
    return (ell / rho) * abs(w) * math.exp(-1.0 / w)


def _bisect(fn, lo, hi, iters=200):
    """Plain bisection; assumes fn(lo) and fn(hi) bracket a sign change."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return mid
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


@dataclass
class RadialBounds:
    """Turning-point radii of the orbit at conserved level q.

    status is "bounded" (r stays in [r_min, r_max] unconditionally),
    "unbounded" (r grows without bound), or "conditional" (bounded within
    [r_min, r_max] only for orbits starting inside the trapped region).
    """

    status: str
    r_min: float | None = None
    r_max: float | None = None


def radial_bounds(kind, q, rho, ell=None):
    """Solve h(r) = |q| for the turning radii of the level-q orbit.

    Static gain inverts the envelope through both Lambert branches:
    r/rho in [-W0(-|q|), -Wm1(-|q|)], demanding |q| <= 1/e. Inverse gain
    brackets the two roots around its single center. Proportional gain
    is unbounded below the critical level and conditionally bounded above
    it (up to the envelope's local maximum at the center radius).
    """
    kind = _kind_str(kind)
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    ell = _require_ell(kind, ell)
    aq = abs(float(q))

    def envelope(r):
        return float(radial_envelope(kind, r, rho, ell))

    if kind == STATIC:
        if aq == 0.0:
            return RadialBounds(BOUNDED, 0.0, math.inf)
        if aq > _INV_E + 1e-12:
            raise QOutOfRangeError(
                f"static envelope peaks at 1/e; no orbit with |Q| = {aq:.6g}"
            )
        aq = min(aq, _INV_E)
        return RadialBounds(
            BOUNDED, -rho * lambert_w0(-aq), -rho * lambert_wm1(-aq)
        )

    if kind == INVERSE:
        if aq == 0.0:
            return RadialBounds(BOUNDED, 0.0, math.inf)
        r_fp = ell * lambert_w0(rho / ell)
        q_max = envelope(r_fp)
        if aq > q_max * (1.0 + 1e-12):
            raise QOutOfRangeError(
                f"inverse envelope peaks at {q_max:.6g}; no orbit with |Q| = {aq:.6g}"
            )
        if aq >= q_max:
            return RadialBounds(BOUNDED, r_fp, r_fp)
        lo = r_fp
        while envelope(lo) > aq:
            lo *= 0.5
        hi = r_fp
        while envelope(hi) > aq:
            hi *= 2.0
        r_min = _bisect(lambda r: envelope(r) - aq, lo, r_fp)
        r_max = _bisect(lambda r: envelope(r) - aq, r_fp, hi)
        return RadialBounds(BOUNDED, r_min, r_max)

    # proportional
    ell_c = rho * math.e
    if ell <= ell_c:
        return RadialBounds(UNBOUNDED)
    q_cr = critical_q(rho, ell)
    if aq <= q_cr:
        return RadialBounds(UNBOUNDED)
    r_center = -ell * lambert_w0(-rho / ell)
    r_saddle = -ell * lambert_wm1(-rho / ell)
    q_max = envelope(r_center)
    if aq > q_max * (1.0 + 1e-12):
        return RadialBounds(UNBOUNDED)
    aq = min(aq, q_max)
    lo = r_center
    while envelope(lo) > aq:
        lo *= 0.5
    r_min = _bisect(lambda r: envelope(r) - aq, lo, r_center)
    if aq >= q_max:
        r_max = r_center
    else:
        r_max = _bisect(lambda r: envelope(r) - aq, r_center, r_saddle)
    return RadialBounds(CONDITIONAL, r_min, r_max)


def bifurcation_scan(rho, ell_min, ell_max, step=0.1, refine_tol=1e-9):
    """Locate the ell at which proportional-gain fixed points appear.

    Walks ell over [ell_min, ell_max] in the given step, finds the first
    interval where the fixed-point count changes, and bisects it down to
    refine_tol. Raises NoTransitionError when the count never changes.
    """
    if not ell_min < ell_max:
        raise ValueError("need ell_min < ell_max")
    if not step > 0:
        raise ValueError("step must be positive")

    def has_points(ell):
        return len(fixed_points(PROPORTIONAL, rho, ell)) > 0

    grid = [ell_min]
    while grid[-1] < ell_max:
        grid.append(min(grid[-1] + step, ell_max))
    flags = [has_points(ell) for ell in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if flags[i] != flags[i + 1]:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        raise NoTransitionError(
            f"fixed-point count is constant over [{ell_min}, {ell_max}]"
        )
    lo, hi = bracket
    lo_flag = has_points(lo)
    while hi - lo > refine_tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if has_points(mid) == lo_flag:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# Convergence classification
# ----------------------------------------------------------------------

def classify_convergence(kind, rho, ell, init, boundary_tol=1e-9):
    """Classify the long-run radial behaviour of the orbit through `init`.

    init needs only .r and .psi attributes. Static and inverse gain trap
    every orbit ("unconditional"). Proportional gain below ell = rho e traps
    none ("divergent"); above it, orbits are "conditional_bounded" when
    |Q| exceeds the critical level and the start radius lies inside the
    saddle, "conditional_unbounded" otherwise. Inits within boundary_tol of
    a separating level (or ell of rho e) come back "indeterminate".
    """
    kind = _kind_str(kind)
    if kind in (STATIC, INVERSE):
        return UNCONDITIONAL
    ell_c = rho * math.e
    if abs(ell - ell_c) < boundary_tol:
        return INDETERMINATE
    if ell < ell_c:
        return DIVERGENT
    q_cr = critical_q(rho, ell)
    q = conserved_quantity(kind, init.r, init.psi, rho, ell)
    if abs(abs(q) - q_cr) < boundary_tol:
        return INDETERMINATE
    r_saddle = -ell * lambert_wm1(-rho / ell)
    if abs(q) > q_cr and init.r < r_saddle:
        return CONDITIONAL_BOUNDED
    return CONDITIONAL_UNBOUNDED


# ----------------------------------------------------------------------
# Phase portraits
# ----------------------------------------------------------------------

@dataclass
class PortraitGrid:
    """Cartesian grid in (u, w) = (r cos psi, r sin psi) for Q maps."""

    u_min: float = -12.0
    u_max: float = 12.0
    w_min: float = -12.0
    w_max: float = 12.0
    nu: int = 121
    nw: int = 121

    def __post_init__(self):
        if not (self.u_max > self.u_min and self.w_max > self.w_min):
            raise ValueError("portrait grid extents must be increasing")
        if self.nu < 2 or self.nw < 2:
            raise ValueError("portrait grid needs at least 2 points per axis")


@dataclass
class PortraitReport:
    """Summary of the reduced flow for one gain law and parameter set."""

    kind: str
    rho: float
    ell: float | None
    v: float
    fixed_points: list
    q_critical: float | None
    separatrix_q: tuple | None
    classification: str
    relative_equilibria: str
    grid: PortraitGrid
    u_axis: np.ndarray
    w_axis: np.ndarray
    q_grid: np.ndarray

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "rho": self.rho,
            "ell": self.ell,
            "v": self.v,
            "fixed_points": [
                {
                    "r": fp.r_star,
                    "psi": fp.psi_star,
                    "kind": fp.kind,
                    "eigenvalues": [
                        [ev.real, ev.imag] for ev in fp.eigenvalues
                    ],
                }
                for fp in self.fixed_points
            ],
            "q_critical": self.q_critical,
            "separatrix_q": (
                list(self.separatrix_q) if self.separatrix_q is not None else None
            ),
            "classification": self.classification,
            "relative_equilibria": self.relative_equilibria,
            "grid": {
                "u_min": self.grid.u_min,
                "u_max": self.grid.u_max,
                "w_min": self.grid.w_min,
                "w_max": self.grid.w_max,
                "nu": self.grid.nu,
                "nw": self.grid.nw,
            },
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_grid_csv(self, path):
        lines = ["r_cos_psi,r_sin_psi,Q"]
        for j, w in enumerate(self.w_axis):
            for i, u in enumerate(self.u_axis):
                lines.append(
                    f"{float(u)!r},{float(w)!r},{float(self.q_grid[j, i])!r}"
                )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def portrait(kind, rho, ell=None, v=1.0, grid=None):
    """Build a PortraitReport: fixed points, critical level, and a Q map.

    The Q map is evaluated on the (r cos psi, r sin psi) plane; plotting the
    contour of Q at the separatrix levels reproduces the trapped region's
    boundary. Every grid value is finite (the envelope factor decays in all
    regimes, and Q -> 0 at the origin).
    """
    kind = _kind_str(kind)
    ell = _require_ell(kind, ell)
    grid = grid if grid is not None else PortraitGrid()

    fps = fixed_points(kind, rho, ell, v)
    q_critical = None
    separatrix = None
    if kind == PROPORTIONAL and any(fp.kind == SADDLE for fp in fps):
        q_critical = critical_q(rho, ell)
        separatrix = (-q_critical, q_critical)

    if kind in (STATIC, INVERSE):
        classification = UNCONDITIONAL
    elif abs(ell - rho * math.e) < 1e-9:
        classification = INDETERMINATE
    elif ell < rho * math.e:
        classification = DIVERGENT
    else:
        classification = CONDITIONAL

    u_axis = np.linspace(grid.u_min, grid.u_max, grid.nu)
    w_axis = np.linspace(grid.w_min, grid.w_max, grid.nw)
    uu, ww = np.meshgrid(u_axis, w_axis)
    rr = np.hypot(uu, ww)
    q_grid = (ww / rho) * _gain_integral_factor(kind, rr, rho, ell)

    note = (
        "sin(psi) = 0 is a line of degenerate relative equilibria: "
        "psi = 0 heads straight down-gradient at dr/dt = -V"
    )
    return PortraitReport(
        kind=kind,
        rho=rho,
        ell=ell,
        v=v,
        fixed_points=fps,
        q_critical=q_critical,
        separatrix_q=separatrix,
        classification=classification,
        relative_equilibria=note,
        grid=grid,
        u_axis=u_axis,
        w_axis=w_axis,
        q_grid=q_grid,
    )
