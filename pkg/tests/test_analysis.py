"""Tests for the reduced-model analysis: Lambert W, conserved level, fixed
points, turning radii, bifurcation threshold, and convergence taxonomy."""

import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

import oracles
from phaseseek import (
    LambertBranch,
    LambertDomainError,
    NoSaddleError,
    NoTransitionError,
    PolarState,
    PortraitGrid,
    QOutOfRangeError,
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
)

INV_E = math.exp(-1.0)


# ----------------------------------------------------------------------
# Lambert W
# ----------------------------------------------------------------------

def test_lambert_known_values():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(1.0) == pytest.approx(0.5671432904097838, abs=1e-13)
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-13)
    assert lambert_wm1(-INV_E) == pytest.approx(-1.0, abs=1e-8)
    assert lambert_w0(-INV_E) == pytest.approx(-1.0, abs=1e-8)


def test_lambert_matches_bisection_oracle():
    for z in (-0.3, -0.2, -0.05, 0.3, 2.0, 40.0):
        if z < 0:
            assert lambert_wm1(z) == pytest.approx(
                oracles.lambert_wm1_ref(z), abs=1e-10)
        assert lambert_w0(z) == pytest.approx(
            oracles.lambert_w0_ref(z), abs=1e-10)


def test_lambert_residuals_principal_branch():
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(5000):
        z = float(rng.uniform(-INV_E, 10.0))
        w = lambert_w0(z)
        assert w >= -1.0 - 1e-12
        worst = max(worst, abs(w * math.exp(w) - z))
    assert worst < 1e-12


def test_lambert_residuals_lower_branch():
    rng = np.random.default_rng(21)
    worst = 0.0
    for _ in range(5000):
        z = float(rng.uniform(-INV_E, -1e-12))
        w = lambert_wm1(z)
        assert w <= -1.0 + 1e-12
        worst = max(worst, abs(w * math.exp(w) - z))
    assert worst < 1e-12


def test_lambert_huge_argument():
    # relative residual is what survives at the top of the range
    z = 1e300
    w = lambert_w0(z)
    assert w + math.log(w) == pytest.approx(math.log(z), abs=1e-12)


def test_lambert_domain_errors():
    with pytest.raises(LambertDomainError):
        lambert_w0(-0.4)
    with pytest.raises(LambertDomainError):
        lambert_wm1(0.1)
    with pytest.raises(LambertDomainError):
        lambert_wm1(-0.5)
    with pytest.raises(LambertDomainError):
        lambert_wm1(0.0)
    with pytest.raises(ValueError):
        lambert_w("bogus", 0.5)


def test_lambert_branch_dispatch():
    assert lambert_w(LambertBranch.W0, 1.0) == lambert_w0(1.0)
    assert lambert_w(LambertBranch.WM1, -0.2) == lambert_wm1(-0.2)
    assert lambert_w(0, 1.0) == lambert_w0(1.0)
    assert lambert_w(-1, -0.2) == lambert_wm1(-0.2)
    assert lambert_w("W0", 1.0) == lambert_w0(1.0)


# ----------------------------------------------------------------------
# Conserved level and radial envelope
# ----------------------------------------------------------------------

def test_conserved_quantity_values():
    assert conserved_quantity("static", 4.0, math.pi / 2, 2.0) == pytest.approx(
        2.0 * math.exp(-2.0), abs=1e-15)
    assert conserved_quantity("static", 4.0, math.pi / 2, 2.0) == pytest.approx(
        0.2706705664732254, abs=1e-15)
    assert conserved_quantity(
        "proportional", 4.0, math.pi / 2, 2.0, 6.5) == pytest.approx(
        11.583184323957616, abs=1e-12)
    assert conserved_quantity(
        "inverse", 3.0, math.pi / 2, 2.0, 5.8) == pytest.approx(
        0.011574193029998785, abs=1e-15)
    # sin(psi) factor: odd in psi, zero on the down-gradient ray
    assert conserved_quantity("static", 4.0, 0.0, 2.0) == 0.0
    assert conserved_quantity("static", 4.0, -math.pi / 2, 2.0) == pytest.approx(
        -0.2706705664732254)


def test_conserved_quantity_validation():
    with pytest.raises(ValueError):
        conserved_quantity("static", -1.0, 0.3, 2.0)
    with pytest.raises(ValueError):
        conserved_quantity("static", 1.0, 0.3, 0.0)
    with pytest.raises(ValueError):
        conserved_quantity("proportional", 1.0, 0.3, 2.0)  # ell required


def test_envelope_bounds_conserved_level():
    # |Q| <= h(r) with equality only when |sin psi| = 1
    rng = np.random.default_rng(22)
    for kind, ell in (("static", None), ("proportional", 6.5), ("inverse", 5.8)):
        for _ in range(100):
            r = float(rng.uniform(0.1, 12.0))
            psi = float(rng.uniform(-math.pi, math.pi))
            q = conserved_quantity(kind, r, psi, 2.0, ell)
            h = float(radial_envelope(kind, r, 2.0, ell))
            assert abs(q) <= h + 1e-12


def test_radial_velocity_values():
    # at the level's turning radius the radial speed vanishes
    q = 2.0 * math.exp(-2.0)
    assert radial_velocity("static", 4.0, q, 2.0) == pytest.approx(0.0, abs=1e-7)
    # at the center radius with the same level
    assert radial_velocity("static", 2.0, q, 2.0) == pytest.approx(
        0.677243580297037, abs=1e-12)
    # q = 0 moves radially at full speed, and speed scales linearly with v
    assert radial_velocity("static", 2.0, 0.0, 2.0) == 1.0
    assert radial_velocity("static", 2.0, 0.0, 2.0, v=3.0) == 3.0
    assert radial_velocity("static", 2.0, q, 2.0, v=2.0) == pytest.approx(
        2.0 * 0.677243580297037, abs=1e-12)


def test_radial_velocity_out_of_range():
    with pytest.raises(QOutOfRangeError):
        radial_velocity("static", 8.0, 2.0 * math.exp(-2.0), 2.0)
    with pytest.raises(ValueError):
        radial_velocity("static", -2.0, 0.1, 2.0)


# ----------------------------------------------------------------------
# Fixed points and eigenvalues
# ----------------------------------------------------------------------

def test_static_fixed_points():
    fps = fixed_points("static", 2.0)
    assert len(fps) == 2
    for fp in fps:
        assert fp.r_star == pytest.approx(2.0, abs=1e-12)
        assert fp.kind == "center"
        assert abs(fp.psi_star) == pytest.approx(math.pi / 2)
        for ev in fp.eigenvalues:
            assert ev.real == pytest.approx(0.0, abs=1e-10)
            assert abs(ev.imag) == pytest.approx(0.5, abs=1e-10)
    assert {fp.psi_star > 0 for fp in fps} == {True, False}


def test_proportional_fixed_points_against_oracle():
    fps = fixed_points("proportional", 2.0, 6.5)
    radii = sorted(set(fp.r_star for fp in fps))
    r_center = oracles.center_radius_ref("proportional", 2.0, 6.5)
    r_saddle = oracles.saddle_radius_ref(2.0, 6.5)
    assert radii[0] == pytest.approx(r_center, abs=1e-8)
    assert radii[1] == pytest.approx(r_saddle, abs=1e-8)
    assert radii[0] == pytest.approx(3.347040263380559, abs=1e-10)
    assert radii[1] == pytest.approx(11.19519183088112, abs=1e-10)
    kinds = {round(fp.r_star, 6): fp.kind for fp in fps}
    assert kinds[round(r_center, 6)] == "center"
    assert kinds[round(r_saddle, 6)] == "saddle"
    for fp in fps:
        if fp.kind == "center":
            assert all(abs(ev.real) < 1e-8 for ev in fp.eigenvalues)
        else:
            assert all(abs(ev.imag) < 1e-8 for ev in fp.eigenvalues)
            assert max(ev.real for ev in fp.eigenvalues) > 0  # unstable pair


def test_proportional_below_threshold_has_no_fixed_points():
    assert fixed_points("proportional", 2.0, 5.4) == []


def test_proportional_at_threshold_is_degenerate():
    fps = fixed_points("proportional", 2.0, 2.0 * math.e)
    assert len(fps) == 2
    for fp in fps:
        assert fp.kind == "degenerate"
        assert fp.r_star == pytest.approx(2.0 * math.e, rel=1e-9)


def test_inverse_fixed_point_against_oracle():
    fps = fixed_points("inverse", 2.0, 5.8)
    assert len(fps) == 2
    r_ref = oracles.center_radius_ref("inverse", 2.0, 5.8)
    for fp in fps:
        assert fp.r_star == pytest.approx(r_ref, abs=1e-8)
        assert fp.r_star == pytest.approx(1.5349534247078291, abs=1e-10)
        assert fp.kind == "center"


def test_closed_form_eigenvalue_magnitudes():
    evs = closed_form_eigenvalues("static", 2.0, 2.0)
    assert sorted(ev.imag for ev in evs) == pytest.approx([-0.5, 0.5])
    evs = closed_form_eigenvalues("proportional", 3.347040263380559, 2.0, 6.5)
    assert abs(evs[0].imag) == pytest.approx(0.20808539, abs=1e-6)
    evs = closed_form_eigenvalues("proportional", 11.19519183088112, 2.0, 6.5)
    assert max(ev.real for ev in evs) == pytest.approx(0.0759169, abs=1e-6)
    evs = closed_form_eigenvalues("inverse", 1.5349534247078291, 2.0, 5.8)
    assert abs(evs[0].imag) == pytest.approx(0.73263807, abs=1e-6)


def test_eigenvalues_scale_with_speed():
    for v in (0.5, 2.0, 3.7):
        base = closed_form_eigenvalues("proportional", 3.347040263380559, 2.0, 6.5)
        fast = closed_form_eigenvalues(
            "proportional", 3.347040263380559, 2.0, 6.5, v=v)
        for b, f in zip(base, fast):
            assert f == pytest.approx(v * b, abs=1e-12)


def test_closed_form_matches_numerical_jacobian():
    rng = np.random.default_rng(23)
    for _ in range(15):
        rho = float(rng.uniform(0.5, 3.0))
        kind = ["static", "proportional", "inverse"][int(rng.integers(3))]
        if kind == "proportional":
            ell = float(rng.uniform(rho * math.e + 0.3, rho * math.e + 6.0))
        else:
            ell = float(rng.uniform(2.0, 9.0))
        for fp in fixed_points(kind, rho, ell):
            closed = closed_form_eigenvalues(kind, fp.r_star, rho, ell)
            numerical = jacobian_eigenvalues(kind, fp, rho, ell)
            for c, n in zip(closed, numerical):
                assert abs(c) == pytest.approx(abs(n), abs=1e-6)


# ----------------------------------------------------------------------
# Critical level and turning radii
# ----------------------------------------------------------------------

def test_critical_q_value_and_consistency():
    q_cr = critical_q(2.0, 6.5)
    assert q_cr == pytest.approx(10.003585736854543, abs=1e-12)
    # the critical level is the envelope evaluated at the saddle radius
    r_saddle = oracles.saddle_radius_ref(2.0, 6.5)
    assert q_cr == pytest.approx(
        float(radial_envelope("proportional", r_saddle, 2.0, 6.5)), abs=1e-9)


def test_critical_q_requires_saddle():
    with pytest.raises(NoSaddleError):
        critical_q(2.0, 5.4)
    with pytest.raises(NoSaddleError):
        critical_q(2.0, 2.0 * math.e)


def test_critical_q_limit_at_threshold():
    # h(saddle) -> e^2 as ell drops to rho e (saddle meets center at r = ell)
    q_cr = critical_q(2.0, 2.0 * math.e * (1.0 + 1e-8))
    assert q_cr == pytest.approx(math.e ** 2, rel=1e-3)


def test_static_bounds():
    q = 2.0 * math.exp(-2.0)
    b = radial_bounds("static", q, 2.0)
    assert b.status == "bounded"
    assert b.r_min == pytest.approx(0.8127514799199198, abs=1e-12)
    assert b.r_max == pytest.approx(4.0, abs=1e-12)
    # turning radii sit exactly on the envelope
    for r in (b.r_min, b.r_max):
        assert float(radial_envelope("static", r, 2.0)) == pytest.approx(
            q, abs=1e-9)
    # sign of q is irrelevant
    neg = radial_bounds("static", -q, 2.0)
    assert neg.r_min == pytest.approx(b.r_min)


def test_static_bounds_edge_cases():
    b = radial_bounds("static", 0.0, 2.0)
    assert (b.r_min, b.r_max) == (0.0, math.inf)
    b = radial_bounds("static", INV_E, 2.0)
    assert b.r_min == pytest.approx(2.0, abs=1e-6)
    assert b.r_max == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(QOutOfRangeError):
        radial_bounds("static", INV_E + 1e-9, 2.0)


def test_inverse_bounds():
    b = radial_bounds("inverse", 0.01, 2.0, 5.8)
    assert b.status == "bounded"
    assert b.r_min < 1.5349534247078291 < b.r_max
    for r in (b.r_min, b.r_max):
        assert float(radial_envelope("inverse", r, 2.0, 5.8)) == pytest.approx(
            0.01, abs=1e-9)


def test_proportional_bounds():
    q_cr = critical_q(2.0, 6.5)
    # below the critical level nothing is trapped
    assert radial_bounds("proportional", 5.0, 2.0, 6.5).status == "unbounded"
    assert radial_bounds("proportional", q_cr, 2.0, 6.5).status == "unbounded"
    # above it, orbits started inside the well stay between the turning radii
    b = radial_bounds("proportional", 11.0, 2.0, 6.5)
    assert b.status == "conditional"
    assert b.r_min < 3.347040263380559 < b.r_max < 11.19519183088112
    for r in (b.r_min, b.r_max):
        assert float(radial_envelope("proportional", r, 2.0, 6.5)) == pytest.approx(
            11.0, abs=1e-9)
    # beyond the envelope's local maximum no turning radii exist at all
    assert radial_bounds("proportional", 12.0, 2.0, 6.5).status == "unbounded"
    # below threshold every level is unbounded
    assert radial_bounds("proportional", 3.0, 2.0, 5.4).status == "unbounded"


def test_bounds_match_lambert_inversion():
    rng = np.random.default_rng(24)
    for _ in range(100):
        q = float(rng.uniform(1e-4, INV_E - 1e-6))
        rho = float(rng.uniform(0.5, 3.0))
        b = radial_bounds("static", q, rho)
        assert b.r_min == pytest.approx(-rho * lambert_w0(-q), rel=1e-12)
        assert b.r_max == pytest.approx(-rho * lambert_wm1(-q), rel=1e-12)


# ----------------------------------------------------------------------
# Bifurcation scan
# ----------------------------------------------------------------------

def test_bifurcation_scan_finds_rho_e():
    got = bifurcation_scan(2.0, 4.0, 7.0)
    assert got == pytest.approx(2.0 * math.e, abs=1e-6)
    got = bifurcation_scan(1.0, 2.0, 4.0)
    assert got == pytest.approx(math.e, abs=1e-6)


def test_bifurcation_scan_no_transition():
    with pytest.raises(NoTransitionError):
        bifurcation_scan(2.0, 6.0, 7.0)  # already above threshold everywhere
    with pytest.raises(ValueError):
        bifurcation_scan(2.0, 7.0, 6.0)
    with pytest.raises(ValueError):
        bifurcation_scan(2.0, 4.0, 7.0, step=0.0)


# ----------------------------------------------------------------------
# Convergence taxonomy
# ----------------------------------------------------------------------

def test_classify_unconditional_kinds():
    init = PolarState(r=4.0, eta=0.0, psi=math.pi / 2)
    assert classify_convergence("static", 2.0, 6.5, init) == "unconditional"
    assert classify_convergence("inverse", 2.0, 5.8, init) == "unconditional"


def test_classify_proportional_cases():
    trapped = PolarState(r=4.0, eta=0.0, psi=math.pi / 2)  # |Q| = 11.58 > 10.00
    assert classify_convergence(
        "proportional", 2.0, 6.5, trapped) == "conditional_bounded"
    leaking = PolarState(r=4.0, eta=0.0, psi=0.4)  # |Q| below the critical level
    assert classify_convergence(
        "proportional", 2.0, 6.5, leaking) == "conditional_unbounded"
    outside = SimpleNamespace(r=20.0, psi=math.pi / 2)  # beyond the saddle
    assert classify_convergence(
        "proportional", 2.0, 6.5, outside) == "conditional_unbounded"
    assert classify_convergence(
        "proportional", 2.0, 5.4, trapped) == "divergent"


def test_classify_indeterminate_cases():
    # ell within tolerance of the threshold
    init = SimpleNamespace(r=4.0, psi=math.pi / 2)
    assert classify_convergence(
        "proportional", 2.0, 2.0 * math.e + 1e-12, init) == "indeterminate"
    # |Q| exactly on the separatrix level
    q_cr = critical_q(2.0, 6.5)
    h5 = float(radial_envelope("proportional", 5.0, 2.0, 6.5))
    on_separatrix = SimpleNamespace(r=5.0, psi=math.asin(q_cr / h5))
    assert classify_convergence(
        "proportional", 2.0, 6.5, on_separatrix) == "indeterminate"


# ----------------------------------------------------------------------
# Portrait reports
# ----------------------------------------------------------------------

def test_portrait_static():
    rep = portrait("static", 2.0, 6.5)
    assert rep.classification == "unconditional"
    assert rep.q_critical is None and rep.separatrix_q is None
    assert len(rep.fixed_points) == 2
    assert np.isfinite(rep.q_grid).all()
    assert rep.q_grid.shape == (121, 121)


def test_portrait_proportional_and_writers(tmp_path):
    rep = portrait("proportional", 2.0, 6.5,
                   grid=PortraitGrid(nu=41, nw=41))
    assert rep.classification == "conditional"
    assert rep.q_critical == pytest.approx(10.003585736854543, abs=1e-9)
    assert sorted(rep.separatrix_q) == pytest.approx(
        [-rep.q_critical, rep.q_critical])
    json_path = tmp_path / "report.json"
    rep.write_json(json_path)
    payload = json.loads(json_path.read_text())
    assert payload["kind"] == "proportional"
    assert len(payload["fixed_points"]) == 4  # two radii, psi = +/- pi/2 each
    assert payload["grid"]["nu"] == 41
    csv_path = tmp_path / "grid.csv"
    rep.write_grid_csv(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "r_cos_psi,r_sin_psi,Q"
    assert len(lines) == 1 + 41 * 41
    # Q vanishes along sin(psi) = 0; the grid row nearest w = 0 must be tiny
    w0_rows = [ln for ln in lines[1:] if abs(float(ln.split(",")[1])) < 1e-12]
    assert w0_rows and all(abs(float(ln.split(",")[2])) < 1e-12 for ln in w0_rows)


def test_portrait_grid_validation():
    with pytest.raises(ValueError):
        PortraitGrid(u_min=5.0, u_max=-5.0)
    with pytest.raises(ValueError):
        PortraitGrid(nu=1)
