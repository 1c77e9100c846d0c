"""Acceptance gate: one test per shipped criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion. Every test asserts both its numeric tolerance and its wall
clock budget, so a plain `pytest` run enforces the same gate silently.
"""

import math
import time

import numpy as np
import pytest

from phaseseek import (
    BundleFormatError,
    GainLaw,
    GridFieldBundle,
    PolarState,
    RadialField,
    SensingConfig,
    bifurcation_scan,
    classify_convergence,
    closed_form_eigenvalues,
    critical_q,
    fixed_points,
    from_polar,
    jacobian_eigenvalues,
    load_bundle,
    radial_m_field,
    save_bundle,
    simulate,
    simulate_polar,
    spectral_grids,
    spectral_sample,
    synth_wake,
    wrap_angle,
)
from phaseseek.wake import MAGIC, VERSION, _HEADER


def _verdict(num, label, ok, elapsed, limit, detail=""):
    status = "PASS" if (ok and elapsed <= limit) else "FAIL"
    extra = f"; {detail}" if detail else ""
    print(f"[criterion {num}] {label}: {status} "
          f"({elapsed:.2f} s / limit {limit:g} s{extra})")
    assert ok, f"criterion {num} ({label}): {detail}"
    assert elapsed <= limit, (
        f"criterion {num} ({label}) took {elapsed:.2f} s, limit {limit:g} s")


def test_criterion_1_static_fixed_points():
    t0 = time.perf_counter()
    fps = fixed_points("static", 2.0)
    r_err = max(abs(fp.r_star - 2.0) for fp in fps)
    eig_err = max(
        max(abs(ev.real), abs(abs(ev.imag) - 0.5))
        for fp in fps for ev in fp.eigenvalues
    )
    ok = len(fps) == 2 and r_err < 1e-10 and eig_err < 1e-10
    _verdict(1, "static fixed points at r = rho with eigenvalues +/- i V/rho",
             ok, time.perf_counter() - t0, 1.0,
             f"r err {r_err:.2e}, eig err {eig_err:.2e}")


def test_criterion_2_bifurcation_scan():
    t0 = time.perf_counter()
    worst = 0.0
    for rho in (0.5, 1.0, 2.0, 3.0):
        ell_c = rho * math.e
        got = bifurcation_scan(rho, 0.6 * ell_c, 1.5 * ell_c)
        worst = max(worst, abs(got - ell_c))
    _verdict(2, "saddle-node threshold found at ell = rho e",
             worst < 1e-6, time.perf_counter() - t0, 10.0,
             f"worst |scan - rho e| = {worst:.2e}")


def test_criterion_3_q_conservation():
    cases = (
        ("static", 6.5, PolarState(r=4.0, eta=0.0, psi=math.pi / 2)),
        ("proportional", 6.5, PolarState(r=4.0, eta=0.0, psi=math.pi / 2)),
        ("inverse", 5.8, PolarState(r=3.0, eta=0.0, psi=math.pi / 2)),
    )
    drifts = []
    for kind, ell, init in cases:
        t0 = time.perf_counter()
        tr = simulate(from_polar(init), RadialField(ell),
                      GainLaw(kind, 0.5), dt=1e-3, t_end=100.0)
        drift = tr.q_drift()
        drifts.append(f"{kind} {drift:.2e}")
        _verdict(3, f"relative Q drift under {kind} gain over t = 100",
                 tr.termination == "t_end" and drift < 1e-8,
                 time.perf_counter() - t0, 30.0, f"drift {drift:.2e}")


def test_criterion_4_static_orbit_annulus():
    t0 = time.perf_counter()
    init = from_polar(PolarState(r=4.0, eta=0.0, psi=math.pi / 2))
    tr = simulate(init, RadialField(6.5), GainLaw("static", 0.5),
                  dt=1e-3, t_end=30.0)
    r_min, r_max = float(tr.r.min()), float(tr.r.max())
    ok = abs(r_min - 0.8128) < 1e-3 and abs(r_max - 4.000) < 1e-3
    _verdict(4, "static orbit breathes between the predicted turning radii",
             ok, time.perf_counter() - t0, 10.0,
             f"r in [{r_min:.4f}, {r_max:.4f}]")


def test_criterion_5_convergence_taxonomy():
    t0 = time.perf_counter()
    q_cr = critical_q(2.0, 6.5)
    ok = abs(q_cr - 10.003585736854543) < 1e-9 and abs(q_cr - 10.00) < 0.01

    regimes = (
        ("static", 6.5, (1.5, 5.0), (0.9, math.pi - 0.9), {"unconditional"}),
        ("proportional", 6.5, (1.0, 10.0), (0.1, math.pi - 0.1),
         {"conditional_bounded", "conditional_unbounded"}),
        ("proportional", 5.4, (1.0, 8.0), (0.3, math.pi - 0.3), {"divergent"}),
        ("inverse", 5.8, (1.0, 4.0), (0.9, math.pi - 0.9), {"unconditional"}),
    )
    rng = np.random.default_rng(7)
    checked = disagreements = 0
    for kind, ell, r_band, psi_band, allowed in regimes:
        law = GainLaw(kind, 0.5)
        m_field = radial_m_field(ell)
        for _ in range(20):
            r = float(rng.uniform(*r_band))
            psi = float(rng.uniform(*psi_band))
            if rng.random() < 0.5:
                psi = -psi
            init = PolarState(r=r, eta=0.0, psi=psi)
            label = classify_convergence(kind, 2.0, ell, init)
            if label == "indeterminate":
                continue
            ok = ok and label in allowed
            tr = simulate_polar(init, None, law, m_field, 1e-2, 600.0,
                                r_escape=50.0)
            trapped_predicted = label in ("unconditional",
                                          "conditional_bounded")
            trapped_observed = tr.termination == "t_end"
            checked += 1
            if trapped_predicted != trapped_observed:
                disagreements += 1
    ok = ok and checked >= 75 and disagreements == 0
    _verdict(5, "convergence taxonomy agrees with long closed-loop runs",
             ok, time.perf_counter() - t0, 120.0,
             f"|Q_cr| = {q_cr:.4f}, {checked} runs, "
             f"{disagreements} disagreements")


def test_criterion_6_windowed_sensing_fidelity():
    t0 = time.perf_counter()
    field = RadialField(6.5)
    cfg = SensingConfig(n_samples=64, stencil_h=0.01)
    rng = np.random.default_rng(99)
    worst_m = worst_phi = worst_dir = 0.0
    for _ in range(100):
        r = float(rng.uniform(0.5, 30.0))
        ang = float(rng.uniform(0.0, 2.0 * math.pi))
        x = (r * math.cos(ang), r * math.sin(ang))
        t_start = float(rng.uniform(0.0, 10.0))
        sample = spectral_sample(field, x, t_start,
                                 float(rng.uniform(-math.pi, math.pi)), cfg)
        truth = field.analytic_spectra(x)
        worst_m = max(worst_m, abs(sample.m - truth.m))
        worst_phi = max(worst_phi, abs(wrap_angle(sample.phi - truth.phi)))
        got_dir = math.atan2(sample.grad_phi[1], sample.grad_phi[0])
        true_dir = math.atan2(truth.grad_phi[1], truth.grad_phi[0])
        worst_dir = max(worst_dir, abs(wrap_angle(got_dir - true_dir)))
    ok = worst_m < 1e-10 and worst_phi < 1e-10 and worst_dir < 1e-3
    _verdict(6, "windowed estimator reproduces magnitude, phase, direction",
             ok, time.perf_counter() - t0, 1.0,
             f"m {worst_m:.1e}, phi {worst_phi:.1e}, dir {worst_dir:.1e} rad")


def test_criterion_7_eigenvalue_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(17)
    worst = 0.0
    pairs = 0
    while pairs < 50:
        rho = float(rng.uniform(0.5, 3.0))
        kind = ("static", "proportional", "inverse")[int(rng.integers(3))]
        if kind == "proportional":
            ell = float(rng.uniform(rho * math.e + 0.2, rho * math.e + 8.0))
        else:
            ell = float(rng.uniform(1.0, 9.0))
        fps = fixed_points(kind, rho, ell)
        if not fps:
            continue
        pairs += 1
        for fp in fps:
            closed = closed_form_eigenvalues(kind, fp.r_star, rho, ell)
            numerical = jacobian_eigenvalues(kind, fp, rho, ell)
            for c, n in zip(closed, numerical):
                worst = max(worst, abs(abs(c) - abs(n)))
    _verdict(7, "closed-form eigenvalues match the numerical Jacobian",
             worst < 1e-6, time.perf_counter() - t0, 5.0,
             f"worst magnitude gap {worst:.2e} over {pairs} parameter draws")


def test_criterion_8_wake_pipeline():
    t0 = time.perf_counter()
    bundle = synth_wake()
    grids = spectral_grids(bundle, source=(0.0, 0.0))
    xs, ys = grids.x, grids.y
    inside = xs >= bundle.dx
    m_true = (np.exp(-ys[:, None] ** 2 / 8.0)
              * np.exp(-xs[None, :] / 10.0))[:, inside]
    m_err = float(np.max(np.abs(grids.m_grid[:, inside] - m_true)))
    phi_true = (-xs[inside]) % (2.0 * math.pi)
    phi_err = float(np.max(np.abs(
        wrap_angle(grids.phi_grid[:, inside] - phi_true[None, :]))))

    field_ok = m_err < 1e-6 and phi_err < 1e-6

    from phaseseek import AgentState, field_from_bundle
    field = field_from_bundle(bundle)
    with pytest.warns(UserWarning):
        tr = simulate(AgentState(8.0, 0.0, math.pi), field,
                      GainLaw("proportional", 0.5), dt=5e-3, t_end=40.0,
                      r_stop=0.5, sensing="windowed")
    seek_ok = tr.termination == "reached_source"
    _verdict(8, "wake maps match closed form and the seeker reaches home",
             field_ok and seek_ok, time.perf_counter() - t0, 60.0,
             f"m err {m_err:.1e}, phi err {phi_err:.1e}, "
             f"arrival t = {tr.t[-1]:.2f} ({tr.termination})")


def test_criterion_9_bundle_roundtrip(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    ok = True
    for i in range(20):
        nx, ny, nt = (int(rng.integers(2, 12)), int(rng.integers(2, 12)),
                      int(rng.integers(8, 24)))
        bundle = GridFieldBundle(
            nx=nx, ny=ny, nt=nt,
            x0=float(rng.normal()), y0=float(rng.normal()),
            dx=float(rng.uniform(0.05, 0.5)),
            dy=float(rng.uniform(0.05, 0.5)),
            dt=float(rng.uniform(0.01, 0.4)),
            frames=rng.normal(size=(nt, ny, nx)),
            meta_re=None if i % 2 else float(rng.normal()),
        )
        path = tmp_path / f"b{i}.wavf"
        save_bundle(bundle, path)
        back = load_bundle(path)
        path2 = tmp_path / f"b{i}2.wavf"
        save_bundle(back, path2)
        ok = ok and path.read_bytes() == path2.read_bytes()
        ok = ok and back.frames.tobytes() == bundle.frames.tobytes()

    rejected = 0
    good = (MAGIC + bytes([VERSION])
            + _HEADER.pack(4, 4, 8, 0.0, 0.0, 0.2, 0.2, 0.1,
                           math.nan, math.nan, math.nan)
            + b"\0" * (8 * 4 * 4 * 8))
    for bad in (b"WAVG" + good[4:],            # wrong magic
                MAGIC + bytes([9]) + good[5:],  # wrong version
                good[:-16]):                    # torn payload
        path = tmp_path / "bad.wavf"
        path.write_bytes(bad)
        try:
            load_bundle(path)
        except BundleFormatError:
            rejected += 1
    _verdict(9, "bundle files round-trip bit exactly and reject corruption",
             ok and rejected == 3, time.perf_counter() - t0, 1.0,
             f"20 round-trips, {rejected}/3 malformed rejected")
