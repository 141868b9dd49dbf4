"""Acceptance criteria 1-10, one PASS/FAIL line each at the stated tolerances."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from adiabound import bounds, pipeline, verify
from adiabound.config import load_config
from adiabound.models import (
    REFERENCE_AMPLITUDES,
    REFERENCE_NOISE,
    REFERENCE_OVERLAPS,
    FluxQubitModel,
    TongModel,
    coupling_factor_from_bounds,
    flux_bound_inputs,
    tong_bound_inputs,
    tong_exact_error,
)
from adiabound.noise import OneOverFNoise, amplitude_bounds, periodogram

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_01_tong_bound(report):
    inp = tong_bound_inputs(TongModel())
    taus = np.array([0.5, 1.0, 5.0, 10.0, 20.0])
    chi = np.array([bounds.at_noise_bound(inp.two_scale, inp.gamma_bar, inp.overlaps, t).value for t in taus])
    slope, const = np.polyfit(taus, chi, 1)
    resid = float(np.max(np.abs(chi - (0.00900025 + 0.04 * taus))))
    const_ok = abs(const - 0.00900025) <= 1e-6
    slope_ok = abs(slope - 0.04) / 0.04 <= 1e-6
    ok = report(
        1, const_ok and slope_ok,
        f"constant {const:.9f} (target 0.00900025), slope {slope:.9f} (target 0.04, "
        f"rel dev {abs(slope - 0.04) / 0.04:.2e}), max |chi - target| {resid:.2e}",
    )
    assert ok


def test_02_tong_exact_error(report):
    model = TongModel()
    rng = np.random.default_rng(0)
    s = rng.uniform(0, 1, 100)
    tau = rng.uniform(0.1, 500.0, 100)
    dev = max(abs(tong_exact_error(model, si * ti) - abs(np.sin(0.005 * si * ti))) for si, ti in zip(s, tau))
    assert report(2, dev <= 1e-12, f"max |err - |sin(0.005 s tau)|| = {dev:.3e} (tol 1e-12)")


def test_03_rotating_frame_oracle(report):
    r = verify.check_tong_oracle()
    assert report(3, r.passed, f"max deviation {r.measured:.3e} (tol 1e-6), {r.detail}")


def test_04_flux_coefficients(report):
    model = FluxQubitModel()
    inp = flux_bound_inputs(model, REFERENCE_AMPLITUDES, REFERENCE_OVERLAPS)
    A, B, C = bounds.noise_coefficients(inp.two_scale, inp.gamma_bar)
    end = inp.overlaps.endpoint_term
    got = (A, B + end, C)
    target = (1.9634, 0.0019, 0.0148)
    rel = [abs(g - t) / t for g, t in zip(got, target)]
    factor = coupling_factor_from_bounds(inp.two_scale.d1, REFERENCE_AMPLITUDES.sup_dN)
    ok = max(rel) <= 5e-3 and abs(end - 2.7e-6) <= 0.1e-6
    report(
        4, ok,
        f"c1 {inp.two_scale.c1:.1f}, (A, B, C) = ({A:.6f}, {B + end:.7f}, {C:.6f}), "
        f"rel dev ({rel[0]:.2e}, {rel[1]:.2e}, {rel[2]:.2e}) (tol 5e-3), "
        f"endpoint {end:.3e}, d1/sup_dN {factor:.4e}",
    )
    assert ok


@pytest.mark.slow
def test_05_bound_validity(report):
    quiet = pipeline.sweep("simulate", load_config(CONFIGS / "flux.yaml"))
    noisy = pipeline.sweep("simulate", load_config(CONFIGS / "flux_noise.yaml"))
    rows = quiet + noisy
    statuses = {r["status"] for r in rows}
    margin = min(r["bound"] - r["error"] for r in rows if r["status"] == "ok")
    ratio = max(r["error"] / r["bound"] for r in rows if r["status"] == "ok")
    ok = statuses == {"ok"} and len(quiet) == 10 and len(noisy) == 15 and margin >= 0
    report(
        5, ok,
        f"{len(quiet)} noiseless + {len(noisy)} noisy runs, min(bound - error) {margin:.3e}, "
        f"max error/bound {ratio:.2e}",
    )
    assert ok


def test_06_intertwining(report):
    r = verify.check_intertwining()
    assert report(6, r.passed, f"final error under H_A {r.measured:.3e} (tol 1e-6)")


def test_07_commuting_noise(report):
    null = verify.check_commuting_noise()
    control = verify.check_noncommuting_control()
    ok = null.passed and control.passed
    report(7, ok, f"sigma_z noise {null.measured:.3e} (<= 1e-10), sigma_x control {control.measured:.3e} (> 1e-4)")
    assert ok


def test_08_inequality_suite(report):
    pdot = verify.check_pdot_inequality(count=50)
    order = verify.check_delta_ordering(count=50)
    ok = pdot.passed and order.passed
    report(8, ok, f"min Pdot margin {pdot.measured:.3e}, min delta-ordering gap {order.measured:.3e} (50 schedules each)")
    assert ok


def _band_levels(nz, bands=10, window=10.0):
    dt = 1.0 / (4 * nz.nu_max)
    values = nz.sample_uniform(0.0, dt, int(round(window / dt)))[0]
    freqs, power = periodogram(values, dt)
    edges = np.linspace(nz.nu_min, nz.nu_max, bands + 1) + 0.5 * nz.delta_nu
    centres = 0.5 * (edges[1:] + edges[:-1])
    level = np.array([power[(freqs >= lo) & (freqs < hi)].sum() for lo, hi in zip(edges[:-1], edges[1:])])
    return level * centres / np.mean(level * centres)


def test_09_noise_calibration(report):
    sups, caps = [], []
    for seed in range(10):
        b = amplitude_bounds(OneOverFNoise.seeded(**REFERENCE_NOISE, seed=seed))
        sups.append(b.sup_N)
        caps.append(b.cap_N)
    sups = np.array(sups)
    ref = REFERENCE_AMPLITUDES.sup_N
    level = _band_levels(OneOverFNoise.seeded(**REFERENCE_NOISE, seed=0))
    cap_ok = bool(np.all(sups <= np.array(caps))) and abs(caps[0] - 1.83e-9) / 1.83e-9 < 0.01
    ref_ok = bool(np.all((sups >= ref / 4) & (sups <= 4 * ref)))
    spec_ok = bool(np.all((level >= 0.5) & (level <= 2.0)))
    ok = cap_ok and ref_ok and spec_ok
    report(
        9, ok,
        f"cap {caps[0]:.4e}, sup|N| over 10 seeds in [{sups.min():.3e}, {sups.max():.3e}] "
        f"(allowed [{ref / 4:.3e}, {4 * ref:.3e}]), band power*nu in [{level.min():.2f}, {level.max():.2f}]",
    )
    assert ok


def test_10_determinism(report, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        cmd = [sys.executable, "-m", "adiabound", "simulate", "--config", str(CONFIGS / "flux_noise.yaml"),
               "--seed", "11", "--tau", "0.002,0.01", "--out", str(path)]
        subprocess.run(cmd, check=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    assert report(10, ok, f"two CLI runs, {len(outs[0])} bytes each, identical: {outs[0] == outs[1]}")
