"""Model assembly, bound tables and simulation sweeps shared by the CLI and tests."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import bounds
from .bounds import BoundResult, EndpointOverlaps
from .config import RunConfig
from .dynamics import IntegratorConfig, evolve_rotating_frame
from .errors import AdiaboundError
from .models import (
    FluxAmplitudes,
    FluxQubitModel,
    TongModel,
    flux_bound_inputs,
    flux_drift,
    flux_provider,
    tong_bound_inputs,
    tong_exact_error,
    tong_rotating_frame_provider,
)
from .noise import amplitude_bounds
from .schedule import HamiltonianSchedule, default_grid, derivative_norm_bounds, schedule_spectra
from .spectral import SIGMA_X, SIGMA_Z, gap_profile


@dataclass(frozen=True)
class CustomModel:
    """Two-level drift ``a(s) sigma_x + b(s) sigma_z`` from a cubic-spline table."""

    s: tuple
    a: tuple
    b: tuple

    def splines(self):
        return CubicSpline(self.s, self.a), CubicSpline(self.s, self.b)


def custom_schedule(model: CustomModel) -> HamiltonianSchedule:
    sa, sb = model.splines()
    da, db = sa.derivative(), sb.derivative()
    d2a, d2b = da.derivative(), db.derivative()

    def mk(fa, fb):
        return lambda s: float(fa(s)) * SIGMA_X + float(fb(s)) * SIGMA_Z

    return HamiltonianSchedule(2, mk(sa, sb), mk(da, db), mk(d2a, d2b), name="custom")


def custom_provider(model: CustomModel, tau: float):
    sa, sb = model.splines()
    da, db = sa.derivative(), sb.derivative()

    def provider(t):
        s = np.asarray(t, dtype=float) / tau
        return sa(s), sb(s), da(s) / tau, db(s) / tau

    return provider


def build_model(config: RunConfig, seed: Optional[int] = None):
    spec = config.model
    if spec.kind == "tong":
        return TongModel(**spec.tong.model_dump())
    if spec.kind == "custom":
        t = spec.custom
        return CustomModel(tuple(t.s), tuple(t.a), tuple(t.b))
    model = FluxQubitModel(**spec.flux.model_dump())
    if config.noise is not None and seed is not None:
        nz = config.noise
        model = model.with_noise(nz.C, nz.n, nz.nu_min_mhz, nz.nu_max_mhz, seed)
    return model


def seeds_for(config: RunConfig) -> List[Optional[int]]:
    return list(config.noise.seeds) if config.noise is not None else [None]


@lru_cache(maxsize=64)
def _calibrate(C, n, nu_min, nu_max, seed, window, samples):
    model = FluxQubitModel().with_noise(C, n, nu_min, nu_max, seed)
    b1 = amplitude_bounds(model.noise1, window, samples)
    b2 = amplitude_bounds(model.noise2, window, samples)
    return b1, b2


def calibrate(config: RunConfig, seed: int):
    """Amplitude bounds of N1 and N2 for one seed (memoized per process)."""
    nz = config.noise
    return _calibrate(nz.C, nz.n, nz.nu_min_mhz, nz.nu_max_mhz, seed, nz.window, nz.samples)


def flux_amplitudes(config: RunConfig, seed: Optional[int]) -> Optional[FluxAmplitudes]:
    if config.amplitudes is not None:
        a = config.amplitudes
        return FluxAmplitudes(a.sup_dN, a.sup_d2N, a.sup_N)
    if config.noise is not None and seed is not None:
        return FluxAmplitudes.from_calibration(*calibrate(config, seed))
    return None


def bound_for(config: RunConfig, model, tau: float, seed: Optional[int] = None, grid=None) -> BoundResult:
    """The applicable bound for ``model`` at run time ``tau``."""
    if isinstance(model, TongModel):
        inp = tong_bound_inputs(model)
        return bounds.at_noise_bound(inp.two_scale, inp.gamma_bar, inp.overlaps, tau)
    if isinstance(model, FluxQubitModel):
        overlaps = None
        if config.overlaps is not None:
            overlaps = EndpointOverlaps(config.overlaps.delta0, config.overlaps.delta1, "exact-projector")
        inp = flux_bound_inputs(model, flux_amplitudes(config, seed), overlaps, tau=tau)
        return bounds.at_noise_bound(inp.two_scale, inp.gamma_bar, inp.overlaps, tau)
    sched = custom_schedule(model)
    grid = default_grid(config.grid.points) if grid is None else grid
    db = derivative_norm_bounds(sched, grid)
    prof = gap_profile(schedule_spectra(sched, grid), s=grid)
    return bounds.at_bound_constant(db.b1, db.b2, prof.gamma_min, 1.0, tau)


def provider_for(model, tau):
    if isinstance(model, TongModel):
        return tong_rotating_frame_provider(model)
    if isinstance(model, FluxQubitModel):
        return flux_provider(model, tau)
    return custom_provider(model, tau)


def integrator_config(config: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(**config.integrator.model_dump())


def bound_row(config: RunConfig, tau: float, seed: Optional[int]) -> dict:
    model = build_model(config, seed)
    res = bound_for(config, model, tau, seed)
    t = res.terms
    return {
        "tau": tau,
        "seed": seed,
        "bound": res.value,
        "raw": res.raw,
        "tau_coeff": t.tau_linear_coeff,
        "constant": t.constant_term,
        "inv_tau_coeff": t.inv_tau_coeff,
        "endpoint": t.endpoint_term,
    }


def simulate_row(config: RunConfig, tau: float, seed: Optional[int]) -> dict:
    """One trajectory; failures are reported in the row rather than raised."""
    row = {"tau": tau, "seed": seed, "error": None, "bound": None, "exact": None,
           "steps": None, "rejected": None, "status": "ok"}
    try:
        model = build_model(config, seed)
        row["bound"] = bound_for(config, model, tau, seed).value
        traj = evolve_rotating_frame(provider_for(model, tau), tau, integrator_config(config))
        row["error"] = traj.final_error
        row["steps"] = traj.diagnostics["steps"]
        row["rejected"] = traj.diagnostics["rejected"]
        if isinstance(model, TongModel):
            row["exact"] = tong_exact_error(model, tau)
    except (AdiaboundError, ArithmeticError) as err:
        row["status"] = f"{type(err).__name__}: {err}"
    return row


def _task(args):
    kind, config, tau, seed = args
    return (simulate_row if kind == "simulate" else bound_row)(config, tau, seed)


def sweep(kind: str, config: RunConfig, parallel: int = 1) -> List[dict]:
    """Rows for every ``(tau, seed)`` pair, in deterministic order."""
    tasks = [(kind, config, tau, seed) for tau in config.tau_values for seed in seeds_for(config)]
    if parallel > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_task, tasks))
    return [_task(t) for t in tasks]


def calibration_report(config: RunConfig, seed: int) -> List[dict]:
    """Sampled and analytic noise suprema plus the bound inputs they imply."""
    model = build_model(config, seed)
    b1, b2 = calibrate(config, seed)
    rows = []
    for name, b in (("N1", b1), ("N2", b2)):
        for q in ("sup_N", "sup_dN", "sup_d2N", "cap_N", "cap_dN", "cap_d2N"):
            rows.append({"seed": seed, "quantity": f"{name}.{q}", "value": getattr(b, q)})
    inp = flux_bound_inputs(model, FluxAmplitudes.from_calibration(b1, b2))
    A, B, C = bounds.noise_coefficients(inp.two_scale, inp.gamma_bar)
    extra = [
        ("c1", inp.two_scale.c1), ("c2", inp.two_scale.c2),
        ("d1", inp.two_scale.d1), ("d2", inp.two_scale.d2),
        ("gamma_bar", inp.gamma_bar),
        ("delta0", inp.overlaps.delta0), ("delta1", inp.overlaps.delta1),
        ("A_tau_coeff", A), ("B_constant", B + inp.overlaps.endpoint_term), ("C_inv_tau_coeff", C),
    ]
    rows.extend({"seed": seed, "quantity": k, "value": v} for k, v in extra)
    return rows
