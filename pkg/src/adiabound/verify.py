"""Property suite: numerical checks of the bound machinery against oracles.

Each check returns a :class:`CheckResult` with the measured quantity and
the threshold it was compared to.
"""

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .bounds import at_bound_constant, bauer_fike_delta, sin_theta_delta
from .dynamics import (
    IntegratorConfig,
    berry_connection,
    commuting_noise_check,
    counter_adiabatic_schedule,
    evolve_direct,
    evolve_rotating_frame,
    ground_error,
    projector_derivative,
    required_steps,
)
from .models import (
    FluxQubitModel,
    TongModel,
    flux_drift,
    tong_exact_error,
    tong_exact_unitary,
    tong_rotating_frame_provider,
    tong_schedule,
)
from .schedule import HamiltonianSchedule, default_grid, derivative_norm_bounds, schedule_spectra
from .spectral import (
    SIGMA_X,
    SIGMA_Z,
    gap_profile,
    ground_projector,
    operator_two_norm,
    projector_distance,
)

CD_OVERSAMPLE = 16
# bound margins here are O(0.1), far above this integration error
LOOSE = IntegratorConfig(rel_tol=1e-7, abs_tol=1e-10)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


@dataclass(frozen=True)
class RandomTwoLevel:
    """``a(s) sigma_x + b(s) sigma_z`` with ``a >= a0 / 2 > 0`` so the gap stays open."""

    a0: float
    a1: float
    fa: float
    pa: float
    b0: float
    b1: float
    b2: float
    fb: float

    @classmethod
    def draw(cls, rng):
        a0 = rng.uniform(1.5, 3.0)
        return cls(
            a0=a0, a1=rng.uniform(-0.5, 0.5) * a0, fa=rng.uniform(0.25, 1.5), pa=rng.uniform(0, 2 * np.pi),
            b0=rng.uniform(-2, 2), b1=rng.uniform(-3, 3), b2=rng.uniform(-1, 1), fb=rng.uniform(0.25, 1.5),
        )

    def coefficients(self, s):
        wa, wb = 2 * np.pi * self.fa, 2 * np.pi * self.fb
        a = self.a0 + self.a1 * np.sin(wa * s + self.pa)
        da = self.a1 * wa * np.cos(wa * s + self.pa)
        d2a = -self.a1 * wa**2 * np.sin(wa * s + self.pa)
        b = self.b0 + self.b1 * s + self.b2 * np.sin(wb * s)
        db = self.b1 + self.b2 * wb * np.cos(wb * s)
        d2b = -self.b2 * wb**2 * np.sin(wb * s)
        return (a, da, d2a), (b, db, d2b)

    def schedule(self) -> HamiltonianSchedule:
        def mk(k):
            def fn(s):
                a, b = self.coefficients(s)
                return a[k] * SIGMA_X + b[k] * SIGMA_Z

            return fn

        return HamiltonianSchedule(2, mk(0), mk(1), mk(2), name="random-two-level")

    def provider(self, tau):
        def fn(t):
            (a, da, _), (b, db, _) = self.coefficients(np.asarray(t, dtype=float) / tau)
            return a, b, da / tau, db / tau

        return fn


def check_intertwining(tau=0.001) -> CheckResult:
    drift = flux_drift(FluxQubitModel())
    ha = counter_adiabatic_schedule(drift, tau)
    U = evolve_direct(ha, tau, CD_OVERSAMPLE * required_steps(ha, tau))
    err = ground_error(drift, U)
    return CheckResult("intertwining", err <= 1e-6, err, 1e-6, f"flux drift under H_A, tau={tau}")


def _noise_fn(t):
    return 0.3 * np.sin(7.0 * t) + 0.2 * np.cos(2.3 * t + 0.4)


def _field_fn(s):
    return 1.0 + 0.5 * s


def check_commuting_noise(tau=5.0) -> CheckResult:
    err = commuting_noise_check(_field_fn, _noise_fn, tau, "z")
    return CheckResult("commuting-noise", err <= 1e-10, err, 1e-10, f"sigma_z noise, tau={tau}")


def check_noncommuting_control(tau=5.0) -> CheckResult:
    err = commuting_noise_check(_field_fn, _noise_fn, tau, "x")
    return CheckResult("noncommuting-control", err > 1e-4, err, 1e-4, f"sigma_x noise, tau={tau}")


def _pdot_margin(schedule, grid):
    """Smallest ``2 D b1(s) / gamma(s) - ||P'(s)||`` (D = 1 for a single level)."""
    worst = np.inf
    for s in grid:
        ev = np.linalg.eigvalsh(schedule.matrix(s))
        gamma = ev[1] - ev[0]
        b1 = operator_two_norm(schedule.derivative(s))
        lhs = operator_two_norm(projector_derivative(schedule, s))
        worst = min(worst, 2.0 * b1 / gamma - lhs)
    return worst


def check_pdot_inequality(count=50, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    grid = np.linspace(0, 1, 101)
    worst = min(_pdot_margin(RandomTwoLevel.draw(rng).schedule(), grid) for _ in range(count))
    worst = min(worst, _pdot_margin(flux_drift(FluxQubitModel()), grid))
    return CheckResult("pdot-inequality", worst >= 0, worst, 0.0, f"{count} random schedules + flux drift")


def _delta_triple(rng, dim=2):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h0 = (m + m.conj().T) / 2
    p = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    pert = (p + p.conj().T) / 2
    ev = np.linalg.eigvalsh(h0)
    gap = ev[1] - ev[0]
    norm = operator_two_norm(pert)
    pert *= rng.uniform(0.01, 0.45) * gap / norm
    norm = operator_two_norm(pert)
    exact = projector_distance(ground_projector(h0), ground_projector(h0 + pert))
    ev_pert = np.linalg.eigvalsh(h0 + pert)
    return exact, sin_theta_delta(norm, ev[1] - ev_pert[0]), bauer_fike_delta(norm, gap)


def check_delta_ordering(count=50, seed=1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = np.inf
    for i in range(count):
        e, st, bf = _delta_triple(rng, 2 + i % 3)
        worst = min(worst, st - e, bf - st)
    return CheckResult("delta-ordering", worst >= -1e-15, worst, 0.0, "exact <= sin-theta <= Bauer-Fike")


def check_random_bound_validity(count=50, seed=2) -> CheckResult:
    """Simulated error below the constant-form bound on random schedules."""
    rng = np.random.default_rng(seed)
    grid = default_grid()
    worst = np.inf
    for _ in range(count):
        model = RandomTwoLevel.draw(rng)
        sched = model.schedule()
        db = derivative_norm_bounds(sched, grid)
        gamma = gap_profile(schedule_spectra(sched, grid), s=grid).gamma_min
        # run long enough that the bound is informative
        probe = at_bound_constant(db.b1, db.b2, gamma, 1.0, 1.0).raw
        tau = max(1.0, 2.0 * probe)
        bound = at_bound_constant(db.b1, db.b2, gamma, 1.0, tau).value
        err = evolve_rotating_frame(model.provider(tau), tau, LOOSE).final_error
        worst = min(worst, bound - err)
    return CheckResult("random-bound-validity", worst >= 0, worst, 0.0, f"{count} schedules")


def check_tong_oracle() -> CheckResult:
    model = TongModel()
    worst = 0.0
    for tau in (1.0, 10.0, 50.0):
        ts = np.linspace(0.1, 1.0, 10) * tau
        traj = evolve_rotating_frame(tong_rotating_frame_provider(model), tau, t_eval=ts)
        worst = max(worst, max(abs(traj.error_at(t) - tong_exact_error(model, t)) for t in ts))
    return CheckResult("tong-rotating-frame", worst <= 1e-6, worst, 1e-6, "tau in {1, 10, 50}")


def check_tong_direct(tau=2.0) -> CheckResult:
    model = TongModel()
    sched = tong_schedule(model, tau)
    U = evolve_direct(sched, tau, 4 * required_steps(sched, tau))
    dev = float(np.max(np.abs(U - tong_exact_unitary(model, tau))))
    return CheckResult("tong-direct", dev <= 1e-8, dev, 1e-8, f"tau={tau}")


def check_berry_phase(seed=3) -> CheckResult:
    rng = np.random.default_rng(seed)
    model = RandomTwoLevel.draw(rng)

    def theta(s):
        (a, _, _), (b, _, _) = model.coefficients(s)
        return np.arctan2(a, b)

    worst = max(berry_connection(theta, s) for s in np.linspace(0.05, 0.95, 19))
    return CheckResult("zero-berry-connection", worst <= 1e-10, worst, 1e-10, "real rotating basis")


SUITE: List[Callable[[], CheckResult]] = [
    check_intertwining,
    check_commuting_noise,
    check_noncommuting_control,
    check_pdot_inequality,
    check_delta_ordering,
    check_random_bound_validity,
    check_tong_oracle,
    check_tong_direct,
    check_berry_phase,
]


def run_suite() -> List[CheckResult]:
    return [check() for check in SUITE]
