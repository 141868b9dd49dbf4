"""Two-level Schrodinger integration and propagation oracles.

The main integrator works in the instantaneous eigenbasis
``phi0 = (-sin th/2, cos th/2)``, ``phi1 = (cos th/2, sin th/2)`` of
``H = a sigma_x + b sigma_z`` with ``th = atan2(a, b)`` followed
continuously. This basis is real, so its Berry connection vanishes and the
amplitudes obey

    c0' = -c1 exp(-2 i Phi) th' / 2
    c1' = +c0 exp(+2 i Phi) th' / 2

with ``Phi(t) = int_0^t sqrt(a^2 + b^2)`` and
``th' = (a' b - a b') / (a^2 + b^2)``. Starting from the ground state,
``|c1(t)|`` is the adiabatic error.

``evolve_direct`` is an independent oracle: a product of midpoint-rule
matrix exponentials in the lab frame.
"""

import bisect
import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    DimensionError,
    IntegrationError,
    StepCriterionError,
    ValidationError,
)
from .schedule import FD_STEP, HamiltonianSchedule
from .spectral import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    IDENTITY_2,
    eigendecompose,
    operator_two_norm,
    subspace_projector,
)

# Gauss-Kronrod 7-15 on [-1, 1]: Kronrod nodes (nonnegative half, descending)
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for nodes _XK[1], _XK[3], _XK[5], _XK[7]
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
GK_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_G_IDX = np.array([1, 3, 5, 9, 11, 13, 7])
GAUSS_WEIGHTS = np.concatenate([_WG[:3], _WG[:3][::-1], _WG[3:]])

PHASE_RTOL = 1e-12
PHASE_ATOL = 1e-15
MAX_BISECTIONS = 40

# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

DIRECT_STEP_LIMIT = 0.01


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: Optional[float] = None
    initial_step: Optional[float] = None
    max_steps: int = 5_000_000
    safety: float = 0.9

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.max_step is not None and not self.max_step > 0:
            raise ValidationError("max_step must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValidationError("initial_step must be positive")


def _gk15(f, lo, hi):
    """GK15 estimate and error on each row of ``(lo, hi)`` arrays."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * GK_NODES
    y = f(x)
    k = half * (y @ GK_WEIGHTS)
    g = half * (y[:, _G_IDX] @ GAUSS_WEIGHTS)
    return k, np.abs(k - g)


def _adaptive_gk(f, lo, hi):
    """Integral of f over ``[lo, hi]`` to ``PHASE_RTOL`` by recursive bisection."""
    total = 0.0
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        k, err = _gk15(f, np.array([a]), np.array([b]))
        if err[0] <= PHASE_RTOL * abs(k[0]) + PHASE_ATOL or depth >= MAX_BISECTIONS:
            total += k[0]
        else:
            m = 0.5 * (a + b)
            stack.append((a, m, depth + 1))
            stack.append((m, b, depth + 1))
    return total


class PhaseCache:
    """Checkpoints of ``Phi(t) = int_0^t r`` at accepted step ends.

    New values are integrated only from the last committed checkpoint, so
    the cost per step does not grow with t. Rejected steps never commit,
    and :meth:`truncate` drops checkpoints beyond a time.
    """

    def __init__(self, rate: Callable):
        self.rate = rate
        self.times = [0.0]
        self.values = [0.0]

    @property
    def last(self):
        return self.times[-1], self.values[-1]

    def segments(self, t0, ends):
        """Phases at increasing ``ends`` starting from a committed ``t0``."""
        ends = np.asarray(ends, dtype=float)
        lo = np.concatenate([[t0], ends[:-1]])
        half = 0.5 * (ends - lo)
        x = 0.5 * (lo + ends)[:, None] + half[:, None] * GK_NODES
        return self.integrate(t0, lo, ends, self.rate(x))

    def integrate(self, t0, lo, hi, y):
        """Like :meth:`segments` with the rate already sampled at the GK nodes.

        One GK15 pass over consecutive subintervals ``[lo_j, hi_j]``; any
        subinterval that misses the tolerance is refined adaptively.
        """
        i = bisect.bisect_left(self.times, t0)
        if i == len(self.times) or self.times[i] != t0:
            raise ValidationError(f"t0 = {t0} is not a checkpoint")
        half = 0.5 * (hi - lo)
        k = half * (y @ GK_WEIGHTS)
        err = np.abs(k - half * (y[:, _G_IDX] @ GAUSS_WEIGHTS))
        ends = hi
        bad = err > PHASE_RTOL * np.abs(k) + PHASE_ATOL
        for j in np.flatnonzero(bad):
            k[j] = _adaptive_gk(self.rate, lo[j], ends[j])
        return self.values[i] + np.cumsum(k)

    def commit(self, t, value):
        if t <= self.times[-1]:
            raise ValidationError("checkpoint times must increase")
        if value < self.values[-1]:
            raise ValidationError("phase must be nondecreasing")
        self.times.append(float(t))
        self.values.append(float(value))

    def truncate(self, t):
        """Drop checkpoints later than t."""
        i = bisect.bisect_right(self.times, t)
        del self.times[max(i, 1):]
        del self.values[max(i, 1):]

    def phase(self, t):
        """``Phi(t)`` from the nearest earlier checkpoint."""
        i = bisect.bisect_right(self.times, t) - 1
        t0, v0 = self.times[i], self.values[i]
        if t == t0:
            return v0
        return v0 + _adaptive_gk(self.rate, t0, t)


@dataclass
class Trajectory:
    t: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    phase: np.ndarray
    theta: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def final_error(self) -> float:
        return float(abs(self.c1[-1]))

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.c1)

    @property
    def norm_deviation(self) -> float:
        return float(np.max(np.abs(np.abs(self.c0) ** 2 + np.abs(self.c1) ** 2 - 1.0)))

    def error_at(self, t) -> float:
        i = int(np.argmin(np.abs(self.t - t)))
        if not np.isclose(self.t[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise ValidationError(f"t = {t} was not a sample time")
        return float(abs(self.c1[i]))

    def lab_states(self) -> np.ndarray:
        """Lab-frame states ``c0 e^{i Phi} phi0 + c1 e^{-i Phi} phi1``."""
        h = self.theta / 2
        phi0 = np.stack([-np.sin(h), np.cos(h)], axis=-1)
        phi1 = np.stack([np.cos(h), np.sin(h)], axis=-1)
        e = np.exp(1j * self.phase)
        return (self.c0 * e)[:, None] * phi0 + (self.c1 / e)[:, None] * phi1

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["t", "re_c0", "im_c0", "re_c1", "im_c1", "abs_c1"])
            for t, a, b in zip(self.t, self.c0, self.c1):
                row = [t, a.real, a.imag, b.real, b.imag, abs(b)]
                out.writerow([repr(float(x)) for x in row])


def evolve_rotating_frame(provider, tau: float, config: IntegratorConfig = IntegratorConfig(), t_eval=None) -> Trajectory:
    """Integrate the rotating-frame amplitudes over ``[0, tau]``.

    Parameters
    ----------
    provider : callable
        ``t -> (a, b, a_dot, b_dot)``, vectorized over numpy arrays of t.
    tau : float
        Final time in microseconds.
    config : IntegratorConfig
    t_eval : array_like, optional
        Times in ``(0, tau]`` that the stepper lands on exactly. ``tau`` is
        always included. Every accepted step is also recorded.

    Returns
    -------
    Trajectory
        Starts in the ground state (``c0 = 1``).

    Raises
    ------
    DegenerateSpectrumError
        If ``a = b = 0`` at any evaluated time.
    IntegrationError
        On step-size underflow or when ``max_steps`` is exceeded.
    """
    if not tau > 0:
        raise ValidationError("tau must be positive")
    stops = [tau] if t_eval is None else sorted(set(float(x) for x in t_eval) | {float(tau)})
    if stops[0] <= 0 or stops[-1] > tau:
        raise ValidationError("t_eval must lie in (0, tau]")

    calls = [0]

    def fields(t):
        calls[0] += 1
        a, b, da, db = (np.asarray(x, dtype=float) for x in provider(t))
        r2 = a * a + b * b
        if np.any(r2 == 0.0):
            raise DegenerateSpectrumError("a = b = 0: degenerate two-level spectrum")
        return np.sqrt(r2), (da * b - a * db) / r2, np.arctan2(a, b)

    cache = PhaseCache(lambda t: fields(t)[0])
    r0, thd0, th0 = (float(x) for x in fields(np.array(0.0)))

    h = config.initial_step
    if h is None:
        h = min(tau / 100.0, 0.05 / (2 * r0 + abs(thd0)))
    max_step = config.max_step if config.max_step is not None else tau
    h = min(h, max_step)

    A = [[float(x) for x in row] for row in _A]
    E = [float(x) for x in _E]
    rtol, atol, safety = config.rel_tol, config.abs_tol, config.safety
    t = 0.0
    c0, c1 = 1.0 + 0j, 0j
    k1 = (0j, 0.5 * thd0 + 0j)
    ts, c0s, c1s, phis, ths = [0.0], [c0], [c1], [0.0], [th0]
    steps = rejected = 0
    err_prev = 1e-4
    stop_i = 0
    beta = 0.04
    alpha = 0.2 - 0.75 * beta

    while t < tau:
        if steps + rejected >= config.max_steps:
            raise IntegrationError("maximum step count exceeded", _diag(steps, rejected, calls, t))
        target = stops[stop_i]
        landing = t + h >= target * (1 - 1e-14)
        hh = target - t if landing else h
        if hh <= 1e-14 * max(abs(t), tau):
            raise IntegrationError(f"step size underflow at t = {t}", _diag(steps, rejected, calls, t))

        # one provider call: 5 stage times, then 15 GK nodes per phase subinterval
        stage_t = t + _C[1:6] * hh
        lo = np.concatenate([[t], stage_t[:-1]])
        nodes = 0.5 * (lo + stage_t)[:, None] + 0.5 * (stage_t - lo)[:, None] * GK_NODES
        rr, thd, th = fields(np.concatenate([stage_t, nodes.ravel()]))
        phases = cache.integrate(t, lo, stage_t, rr[5:].reshape(5, -1))
        ph = phases.tolist()
        thd = thd[:5].tolist()

        ks = [k1]
        for i in range(1, 7):
            row = A[i]
            y0 = c0 + hh * sum(a * k[0] for a, k in zip(row, ks))
            y1 = c1 + hh * sum(a * k[1] for a, k in zip(row, ks))
            j = min(i, 5) - 1
            e = cmath.exp(2j * ph[j])
            half = 0.5 * thd[j]
            ks.append((-y1 * half / e, y0 * half * e))
        n0, n1 = y0, y1
        s0 = atol + rtol * max(abs(c0), abs(n0))
        s1 = atol + rtol * max(abs(c1), abs(n1))
        e0 = hh * sum(w * k[0] for w, k in zip(E, ks)) / s0
        e1 = hh * sum(w * k[1] for w, k in zip(E, ks)) / s1
        err = math.sqrt(0.5 * (abs(e0) ** 2 + abs(e1) ** 2))

        if err <= 1.0:
            t_new = target if landing else t + hh
            cache.commit(t_new, ph[4])
            t, c0, c1, k1 = t_new, n0, n1, ks[6]
            steps += 1
            ts.append(t)
            c0s.append(c0)
            c1s.append(c1)
            phis.append(ph[4])
            ths.append(float(th[4]))
            if landing:
                stop_i += 1
            fac = safety * max(err, 1e-10) ** (-alpha) * err_prev**beta
            fac = min(5.0, max(0.2, fac))
            # a step shortened to land on an output time keeps the longer proposal
            h = max(h, hh * fac) if (landing and hh < h) else hh * fac
            err_prev = max(err, 1e-4)
        else:
            rejected += 1
            cache.truncate(t)
            h = hh * max(0.2, safety * err ** (-1 / 5))
        h = min(h, max_step)

    theta = np.unwrap(np.array(ths))
    traj = Trajectory(
        t=np.array(ts),
        c0=np.array(c0s),
        c1=np.array(c1s),
        phase=np.array(phis),
        theta=theta,
        diagnostics=_diag(steps, rejected, calls, t),
    )
    traj.diagnostics["norm_deviation"] = traj.norm_deviation
    return traj


def _diag(steps, rejected, calls, t):
    return {"steps": steps, "rejected": rejected, "provider_calls": calls[0], "t": float(t)}


def expm_hermitian_batch(h, dt):
    """``exp(-i h dt)`` for a stack of Hermitian matrices."""
    h = np.asarray(h)
    if h.shape[-1] == 2:
        h0 = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
        hx = h[..., 0, 1].real
        hy = -h[..., 0, 1].imag
        hz = 0.5 * (h[..., 0, 0] - h[..., 1, 1]).real
        n = np.sqrt(hx**2 + hy**2 + hz**2)
        c = np.cos(n * dt)
        sinc = np.where(n > 0, np.sin(n * dt) / np.where(n > 0, n, 1.0), dt)
        phase = np.exp(-1j * h0 * dt)
        u = (
            c[..., None, None] * IDENTITY_2
            - 1j * sinc[..., None, None]
            * (hx[..., None, None] * SIGMA_X + hy[..., None, None] * SIGMA_Y + hz[..., None, None] * SIGMA_Z)
        )
        return phase[..., None, None] * u
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def _midpoint_factors(schedule: HamiltonianSchedule, tau, steps, s_end):
    if steps < 1:
        raise ValidationError("steps must be positive")
    ds = s_end / steps
    mids = (np.arange(steps) + 0.5) * ds
    hs = np.stack([schedule.matrix(s) for s in mids])
    worst = float(np.max(np.linalg.norm(hs, ord=2, axis=(1, 2)))) if hs.size else 0.0
    if worst * tau * ds > DIRECT_STEP_LIMIT:
        need = int(np.ceil(worst * tau * s_end / DIRECT_STEP_LIMIT))
        raise StepCriterionError(f"||H|| tau ds = {worst * tau * ds:.3g} > {DIRECT_STEP_LIMIT}; use steps >= {need}")
    return expm_hermitian_batch(hs, tau * ds)


def required_steps(schedule: HamiltonianSchedule, tau, s_end=1.0, probe=201) -> int:
    """Smallest step count meeting the direct-propagation criterion, with 2x headroom."""
    norms = [operator_two_norm(schedule.matrix(s)) for s in np.linspace(0, s_end, probe)]
    return max(1, int(np.ceil(2 * max(norms) * tau * s_end / DIRECT_STEP_LIMIT)))


def evolve_direct(schedule: HamiltonianSchedule, tau: float, steps: int, s_end: float = 1.0) -> np.ndarray:
    """Propagator of ``i dU/ds = tau H(s) U`` from 0 to ``s_end``.

    Product of midpoint-rule exponentials, combined by pairwise batched
    multiplication. Requires ``||H|| tau / steps <= 0.01``.
    """
    mats = _midpoint_factors(schedule, tau, steps, s_end)
    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(schedule.dim, dtype=complex)[None]])
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def evolve_direct_path(schedule: HamiltonianSchedule, tau: float, steps: int, s_end: float = 1.0):
    """Cumulative propagators at ``s_k = k s_end / steps``, k = 0..steps."""
    mats = _midpoint_factors(schedule, tau, steps, s_end)
    out = np.empty((steps + 1, schedule.dim, schedule.dim), dtype=complex)
    out[0] = np.eye(schedule.dim)
    for k in range(steps):
        out[k + 1] = mats[k] @ out[k]
    return np.linspace(0.0, s_end, steps + 1), out


def adiabatic_error_operator_norm(U, P0, Q_final) -> float:
    """``||Q_final U P0||``."""
    U, P0, Q = np.asarray(U), np.asarray(P0), np.asarray(Q_final)
    if not (U.shape == P0.shape == Q.shape):
        raise DimensionError(f"shapes differ: {U.shape}, {P0.shape}, {Q.shape}")
    return operator_two_norm(Q @ U @ P0)


def ground_error(schedule: HamiltonianSchedule, U, s_end=1.0) -> float:
    """Adiabatic error of U against the schedule's ground projectors."""
    p0 = np.asarray(subspace_projector(eigendecompose(schedule.matrix(0.0)), 0, 0))
    p1 = np.asarray(subspace_projector(eigendecompose(schedule.matrix(s_end)), 0, 0))
    return adiabatic_error_operator_norm(U, p0, np.eye(schedule.dim) - p1)


def _bloch(h):
    return np.array([
        np.real(np.trace(h @ SIGMA_X)) / 2,
        np.real(np.trace(h @ SIGMA_Y)) / 2,
        np.real(np.trace(h @ SIGMA_Z)) / 2,
    ])


def projector_derivative(schedule: HamiltonianSchedule, s: float) -> np.ndarray:
    """``dP/ds`` for the ground projector.

    Two levels: with ``H = h0 + h.sigma`` and ``n = h/|h|``,
    ``P = (1 - n.sigma)/2`` so ``P' = -(n'.sigma)/2`` with
    ``n' = (h' - n (n.h'))/|h|``. Larger dimensions use a central
    difference of eigenprojectors.
    """
    if schedule.dim == 2:
        hv = _bloch(schedule.matrix(s))
        dv = _bloch(schedule.derivative(s))
        norm = np.linalg.norm(hv)
        if norm == 0:
            raise DegenerateSpectrumError(f"degenerate ground state at s = {s}")
        n = hv / norm
        dn = (dv - n * (n @ dv)) / norm
        return -0.5 * (dn[0] * SIGMA_X + dn[1] * SIGMA_Y + dn[2] * SIGMA_Z)
    h = FD_STEP
    lo, hi = max(0.0, s - h), min(1.0, s + h)

    def proj(x):
        spec = eigendecompose(schedule.matrix(x))
        if spec.eigenvalues[1] - spec.eigenvalues[0] <= 0:
            raise DegenerateSpectrumError(f"degenerate ground state at s = {x}")
        return np.asarray(subspace_projector(spec, 0, 0))

    return (proj(hi) - proj(lo)) / (hi - lo)


def counter_adiabatic_term(schedule: HamiltonianSchedule, s: float, tau: float) -> np.ndarray:
    """``(i / tau) [P', P]``, asserted Hermitian."""
    P = np.asarray(subspace_projector(eigendecompose(schedule.matrix(s)), 0, 0))
    dP = projector_derivative(schedule, s)
    term = (1j / tau) * (dP @ P - P @ dP)
    if np.max(np.abs(term - term.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(term))):
        raise ValidationError("counter-adiabatic term is not Hermitian")
    return term


def counter_adiabatic_schedule(drift: HamiltonianSchedule, tau: float) -> HamiltonianSchedule:
    """``H_A(s) = H(s) + (i / tau) [P'(s), P(s)]`` for the ground projector."""
    if not tau > 0:
        raise ValidationError("tau must be positive")

    def ha(s):
        return drift.matrix(s) + counter_adiabatic_term(drift, s, tau)

    return HamiltonianSchedule(drift.dim, ha, name=f"{drift.name}+counter-adiabatic")


def commuting_noise_check(field, noise, tau: float, axis: str = "z", steps: Optional[int] = None) -> float:
    """Adiabatic error under ``M(s) sigma_z`` plus scalar noise on ``axis``.

    With ``axis='z'`` the noise commutes with the field at all times and no
    transitions occur. ``axis='x'`` is the non-commuting control. Errors are
    measured against the ground projectors of ``M(s) sigma_z``.
    """
    if axis not in ("z", "x"):
        raise ValidationError("axis must be 'z' or 'x'")
    m0, m1 = float(field(0.0)), float(field(1.0))
    if m0 == 0.0 and m1 == 0.0 and axis == "z":
        # both levels degenerate at the ends: any state is a ground state
        return 0.0
    if m0 == 0.0 or m1 == 0.0:
        raise DegenerateSpectrumError("field vanishes at an endpoint")
    coupling = SIGMA_Z if axis == "z" else SIGMA_X

    def h(s):
        return float(field(s)) * SIGMA_Z + float(noise(s * tau)) * coupling

    sched = HamiltonianSchedule(2, h, name=f"commuting-check-{axis}")
    if steps is None:
        steps = required_steps(sched, tau)
    U = evolve_direct(sched, tau, steps)

    def ground(m):
        # ground state of m sigma_z is |1> for m > 0 and |0> for m < 0
        p = np.zeros((2, 2), dtype=complex)
        p[(1, 1) if m > 0 else (0, 0)] = 1.0
        return p

    return adiabatic_error_operator_norm(U, ground(m0), np.eye(2) - ground(m1))


def berry_connection(theta_fn, t, h=1e-6) -> float:
    """Largest ``|<phi_n | d phi_n / dt>|`` of the real rotating basis, by central difference."""
    from .spectral import rotating_basis

    b = rotating_basis(theta_fn(t))
    db = (rotating_basis(theta_fn(t + h)) - rotating_basis(theta_fn(t - h))) / (2 * h)
    return float(max(abs(np.vdot(b[:, k], db[:, k])) for k in range(2)))
