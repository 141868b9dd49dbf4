"""Time-dependent Hamiltonians and the numerical inputs the bounds need.

A :class:`HamiltonianSchedule` is a function of the normalized time
``s in [0, 1]``; a :class:`NoiseProcess` is a function of physical time
``t`` (microseconds). The two combine as ``H(s) + H_noise(s * tau)``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bounds import DerivativeBounds, EndpointOverlaps, TwoScaleBounds
from .errors import EvaluationError, ValidationError, WindowError
from .spectral import (
    HermitianOperator,
    batched_two_norm,
    eigendecompose,
    gap_profile,
    ground_projector,
    operator_two_norm,
    projector_distance,
)

SAFETY_FACTOR = 1.01
FD_STEP = 1e-5
# second differences of raw H lose ~eps*||H||/h^2; use a wider step there
FD_STEP_SECOND = 1e-3
DEFAULT_GRID_POINTS = 1001
MIN_GRID_POINTS = 101


def chebyshev_points(n: int = 11) -> np.ndarray:
    """Chebyshev-Gauss points mapped onto [0, 1]."""
    k = np.arange(n)
    return 0.5 * (1.0 - np.cos((2 * k + 1) * np.pi / (2 * n)))


def default_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


class HamiltonianSchedule:
    """``s -> H(s)`` with first and second s-derivatives.

    Missing derivatives fall back to centered differences: step ``fd_step``
    for the first derivative, and for the second either a centered
    difference of the analytic first derivative or a wider second
    difference of ``H`` itself.
    """

    def __init__(
        self,
        dim: int,
        evaluator: Callable[[float], np.ndarray],
        first: Optional[Callable[[float], np.ndarray]] = None,
        second: Optional[Callable[[float], np.ndarray]] = None,
        fd_step: float = FD_STEP,
        name: str = "",
    ):
        self.dim = int(dim)
        self._h = evaluator
        self._d1 = first
        self._d2 = second
        self.fd_step = fd_step
        self.name = name

    @property
    def has_analytic_derivatives(self) -> bool:
        return self._d1 is not None

    def _raw(self, s):
        m = np.asarray(self._h(s), dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValidationError(f"evaluator returned shape {m.shape}, expected {(self.dim, self.dim)}")
        return m

    def matrix(self, s: float) -> np.ndarray:
        m = self._raw(s)
        if not np.all(np.isfinite(m)):
            raise EvaluationError(f"non-finite Hamiltonian at s = {s!r}")
        return m

    def __call__(self, s: float) -> HermitianOperator:
        return HermitianOperator(self.matrix(s))

    def derivative(self, s: float) -> np.ndarray:
        if self._d1 is not None:
            d = np.asarray(self._d1(s), dtype=complex)
        else:
            h = self.fd_step
            d = (self._raw(s + h) - self._raw(s - h)) / (2 * h)
        if not np.all(np.isfinite(d)):
            raise EvaluationError(f"non-finite first derivative at s = {s!r}")
        return d

    def second_derivative(self, s: float) -> np.ndarray:
        if self._d2 is not None:
            d = np.asarray(self._d2(s), dtype=complex)
        elif self._d1 is not None:
            h = self.fd_step
            d = (np.asarray(self._d1(s + h)) - np.asarray(self._d1(s - h))) / (2 * h)
        else:
            h = FD_STEP_SECOND
            d = (self._raw(s + h) - 2 * self._raw(s) + self._raw(s - h)) / h**2
        if not np.all(np.isfinite(d)):
            raise EvaluationError(f"non-finite second derivative at s = {s!r}")
        return d

    def check_derivatives(self, points=None) -> float:
        """Compare analytic derivatives with centered differences.

        Returns the worst ratio of deviation to tolerance
        ``max(1e-6, 1e-4 * scale)``; values <= 1 pass. ``scale`` is the larger
        of the derivative norm and ``1e-3 ||H||`` since differencing noise
        grows with the size of the entries.
        """
        if points is None:
            points = chebyshev_points(11)
        h = self.fd_step
        worst = 0.0
        for s in points:
            hn = operator_two_norm(self._raw(s))
            if self._d1 is not None:
                fd = (self._raw(s + h) - self._raw(s - h)) / (2 * h)
                an = np.asarray(self._d1(s))
                tol = max(1e-6, 1e-4 * max(operator_two_norm(an), 1e-3 * hn))
                worst = max(worst, operator_two_norm(an - fd) / tol)
            if self._d2 is not None:
                if self._d1 is not None:
                    fd2 = (np.asarray(self._d1(s + h)) - np.asarray(self._d1(s - h))) / (2 * h)
                else:
                    k = FD_STEP_SECOND
                    fd2 = (self._raw(s + k) - 2 * self._raw(s) + self._raw(s - k)) / k**2
                an2 = np.asarray(self._d2(s))
                tol = max(1e-6, 1e-4 * max(operator_two_norm(an2), 1e-3 * hn))
                worst = max(worst, operator_two_norm(an2 - fd2) / tol)
        return worst

    def check_hermitian(self, points) -> None:
        for s in points:
            self(s)


class NoiseProcess:
    """``t -> H_noise(t)`` with analytic t-derivatives.

    Evaluators must accept a numpy array of times and return an array of
    shape ``t.shape + (dim, dim)``. ``nu_min`` (MHz), when given, is the
    lowest frequency present and drives the sampling-window checks.
    """

    def __init__(self, dim, value, first, second, nu_min=None, nu_max=None, name=""):
        self.dim = int(dim)
        self._value = value
        self._d1 = first
        self._d2 = second
        self.nu_min = nu_min
        self.nu_max = nu_max
        self.name = name

    @staticmethod
    def _eval(fn, t, dim):
        t_arr = np.asarray(t, dtype=float)
        out = np.asarray(fn(t_arr), dtype=complex)
        if out.shape != t_arr.shape + (dim, dim):
            raise ValidationError(f"noise evaluator returned shape {out.shape}")
        if not np.all(np.isfinite(out)):
            raise EvaluationError("non-finite noise value")
        return out

    def matrix(self, t):
        return self._eval(self._value, t, self.dim)

    def derivative(self, t):
        return self._eval(self._d1, t, self.dim)

    def second_derivative(self, t):
        return self._eval(self._d2, t, self.dim)

    def __call__(self, t: float) -> HermitianOperator:
        return HermitianOperator(self.matrix(float(t)))

    @classmethod
    def zero(cls, dim: int) -> "NoiseProcess":
        def z(t):
            return np.zeros(np.shape(t) + (dim, dim), dtype=complex)

        return cls(dim, z, z, z, name="zero")

    @classmethod
    def from_scalar(cls, coupling, f, df, d2f, nu_min=None, nu_max=None, name=""):
        """``f(t) * coupling`` for a fixed Hermitian coupling matrix."""
        op = np.asarray(coupling, dtype=complex)
        HermitianOperator(op)
        dim = op.shape[0]

        def lift(fn):
            return lambda t: np.multiply.outer(np.asarray(fn(t), dtype=float), op)

        return cls(dim, lift(f), lift(df), lift(d2f), nu_min=nu_min, nu_max=nu_max, name=name)


def combined_schedule(drift: HamiltonianSchedule, noise: NoiseProcess, tau: float) -> HamiltonianSchedule:
    """``H_tau(s) = H(s) + H_noise(s tau)`` with chain-rule derivatives."""
    if drift.dim != noise.dim:
        raise ValidationError("drift and noise dimensions differ")

    def h(s):
        return drift.matrix(s) + noise.matrix(s * tau)

    def d1(s):
        return drift.derivative(s) + tau * noise.derivative(s * tau)

    def d2(s):
        return drift.second_derivative(s) + tau**2 * noise.second_derivative(s * tau)

    return HamiltonianSchedule(drift.dim, h, d1, d2, name=f"{drift.name}+noise")


def _validate_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < MIN_GRID_POINTS:
        raise ValidationError(f"grid needs at least {MIN_GRID_POINTS} points")
    if abs(grid[0]) > 1e-12 or abs(grid[-1] - 1.0) > 1e-12 or np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must increase strictly from 0 to 1")
    return grid


def derivative_norm_bounds(schedule: HamiltonianSchedule, grid=None) -> DerivativeBounds:
    """Sampled suprema of the s-derivative norms, times a 1.01 safety factor.

    The tabulated per-point values (also scaled) are kept for the integral
    form of the bound.
    """
    grid = _validate_grid(default_grid() if grid is None else grid)
    n1 = np.array([operator_two_norm(schedule.derivative(s)) for s in grid])
    n2 = np.array([operator_two_norm(schedule.second_derivative(s)) for s in grid])
    if not (np.all(np.isfinite(n1)) and np.all(np.isfinite(n2))):
        raise EvaluationError("non-finite derivative norm on the grid")
    b1_s = SAFETY_FACTOR * n1
    b2_s = SAFETY_FACTOR * n2
    return DerivativeBounds(
        b1=float(b1_s.max()), b2=float(b2_s.max()), s=grid, b1_s=b1_s, b2_s=b2_s
    )


def noise_derivative_suprema(noise: NoiseProcess, t_window: float, samples: int = 100_001, chunk: int = 20_000):
    """Sampled ``sup ||H_noise^(k)(t)||`` for k = 0, 1, 2 over ``[0, t_window]``."""
    t = np.linspace(0.0, t_window, samples)
    sup = np.zeros(3)
    for start in range(0, samples, chunk):
        tc = t[start : start + chunk]
        for k, fn in enumerate((noise.matrix, noise.derivative, noise.second_derivative)):
            sup[k] = max(sup[k], float(batched_two_norm(fn(tc)).max()))
    return sup


def two_scale_bounds(
    drift: HamiltonianSchedule,
    noise: NoiseProcess,
    t_window: Optional[float] = None,
    s_grid=None,
    t_samples: int = 100_001,
) -> TwoScaleBounds:
    """``c1, c2`` from the drift on an s-grid; ``d1, d2`` from the noise on a t-window.

    The window must span at least ten of the noise's longest periods
    (``10 / nu_min``) when ``nu_min`` is declared.
    """
    db = derivative_norm_bounds(drift, s_grid)
    if noise.nu_min is not None:
        need = 10.0 / noise.nu_min
        if t_window is None:
            t_window = 1000.0 / noise.nu_min
        if t_window < need:
            raise WindowError(f"t_window = {t_window} shorter than 10/nu_min = {need}")
        if noise.nu_max is not None and t_window / (t_samples - 1) > 0.25 / noise.nu_max:
            raise WindowError("sampling too coarse: fewer than 4 samples per shortest period")
    elif t_window is None:
        raise ValidationError("t_window is required when the noise declares no nu_min")
    sup = noise_derivative_suprema(noise, t_window, t_samples)
    return TwoScaleBounds(c1=db.b1, c2=db.b2, d1=SAFETY_FACTOR * sup[1], d2=SAFETY_FACTOR * sup[2])


def schedule_spectra(schedule: HamiltonianSchedule, grid):
    return [eigendecompose(schedule.matrix(s)) for s in grid]


def combined_gap_profile(drift, noise, tau, grid=None, m: int = 0, n: int = 0):
    """Gap profile of ``H(s) + H_noise(s tau)`` on ``grid`` for one tau.

    Scan several tau values and take the smallest ``gamma_min`` to obtain a
    gap valid across run times.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    sched = combined_schedule(drift, noise, tau)
    return gap_profile(schedule_spectra(sched, grid), m, n, s=grid)


def endpoint_overlaps(drift, noise, tau) -> EndpointOverlaps:
    """Exact ``||P_tau(s) - P(s)||`` between noisy and intended ground projectors at s = 0, 1."""
    deltas = []
    for s in (0.0, 1.0):
        h = drift.matrix(s)
        p = ground_projector(h)
        p_noisy = ground_projector(h + noise.matrix(s * tau))
        deltas.append(projector_distance(p_noisy, p))
    return EndpointOverlaps(deltas[0], deltas[1], "exact-projector")
