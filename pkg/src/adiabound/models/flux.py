"""Four-junction superconducting flux qubit in its two-level reduction.

Drift: ``H(s) = -t1 sigma_x + s eps r1 sigma_z``, moving from the
degeneracy point toward equal sigma_x and sigma_z weights.

Flux noise: ``H_noise(t) = N1(t) r1 sigma_z + N2(t) (r2 sigma_z - w sigma_x)``
with N1, N2 independent 1/nu cosine sums.

Defaults: ``E_J = 2 pi * 200 GHz`` in MHz, ``t1 = 1e-3 E_J``,
``r1 = 4.8 E_J``, ``w = 2.4 E_J``, ``eps = -2e-4``. ``r2 = 1.0 E_J``
reproduces the reference noise-derivative constants, see
:func:`coupling_factor_from_bounds`.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..bounds import EndpointOverlaps, TwoScaleBounds, bauer_fike_delta
from ..errors import DegenerateSpectrumError, ValidationError
from ..noise import AmplitudeBounds, OneOverFNoise, seeded_phases
from ..schedule import HamiltonianSchedule, NoiseProcess, endpoint_overlaps
from ..spectral import SIGMA_X, SIGMA_Z, two_level_angles
from .tong import NoiseBoundInputs

E_J_DEFAULT = 2 * np.pi * 2.0e5  # MHz

REFERENCE_NOISE = dict(C=1e-10, n=100, nu_min=2.5e3, nu_max=3.5e3)


@dataclass(frozen=True)
class FluxQubitModel:
    E_J: float = E_J_DEFAULT
    t1_ratio: float = 1e-3
    r1_ratio: float = 4.8
    r2_ratio: float = 1.0
    w_ratio: float = 2.4
    epsilon: float = -2e-4
    noise1: Optional[OneOverFNoise] = None
    noise2: Optional[OneOverFNoise] = None

    def __post_init__(self):
        if min(self.t1, self.r1, self.w) <= 0:
            raise ValidationError("t1, r1 and w must be positive")
        if (self.noise1 is None) != (self.noise2 is None):
            raise ValidationError("give both noise functions or neither")

    @property
    def t1(self):
        return self.t1_ratio * self.E_J

    @property
    def r1(self):
        return self.r1_ratio * self.E_J

    @property
    def r2(self):
        return self.r2_ratio * self.E_J

    @property
    def w(self):
        return self.w_ratio * self.E_J

    @property
    def noisy(self) -> bool:
        return self.noise1 is not None

    @property
    def coupling_factor(self) -> float:
        """``r1 + ||r2 sigma_z - w sigma_x||``, the noise-to-norm multiplier."""
        return self.r1 + float(np.hypot(self.r2, self.w))

    def with_noise(self, C, n, nu_min, nu_max, seed) -> "FluxQubitModel":
        """Attach two independent noise functions drawn from one seed.

        N1 takes the first ``n`` phases of the stream and N2 the next ``n``.
        """
        xi = seeded_phases(seed, 2 * n)
        n1 = OneOverFNoise(C, n, nu_min, nu_max, xi[:n])
        n2 = OneOverFNoise(C, n, nu_min, nu_max, xi[n:])
        return FluxQubitModel(
            self.E_J, self.t1_ratio, self.r1_ratio, self.r2_ratio, self.w_ratio,
            self.epsilon, n1, n2,
        )


def flux_drift(model: FluxQubitModel) -> HamiltonianSchedule:
    base = -model.t1 * SIGMA_X
    slope = model.epsilon * model.r1 * SIGMA_Z
    zero = np.zeros((2, 2), dtype=complex)
    return HamiltonianSchedule(
        2, lambda s: base + s * slope, lambda s: slope, lambda s: zero, name="flux-drift"
    )


def _noise_samples(model, t):
    t = np.asarray(t, dtype=float)
    if not model.noisy:
        z = np.zeros(t.shape)
        return (z, z, z), (z, z, z)
    return (
        model.noise1.sample_with_derivatives(t),
        model.noise2.sample_with_derivatives(t),
    )


def flux_noise(model: FluxQubitModel) -> NoiseProcess:
    if not model.noisy:
        return NoiseProcess.zero(2)
    zc = model.r1 * SIGMA_Z
    xc = model.r2 * SIGMA_Z - model.w * SIGMA_X

    def make(k):
        def fn(t):
            n1, n2 = _noise_samples(model, t)
            return np.multiply.outer(np.asarray(n1[k]), zc) + np.multiply.outer(np.asarray(n2[k]), xc)

        return fn

    return NoiseProcess(
        2, make(0), make(1), make(2), nu_min=model.noise1.nu_min, nu_max=model.noise1.nu_max,
        name="flux-1/f",
    )


def flux_provider(model: FluxQubitModel, tau: float):
    """``t -> (a, b, a_dot, b_dot)`` for ``H = a sigma_x + b sigma_z`` at ``t = s tau``.

    ``a = -t1 - N2 w`` and ``b = t r1 eps / tau + N1 r1 + N2 r2``; the
    sigma_x coupling of N2 is ``w``.
    """
    if not tau > 0:
        raise ValidationError("tau must be positive")
    t1, r1, r2, w, eps = model.t1, model.r1, model.r2, model.w, model.epsilon
    ramp = r1 * eps / tau

    def provider(t):
        t = np.asarray(t, dtype=float)
        (n1, dn1, _), (n2, dn2, _) = _noise_samples(model, t)
        a = -t1 - n2 * w
        b = t * ramp + n1 * r1 + n2 * r2
        return a, b, -dn2 * w, ramp + dn1 * r1 + dn2 * r2

    return provider


def flux_coefficients(model: FluxQubitModel, t: float, tau: float):
    """``(a, b, theta, theta_dot)`` at physical time t.

    ``theta`` is the principal ``arccot(b / a)`` and
    ``theta_dot = (a_dot b - a b_dot) / (a^2 + b^2)``.
    """
    a, b, da, db = (float(x) for x in flux_provider(model, tau)(t))
    if a == 0.0 and b == 0.0:
        raise DegenerateSpectrumError(f"a = b = 0 at t = {t}")
    _, _, theta = two_level_angles(a, b)
    theta_dot = (da * b - a * db) / (a * a + b * b)
    return a, b, theta, theta_dot


def coupling_factor_from_bounds(d1, sup_dN):
    """Invert ``d1 = sup|N'| (r1 + sqrt(r2^2 + w^2))`` for the coupling factor."""
    return d1 / sup_dN


def r2_from_coupling_factor(factor, r1, w):
    rest = factor - r1
    if rest < w:
        raise ValidationError("coupling factor too small for any real r2")
    return float(np.sqrt(rest**2 - w**2))


@dataclass(frozen=True)
class FluxAmplitudes:
    """Noise suprema shared by N1 and N2 (``sup_N`` optional)."""

    sup_dN: float
    sup_d2N: float
    sup_N: Optional[float] = None

    @classmethod
    def from_calibration(cls, *bounds: AmplitudeBounds) -> "FluxAmplitudes":
        return cls(
            sup_dN=max(b.sup_dN for b in bounds),
            sup_d2N=max(b.sup_d2N for b in bounds),
            sup_N=max(b.sup_N for b in bounds),
        )


REFERENCE_AMPLITUDES = FluxAmplitudes(sup_dN=9.11e-6, sup_d2N=0.1667, sup_N=4.91e-10)
REFERENCE_OVERLAPS = EndpointOverlaps(1.800e-6, 9.117e-7, "exact-projector")


def flux_bound_inputs(
    model: FluxQubitModel,
    amplitudes: Optional[FluxAmplitudes] = None,
    overlaps: Optional[EndpointOverlaps] = None,
    tau: Optional[float] = None,
) -> NoiseBoundInputs:
    """Assemble the two-scale bound inputs.

    ``c1 = |eps| r1`` and ``c2 = 0`` (the drift is linear in s).
    ``d_k = sup|N^(k)| (r1 + sqrt(r2^2 + w^2))``. The gap minimum sits at
    s = 0 and equals ``2 t1``; when ``sup|N|`` is known it is lowered by
    ``2 sup||H_noise||`` so it stays a valid lower bound for every noise
    value. Endpoint overlaps: ``overlaps`` if given, else exact projector
    distances at run time ``tau``, else a tau-uniform Bauer-Fike bound.
    """
    k = model.coupling_factor
    c1 = abs(model.epsilon) * model.r1
    if amplitudes is None:
        if model.noisy:
            raise ValidationError("noisy model needs calibrated amplitudes")
        amplitudes = FluxAmplitudes(0.0, 0.0, 0.0)
    ts = TwoScaleBounds(c1=c1, c2=0.0, d1=amplitudes.sup_dN * k, d2=amplitudes.sup_d2N * k)

    noise_sup = (amplitudes.sup_N or 0.0) * k
    gamma = 2.0 * model.t1 - 2.0 * noise_sup

    if overlaps is None:
        if not model.noisy:
            overlaps = EndpointOverlaps.zero()
        elif tau is not None:
            overlaps = endpoint_overlaps(flux_drift(model), flux_noise(model), tau)
        else:
            if amplitudes.sup_N is None:
                raise ValidationError("uniform overlap bound needs sup|N|")
            g0 = 2.0 * model.t1
            g1 = 2.0 * float(np.hypot(model.t1, model.epsilon * model.r1))
            overlaps = EndpointOverlaps(
                bauer_fike_delta(noise_sup, g0), bauer_fike_delta(noise_sup, g1), "bauer-fike"
            )
    return NoiseBoundInputs(ts, gamma, overlaps)


@dataclass(frozen=True)
class FluxPotentialParams:
    E_J: float = 1.0
    beta: float = 0.8
    f_a: float = 1.0 / 3.0
    f_b: float = 0.5


def flux_potential(params: FluxPotentialParams, phi_p, phi_m):
    """``E_J [2 + 2 beta - 2 cos(phi_p) cos(phi_m) - 2 beta cos(pi f_a) cos(2 pi f_b + 2 phi_m)]``."""
    beta = params.beta
    return params.E_J * (
        2.0
        + 2.0 * beta
        - 2.0 * np.cos(phi_p) * np.cos(phi_m)
        - 2.0 * beta * np.cos(np.pi * params.f_a) * np.cos(2.0 * np.pi * params.f_b + 2.0 * phi_m)
    )


def flux_potential_gradient(params: FluxPotentialParams, phi_p, phi_m):
    beta = params.beta
    k = 2.0 * beta * np.cos(np.pi * params.f_a)
    gp = 2.0 * np.sin(phi_p) * np.cos(phi_m)
    gm = 2.0 * np.cos(phi_p) * np.sin(phi_m) + 2.0 * k * np.sin(2.0 * np.pi * params.f_b + 2.0 * phi_m)
    return params.E_J * np.array([gp, gm])
