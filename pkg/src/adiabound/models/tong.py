"""Spin-1/2 in a field rotating about z at rate ``omega``.

The field has strength ``omega0`` and tilt ``theta`` from the z axis:

    H(t) = -(omega0 / 2) [[cos th, e^{-i omega t} sin th],
                          [e^{i omega t} sin th, -cos th]]

The diagonal part is treated as the intended (drift) Hamiltonian and the
rotating off-diagonal part as noise on the physical time scale. The
eigenvalues are ``+-|omega0|/2`` for every t, yet resonant rotation drives
a full transition, which is why a bound must grow with tau.
"""

from dataclasses import dataclass

import numpy as np

from ..bounds import EndpointOverlaps, TwoScaleBounds
from ..errors import DegenerateSpectrumError
from ..schedule import HamiltonianSchedule, NoiseProcess, combined_schedule, endpoint_overlaps
from ..spectral import HermitianOperator, SIGMA_Z


@dataclass(frozen=True)
class TongModel:
    theta: float = 0.001
    omega: float = 10.0
    omega0: float = -10.0

    @property
    def omega_bar(self) -> float:
        w, w0, th = self.omega, self.omega0, self.theta
        return float(np.sqrt(max(0.0, w0**2 + w**2 + 2 * w0 * w * np.cos(th))))

    @property
    def detuning(self) -> float:
        """Rotation rate minus the drift's level splitting ``omega + omega0 cos(theta)``."""
        return self.omega + self.omega0 * np.cos(self.theta)

    @property
    def gap(self) -> float:
        return abs(self.omega0)


def _offdiag(model, t, scale, dphase):
    # scale * [[0, dphase(-) e^{-i w t}], [dphase(+) e^{i w t}, 0]]
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (2, 2), dtype=complex)
    e = np.exp(1j * model.omega * t)
    out[..., 0, 1] = scale * dphase[0] * np.conj(e)
    out[..., 1, 0] = scale * dphase[1] * e
    return out


def tong_noise(model: TongModel) -> NoiseProcess:
    """Rotating off-diagonal part, a function of physical time t."""
    k = -0.5 * model.omega0 * np.sin(model.theta)
    w = model.omega
    return NoiseProcess(
        2,
        lambda t: _offdiag(model, t, k, (1.0, 1.0)),
        lambda t: _offdiag(model, t, k, (-1j * w, 1j * w)),
        lambda t: _offdiag(model, t, k, (-(w**2), -(w**2))),
        name="tong-rotating",
    )


def tong_drift(model: TongModel) -> HamiltonianSchedule:
    """Static diagonal part ``-(omega0/2) cos(theta) sigma_z``."""
    h = -0.5 * model.omega0 * np.cos(model.theta) * SIGMA_Z
    zero = np.zeros((2, 2), dtype=complex)
    return HamiltonianSchedule(2, lambda s: h, lambda s: zero, lambda s: zero, name="tong-drift")


def tong_schedule(model: TongModel, tau: float) -> HamiltonianSchedule:
    """Full ``H_tau(s)`` with ``t = s tau``."""
    return combined_schedule(tong_drift(model), tong_noise(model), tau)


def tong_hamiltonian(model: TongModel, s: float, tau: float) -> HermitianOperator:
    return tong_schedule(model, tau)(s)


def tong_exact_unitary(model: TongModel, t: float) -> np.ndarray:
    """Closed-form propagator from 0 to t."""
    w, w0, th = model.omega, model.omega0, model.theta
    wb = model.omega_bar
    c = np.cos(wb * t / 2)
    # sin(wb t / 2) / wb, with its limit t/2 at wb = 0
    sw = np.sin(wb * t / 2) / wb if wb > 0 else t / 2
    diag = 1j * (w + w0 * np.cos(th)) * sw
    off = 1j * w0 * np.sin(th) * sw
    em, ep = np.exp(-1j * w * t / 2), np.exp(1j * w * t / 2)
    return np.array([[(c + diag) * em, off * em], [off * ep, (c - diag) * ep]])


def tong_exact_error(model: TongModel, t: float) -> float:
    """``|omega0 sin(theta) / omega_bar * sin(omega_bar t / 2)|``.

    At resonance (``omega = -omega0 cos(theta)``) this is
    ``|sin(omega0 sin(theta) t / 2)|``.
    """
    wb = model.omega_bar
    k = model.omega0 * np.sin(model.theta)
    if wb == 0.0:
        return float(abs(k * t / 2))
    return float(abs(k / wb * np.sin(wb * t / 2)))


@dataclass(frozen=True)
class NoiseBoundInputs:
    two_scale: TwoScaleBounds
    gamma_bar: float
    overlaps: EndpointOverlaps


def tong_bound_inputs(model: TongModel) -> NoiseBoundInputs:
    """Drift/noise split with exact derivative norms.

    The drift is s-independent so ``c1 = c2 = 0``; the noise has
    ``||dH/dt|| = |omega omega0 sin th| / 2`` and
    ``||d2H/dt2|| = omega^2 |omega0 sin th| / 2``. The gap is ``|omega0|``.
    Endpoint overlaps are exact projector distances (tau-independent since
    the rotation preserves the tilt).
    """
    sin_th = abs(np.sin(model.theta))
    d1 = abs(model.omega * model.omega0) * sin_th / 2
    d2 = model.omega**2 * abs(model.omega0) * sin_th / 2
    overlaps = endpoint_overlaps(tong_drift(model), tong_noise(model), 1.0)
    return NoiseBoundInputs(TwoScaleBounds(0.0, 0.0, d1, d2), model.gap, overlaps)


def tong_rotating_frame_provider(model: TongModel):
    """Real two-level ``(a, b)`` problem with the same transition amplitude.

    In the drift's interaction picture the amplitudes obey the two-level
    rotating-frame equations with constant coupling ``theta_dot =
    omega0 sin(theta)`` and splitting ``2 r = |detuning|``. The field
    ``(a, b) = r (sin k t, cos k t)``, ``k = omega0 sin(theta)``, reproduces
    them, so ``|c1(t)|`` equals the error measured against the drift's
    eigenstates. Exact resonance gives ``r = 0`` and is rejected.
    """
    r = abs(model.detuning) / 2
    k = model.omega0 * np.sin(model.theta)
    if r == 0.0:
        raise DegenerateSpectrumError("exact resonance: the equivalent two-level field vanishes")

    def provider(t):
        t = np.asarray(t, dtype=float)
        ph = k * t
        sn, cs = np.sin(ph), np.cos(ph)
        return r * sn, r * cs, r * k * cs, -r * k * sn

    return provider
