"""Differentiable 1/nu noise as a finite sum of random-phase cosines.

    N(t) = C * sum_j cos(2 pi nu_j t + xi_j) * dnu / sqrt(nu_j)

with ``dnu = (nu_max - nu_min) / n`` and ``nu_j = nu_min + j dnu`` for
``j = 1..n``. Each term has power proportional to ``1 / nu_j``. Frequencies
are in MHz and time in microseconds. ``C`` is in MHz^(-1/2), which makes
``N`` dimensionless; couplings such as ``r1`` carry the energy units.

Phases come from numpy's PCG64 generator (``default_rng(seed)``) drawing
``uniform(0, 2 pi)``. The same seed reproduces the same realization
bit-for-bit within one numpy release.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, WindowError

TWO_PI = 2.0 * np.pi
SAFETY_FACTOR = 1.01
MIN_SAMPLES = 100_000


def seeded_phases(seed: int, n: int) -> np.ndarray:
    """``n`` phases uniform on [0, 2 pi) from a seeded PCG64 stream."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    return np.random.default_rng(seed).uniform(0.0, TWO_PI, size=n)


@dataclass(frozen=True)
class OneOverFNoise:
    C: float
    n: int
    nu_min: float
    nu_max: float
    phases: np.ndarray

    def __post_init__(self):
        if not 0 < self.nu_min < self.nu_max:
            raise ValidationError("need 0 < nu_min < nu_max")
        if self.n < 1:
            raise ValidationError("need at least one term")
        phases = np.array(self.phases, dtype=float)
        if phases.shape != (self.n,):
            raise ValidationError(f"expected {self.n} phases, got shape {phases.shape}")
        if np.any(phases < 0) or np.any(phases >= TWO_PI):
            raise ValidationError("phases must lie in [0, 2 pi)")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def seeded(cls, C, n, nu_min, nu_max, seed):
        return cls(C, n, nu_min, nu_max, seeded_phases(seed, n))

    @property
    def delta_nu(self) -> float:
        return (self.nu_max - self.nu_min) / self.n

    @property
    def frequencies(self) -> np.ndarray:
        return self.nu_min + np.arange(1, self.n + 1) * self.delta_nu

    @property
    def amplitudes(self) -> np.ndarray:
        return self.C * self.delta_nu / np.sqrt(self.frequencies)

    def analytic_caps(self):
        """Worst-case ``sup |N^(k)|`` for k = 0, 1, 2: all cosines in phase."""
        amp = np.abs(self.amplitudes)
        w = TWO_PI * self.frequencies
        return float(amp.sum()), float((amp * w).sum()), float((amp * w**2).sum())

    def value(self, t):
        return self.sample_with_derivatives(t)[0]

    def sample_with_derivatives(self, t, chunk: int = 20_000):
        """``(N, dN/dt, d2N/dt2)`` at the times ``t`` (scalar or array)."""
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        amp = self.amplitudes
        w = TWO_PI * self.frequencies
        out = np.empty((3, flat.size))
        for start in range(0, flat.size, chunk):
            arg = np.multiply.outer(flat[start : start + chunk], w) + self.phases
            c, s = np.cos(arg), np.sin(arg)
            out[0, start : start + chunk] = c @ amp
            out[1, start : start + chunk] = -(s @ (amp * w))
            out[2, start : start + chunk] = -(c @ (amp * w**2))
        shaped = out.reshape((3,) + t.shape)
        if t.ndim == 0:
            return tuple(float(x) for x in shaped)
        return shaped[0], shaped[1], shaped[2]

    def sample_uniform(self, t0: float, dt: float, count: int, block: int = 1000):
        """Values and derivatives on the uniform grid ``t0 + k dt``.

        Uses ``exp(i w (t_b + u)) = exp(i w t_b) exp(i w u)``: one table of
        in-block phases, then a matrix-vector product per block. The block
        start phase is computed directly, so no rounding accumulates.
        """
        w = TWO_PI * self.frequencies
        coef = self.amplitudes * np.exp(1j * self.phases)
        u = np.arange(block) * dt
        table = np.exp(1j * np.multiply.outer(u, w))
        out = np.empty((3, count))
        for start in range(0, count, block):
            m = min(block, count - start)
            z = coef * np.exp(1j * w * (t0 + start * dt))
            zt = table[:m] @ np.stack([z, 1j * w * z, -(w**2) * z], axis=1)
            out[:, start : start + m] = zt.real.T
        return out[0], out[1], out[2]


@dataclass(frozen=True)
class AmplitudeBounds:
    sup_N: float
    sup_dN: float
    sup_d2N: float
    cap_N: float
    cap_dN: float
    cap_d2N: float
    window: float
    samples: int


def amplitude_bounds(noise: OneOverFNoise, window=None, samples: int = 1_000_000) -> AmplitudeBounds:
    """Sampled suprema of ``|N|``, ``|N'|``, ``|N''|`` over ``[0, window]``.

    Each sampled maximum is scaled by 1.01 and then capped at the analytic
    worst case, which is itself a valid bound. The default window is
    ``1000 / nu_min``.
    """
    if window is None:
        window = 1000.0 / noise.nu_min
    if window < 10.0 / noise.nu_min:
        raise WindowError(f"window {window} shorter than 10/nu_min = {10.0 / noise.nu_min}")
    if samples < MIN_SAMPLES:
        raise WindowError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    dt = window / (samples - 1)
    if dt > 0.25 / noise.nu_max:
        raise WindowError("sampling too coarse: fewer than 4 samples per shortest period")
    caps = noise.analytic_caps()
    vals = noise.sample_uniform(0.0, dt, samples)
    sups = [min(SAFETY_FACTOR * float(np.max(np.abs(v))), cap) for v, cap in zip(vals, caps)]
    return AmplitudeBounds(*sups, *caps, window=float(window), samples=int(samples))


def periodogram(values, dt):
    """One-sided power per FFT bin for a real uniformly sampled signal."""
    values = np.asarray(values, dtype=float)
    spec = np.fft.rfft(values) / len(values)
    freqs = np.fft.rfftfreq(len(values), dt)
    return freqs, np.abs(spec) ** 2
