"""Explicit-constant adiabatic error bounds.

Every bound here is assembled as ``A*tau + B + C/tau + endpoint`` and
reported through :class:`BoundResult`, which keeps the raw sum next to the
value clamped at 1 (the error operator is a product of a unitary and two
projectors, so its norm never exceeds 1).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EnvironmentTooHotError, InapplicableBoundError, ValidationError
from .spectral import GapProfile

PROVENANCES = ("exact-projector", "sin-theta", "bauer-fike", "zero")


@dataclass(frozen=True)
class DerivativeBounds:
    """Suprema of ``||dH/ds||`` and ``||d2H/ds2||``, optionally tabulated on ``s``."""

    b1: float
    b2: float
    s: Optional[np.ndarray] = None
    b1_s: Optional[np.ndarray] = None
    b2_s: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.b1 < 0 or self.b2 < 0:
            raise ValidationError("derivative bounds must be nonnegative")
        for name in ("b1_s", "b2_s"):
            arr = getattr(self, name)
            if arr is not None and np.any(np.asarray(arr) < 0):
                raise ValidationError(f"tabulated {name} must be nonnegative")


@dataclass(frozen=True)
class TwoScaleBounds:
    """Drift (``c1``, ``c2``, per unit s) and noise (``d1``, ``d2``, per unit t) bounds."""

    c1: float
    c2: float
    d1: float
    d2: float

    def __post_init__(self):
        if min(self.c1, self.c2, self.d1, self.d2) < 0:
            raise ValidationError("two-scale bounds must be nonnegative")


@dataclass(frozen=True)
class EndpointOverlaps:
    delta0: float
    delta1: float
    provenance: str = "exact-projector"

    def __post_init__(self):
        for d in (self.delta0, self.delta1):
            if not 0.0 <= d <= 1.0:
                raise ValidationError(f"endpoint overlap {d!r} outside [0, 1]")
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")

    @property
    def endpoint_term(self) -> float:
        return self.delta0 + self.delta1 + self.delta0 * self.delta1

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, "zero")


@dataclass(frozen=True)
class BoundTerms:
    tau_linear_coeff: float = 0.0
    constant_term: float = 0.0
    inv_tau_coeff: float = 0.0
    endpoint_term: float = 0.0

    def __post_init__(self):
        for name in ("tau_linear_coeff", "constant_term", "inv_tau_coeff", "endpoint_term"):
            v = float(getattr(self, name))
            if v < 0 or np.isnan(v):
                raise ValidationError(f"bound term {name} must be nonnegative, got {v!r}")
            object.__setattr__(self, name, v)

    def evaluate(self, tau: float) -> float:
        return (
            self.tau_linear_coeff * tau
            + self.constant_term
            + self.inv_tau_coeff / tau
            + self.endpoint_term
        )


@dataclass(frozen=True)
class BoundResult:
    value: float
    tau: float
    terms: BoundTerms
    raw: float = field(default=float("nan"))

    @classmethod
    def from_terms(cls, terms: BoundTerms, tau: float) -> "BoundResult":
        raw = float(terms.evaluate(tau))
        return cls(value=min(1.0, raw), tau=float(tau), terms=terms, raw=raw)

    def at(self, tau: float) -> "BoundResult":
        """Same coefficients evaluated at another run time."""
        return BoundResult.from_terms(self.terms, tau)


@dataclass(frozen=True)
class TauInterval:
    tau_min: float
    tau_max: float
    tau_star: Optional[float] = None


def _check_tau(tau):
    if not tau > 0:
        raise ValidationError(f"tau must be positive, got {tau!r}")


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValidationError(f"gap must be positive, got {gamma!r}")


def _check_s(s):
    if not 0.0 < s <= 1.0:
        raise ValidationError(f"s must lie in (0, 1], got {s!r}")


def _constant_form_coeff(b1, b2, gamma, D, s):
    # coefficient of 1/tau in the constant-bound form of the theorem
    return 8.0 * D**2 / gamma**2 * (2.0 * b1 + s * b2 + s * 8.0 * (1.0 + D) * b1**2 / gamma)


def at_bound_constant(b1, b2, gamma_bar, D_bar, tau, s=1.0) -> BoundResult:
    """Constant-bound form: ``(8 D^2 / tau g^2)(2 b1 + s b2 + s 8(1+D) b1^2 / g)``.

    With ``D_bar = 1`` (non-degenerate ground state) the last term becomes
    ``16 s b1^2 / g``.
    """
    _check_gamma(gamma_bar)
    _check_tau(tau)
    _check_s(s)
    if D_bar < 1:
        raise ValidationError(f"D_bar must be >= 1, got {D_bar!r}")
    if b1 < 0 or b2 < 0:
        raise ValidationError("derivative bounds must be nonnegative")
    c = _constant_form_coeff(b1, b2, gamma_bar, D_bar, s)
    return BoundResult.from_terms(BoundTerms(inv_tau_coeff=c), tau)


def at_bound_integral(profile: GapProfile, b1_s, b2_s, tau, s_end=None) -> BoundResult:
    """Integral form on the profile's grid.

    Two boundary terms ``8 D^2 b1 / (tau g^2)`` at 0 and ``s_end`` plus the
    composite-trapezoid integral of ``(8 D^2/tau g^2)(8(1+D) b1^2/g + b2)``.
    The quadrature is O(h^2); refine the grid for accuracy. Points between
    grid nodes are linearly interpolated.
    """
    _check_tau(tau)
    s = np.asarray(profile.s, dtype=float)
    b1_s = np.asarray(b1_s, dtype=float)
    b2_s = np.asarray(b2_s, dtype=float)
    if b1_s.shape != s.shape or b2_s.shape != s.shape:
        raise ValidationError("tabulated b1, b2 must match the profile grid")
    if np.any(b1_s < 0) or np.any(b2_s < 0):
        raise ValidationError("tabulated derivative bounds must be nonnegative")
    if np.any(profile.gamma <= 0):
        raise ValidationError("gap profile must be positive")
    if s[0] != 0.0:
        raise ValidationError("profile grid must start at s = 0")
    if s_end is None:
        s_end = s[-1]
    _check_s(s_end)
    if s_end > s[-1]:
        raise ValidationError(f"s_end = {s_end} beyond the profile grid")

    g, D = profile.gamma, profile.D
    boundary = 8.0 * D**2 * b1_s / g**2
    integrand = 8.0 * D**2 / g**2 * (8.0 * (1.0 + D) * b1_s**2 / g + b2_s)

    inside = s < s_end
    s_part = np.append(s[inside], s_end)
    f_part = np.append(integrand[inside], np.interp(s_end, s, integrand))
    integral = float(np.sum(0.5 * (f_part[1:] + f_part[:-1]) * np.diff(s_part)))
    coeff = boundary[0] + float(np.interp(s_end, s, boundary)) + integral
    return BoundResult.from_terms(BoundTerms(inv_tau_coeff=coeff), tau)


def at_initial_bound(delta, b1, b2, gamma_bar, tau, s=1.0) -> BoundResult:
    """Ground-state bound when the initial state carries a component ``delta``
    outside the ground state; normalized by ``eta = (1 + |delta|^2)^(-1/2)``."""
    base = at_bound_constant(b1, b2, gamma_bar, 1.0, tau, s)
    mag = abs(delta)
    if not np.isfinite(mag):
        raise ValidationError("delta must be finite")
    eta = 1.0 / np.sqrt(1.0 + mag**2)
    terms = BoundTerms(inv_tau_coeff=eta * base.terms.inv_tau_coeff, endpoint_term=eta * mag)
    return BoundResult.from_terms(terms, tau)


def at_error_bound(b1, b2, gamma_eps, overlaps: EndpointOverlaps, tau) -> BoundResult:
    """Systematic-perturbation bound at s = 1.

    ``b1``, ``b2`` and ``gamma_eps`` describe the *perturbed* Hamiltonian.
    """
    base = at_bound_constant(b1, b2, gamma_eps, 1.0, tau, 1.0)
    terms = BoundTerms(
        inv_tau_coeff=base.terms.inv_tau_coeff, endpoint_term=overlaps.endpoint_term
    )
    return BoundResult.from_terms(terms, tau)


def sin_theta_delta(perturbation_norm, gap_to_perturbed_ground) -> float:
    """``eps||Delta|| / (lambda_1 - lambda_0^eps)``, clamped to [0, 1]."""
    if perturbation_norm < 0:
        raise ValidationError("perturbation norm must be nonnegative")
    if not gap_to_perturbed_ground > 0:
        raise InapplicableBoundError(
            f"sin-theta bound needs a positive gap, got {gap_to_perturbed_ground!r}"
        )
    return min(1.0, perturbation_norm / gap_to_perturbed_ground)


def bauer_fike_delta(perturbation_norm, unperturbed_gap) -> float:
    """``eps||Delta|| / (gamma - eps||Delta||)``, clamped to [0, 1]."""
    if perturbation_norm < 0:
        raise ValidationError("perturbation norm must be nonnegative")
    denom = unperturbed_gap - perturbation_norm
    if not denom > 0:
        raise InapplicableBoundError(
            f"Bauer-Fike bound needs gap > perturbation, got {unperturbed_gap!r} <= {perturbation_norm!r}"
        )
    return min(1.0, perturbation_norm / denom)


def at_env_bound(env_norm, coupling_norms, gamma_bar, b1, b2, tau, w=None) -> BoundResult:
    """Bound for a system weakly coupled to a cold environment.

    ``coupling_norms`` is ``(at_0, sup, at_1)`` of ``eps ||Delta(s)||``.
    The width ``w`` defaults to its smallest admissible value
    ``env_norm + 2 sup``; the theorem needs ``w < gamma_bar``.
    """
    _check_gamma(gamma_bar)
    _check_tau(tau)
    c0, csup, c1 = (float(x) for x in coupling_norms)
    if min(env_norm, c0, csup, c1) < 0:
        raise ValidationError("norms must be nonnegative")
    w_min = env_norm + 2.0 * csup
    if w is None:
        w = w_min
    elif w < w_min:
        raise ValidationError(f"w = {w} below env_norm + 2 sup coupling = {w_min}")
    if not w < gamma_bar:
        raise EnvironmentTooHotError(
            f"no admissible width: env_norm + 2 sup coupling = {w_min} >= gap {gamma_bar}"
        )

    if csup == 0.0:
        gamma_eps, D_bar = gamma_bar, 1.0
        overlaps = EndpointOverlaps.zero()
    else:
        gamma_eps = gamma_bar - w
        D_bar = 1.0 + 2.0 * w / (np.pi * gamma_eps)

        def delta(c):
            return min(1.0, c / (gamma_bar - env_norm - c))

        overlaps = EndpointOverlaps(delta(c0), delta(c1), "bauer-fike")
    coeff = _constant_form_coeff(b1, b2, gamma_eps, D_bar, 1.0)
    terms = BoundTerms(inv_tau_coeff=coeff, endpoint_term=overlaps.endpoint_term)
    return BoundResult.from_terms(terms, tau)


def noise_coefficients(ts: TwoScaleBounds, gamma_noise):
    """``(A, B, C)`` of ``A tau + B + C / tau`` before endpoint overlaps."""
    _check_gamma(gamma_noise)
    g = gamma_noise
    pre = 8.0 / g**2
    A = pre * (ts.d2 + 16.0 * ts.d1**2 / g)
    B = pre * 2.0 * ts.d1 * (1.0 + 16.0 * ts.c1 / g)
    C = pre * (2.0 * ts.c1 + ts.c2 + 16.0 * ts.c1**2 / g)
    return A, B, C


def at_noise_bound(ts: TwoScaleBounds, gamma_noise, overlaps: EndpointOverlaps, tau) -> BoundResult:
    """Three-term bound for a drift plus additive real-time noise."""
    _check_tau(tau)
    A, B, C = noise_coefficients(ts, gamma_noise)
    terms = BoundTerms(
        tau_linear_coeff=A,
        constant_term=B,
        inv_tau_coeff=C,
        endpoint_term=overlaps.endpoint_term,
    )
    return BoundResult.from_terms(terms, tau)


def feasible_tau_interval(bound, tolerance) -> Optional[TauInterval]:
    """Run times for which ``A tau + B + C/tau <= tolerance``.

    ``bound`` is a :class:`BoundResult` or :class:`BoundTerms`; ``B`` here
    includes the endpoint term. Returns None when no tau qualifies.
    ``tau_star = sqrt(C/A)`` is reported when both A and C are positive.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValidationError("tolerance must lie in (0, 1)")
    terms = bound.terms if isinstance(bound, BoundResult) else bound
    A = terms.tau_linear_coeff
    B = terms.constant_term + terms.endpoint_term
    C = terms.inv_tau_coeff
    slack = tolerance - B
    if A == 0.0 and C == 0.0:
        return TauInterval(0.0, np.inf) if slack >= 0 else None
    if slack <= 0:
        return None
    if A == 0.0:
        return TauInterval(C / slack, np.inf)
    if C == 0.0:
        return TauInterval(0.0, slack / A)
    disc = slack**2 - 4.0 * A * C
    if disc < 0:
        return None
    root = np.sqrt(disc)
    # numerically stable pair of roots of A t^2 - slack t + C
    q = 0.5 * (slack + root)
    return TauInterval(C / q, q / A, float(np.sqrt(C / A)))
