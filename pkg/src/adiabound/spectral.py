"""Dense linear algebra for small Hermitian operators.

Energies are in MHz with hbar = 1 and times in microseconds, so products
like ``omega * t`` are already dimensionless.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    DimensionError,
    GapClosureError,
    RankError,
    ValidationError,
)

HERMITIAN_ATOL = 1e-12
PROJECTOR_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionError(f"{name} must have dim >= 1")
    return a


@dataclass(frozen=True)
class HermitianOperator:
    """Immutable Hermitian matrix.

    Construction rejects anything whose entries differ from their conjugate
    transpose by more than 1e-12 absolute; nothing is symmetrized.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix, "HermitianOperator")
        if not np.all(np.isfinite(m)):
            raise ValidationError("HermitianOperator entries must be finite")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITIAN_ATOL:
            raise ValidationError(
                f"matrix is not Hermitian: max |A - A^H| = {dev:.3e} > {HERMITIAN_ATOL}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __add__(self, other):
        return HermitianOperator(self.matrix + np.asarray(other))

    def __sub__(self, other):
        return HermitianOperator(self.matrix - np.asarray(other))


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector; ``rank`` is its trace rounded to an integer."""

    matrix: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        m = _square(self.matrix, "Projector")
        if np.max(np.abs(m - m.conj().T)) > PROJECTOR_ATOL:
            raise ValidationError("projector is not Hermitian")
        if operator_two_norm(m @ m - m) > PROJECTOR_ATOL:
            raise ValidationError("projector is not idempotent")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "rank", int(round(np.trace(m).real)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.matrix)


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.array(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))
        self.eigenvalues.setflags(write=False)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class GapProfile:
    """Gap, band width and contour ratio along a schedule grid.

    ``D = 1 + 2 w / (pi gamma)`` at each point; extrema are over the grid.
    """

    s: np.ndarray
    gamma: np.ndarray
    width: np.ndarray
    D: np.ndarray

    @property
    def gamma_min(self) -> float:
        return float(np.min(self.gamma))

    @property
    def D_max(self) -> float:
        return float(np.max(self.D))

    @property
    def w_max(self) -> float:
        return float(np.max(self.width))

    @property
    def argmin_s(self) -> float:
        return float(self.s[int(np.argmin(self.gamma))])


def operator_two_norm(a) -> float:
    """Largest singular value of a square matrix."""
    a = _square(a)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix entries must be finite")
    if a.shape[0] == 1:
        return float(abs(a[0, 0]))
    return float(np.linalg.norm(a, 2))


def batched_two_norm(stack) -> np.ndarray:
    """Two-norms of a stack of square matrices with shape (..., d, d)."""
    stack = np.asarray(stack)
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def _fix_phases(vecs):
    # largest-magnitude component real and positive, first index on ties
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)


def eigendecompose(h) -> SpectralData:
    """Eigen-decomposition with a deterministic eigenvector phase convention."""
    if not isinstance(h, HermitianOperator):
        h = HermitianOperator(h)
    vals, vecs = np.linalg.eigh(h.matrix)
    return SpectralData(vals, _fix_phases(vecs))


def two_level_angles(a: float, b: float):
    """Energies and mixing angle of ``a sigma_x + b sigma_z``.

    Returns ``(E0, E1, theta)`` with ``E0 = -sqrt(a^2 + b^2)`` and ``theta``
    the principal value of ``arccot(b / a)`` in ``(0, pi)``. The angle is
    computed as ``atan2(a, b) mod pi`` so that ``a -> 0`` does not overflow;
    ``a == 0`` maps to the endpoint ``theta = 0``.
    """
    r = float(np.hypot(a, b))
    if r == 0.0:
        raise DegenerateSpectrumError("a = b = 0 gives a degenerate two-level spectrum")
    theta = float(np.mod(np.arctan2(a, b), np.pi))
    return -r, r, theta


def rotating_basis(theta):
    """Real eigenbasis columns ``(-sin, cos)`` and ``(cos, sin)`` of half-angle.

    For ``theta = atan2(a, b)`` (taken continuously) the first column is the
    ground state of ``a sigma_x + b sigma_z``; on the principal ``arccot``
    branch with ``a < 0`` the two columns swap roles.
    """
    half = 0.5 * np.asarray(theta, dtype=float)
    c, s = np.cos(half), np.sin(half)
    return np.stack([np.stack([-s, c], axis=-1), np.stack([c, s], axis=-1)], axis=-1)


def two_level_eigenvectors(a: float, b: float) -> np.ndarray:
    """Columns: ground then excited state of ``a sigma_x + b sigma_z``."""
    if a == 0.0 and b == 0.0:
        raise DegenerateSpectrumError("a = b = 0 gives a degenerate two-level spectrum")
    return rotating_basis(np.arctan2(a, b)).astype(complex)


def subspace_projector(spec: SpectralData, m: int, n: int) -> Projector:
    """Projector onto the eigenvectors with indices ``m..n`` inclusive."""
    if not (0 <= m <= n < spec.dim):
        raise IndexError(f"need 0 <= m <= n < {spec.dim}, got m={m}, n={n}")
    v = spec.eigenvectors[:, m : n + 1]
    return Projector(v @ v.conj().T)


def ground_projector(h) -> Projector:
    spec = eigendecompose(h)
    if spec.dim > 1 and spec.eigenvalues[1] - spec.eigenvalues[0] <= 0.0:
        raise DegenerateSpectrumError("ground state is degenerate")
    return subspace_projector(spec, 0, 0)


def projector_distance(p1, p2) -> float:
    """``||P1 - P2||``, the sine of the largest principal angle.

    Only meaningful for equal rank, where it lies in [0, 1]; mismatched
    ranks are rejected.
    """
    if not isinstance(p1, Projector):
        p1 = Projector(p1)
    if not isinstance(p2, Projector):
        p2 = Projector(p2)
    if p1.dim != p2.dim:
        raise DimensionError(f"projector dims differ: {p1.dim} vs {p2.dim}")
    if p1.rank != p2.rank:
        raise RankError(f"projector ranks differ: {p1.rank} vs {p2.rank}")
    return min(1.0, operator_two_norm(p1.matrix - p2.matrix))


def band_gap(eigenvalues, m: int, n: int):
    """Return ``(gamma, w)`` for the band ``m..n`` of one ascending spectrum."""
    lam = np.asarray(eigenvalues, dtype=float)
    dim = len(lam)
    if not (0 <= m <= n < dim):
        raise IndexError(f"need 0 <= m <= n < {dim}, got m={m}, n={n}")
    gaps = []
    if n + 1 < dim:
        gaps.append(lam[n + 1] - lam[n])
    if m > 0:
        gaps.append(lam[m] - lam[m - 1])
    if not gaps:
        raise ValueError("band covers the whole spectrum; no gap is defined")
    return min(gaps), lam[n] - lam[m]


def gap_profile(
    spectra: Sequence[SpectralData],
    m: int = 0,
    n: int = 0,
    s: Optional[Sequence[float]] = None,
) -> GapProfile:
    """Tabulate gamma, w and D over a sequence of spectra.

    Raises :class:`GapClosureError` at the first grid point with gamma <= 0.
    """
    if s is None:
        s = np.linspace(0.0, 1.0, len(spectra))
    s = np.asarray(s, dtype=float)
    if len(s) != len(spectra):
        raise DimensionError("s grid and spectra lengths differ")
    gamma = np.empty(len(spectra))
    width = np.empty(len(spectra))
    for k, spec in enumerate(spectra):
        g, w = band_gap(spec.eigenvalues, m, n)
        if not g > 0.0:
            raise GapClosureError(f"gap closes at s = {s[k]!r} (gamma = {g!r})", s=float(s[k]))
        gamma[k] = g
        width[k] = w
    D = 1.0 + 2.0 * width / (np.pi * gamma)
    return GapProfile(s=s, gamma=gamma, width=width, D=D)
