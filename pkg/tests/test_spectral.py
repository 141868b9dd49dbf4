import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiabound.errors import (
    DegenerateSpectrumError,
    DimensionError,
    GapClosureError,
    RankError,
    ValidationError,
)
from adiabound.models import TongModel, tong_hamiltonian
from adiabound.spectral import (
    SIGMA_X,
    SIGMA_Z,
    HermitianOperator,
    Projector,
    SpectralData,
    band_gap,
    batched_two_norm,
    eigendecompose,
    gap_profile,
    ground_projector,
    operator_two_norm,
    projector_distance,
    subspace_projector,
    two_level_angles,
    two_level_eigenvectors,
)


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def power_iteration_norm(a, iters=5000):
    # largest eigenvalue of A^dagger A by plain power iteration
    ata = a.conj().T @ a
    v = np.ones(a.shape[1], dtype=complex)
    lam = 0.0
    for _ in range(iters):
        w = ata @ v
        lam_new = np.linalg.norm(w)
        v = w / lam_new
        if abs(lam_new - lam) <= 1e-15 * lam_new:
            break
        lam = lam_new
    return np.sqrt(lam_new)


class TestNorm:
    def test_pauli_z(self):
        assert operator_two_norm(SIGMA_Z) == pytest.approx(1.0, abs=1e-15)

    def test_random_matches_power_iteration(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            assert operator_two_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-10)

    def test_tong_derivative_norm(self):
        m = TongModel()
        tau = 3.0
        from adiabound.models import tong_schedule

        d = tong_schedule(m, tau).derivative(0.37)
        expected = abs(m.omega * m.omega0 * tau * np.sin(m.theta)) / 2
        assert operator_two_norm(d) == pytest.approx(expected, rel=1e-12)

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            operator_two_norm(np.zeros((2, 3)))

    def test_batched_agrees(self):
        rng = np.random.default_rng(1)
        stack = rng.normal(size=(6, 3, 3)) + 1j * rng.normal(size=(6, 3, 3))
        want = [operator_two_norm(a) for a in stack]
        np.testing.assert_allclose(batched_two_norm(stack), want, rtol=1e-12)

    def test_hermitian_norm_is_max_abs_eigenvalue(self):
        rng = np.random.default_rng(2)
        h = random_hermitian(rng, 5)
        assert operator_two_norm(h) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(h))), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_submultiplicative_and_triangle(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        na, nb = operator_two_norm(a), operator_two_norm(b)
        assert operator_two_norm(a @ b) <= na * nb * (1 + 1e-12)
        assert operator_two_norm(a + b) <= (na + nb) * (1 + 1e-12)

    def test_unitary_and_projector_norms_are_one(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        assert operator_two_norm(q) == pytest.approx(1.0, abs=1e-10)
        p = subspace_projector(eigendecompose(random_hermitian(rng, 4)), 0, 1)
        assert operator_two_norm(np.asarray(p)) == pytest.approx(1.0, abs=1e-10)


class TestHermitianOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            HermitianOperator(np.array([[0, 1], [0, 0]]))

    def test_no_symmetrization(self):
        m = np.array([[1.0, 1e-13j], [-1e-13j, 2.0]])
        op = HermitianOperator(m)
        np.testing.assert_array_equal(np.asarray(op), m)

    def test_immutable(self):
        op = HermitianOperator(SIGMA_X)
        with pytest.raises((ValueError, AttributeError)):
            op.matrix[0, 0] = 3.0


class TestEigendecompose:
    def test_diagonal(self):
        spec = eigendecompose(np.diag([-1.0, 1.0]))
        np.testing.assert_allclose(spec.eigenvalues, [-1, 1])
        np.testing.assert_allclose(spec.eigenvectors, np.eye(2), atol=1e-15)

    def test_tong_eigenvalues_fixed(self):
        m = TongModel()
        rng = np.random.default_rng(4)
        for s, tau in rng.uniform(0, 20, size=(20, 2)):
            ev = eigendecompose(tong_hamiltonian(m, s / 20, tau)).eigenvalues
            np.testing.assert_allclose(ev, [-abs(m.omega0) / 2, abs(m.omega0) / 2], atol=1e-12)

    def test_reconstruction_and_invariants(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 8)
        spec = eigendecompose(h)
        v, lam = spec.eigenvectors, spec.eigenvalues
        hn = operator_two_norm(h)
        assert operator_two_norm(v @ np.diag(lam) @ v.conj().T - h) <= 1e-9 * hn
        assert np.all(np.diff(lam) >= 0)
        assert operator_two_norm(v.conj().T @ v - np.eye(8)) <= 1e-10
        for j in range(8):
            assert np.linalg.norm(h @ v[:, j] - lam[j] * v[:, j]) <= 1e-9 * hn

    def test_phase_convention(self):
        rng = np.random.default_rng(6)
        spec = eigendecompose(random_hermitian(rng, 5))
        for col in spec.eigenvectors.T:
            k = np.argmax(np.abs(col))
            assert abs(col[k].imag) < 1e-12 and col[k].real > 0

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            eigendecompose(np.array([[0, 1], [2, 0]]))


class TestTwoLevel:
    def test_sigma_x(self):
        e0, e1, th = two_level_angles(-1.0, 0.0)
        assert (e0, e1) == (-1.0, 1.0)
        assert th == pytest.approx(np.pi / 2)

    def test_flux_gap(self):
        t1 = 1e-3 * 2 * np.pi * 2e5
        e0, e1, _ = two_level_angles(-t1, 0.0)
        assert e1 - e0 == pytest.approx(2513.27, abs=0.01)

    def test_degenerate(self):
        with pytest.raises(DegenerateSpectrumError):
            two_level_angles(0.0, 0.0)

    def test_theta_in_open_interval(self):
        rng = np.random.default_rng(7)
        for a, b in rng.normal(size=(100, 2)):
            _, _, th = two_level_angles(a, b)
            assert 0.0 < th < np.pi

    def test_matches_eigendecompose(self):
        rng = np.random.default_rng(8)
        for a, b in rng.normal(size=(50, 2)):
            h = a * SIGMA_X + b * SIGMA_Z
            e0, e1, _ = two_level_angles(a, b)
            spec = eigendecompose(h)
            np.testing.assert_allclose(spec.eigenvalues, [e0, e1], atol=1e-10)
            vecs = two_level_eigenvectors(a, b)
            for k, e in enumerate((e0, e1)):
                np.testing.assert_allclose(h @ vecs[:, k], e * vecs[:, k], atol=1e-10)
                assert abs(abs(np.vdot(vecs[:, k], spec.eigenvectors[:, k])) - 1) < 1e-10


class TestProjectors:
    def test_ground_of_diag(self):
        p = subspace_projector(eigendecompose(np.diag([0.0, 1.0])), 0, 0)
        np.testing.assert_allclose(np.asarray(p), np.diag([1, 0]), atol=1e-15)

    def test_full_space(self):
        rng = np.random.default_rng(9)
        p = subspace_projector(eigendecompose(random_hermitian(rng, 4)), 0, 3)
        np.testing.assert_allclose(np.asarray(p), np.eye(4), atol=1e-12)

    def test_tong_commutes(self):
        h = np.asarray(tong_hamiltonian(TongModel(), 0.3, 7.0))
        p = np.asarray(subspace_projector(eigendecompose(h), 0, 0))
        assert np.trace(p).real == pytest.approx(1.0)
        assert operator_two_norm(h @ p - p @ h) <= 1e-9 * operator_two_norm(h)

    def test_index_errors(self):
        spec = eigendecompose(np.eye(2))
        with pytest.raises(IndexError):
            subspace_projector(spec, 1, 0)
        with pytest.raises(IndexError):
            subspace_projector(spec, 0, 2)

    def test_projector_validation(self):
        with pytest.raises(ValidationError):
            Projector(np.diag([1.0, 0.5]))
        assert Projector(np.diag([1.0, 0.0])).rank == 1

    def test_commutator_random(self):
        rng = np.random.default_rng(10)
        for n in (2, 3, 6):
            h = random_hermitian(rng, n)
            p = np.asarray(subspace_projector(eigendecompose(h), 0, n // 2))
            assert operator_two_norm(h @ p - p @ h) <= 1e-9 * operator_two_norm(h)


def rank1(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return Projector(np.outer(v, v.conj()))


class TestProjectorDistance:
    def test_identical(self):
        p = rank1([1, 0])
        assert projector_distance(p, p) == 0.0

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 0.7, 1.3, np.pi / 2])
    def test_rank1_angle(self, alpha):
        d = projector_distance(rank1([1, 0]), rank1([np.cos(alpha), np.sin(alpha)]))
        assert d == pytest.approx(abs(np.sin(alpha)), abs=1e-12)

    def test_tong_endpoint(self):
        m = TongModel()
        full = ground_projector(np.asarray(tong_hamiltonian(m, 0.0, 4.0)))
        diag = ground_projector(-0.5 * m.omega0 * np.cos(m.theta) * SIGMA_Z)
        assert projector_distance(full, diag) == pytest.approx(0.0005, rel=1e-6)

    def test_rank_mismatch(self):
        with pytest.raises(RankError):
            projector_distance(Projector(np.diag([1.0, 0.0, 0.0])), Projector(np.diag([1.0, 1.0, 0.0])))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_metric(self, seed):
        rng = np.random.default_rng(seed)
        ps = [rank1(rng.normal(size=3) + 1j * rng.normal(size=3)) for _ in range(3)]
        d = projector_distance
        assert d(ps[0], ps[1]) == pytest.approx(d(ps[1], ps[0]), abs=1e-12)
        assert d(ps[0], ps[2]) <= d(ps[0], ps[1]) + d(ps[1], ps[2]) + 1e-9
        assert 0.0 <= d(ps[0], ps[1]) <= 1.0


class TestGapProfile:
    def test_constant_spectrum(self):
        spectra = [eigendecompose(np.diag([0.0, 1.0]))] * 5
        prof = gap_profile(spectra, 0, 0, s=np.linspace(0, 1, 5))
        np.testing.assert_allclose(prof.gamma, 1.0)
        np.testing.assert_allclose(prof.width, 0.0)
        np.testing.assert_allclose(prof.D, 1.0)

    def test_tong_gap(self):
        m = TongModel()
        s = np.linspace(0, 1, 21)
        for tau in (0.5, 5.0, 50.0):
            spectra = [eigendecompose(np.asarray(tong_hamiltonian(m, x, tau))) for x in s]
            prof = gap_profile(spectra, s=s)
            np.testing.assert_allclose(prof.gamma, 10.0, atol=1e-12)

    def test_three_level_band(self):
        g, w = 0.7, 0.4
        spectra = [eigendecompose(np.diag([0.0, g, g + w]))] * 3
        prof = gap_profile(spectra, 0, 1, s=np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(prof.width, g)
        np.testing.assert_allclose(prof.gamma, w)
        np.testing.assert_allclose(prof.D, 1 + 2 * g / (np.pi * w))

    def test_upper_band_uses_lower_gap(self):
        gamma, width = band_gap(np.array([0.0, 1.0, 1.5]), 1, 2)
        assert gamma == pytest.approx(1.0) and width == pytest.approx(0.5)

    def test_closure_carries_s(self):
        s = np.array([0.0, 0.5, 1.0])
        spectra = [eigendecompose(np.diag([0.0, x])) for x in (1.0, 0.0, 1.0)]
        with pytest.raises(GapClosureError) as info:
            gap_profile(spectra, s=s)
        assert info.value.s == 0.5

    def test_extrema(self):
        s = np.linspace(0, 1, 11)
        spectra = [eigendecompose(np.diag([0.0, 1.0 + (x - 0.3) ** 2])) for x in s]
        prof = gap_profile(spectra, s=s)
        assert prof.gamma_min == pytest.approx(1.0)
        assert prof.argmin_s == pytest.approx(0.3)
        assert np.all(prof.gamma >= prof.gamma_min)
