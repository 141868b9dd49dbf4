import numpy as np
import pytest

from adiabound.bounds import bauer_fike_delta
from adiabound.errors import EvaluationError, ValidationError, WindowError
from adiabound.models import FluxQubitModel, TongModel, flux_drift, flux_noise, tong_drift, tong_noise
from adiabound.models.flux import REFERENCE_NOISE
from adiabound.schedule import (
    SAFETY_FACTOR,
    HamiltonianSchedule,
    NoiseProcess,
    chebyshev_points,
    combined_gap_profile,
    combined_schedule,
    default_grid,
    derivative_norm_bounds,
    endpoint_overlaps,
    noise_derivative_suprema,
    schedule_spectra,
    two_scale_bounds,
)
from adiabound.spectral import SIGMA_X, SIGMA_Z, gap_profile, operator_two_norm


def cos_schedule(analytic=True):
    first = (lambda s: -np.sin(s) * SIGMA_Z) if analytic else None
    second = (lambda s: -np.cos(s) * SIGMA_Z) if analytic else None
    return HamiltonianSchedule(2, lambda s: np.cos(s) * SIGMA_Z, first, second)


def single_cosine(A, nu):
    w = 2 * np.pi * nu
    return NoiseProcess.from_scalar(
        SIGMA_Z,
        lambda t: A * np.cos(w * t),
        lambda t: -A * w * np.sin(w * t),
        lambda t: -A * w**2 * np.cos(w * t),
        nu_min=nu,
        nu_max=nu,
    )


class TestHamiltonianSchedule:
    def test_chebyshev_points(self):
        p = chebyshev_points(11)
        assert len(p) == 11 and np.all((p > 0) & (p < 1))

    def test_analytic_derivatives_consistent(self):
        assert cos_schedule().check_derivatives() <= 1.0
        assert flux_drift(FluxQubitModel()).check_derivatives() <= 1.0
        assert tong_drift(TongModel()).check_derivatives() <= 1.0

    def test_wrong_derivative_detected(self):
        bad = HamiltonianSchedule(2, lambda s: np.cos(s) * SIGMA_Z, lambda s: np.sin(s) * SIGMA_Z)
        assert bad.check_derivatives() > 1.0

    def test_finite_difference_fallback(self):
        fd = cos_schedule(analytic=False)
        for s in (0.1, 0.5, 0.9):
            np.testing.assert_allclose(fd.derivative(s), -np.sin(s) * SIGMA_Z, atol=1e-8)
            np.testing.assert_allclose(fd.second_derivative(s), -np.cos(s) * SIGMA_Z, atol=1e-5)

    def test_non_hermitian_evaluator(self):
        sched = HamiltonianSchedule(2, lambda s: np.array([[0, 1], [0, 0]]))
        with pytest.raises(ValidationError):
            sched.check_hermitian([0.5])

    def test_non_finite(self):
        sched = HamiltonianSchedule(2, lambda s: SIGMA_Z, lambda s: np.full((2, 2), np.nan), lambda s: 0 * SIGMA_Z)
        with pytest.raises(EvaluationError):
            derivative_norm_bounds(sched)


class TestDerivativeNormBounds:
    def test_constant(self):
        sched = HamiltonianSchedule(2, lambda s: SIGMA_X + 0.5 * SIGMA_Z)
        db = derivative_norm_bounds(sched, default_grid(101))
        assert db.b1 == pytest.approx(0.0, abs=1e-9) and db.b2 == pytest.approx(0.0, abs=1e-6)

    def test_flux_drift(self):
        model = FluxQubitModel()
        db = derivative_norm_bounds(flux_drift(model))
        assert abs(model.epsilon) * model.r1 == pytest.approx(1206.4, abs=0.05)
        assert db.b1 == pytest.approx(SAFETY_FACTOR * abs(model.epsilon) * model.r1, rel=1e-12)
        assert db.b2 == 0.0

    def test_cosine_suprema(self):
        db = derivative_norm_bounds(cos_schedule())
        assert db.b1 == pytest.approx(1.01 * np.sin(1.0), rel=1e-12)
        assert db.b2 == pytest.approx(1.01, rel=1e-12)

    def test_refinement_monotone(self):
        sched = cos_schedule()
        coarse = derivative_norm_bounds(sched, default_grid(101))
        fine = derivative_norm_bounds(sched, default_grid(1001))
        assert fine.b1 >= coarse.b1 and fine.b2 >= coarse.b2

    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            derivative_norm_bounds(cos_schedule(), np.linspace(0, 1, 50))
        with pytest.raises(ValidationError):
            derivative_norm_bounds(cos_schedule(), np.linspace(0, 0.9, 200))


class TestTwoScaleBounds:
    def test_zero_noise(self):
        ts = two_scale_bounds(flux_drift(FluxQubitModel()), NoiseProcess.zero(2), t_window=1.0)
        assert ts.d1 == 0.0 and ts.d2 == 0.0

    def test_single_cosine(self):
        A, nu = 0.3, 2.0
        w = 2 * np.pi * nu
        ts = two_scale_bounds(cos_schedule(), single_cosine(A, nu))
        assert w * A <= ts.d1 <= 1.01 * w * A * (1 + 1e-12)
        assert w**2 * A <= ts.d2 <= 1.01 * w**2 * A * (1 + 1e-12)
        assert ts.d1 == pytest.approx(1.01 * w * A, rel=1e-6)

    def test_window_too_short(self):
        with pytest.raises(WindowError):
            two_scale_bounds(cos_schedule(), single_cosine(1.0, 2.0), t_window=1.0)

    def test_undeclared_band_needs_window(self):
        with pytest.raises(ValidationError):
            two_scale_bounds(cos_schedule(), NoiseProcess.zero(2))

    def test_suprema_include_value(self):
        sup = noise_derivative_suprema(single_cosine(0.3, 2.0), 5.0, 10_001)
        assert sup[0] == pytest.approx(0.3, rel=1e-9)

    def test_combined_derivatives_chain_rule(self):
        tau = 3.0
        sched = combined_schedule(cos_schedule(), single_cosine(0.2, 0.7), tau)
        assert sched.check_derivatives() <= 1.0


class TestGapProfiles:
    def test_tong_combined(self):
        m = TongModel()
        grid = default_grid(101)
        for tau in (0.3, 4.0, 60.0):
            prof = combined_gap_profile(tong_drift(m), tong_noise(m), tau, grid)
            np.testing.assert_allclose(prof.gamma, 10.0, atol=1e-10)

    def test_flux_noiseless_minimum_at_start(self):
        prof = combined_gap_profile(flux_drift(FluxQubitModel()), NoiseProcess.zero(2), 0.01)
        assert prof.argmin_s == 0.0
        assert prof.gamma_min == pytest.approx(2513.27, abs=0.01)

    def test_bauer_fike_consistency(self):
        drift = HamiltonianSchedule(2, lambda s: np.diag([0.0, 1.0 + s]))
        eps = 0.01
        noise = NoiseProcess.from_scalar(
            SIGMA_X, lambda t: eps * np.sin(t), lambda t: eps * np.cos(t), lambda t: -eps * np.sin(t)
        )
        grid = default_grid(101)
        drift_gamma = gap_profile(schedule_spectra(drift, grid), s=grid).gamma
        prof = combined_gap_profile(drift, noise, 5.0, grid)
        assert prof.gamma_min >= drift_gamma.min() - 2 * eps
        assert np.all(np.abs(prof.gamma - drift_gamma) <= 2 * eps + 1e-12)


class TestEndpointOverlaps:
    def test_zero_noise(self):
        ov = endpoint_overlaps(flux_drift(FluxQubitModel()), NoiseProcess.zero(2), 0.01)
        assert (ov.delta0, ov.delta1) == (0.0, 0.0)
        assert ov.provenance == "exact-projector"

    def test_tong(self):
        m = TongModel()
        ov = endpoint_overlaps(tong_drift(m), tong_noise(m), 7.0)
        assert ov.delta0 == pytest.approx(0.0005, rel=1e-6)
        assert ov.delta1 == pytest.approx(0.0005, rel=1e-6)

    def test_flux_noise_scale(self):
        worst = 0.0
        for seed in range(5):
            model = FluxQubitModel().with_noise(**REFERENCE_NOISE, seed=seed)
            noise = flux_noise(model)
            ov = endpoint_overlaps(flux_drift(model), noise, 0.05)
            # Bauer-Fike with the analytic noise cap as perturbation size
            cap = model.noise1.analytic_caps()[0] * model.coupling_factor
            bf = bauer_fike_delta(cap, 2 * model.t1)
            assert ov.delta0 <= bf and ov.delta1 <= bf
            worst = max(worst, ov.delta0, ov.delta1)
        assert 1.8e-7 <= worst <= 1.8e-5
