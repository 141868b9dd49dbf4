from .flux import (
    E_J_DEFAULT,
    REFERENCE_AMPLITUDES,
    REFERENCE_NOISE,
    REFERENCE_OVERLAPS,
    FluxAmplitudes,
    FluxPotentialParams,
    FluxQubitModel,
    coupling_factor_from_bounds,
    flux_bound_inputs,
    flux_coefficients,
    flux_drift,
    flux_noise,
    flux_potential,
    flux_potential_gradient,
    flux_provider,
    r2_from_coupling_factor,
)
from .tong import (
    NoiseBoundInputs,
    TongModel,
    tong_bound_inputs,
    tong_drift,
    tong_exact_error,
    tong_exact_unitary,
    tong_hamiltonian,
    tong_noise,
    tong_rotating_frame_provider,
    tong_schedule,
)
