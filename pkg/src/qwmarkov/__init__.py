"""Discrete-time quantum walk on the line, split into Markovian and interference parts."""

from ._backend import NAME as BACKEND
from .asymptotics import (
    HADAMARD,
    AmplitudeField,
    AsymptoticConstants,
    EffectiveInitialAmplitudes,
    KickedRotorParams,
    bessel_moments,
    bessel_solution,
    bessel_variance_coefficient,
    coin_from_kicked_rotor,
    decoupled_map_check,
    default_effective_initials,
    dispersion_omega,
    hadamard_amplitudes_fourier,
    hadamard_fourier_state,
    interference_sums_asymptotic,
    kicked_rotor_strength,
    propagation_speed,
)
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DivergenceError,
    NoCorrespondenceError,
    NormalizationError,
    ShapeError,
    TrivialAngleWarning,
    UsageError,
    WalkError,
)
from .markov import (
    TransitionKernel,
    diffusion_coefficient,
    evolve_master,
    kernel_entry,
    run_master,
    step_master,
    step_master_with_interference,
    step_position_twostep,
)
from .moments import (
    HADAMARD_A,
    HADAMARD_B,
    FitResult,
    MomentRecord,
    MomentSeries,
    decoherent_closed_form,
    decoherent_constants,
    fit_polynomial,
    hadamard_moment_closed_form,
    hadamard_moment_map,
    hadamard_variance_coefficient,
    moments_direct,
    moments_recurrence_step,
    relaxation_time,
)
from .walk import (
    Chirality,
    CoinAngle,
    InterferenceField,
    JointDistribution,
    PositionDistribution,
    SpinorField,
    evolve,
    interference,
    make_initial,
    position_distribution,
    run_unitary,
    step_unitary,
    two_step_position_identity,
)

__version__ = "0.1.0"
