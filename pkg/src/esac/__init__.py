"""Certification and simulation toolkit for event-triggered sequence-based
anytime control (E-SAC).

Builds the buffer-content Markov chains of the buffered schemes, certifies
stochastic stability analytically (spectral radius, closed-form indices,
geometric expectation bounds) and validates the certificates by closed-loop
Monte Carlo simulation of the actual control algorithms.
"""

from .channel import ChannelModel, effective_availability
from .chain import BufferChain, min_buffer_size, shift_target, state_space, transition_matrix
from .schemes import Buffer, ControlLaw, a1_step, a2_step, b_step, shift
from .simulate import (
    MonteCarloResult,
    PlantModel,
    SchemeConfig,
    Trajectory,
    example_system,
    monte_carlo,
    sample_env,
    simulate_trajectory,
)
from .stability import (
    CertificationReport,
    ContractionSpec,
    CriticalAlpha,
    block_schur_g1,
    certification_matrix,
    certify,
    critical_alpha,
    gain_diagonal,
    is_schur,
    omega_a1,
    psi_a2,
    solve_certificate,
    spectral_radius,
    theorem1_bounds,
)
from .sweep import BoundaryPoint, SweepSpec, boundary_curve

__all__ = [
    "Buffer",
    "BufferChain",
    "BoundaryPoint",
    "CertificationReport",
    "ChannelModel",
    "ContractionSpec",
    "ControlLaw",
    "CriticalAlpha",
    "MonteCarloResult",
    "PlantModel",
    "SchemeConfig",
    "SweepSpec",
    "Trajectory",
    "a1_step",
    "a2_step",
    "b_step",
    "block_schur_g1",
    "boundary_curve",
    "certification_matrix",
    "certify",
    "critical_alpha",
    "effective_availability",
    "example_system",
    "gain_diagonal",
    "is_schur",
    "min_buffer_size",
    "monte_carlo",
    "omega_a1",
    "psi_a2",
    "sample_env",
    "shift",
    "shift_target",
    "simulate_trajectory",
    "solve_certificate",
    "spectral_radius",
    "state_space",
    "theorem1_bounds",
    "transition_matrix",
]

__version__ = "0.1.0"
