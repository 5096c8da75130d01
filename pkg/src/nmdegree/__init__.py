"""Non-Markovianity degree of random unitary evolutions of d-level systems."""
from .channels import DensityMatrix, DiagonalMap, apply_generator, apply_map, phi_decomposition, propagator
from .divisibility import classify, k_positivity_certificate
from .rates import (
    CumulativeRates,
    ProbabilityProfile,
    RateProfile,
    Spectrum,
    TimeGrid,
    cumulative,
    lambdas_from_probs,
    mu_from_spectrum,
    probs_from_lambdas,
    probs_from_rates,
    rates_from_mu,
    rates_from_spectrum,
    spectrum_from_cumulative,
    spectrum_from_rates,
)
from .scenarios import pauli_tanh, qutrit_e3
from .weyl import WeylBasis, WeylIndex, adjoint, build_basis, compose, conjugation_phase

__version__ = "0.1.0"
