"""Entanglement spectrum statistics of matchgate circuits on dense statevectors."""
from .errors import ConfigurationError, InvalidMatchgateError, NonCliffordError, NonGaussianError
from .fermion import fermionic_weight, matchgate_rotation
from .gates import Circuit, MatchgateParams, brickwork, conjugation_circuit, random_matchgate, swap_injection
from .inputs import InputKind, InputSpec, prepare
from .statevector import LocalUnitary, Statevector, schmidt_spectrum, schmidt_values
from .stats import gap_ratios, kl_divergence, mean_r_tilde, page_entropy, von_neumann_entropy

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "InvalidMatchgateError", "NonCliffordError", "NonGaussianError",
    "fermionic_weight", "matchgate_rotation",
    "Circuit", "MatchgateParams", "brickwork", "conjugation_circuit", "random_matchgate", "swap_injection",
    "InputKind", "InputSpec", "prepare",
    "LocalUnitary", "Statevector", "schmidt_spectrum", "schmidt_values",
    "gap_ratios", "kl_divergence", "mean_r_tilde", "page_entropy", "von_neumann_entropy",
]
