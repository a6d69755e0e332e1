"""Truncated-Fock-space simulation of finite-energy GKP states."""

from .operators import (
    displacement_op,
    exact_displacement,
    hermite_basis,
    modular_quadrature,
    operators,
    spectral_function,
)
from .states import (
    GkpFockParams,
    expectation,
    fidelity_to_pure,
    gkp_state,
    leakage,
    logical_y_state,
    stabilizer_ops,
    twirl_noise,
)
from .wigner import wigner
from .paulis import generalized_pauli
from .sbs import evolve_sbs, sbs_round
from .dissipators import dissipator_set
from .lindblad import lindblad_evolve, stability_limit
from .hamiltonian import gkp_hamiltonian, hadamard_overlap

__all__ = [
    "operators", "displacement_op", "exact_displacement", "hermite_basis", "spectral_function",
    "modular_quadrature", "GkpFockParams", "gkp_state", "logical_y_state",
    "stabilizer_ops", "expectation", "fidelity_to_pure", "leakage",
    "twirl_noise", "wigner", "generalized_pauli", "sbs_round", "evolve_sbs",
    "dissipator_set", "lindblad_evolve", "stability_limit",
    "gkp_hamiltonian", "hadamard_overlap",
]
