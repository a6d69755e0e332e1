"""gkplab: GKP bosonic quantum error correction at desk scale.

Symplectic phase-space algebra, bosonic noise channels, GKP lattice codes
and decoders, oscillators-to-oscillators codes with linear/MMSE estimation,
and truncated-Fock-space finite-energy simulation, plus an experiment-runner
CLI (`gkp-lab`).
"""

__version__ = "0.1.0"

from . import channels, fock, lattices, o2o, qubit_mc, symplectic
from .lattices import ELL, GkpLattice, from_generator, standard_lattice

__all__ = [
    "channels", "fock", "lattices", "o2o", "qubit_mc", "symplectic",
    "ELL", "GkpLattice", "from_generator", "standard_lattice", "__version__",
]
