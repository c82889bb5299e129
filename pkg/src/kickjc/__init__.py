"""Kicked coupled Jaynes-Cummings cavities: quantum Floquet and semi-classical dynamics."""

from kickjc.jc import SystemParams, chi, dressed_states, jc_block_hamiltonian
from kickjc.operators import (
    EigDecomposition,
    NonHermitianError,
    Tolerances,
    apply,
    hermitian_eig,
    unitary_eig,
    unitary_exp,
)

__version__ = "0.1.0"

__all__ = [
    "EigDecomposition",
    "NonHermitianError",
    "SystemParams",
    "Tolerances",
    "apply",
    "chi",
    "dressed_states",
    "hermitian_eig",
    "jc_block_hamiltonian",
    "unitary_eig",
    "unitary_exp",
    "__version__",
]
