"""
Finite-dimensional quantum states, channels and the quantum chaos degree
"""

from src.quantum.ecd import (
    QuantumEcdResult,
    observable_orbit,
    observable_orbit_ecd,
    observed_quantum_ecd,
    quantum_ecd,
)
from src.quantum.matrix_io import read_channel, read_matrices, read_state, write_matrices
from src.quantum.states import (
    PVM,
    DensityMatrix,
    QuantumChannel,
    SchattenDecomposition,
    depolarizing_channel,
    fully_depolarizing_channel,
    identity_channel,
    pvm_channel,
    pvm_expectation,
    random_state,
    random_unitary,
    schatten_decompose,
    unitary_channel,
    von_neumann_entropy,
)

__all__ = [
    "QuantumEcdResult",
    "observable_orbit",
    "observable_orbit_ecd",
    "observed_quantum_ecd",
    "quantum_ecd",
    "read_channel",
    "read_matrices",
    "read_state",
    "write_matrices",
    "PVM",
    "DensityMatrix",
    "QuantumChannel",
    "SchattenDecomposition",
    "depolarizing_channel",
    "fully_depolarizing_channel",
    "identity_channel",
    "pvm_channel",
    "pvm_expectation",
    "random_state",
    "random_unitary",
    "schatten_decompose",
    "unitary_channel",
    "von_neumann_entropy",
]
