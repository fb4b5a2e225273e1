"""
Quantum entropic chaos degree and observable-orbit reduction to the classical pipeline
"""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.config import settings
from src.dynamics.orbit import Orbit
from src.infodyn.ecd import EcdResult, ecd_of_orbit
from src.infodyn.observation import (
    ObservationSpec,
    QuantumPVM,
    QuantumSchatten,
)
from src.quantum.states import (
    DensityMatrix,
    QuantumChannel,
    SchattenDecomposition,
    matrix_entropy,
    pvm_channel,
    pvm_expectation,
    random_unitary,
    schatten_decompose,
)
from src.utils.exceptions import DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)


class QuantumEcdResult(BaseModel):
    """Infimum of sum_k lambda_k S(Λ* E_k) over the searched Schatten decompositions"""

    model_config = ConfigDict(frozen=True)

    value: float
    canonical: float
    degenerate: bool
    trials: int

    def to_record(self) -> dict:
        return {
            "D": self.value,
            "S_canonical": self.canonical,
            "degenerate": self.degenerate,
            "trials": self.trials,
        }


def _decomposition_value(
    weights: np.ndarray,
    vectors: np.ndarray,
    channel: QuantumChannel
) -> float:
    total = 0.0
    for k in np.flatnonzero(weights > 0):
        v = vectors[:, k]
        total += weights[k] * matrix_entropy(channel.apply_matrix(np.outer(v, v.conj())))
    return float(total)


def _search(
    decomposition: SchattenDecomposition,
    channel: QuantumChannel,
    trials: int,
    seed: int
) -> List[float]:
    groups = decomposition.degenerate_groups()
    children = np.random.SeedSequence(seed).spawn(trials)
    values = []
    for child in children:
        rng = np.random.default_rng(child)
        vectors = decomposition.vectors.copy()
        for group in groups:
            vectors[:, group] = vectors[:, group] @ random_unitary(len(group), rng)
        values.append(_decomposition_value(decomposition.weights, vectors, channel))
    return values


def quantum_ecd(
    rho: DensityMatrix,
    channel: QuantumChannel,
    search_trials: Optional[int] = None,
    seed: Optional[int] = None,
    degeneracy_tol: Optional[float] = None
) -> QuantumEcdResult:
    """
    Quantum chaos degree D(rho; Λ*) = inf sum_k lambda_k S(Λ* E_k)

    The canonical decomposition is always evaluated. Degenerate eigenspaces
    carrying weight are additionally searched with random orthonormal bases,
    one derived seed per trial, and the minimum is returned.

    Args:
        rho: Input state
        channel: Channel on the same dimension
        search_trials: Random bases tried, defaults to settings.QUANTUM_SEARCH_TRIALS
        seed: Root seed, defaults to settings.DEFAULT_SEED
        degeneracy_tol: Eigenvalue gap treated as degenerate

    Returns:
        QuantumEcdResult
    """
    if rho.dim != channel.dim:
        raise DimensionMismatchError(rho.dim, channel.dim, "channel")
    trials = settings.QUANTUM_SEARCH_TRIALS if search_trials is None else search_trials
    if trials < 0:
        raise UsageError("search_trials must be non-negative")
    seed = settings.DEFAULT_SEED if seed is None else seed

    decomposition = schatten_decompose(rho, degeneracy_tol)
    canonical = _decomposition_value(decomposition.weights, decomposition.vectors, channel)
    value = canonical
    used = 0
    if decomposition.degenerate_groups() and trials > 0:
        searched = _search(decomposition, channel, trials, seed)
        value = min(canonical, min(searched))
        used = trials
    logger.debug(
        "Quantum chaos degree",
        extra={"dim": rho.dim, "canonical": canonical, "value": value, "trials": used}
    )
    return QuantumEcdResult(
        value=max(value, 0.0),
        canonical=max(canonical, 0.0),
        degenerate=decomposition.degenerate,
        trials=used,
    )


def observed_quantum_ecd(
    rho: DensityMatrix,
    channel: QuantumChannel,
    observation: ObservationSpec,
    search_trials: Optional[int] = None,
    seed: Optional[int] = None
) -> QuantumEcdResult:
    """
    Quantum chaos degree under an observation made of quantum stages

    A PVM stage decoheres the input state and the channel output; a Schatten
    stage fixes the representation to the canonical decomposition.
    """
    state, observed = rho, channel
    trials = search_trials
    for stage in observation.applied_order:
        if isinstance(stage, QuantumPVM):
            state = pvm_expectation(state, stage.pvm)
            observed = observed.compose(pvm_channel(stage.pvm))
        elif isinstance(stage, QuantumSchatten):
            trials = 0
        else:
            raise UsageError(f"Stage '{stage.describe()}' cannot observe a quantum state")
    return quantum_ecd(state, observed, trials, seed)


def observable_orbit(
    rho0: DensityMatrix,
    channel: QuantumChannel,
    observable: np.ndarray,
    length: int
) -> np.ndarray:
    """
    x_k = tr(rho_k X) along rho_{k+1} = Λ*(rho_k)

    Args:
        rho0: Initial state
        channel: Channel
        observable: Hermitian matrix X
        length: Number of values, at least 2

    Returns:
        Real array of length ``length``
    """
    if length < 2:
        raise UsageError("Observable orbit length must be at least 2")
    x = np.asarray(observable, dtype=complex)
    if x.shape != (rho0.dim, rho0.dim):
        raise DimensionMismatchError((rho0.dim, rho0.dim), x.shape, "observable")
    if np.max(np.abs(x - x.conj().T)) > 1e-12:
        raise UsageError("Observable must be Hermitian")
    if channel.dim != rho0.dim:
        raise DimensionMismatchError(rho0.dim, channel.dim, "channel")

    values = np.empty(length)
    state = rho0.matrix
    for k in range(length):
        trace = np.trace(state @ x)
        if abs(trace.imag) > 1e-10:
            raise UsageError(f"Expectation at step {k} is not real")
        values[k] = trace.real
        state = channel.apply_matrix(state)
    return values


def observable_orbit_ecd(
    rho0: DensityMatrix,
    channel: QuantumChannel,
    observable: np.ndarray,
    length: int,
    cells: int,
    skip: int = 0
) -> EcdResult:
    """Classical chaos degree of the observable sequence on an auto-box partition"""
    values = observable_orbit(rho0, channel, observable, skip + length)
    orbit = Orbit(points=values[skip:, None], skip=skip, system_name="quantum-observable")
    return ecd_of_orbit(orbit, ObservationSpec.partition(cells, auto_box=True))
