"""
Finite-dimensional density matrices, Kraus channels, PVMs and Schatten decompositions
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy import linalg
from scipy.special import entr

from src.config import settings
from src.utils.exceptions import (
    DimensionMismatchError,
    InvalidChannelError,
    InvalidStateError,
    UsageError,
)

logger = logging.getLogger(__name__)

MAX_DIMENSION = 32
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12
CHANNEL_TOL = 1e-10
PROJECTOR_TOL = 1e-10
SUPPORT_TOL = 1e-14

MatrixLike = Union[np.ndarray, Sequence[Sequence[complex]]]


def _square(value: MatrixLike, what: str) -> np.ndarray:
    matrix = np.array(value, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError("square matrix", matrix.shape, what)
    if not 1 <= matrix.shape[0] <= MAX_DIMENSION:
        raise UsageError(f"Dimension {matrix.shape[0]} outside 1..{MAX_DIMENSION}")
    return matrix


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian part, descending, clipped at 0"""
    values = linalg.eigvalsh(hermitian_part(matrix))[::-1]
    return np.clip(values, 0.0, None)


def matrix_entropy(matrix: np.ndarray) -> float:
    """-sum lambda log lambda over the clipped spectrum of a Hermitian matrix"""
    return float(np.sum(entr(spectrum(matrix))))


class DensityMatrix(BaseModel):
    """Hermitian, positive semidefinite, unit-trace d x d matrix with d <= 32"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _validate(cls, value) -> np.ndarray:
        matrix = _square(value, "density matrix")
        if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("Density matrix is not Hermitian")
        matrix = hermitian_part(matrix)
        trace = np.trace(matrix).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"Density matrix has trace {trace:.15f}")
        smallest = linalg.eigvalsh(matrix)[0]
        if smallest < -PSD_TOL:
            raise InvalidStateError(f"Density matrix has negative eigenvalue {smallest:.3e}")
        matrix.setflags(write=False)
        return matrix

    @classmethod
    def from_array(cls, matrix: MatrixLike) -> "DensityMatrix":
        """Symmetrize and renormalize a numerically perturbed state"""
        matrix = hermitian_part(np.asarray(matrix, dtype=complex))
        return cls(matrix=matrix / np.trace(matrix).real)

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=complex).ravel()
        psi = psi / linalg.norm(psi)
        return cls(matrix=np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(matrix=np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, weights: Sequence[float]) -> "DensityMatrix":
        return cls(matrix=np.diag(np.asarray(weights, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return spectrum(self.matrix)

    def expectation(self, observable: np.ndarray) -> float:
        """tr(rho X) for a Hermitian observable"""
        value = np.trace(self.matrix @ observable)
        if abs(value.imag) > 1e-10:
            raise UsageError("Observable expectation is not real; is the observable Hermitian?")
        return float(value.real)


class QuantumChannel(BaseModel):
    """Completely positive trace-preserving map rho -> sum_i K_i rho K_i^dagger"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kraus: Tuple[np.ndarray, ...]

    @field_validator("kraus", mode="before")
    @classmethod
    def _validate(cls, value) -> Tuple[np.ndarray, ...]:
        operators = tuple(_square(k, "Kraus operator") for k in value)
        if not operators:
            raise InvalidChannelError("A channel needs at least one Kraus operator")
        dim = operators[0].shape[0]
        for op in operators:
            if op.shape != (dim, dim):
                raise DimensionMismatchError((dim, dim), op.shape, "Kraus operator")
        completeness = sum(op.conj().T @ op for op in operators)
        deviation = float(np.max(np.abs(completeness - np.eye(dim))))
        if deviation > CHANNEL_TOL:
            raise InvalidChannelError(
                f"Kraus operators are not trace preserving (deviation {deviation:.3e})"
            )
        for op in operators:
            op.setflags(write=False)
        return operators

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply_matrix(self, matrix: np.ndarray) -> np.ndarray:
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError((self.dim, self.dim), matrix.shape, "channel input")
        return sum(k @ matrix @ k.conj().T for k in self.kraus)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix.from_array(self.apply_matrix(rho.matrix))

    def compose(self, after: "QuantumChannel") -> "QuantumChannel":
        """The channel ``after`` applied to the output of this one"""
        if after.dim != self.dim:
            raise DimensionMismatchError(self.dim, after.dim, "composed channel")
        return QuantumChannel(kraus=[a @ k for a in after.kraus for k in self.kraus])


class PVM(BaseModel):
    """Orthogonal projectors P_k with P_k P_j = delta_kj P_k and sum_k P_k = I"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    projectors: Tuple[np.ndarray, ...]

    @field_validator("projectors", mode="before")
    @classmethod
    def _validate(cls, value) -> Tuple[np.ndarray, ...]:
        projectors = tuple(_square(p, "projector") for p in value)
        if not projectors:
            raise UsageError("A PVM needs at least one projector")
        dim = projectors[0].shape[0]
        for k, p in enumerate(projectors):
            if p.shape != (dim, dim):
                raise DimensionMismatchError((dim, dim), p.shape, "projector")
            for j, q in enumerate(projectors):
                expected = p if j == k else np.zeros_like(p)
                if np.max(np.abs(p @ q - expected)) > PROJECTOR_TOL:
                    raise UsageError(f"Projectors {k} and {j} are not orthogonal projectors")
        if np.max(np.abs(sum(projectors) - np.eye(dim))) > PROJECTOR_TOL:
            raise UsageError("Projectors do not sum to the identity")
        return projectors

    @classmethod
    def computational(cls, dim: int) -> "PVM":
        basis = np.eye(dim, dtype=complex)
        return cls(projectors=[np.outer(basis[k], basis[k]) for k in range(dim)])

    @classmethod
    def from_basis(cls, unitary: np.ndarray) -> "PVM":
        """Rank-1 projectors onto the columns of a unitary"""
        columns = np.asarray(unitary, dtype=complex)
        return cls(projectors=[np.outer(columns[:, k], columns[:, k].conj())
                               for k in range(columns.shape[1])])

    @classmethod
    def trivial(cls, dim: int) -> "PVM":
        return cls(projectors=[np.eye(dim, dtype=complex)])

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


class SchattenDecomposition(BaseModel):
    """rho = sum_k lambda_k E_k with rank-1 mutually orthogonal projectors E_k = v_k v_k^dagger.

    ``vectors`` holds the v_k as columns, ordered with the weights (descending).
    ``groups`` lists index sets of eigenspaces that are degenerate within the
    degeneracy tolerance; weights inside a group are their common mean.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray
    vectors: np.ndarray
    groups: List[List[int]]
    degenerate: bool

    @property
    def projectors(self) -> List[np.ndarray]:
        return [np.outer(self.vectors[:, k], self.vectors[:, k].conj())
                for k in range(self.vectors.shape[1])]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T

    def degenerate_groups(self) -> List[List[int]]:
        """Degenerate eigenspaces carrying positive weight"""
        return [g for g in self.groups if len(g) > 1 and self.weights[g[0]] > 0]


def canonical_basis(subspace: np.ndarray) -> np.ndarray:
    """
    Deterministic orthonormal basis of the span of the columns of ``subspace``

    Projects the coordinate axes onto the span in index order and keeps each
    Gram-Schmidt remainder of norm above 1e-8.
    """
    rank = subspace.shape[1]
    projector = subspace @ subspace.conj().T
    basis: List[np.ndarray] = []
    for axis in range(projector.shape[0]):
        candidate = projector[:, axis].copy()
        for b in basis:
            candidate -= (b.conj() @ candidate) * b
        norm = linalg.norm(candidate)
        if norm > 1e-8:
            basis.append(candidate / norm)
        if len(basis) == rank:
            break
    return np.column_stack(basis)


def schatten_decompose(
    rho: DensityMatrix,
    degeneracy_tol: Optional[float] = None
) -> SchattenDecomposition:
    """
    One-dimensional spectral decomposition with a canonical basis in degenerate eigenspaces

    Args:
        rho: Density matrix
        degeneracy_tol: Eigenvalues closer than this share an eigenspace,
            defaults to settings.DEGENERACY_TOL

    Returns:
        SchattenDecomposition with weights in descending order
    """
    tol = settings.DEGENERACY_TOL if degeneracy_tol is None else degeneracy_tol
    values, vectors = linalg.eigh(rho.matrix)
    values = np.clip(values[::-1], 0.0, None)
    values[values < SUPPORT_TOL] = 0.0
    vectors = vectors[:, ::-1].copy()

    groups: List[List[int]] = [[0]]
    for k in range(1, values.shape[0]):
        if values[groups[-1][0]] - values[k] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])

    weights = values.copy()
    for group in groups:
        if len(group) > 1:
            vectors[:, group] = canonical_basis(vectors[:, group])
            weights[group] = values[group].mean()
    weights = weights / weights.sum()

    degenerate = any(len(g) > 1 and weights[g[0]] > 0 for g in groups)
    return SchattenDecomposition(
        weights=weights, vectors=vectors, groups=groups, degenerate=degenerate
    )


def von_neumann_entropy(rho: Union[DensityMatrix, MatrixLike]) -> float:
    """
    -sum_k lambda_k log lambda_k over the eigenvalues of rho

    Args:
        rho: Density matrix

    Returns:
        Entropy in nats, in [0, log d]
    """
    state = rho if isinstance(rho, DensityMatrix) else DensityMatrix(matrix=rho)
    return matrix_entropy(state.matrix)


def pvm_expectation(rho: DensityMatrix, pvm: PVM) -> DensityMatrix:
    """Decohered state sum_k P_k rho P_k"""
    if pvm.dim != rho.dim:
        raise DimensionMismatchError(rho.dim, pvm.dim, "PVM")
    return DensityMatrix.from_array(sum(p @ rho.matrix @ p for p in pvm.projectors))


# Channel presets

def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel(kraus=[np.eye(dim, dtype=complex)])


def unitary_channel(unitary: MatrixLike) -> QuantumChannel:
    u = _square(unitary, "unitary")
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > CHANNEL_TOL:
        raise InvalidChannelError("Matrix is not unitary")
    return QuantumChannel(kraus=[u])


def weyl_operators(dim: int) -> List[np.ndarray]:
    """X^a Z^b for a, b in 0..d-1, the generalized Pauli basis"""
    shift = np.roll(np.eye(dim, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(dim) for b in range(dim)
    ]


def depolarizing_channel(p: float, dim: int = 2) -> QuantumChannel:
    """rho -> (1 - p) rho + p I/d"""
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"Depolarizing strength must lie in [0, 1], got {p}")
    operators = weyl_operators(dim)
    kraus = [np.sqrt(1.0 - p + p / dim ** 2) * operators[0]]
    kraus += [np.sqrt(p) / dim * w for w in operators[1:]]
    return QuantumChannel(kraus=kraus)


def fully_depolarizing_channel(dim: int = 2) -> QuantumChannel:
    """Every state goes to I/d"""
    return depolarizing_channel(1.0, dim)


def pvm_channel(pvm: PVM) -> QuantumChannel:
    """Dephasing channel rho -> sum_k P_k rho P_k"""
    return QuantumChannel(kraus=list(pvm.projectors))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorization of a complex Gaussian matrix"""
    gaussian = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = linalg.qr(gaussian)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_state(
    dim: int,
    rng: Optional[np.random.Generator] = None,
    rank: Optional[int] = None
) -> DensityMatrix:
    """Random density matrix G G^dagger / tr with G a complex Gaussian d x rank matrix"""
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    rank = dim if rank is None else rank
    gaussian = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    matrix = gaussian @ gaussian.conj().T
    return DensityMatrix.from_array(matrix)
