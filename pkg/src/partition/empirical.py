"""
Empirical marginal, joint distribution and channel estimated from symbol sequences
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import sparse

from src.dynamics.maps import MapSystem
from src.dynamics.orbit import InitialEnsemble, Orbit, iterate_ensemble
from src.partition.equipartition import EquiPartition, symbolize
from src.utils.exceptions import (
    InconsistentModelError,
    InvalidDistributionError,
    UsageError,
)

logger = logging.getLogger(__name__)

SUM_TOL = 1e-12
ROW_TOL = 1e-9


class EmpiricalModel(BaseModel):
    """Marginal p_i and joint p_ij over cells; rows of the joint are time n, columns n+1"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    marginal: np.ndarray
    joint: sparse.csr_matrix
    pair_count: int = 0

    @field_validator("marginal", mode="before")
    @classmethod
    def _as_marginal(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float).ravel()
        array.setflags(write=False)
        return array

    @field_validator("joint", mode="before")
    @classmethod
    def _as_joint(cls, value) -> sparse.csr_matrix:
        matrix = sparse.csr_matrix(value, dtype=float)
        matrix.eliminate_zeros()
        return matrix

    @model_validator(mode="after")
    def _check(self) -> "EmpiricalModel":
        size = self.marginal.shape[0]
        if self.joint.shape != (size, size):
            raise UsageError(f"Joint shape {self.joint.shape} does not match {size} cells")
        if np.any(self.marginal < 0) or np.any(self.joint.data < 0):
            raise InvalidDistributionError("Probabilities must be non-negative")
        if abs(self.marginal.sum() - 1.0) > SUM_TOL:
            raise InvalidDistributionError(f"Marginal sums to {self.marginal.sum():.15f}")
        if abs(self.joint.sum() - 1.0) > SUM_TOL:
            raise InvalidDistributionError(f"Joint sums to {self.joint.sum():.15f}")
        return self

    @property
    def n_cells(self) -> int:
        return self.marginal.shape[0]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.marginal > 0)

    @property
    def output_marginal(self) -> np.ndarray:
        """Time-(n+1) distribution, the column sums of the joint"""
        return np.asarray(self.joint.sum(axis=0)).ravel()

    def row_deviation(self) -> float:
        """Largest |sum_j p_ij - p_i| over all cells"""
        rows = np.asarray(self.joint.sum(axis=1)).ravel()
        return float(np.max(np.abs(rows - self.marginal))) if rows.size else 0.0

    def triplets(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.joint.tocoo()
        return coo.row, coo.col, coo.data

    def to_csv(self, prefix: Union[str, Path]) -> Tuple[Path, Path]:
        """Write <prefix>_joint.csv (i,j,p_ij triplets) and <prefix>_marginal.csv (i,p_i)"""
        prefix = Path(prefix)
        rows, cols, data = self.triplets()
        order = np.lexsort((cols, rows))
        joint_path = prefix.with_name(prefix.name + "_joint.csv")
        marginal_path = prefix.with_name(prefix.name + "_marginal.csv")
        pd.DataFrame({"i": rows[order], "j": cols[order], "p_ij": data[order]}).to_csv(
            joint_path, index=False, float_format="%.17g"
        )
        support = self.support
        pd.DataFrame({"i": support, "p_i": self.marginal[support]}).to_csv(
            marginal_path, index=False, float_format="%.17g"
        )
        return joint_path, marginal_path


class Channel(BaseModel):
    """Transition matrix t_ij = p_ij / p_i on support rows; (Λ*p)_j = sum_i p_i t_ij"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    transition: sparse.csr_matrix
    support: np.ndarray

    @field_validator("transition", mode="before")
    @classmethod
    def _as_transition(cls, value) -> sparse.csr_matrix:
        matrix = sparse.csr_matrix(value, dtype=float)
        matrix.eliminate_zeros()
        return matrix

    @field_validator("support", mode="before")
    @classmethod
    def _as_support(cls, value) -> np.ndarray:
        return np.array(value, dtype=np.int64).ravel()

    @model_validator(mode="after")
    def _check_rows(self) -> "Channel":
        if np.any(self.transition.data < 0):
            raise InvalidDistributionError("Transition probabilities must be non-negative")
        rows = np.asarray(self.transition.sum(axis=1)).ravel()
        if self.support.size and np.max(np.abs(rows[self.support] - 1.0)) > SUM_TOL:
            raise InvalidDistributionError("Every support row of a channel must sum to 1")
        return self

    @classmethod
    def from_matrix(cls, matrix) -> "Channel":
        """Channel from a row-stochastic matrix; all-zero rows are left undefined"""
        transition = sparse.csr_matrix(np.asarray(matrix, dtype=float))
        rows = np.asarray(transition.sum(axis=1)).ravel()
        return cls(transition=transition, support=np.flatnonzero(rows > 0))

    @classmethod
    def identity(cls, size: int) -> "Channel":
        return cls(transition=sparse.identity(size, format="csr"), support=np.arange(size))

    @property
    def n_cells(self) -> int:
        return self.transition.shape[0]

    def apply(self, p: np.ndarray) -> np.ndarray:
        """Push a distribution through the channel"""
        return np.asarray(self.transition.T @ np.asarray(p, dtype=float)).ravel()

    def row(self, i: int) -> np.ndarray:
        return self.transition.getrow(i).toarray().ravel()

    def row_nonzeros(self) -> np.ndarray:
        """Number of nonzero entries in every support row"""
        return np.diff(self.transition.indptr)[self.support]


def accumulate_symbols(
    symbols: np.ndarray,
    weights: Sequence[float],
    n_cells: int
) -> EmpiricalModel:
    """
    Weighted empirical model from one symbol sequence per ensemble member

    Pairs (s_k, s_{k+1}) for k = 0..T-2 are counted for every member and the
    marginal counts the first element of each pair, so sum_j p_ij = p_i.
    Members are merged by weighted addition in index order.

    Args:
        symbols: (M, T) integer cell indices
        weights: (M,) member weights summing to 1
        n_cells: Total number of cells

    Returns:
        EmpiricalModel
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.ndim == 1:
        symbols = symbols[None, :]
    weights = np.asarray(weights, dtype=float)
    members, steps = symbols.shape
    if steps < 2:
        raise UsageError("Symbol sequences need at least two entries")
    n_pairs = steps - 1

    first = symbols[:, :-1]
    second = symbols[:, 1:]
    pair_keys = first * n_cells + second
    unique_keys, inverse = np.unique(pair_keys, return_inverse=True)
    inverse = inverse.reshape(members, n_pairs)

    marginal = np.zeros(n_cells)
    joint_data = np.zeros(unique_keys.size)
    for member in range(members):
        scale = weights[member] / n_pairs
        marginal += scale * np.bincount(first[member], minlength=n_cells)
        joint_data += scale * np.bincount(inverse[member], minlength=unique_keys.size)

    joint = sparse.coo_matrix(
        (joint_data, (unique_keys // n_cells, unique_keys % n_cells)),
        shape=(n_cells, n_cells),
    ).tocsr()
    logger.debug(
        "Accumulated empirical model",
        extra={"members": members, "pairs": n_pairs, "cells": n_cells, "nnz": int(joint.nnz)}
    )
    return EmpiricalModel(marginal=marginal, joint=joint, pair_count=members * n_pairs)


def model_from_symbols(symbols: Sequence[int], n_cells: int) -> EmpiricalModel:
    """Empirical model of a single symbol sequence"""
    return accumulate_symbols(np.asarray(symbols)[None, :], [1.0], n_cells)


def model_from_joint(joint) -> EmpiricalModel:
    """Empirical model from an explicit joint matrix; the marginal is its row sums"""
    matrix = sparse.csr_matrix(np.asarray(joint, dtype=float) if not sparse.issparse(joint) else joint)
    marginal = np.asarray(matrix.sum(axis=1)).ravel()
    return EmpiricalModel(marginal=marginal, joint=matrix)


def empirical_model(orbit: Orbit, partition: EquiPartition) -> EmpiricalModel:
    """
    Empirical model of one orbit under a partition

    Args:
        orbit: Orbit with at least two points inside the partition box
        partition: Equi-partition

    Returns:
        EmpiricalModel over partition.total_cells cells
    """
    symbols = symbolize(partition, orbit.points)
    return accumulate_symbols(symbols[None, :], [1.0], partition.total_cells)


def empirical_model_ensemble(
    system: MapSystem,
    ensemble: InitialEnsemble,
    partition: EquiPartition,
    skip: int,
    length: int
) -> EmpiricalModel:
    """
    Weighted average of per-initial-point models, the integral over the initial measure

    Args:
        system: Map to iterate
        ensemble: Weighted initial points
        partition: Equi-partition of the domain
        skip: Transient length
        length: Retained points per member

    Returns:
        EmpiricalModel
    """
    if ensemble.size == 0:
        raise UsageError("Ensemble must not be empty")
    trajectories = iterate_ensemble(system, ensemble.points, skip, length)
    symbols = symbolize(partition, trajectories)
    return accumulate_symbols(symbols, ensemble.weights, partition.total_cells)


def channel_from(model: EmpiricalModel, tolerance: Optional[float] = None) -> Channel:
    """
    Channel t_ij = p_ij / p_i on the support rows of a row-consistent model

    Raises:
        InconsistentModelError: if row sums deviate from the marginal beyond 1e-9
    """
    tolerance = ROW_TOL if tolerance is None else tolerance
    deviation = model.row_deviation()
    if deviation > tolerance:
        raise InconsistentModelError(deviation)
    support = model.support
    inverse = np.zeros(model.n_cells)
    inverse[support] = 1.0 / model.marginal[support]
    transition = sparse.diags(inverse) @ model.joint
    # Normalise support rows exactly so each is a probability vector
    row_sums = np.asarray(transition.sum(axis=1)).ravel()
    scale = np.ones(model.n_cells)
    scale[support] = 1.0 / row_sums[support]
    transition = sparse.diags(scale) @ transition
    return Channel(transition=transition, support=support)
