"""
Shannon entropy, mutual entropy and related information quantities in nats
"""

import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy import sparse
from scipy.special import entr, xlogy

from src.utils.exceptions import InvalidDistributionError, MarginalMismatchError

logger = logging.getLogger(__name__)

SUM_TOL = 1e-12
MARGINAL_TOL = 1e-9

ArrayLike = Union[Sequence[float], np.ndarray]


class ProbabilityVector(BaseModel):
    """Nonnegative entries summing to 1 within 1e-12"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _validate(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float).ravel()
        _check_distribution(array)
        array.setflags(write=False)
        return array

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.entries > 0)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _check_distribution(p: np.ndarray) -> None:
    if p.size == 0:
        raise InvalidDistributionError("Distribution must have at least one entry")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidDistributionError("Distribution entries must be finite and non-negative")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistributionError(f"Distribution sums to {total:.15f}, expected 1")


def as_distribution(p: Union[ProbabilityVector, ArrayLike]) -> np.ndarray:
    """Validated float array of a probability vector"""
    if isinstance(p, ProbabilityVector):
        return p.entries
    array = np.asarray(p, dtype=float).ravel()
    _check_distribution(array)
    return array


def shannon_entropy(p: Union[ProbabilityVector, ArrayLike]) -> float:
    """
    S(p) = -sum p_k log p_k with 0 log 0 = 0

    Args:
        p: Probability vector

    Returns:
        Entropy in nats, in [0, log(len(p))]
    """
    return float(np.sum(entr(as_distribution(p))))


def joint_entropy(joint) -> float:
    """Entropy of a joint distribution given as a dense or sparse matrix"""
    data = joint.data if sparse.issparse(joint) else np.asarray(joint, dtype=float)
    return float(np.sum(entr(data)))


def mutual_entropy(
    joint,
    marginal_in: Optional[ArrayLike] = None,
    marginal_out: Optional[ArrayLike] = None
) -> float:
    """
    I(p; Λ*) = sum_ij r_ij log(r_ij / (p_i p̄_j))

    Args:
        joint: Joint distribution r_ij, rows are the input
        marginal_in: Input marginal p; defaults to the row sums
        marginal_out: Output marginal p̄; defaults to the column sums

    Returns:
        Mutual entropy in nats, clipped below at 0

    Raises:
        MarginalMismatchError: if supplied marginals differ from the joint's beyond 1e-9
    """
    coo = sparse.coo_matrix(joint)
    rows_sum = np.asarray(coo.sum(axis=1)).ravel()
    cols_sum = np.asarray(coo.sum(axis=0)).ravel()
    p = rows_sum if marginal_in is None else np.asarray(marginal_in, dtype=float).ravel()
    q = cols_sum if marginal_out is None else np.asarray(marginal_out, dtype=float).ravel()
    if p.shape != rows_sum.shape or q.shape != cols_sum.shape:
        raise MarginalMismatchError(math.inf)
    deviation = max(
        float(np.max(np.abs(rows_sum - p), initial=0.0)),
        float(np.max(np.abs(cols_sum - q), initial=0.0)),
    )
    if deviation > MARGINAL_TOL:
        raise MarginalMismatchError(deviation)

    mask = coo.data > 0
    r = coo.data[mask]
    denominator = p[coo.row[mask]] * q[coo.col[mask]]
    value = float(np.sum(r * np.log(r / denominator)))
    return max(value, 0.0)


def conditional_entropy(joint, marginal_in: Optional[ArrayLike] = None) -> float:
    """sum_ij r_ij log(p_i / r_ij), the entropy of the output given the input"""
    coo = sparse.coo_matrix(joint)
    p = (
        np.asarray(coo.sum(axis=1)).ravel()
        if marginal_in is None else np.asarray(marginal_in, dtype=float).ravel()
    )
    mask = coo.data > 0
    r = coo.data[mask]
    return float(np.sum(xlogy(r, p[coo.row[mask]]) - xlogy(r, r)))


def binary_entropy(s: float) -> float:
    """h(s) = -s log s - (1 - s) log(1 - s), with h(0) = h(1) = 0"""
    if not 0.0 <= s <= 1.0:
        raise InvalidDistributionError(f"Binary entropy needs s in [0, 1], got {s}")
    return float(entr(s) + entr(1.0 - s))


def to_base(value_nats: float, base: Literal["e", "2"] = "e") -> float:
    """Convert a value in nats to the reporting base"""
    if base == "e":
        return float(value_nats)
    if base == "2":
        return float(value_nats) / math.log(2.0)
    raise ValueError(f"Unsupported log base '{base}'")


def product_distribution(p: ArrayLike, q: ArrayLike) -> np.ndarray:
    """Flattened p ⊗ q"""
    return np.outer(as_distribution(p), as_distribution(q)).ravel()


def more_chaotic(p: ArrayLike, q: ArrayLike) -> bool:
    """True when state q is at least as complex as state p, C(q) >= C(p)"""
    return shannon_entropy(q) >= shannon_entropy(p)
