"""
Orbit generation, initial ensembles and finite-difference Jacobians
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.config import settings
from src.dynamics.maps import MapSystem
from src.utils.exceptions import DomainEscapeError, UsageError

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, ...], Tuple[float, ...]]


def _frozen_array(value, ndim: int) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim == ndim - 1:
        array = array[:, None] if ndim == 2 else array
    if array.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {array.shape}")
    array.setflags(write=False)
    return array


class Orbit(BaseModel):
    """An immutable orbit segment (x_m, ..., x_{m+n}) stored as a (length, N) array"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    skip: int = 0
    system_name: Optional[str] = None

    @field_validator("points", mode="before")
    @classmethod
    def _as_points(cls, value) -> np.ndarray:
        array = _frozen_array(value, 2)
        if array.shape[0] < 2:
            raise ValueError("an orbit needs at least two points")
        return array

    @field_validator("skip")
    @classmethod
    def _non_negative_skip(cls, value: int) -> int:
        if value < 0:
            raise ValueError("skip must be non-negative")
        return value

    @property
    def length(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write one row per step: step_index, x_1..x_N with a header"""
        frame = pd.DataFrame(
            self.points, columns=[f"x_{d + 1}" for d in range(self.dimension)]
        )
        frame.insert(0, "step_index", np.arange(self.skip, self.skip + self.length))
        path = Path(path)
        frame.to_csv(path, index=False, float_format="%.17g")
        return path


class InitialEnsemble(BaseModel):
    """Weighted initial points, a Monte Carlo surrogate for the initial measure"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    weights: np.ndarray

    @field_validator("points", mode="before")
    @classmethod
    def _as_points(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        if array.ndim == 1:
            array = array[:, None]
        if array.ndim != 2 or array.shape[0] == 0:
            raise ValueError("ensemble needs at least one point")
        array.setflags(write=False)
        return array

    @field_validator("weights", mode="before")
    @classmethod
    def _as_weights(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float).ravel()
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_weights(self) -> "InitialEnsemble":
        if self.weights.shape[0] != self.points.shape[0]:
            raise ValueError("one weight per ensemble point is required")
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        return self

    @classmethod
    def single(cls, x0: Union[float, Sequence[float]]) -> "InitialEnsemble":
        return cls(points=np.atleast_1d(np.asarray(x0, dtype=float))[None, :], weights=[1.0])

    @classmethod
    def uniform(cls, points) -> "InitialEnsemble":
        points = np.array(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        count = points.shape[0]
        return cls(points=points, weights=np.full(count, 1.0 / count))

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _as_point(system: MapSystem, x0) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if x.shape != (system.dimension,):
        raise UsageError(
            f"Initial point has shape {x.shape}, map '{system.name}' needs ({system.dimension},)"
        )
    return x


def iterate_ensemble(
    system: MapSystem,
    points: np.ndarray,
    skip: int,
    length: int,
    check_domain: bool = True
) -> np.ndarray:
    """
    Iterate every ensemble member with the same step function

    Args:
        system: Map to iterate
        points: (M, N) initial points
        skip: Transient length discarded
        length: Number of retained points per member
        check_domain: Raise DomainEscapeError when an iterate leaves the domain

    Returns:
        (M, length, N) array of retained orbit points
    """
    if length < 2:
        raise UsageError("Orbit length must be at least 2")
    if skip < 0:
        raise UsageError("skip must be non-negative")
    x = np.array(points, dtype=float)
    if x.ndim != 2 or x.shape[1] != system.dimension:
        raise UsageError(f"Ensemble points must have shape (M, {system.dimension})")

    members = x.shape[0]
    step = system.step
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(skip):
            if check_domain:
                _check_inside(system, x[:, None], k)
            x = step(x)

        trajectory = np.empty((members, length, system.dimension))
        trajectory[:, 0] = x
        for k in range(1, length):
            x = step(x)
            trajectory[:, k] = x

    if check_domain:
        _check_inside(system, trajectory, skip)
    return trajectory


def _check_inside(system: MapSystem, block: np.ndarray, offset: int) -> None:
    """Raise DomainEscapeError for the first iterate of an (M, T, N) block outside the domain"""
    inside = system.contains(block)
    if inside.all():
        return
    member, index = np.argwhere(~inside)[0]
    raise DomainEscapeError(
        int(index) + offset, block[member, index],
        member=int(member) if block.shape[0] > 1 else None
    )


def iterate_map(
    system: MapSystem,
    x0: Union[float, Sequence[float]],
    skip: Optional[int] = None,
    length: Optional[int] = None,
    check_domain: bool = True
) -> Orbit:
    """
    Generate the orbit segment (F^skip x0, ..., F^(skip+length-1) x0)

    Args:
        system: Map to iterate
        x0: Initial point in the domain
        skip: Transient length, defaults to settings.DEFAULT_SKIP
        length: Number of retained points, defaults to settings.DEFAULT_LENGTH
        check_domain: Raise DomainEscapeError on the first iterate outside the domain

    Returns:
        Orbit with the retained points
    """
    skip = settings.DEFAULT_SKIP if skip is None else skip
    length = settings.DEFAULT_LENGTH if length is None else length
    x = _as_point(system, x0)
    points = iterate_ensemble(system, x[None, :], skip, length, check_domain)[0]
    logger.debug(
        "Iterated orbit",
        extra={"map": system.name, "skip": skip, "length": length}
    )
    return Orbit(points=points, skip=skip, system_name=system.name)


def finite_difference_jacobian(
    system: MapSystem,
    x: Union[float, Sequence[float]],
    h: Optional[float] = None
) -> np.ndarray:
    """
    Central-difference Jacobian J[i, j] = dF_i/dx_j of the unwrapped step

    Points closer than h to the domain boundary use one-sided differences.
    """
    h = settings.FD_STEP if h is None else h
    x = _as_point(system, x)
    jac = np.empty((system.dimension, system.dimension))
    for axis in range(system.dimension):
        offset = np.zeros(system.dimension)
        offset[axis] = h
        lo, hi = system.lower[axis], system.upper[axis]
        if x[axis] + h > hi:
            jac[:, axis] = (system.raw_step(x) - system.raw_step(x - offset)) / h
        elif x[axis] - h < lo:
            jac[:, axis] = (system.raw_step(x + offset) - system.raw_step(x)) / h
        else:
            jac[:, axis] = (system.raw_step(x + offset) - system.raw_step(x - offset)) / (2.0 * h)
    return jac


def bounding_box(points: np.ndarray, margin: Optional[float] = None) -> Box:
    """
    Axis-aligned bounding box of a point cloud, the auto-box

    Degenerate axes are widened by margin * max(1, |x|) on each side.
    """
    margin = settings.AUTO_BOX_MARGIN if margin is None else margin
    cloud = np.asarray(points, dtype=float)
    cloud = cloud.reshape(-1, cloud.shape[-1])
    if not np.all(np.isfinite(cloud)):
        raise UsageError("Cannot box an orbit containing non-finite values")
    lower = cloud.min(axis=0)
    upper = cloud.max(axis=0)
    flat = upper <= lower
    if flat.any():
        pad = margin * np.maximum(1.0, np.abs(lower))
        lower = np.where(flat, lower - pad, lower)
        upper = np.where(flat, upper + pad, upper)
        logger.warning("Degenerate auto-box axis widened", extra={"axes": np.flatnonzero(flat).tolist()})
    return tuple(float(v) for v in lower), tuple(float(v) for v in upper)


def sample_ensemble(
    system: MapSystem,
    size: int,
    seed: Optional[int] = None
) -> InitialEnsemble:
    """Equal-weight uniform sample over the domain box"""
    if size < 1:
        raise UsageError("Ensemble size must be positive")
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    points = rng.uniform(system.lower, system.upper, size=(size, system.dimension))
    return InitialEnsemble.uniform(points)
