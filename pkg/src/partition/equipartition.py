"""
Equi-partitions of a box and orbit symbolization
"""

import logging
from typing import Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.utils.exceptions import EmptyAxisError, OutOfBoxError, UsageError

logger = logging.getLogger(__name__)

BoxLike = Union[Sequence[float], Sequence[Sequence[float]], np.ndarray]


class EquiPartition(BaseModel):
    """Congruent half-open cells covering a box, with a closed top cell per axis.

    Along axis d with L_d cells of width w_d, a coordinate x falls in cell
    floor((x - lo_d) * L_d / (hi_d - lo_d)); boundaries go to the upper cell and
    x = hi_d goes to the top cell. Cells are indexed row-major over axes.
    """

    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    cells_per_axis: Tuple[int, ...]

    @model_validator(mode="after")
    def _check(self) -> "EquiPartition":
        if not (len(self.lower) == len(self.upper) == len(self.cells_per_axis)):
            raise UsageError("Partition bounds and cell counts must have one entry per axis")
        for axis, count in enumerate(self.cells_per_axis):
            if count < 1:
                raise EmptyAxisError(axis)
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise UsageError("Partition box must have positive width on every axis")
        return self

    @property
    def dimension(self) -> int:
        return len(self.cells_per_axis)

    @property
    def total_cells(self) -> int:
        return int(np.prod(self.cells_per_axis))

    @property
    def widths(self) -> np.ndarray:
        return (np.asarray(self.upper) - np.asarray(self.lower)) / np.asarray(self.cells_per_axis)

    @property
    def spec(self) -> str:
        return format_cells(self.cells_per_axis)

    def cell_bounds(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of a cell"""
        multi = np.array(np.unravel_index(index, self.cells_per_axis))
        lo = np.asarray(self.lower) + multi * self.widths
        return lo, lo + self.widths


def parse_cells(text: str) -> Tuple[int, ...]:
    """Parse a partition spec such as "100" or "32x32" """
    try:
        cells = tuple(int(part) for part in str(text).lower().split("x"))
    except ValueError as e:
        raise UsageError(f"Invalid partition spec '{text}'; expected e.g. 100 or 32x32") from e
    for axis, count in enumerate(cells):
        if count < 1:
            raise UsageError(f"Invalid partition spec '{text}'; axis {axis} needs at least one cell")
    return cells


def format_cells(cells: Sequence[int]) -> str:
    return "x".join(str(int(c)) for c in cells)


def _box_rows(box: BoxLike) -> np.ndarray:
    rows = np.asarray(box, dtype=float)
    if rows.shape == (2,):
        rows = rows[None, :]
    if rows.ndim != 2 or rows.shape[1] != 2:
        raise UsageError(f"Box must be (lo, hi) or a list of (lo, hi) pairs, got shape {rows.shape}")
    return rows


def make_equipartition(box: BoxLike, cells_per_axis: Union[int, Sequence[int]]) -> EquiPartition:
    """
    Build an equi-partition of a box

    Args:
        box: (lo, hi) for one axis, or one (lo, hi) pair per axis
        cells_per_axis: Cells per axis; a single integer applies to every axis

    Returns:
        EquiPartition
    """
    rows = _box_rows(box)
    if isinstance(cells_per_axis, (int, np.integer)):
        cells = (int(cells_per_axis),) * rows.shape[0]
    else:
        cells = tuple(int(c) for c in cells_per_axis)
    for axis, count in enumerate(cells):
        if count < 1:
            raise EmptyAxisError(axis)
    return EquiPartition(
        lower=tuple(rows[:, 0]), upper=tuple(rows[:, 1]), cells_per_axis=cells
    )


def symbolize(partition: EquiPartition, points: np.ndarray) -> np.ndarray:
    """
    Map points to row-major cell indices

    Args:
        partition: Equi-partition
        points: Array whose last axis has the partition's dimension

    Returns:
        Integer array of cell indices with the leading shape of points
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 0 or points.shape[-1] != partition.dimension:
        points = points[..., None] if partition.dimension == 1 else points
    if points.shape[-1] != partition.dimension:
        raise UsageError(
            f"Points have dimension {points.shape[-1]}, partition has {partition.dimension}"
        )
    lo = np.asarray(partition.lower)
    hi = np.asarray(partition.upper)
    counts = np.asarray(partition.cells_per_axis)

    inside = np.all((points >= lo) & (points <= hi), axis=-1)
    if not inside.all():
        flat = inside.reshape(-1)
        bad = int(np.flatnonzero(~flat)[0])
        raise OutOfBoxError(bad, points.reshape(-1, partition.dimension)[bad])

    scaled = (points - lo) * counts / (hi - lo)
    index = np.minimum(np.floor(scaled).astype(np.int64), counts - 1)
    if partition.dimension == 1:
        return index[..., 0]
    flat_index = np.ravel_multi_index(
        tuple(np.moveaxis(index, -1, 0)), partition.cells_per_axis
    )
    return np.asarray(flat_index, dtype=np.int64)


def cell_of(partition: EquiPartition, x: Union[float, Sequence[float]]) -> int:
    """Index of the unique cell containing x"""
    point = np.atleast_1d(np.asarray(x, dtype=float))
    return int(symbolize(partition, point[None, :])[0])
