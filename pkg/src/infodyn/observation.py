"""
Observation pipelines applied to a dynamics before its chaos degree is measured
"""

import logging
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.dynamics.orbit import bounding_box
from src.partition.equipartition import EquiPartition, format_cells, make_equipartition, symbolize
from src.utils.exceptions import IncompatiblePartitionError, UsageError

logger = logging.getLogger(__name__)


class TimeScale(BaseModel):
    """Stride subsampling x_n -> x_{n tau}"""

    model_config = ConfigDict(frozen=True)

    tau: int = Field(ge=1)

    def describe(self) -> str:
        return f"tau{self.tau}"


class PartitionStage(BaseModel):
    """Equi-partition observation; a single cell count applies to every observed axis.

    The box is taken from ``box`` when given, from the orbit's bounding box with
    ``auto_box``, and from the map's domain otherwise.
    """

    model_config = ConfigDict(frozen=True)

    cells: Tuple[int, ...]
    box: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    auto_box: bool = False

    @model_validator(mode="after")
    def _check(self) -> "PartitionStage":
        if not self.cells or any(c < 1 for c in self.cells):
            raise UsageError(f"Partition cells must be positive, got {self.cells}")
        if self.box is not None and self.auto_box:
            raise UsageError("A partition stage takes either an explicit box or auto-box")
        return self

    def cells_for(self, dimension: int) -> Tuple[int, ...]:
        if len(self.cells) == 1:
            return self.cells * dimension
        if len(self.cells) != dimension:
            raise IncompatiblePartitionError(
                f"Partition {format_cells(self.cells)} does not fit {dimension}-dimensional data"
            )
        return self.cells

    def describe(self) -> str:
        return f"P{format_cells(self.cells)}{'~auto' if self.auto_box else ''}"


class CoordinateProjection(BaseModel):
    """Keep a subset of coordinate axes"""

    model_config = ConfigDict(frozen=True)

    axes: Tuple[int, ...] = Field(min_length=1)

    def describe(self) -> str:
        return "proj" + "".join(str(a) for a in self.axes)


class QuantumPVM(BaseModel):
    """Conditional expectation rho -> sum_k P_k rho P_k for a projection-valued measure"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pvm: Any

    def describe(self) -> str:
        return "pvm"


class QuantumSchatten(BaseModel):
    """Fix the state representation to the canonical Schatten decomposition"""

    model_config = ConfigDict(frozen=True)

    def describe(self) -> str:
        return "schatten"


Stage = Union[TimeScale, PartitionStage, CoordinateProjection, QuantumPVM, QuantumSchatten]
QUANTUM_STAGES = (QuantumPVM, QuantumSchatten)


class ObservationSpec(BaseModel):
    """Composite observation O = O_m ... O_1.

    ``stages`` are listed in composition order, outermost first, so the last
    stage is applied first.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    stages: Tuple[Stage, ...]
    label: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "ObservationSpec":
        partitions = [s for s in self.stages if isinstance(s, PartitionStage)]
        if len(partitions) > 1:
            raise UsageError("An observation may contain at most one partition stage")
        return self

    @classmethod
    def partition(
        cls,
        cells: Union[int, Sequence[int]],
        box: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None,
        auto_box: bool = False
    ) -> "ObservationSpec":
        cells = (int(cells),) if isinstance(cells, (int, np.integer)) else tuple(int(c) for c in cells)
        return cls(stages=(PartitionStage(cells=cells, box=box, auto_box=auto_box),))

    @property
    def applied_order(self) -> Tuple[Stage, ...]:
        return tuple(reversed(self.stages))

    @property
    def partition_stage(self) -> Optional[PartitionStage]:
        return next((s for s in self.stages if isinstance(s, PartitionStage)), None)

    @property
    def is_quantum(self) -> bool:
        return any(isinstance(s, QUANTUM_STAGES) for s in self.stages)

    @property
    def uses_auto_box(self) -> bool:
        stage = self.partition_stage
        return stage is not None and stage.auto_box

    def describe(self) -> str:
        return self.label or "*".join(s.describe() for s in self.stages)


class ObservedSymbols(BaseModel):
    """Symbol sequences produced by a classical observation"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    symbols: np.ndarray
    partition: EquiPartition

    @property
    def n_cells(self) -> int:
        return self.partition.total_cells


def observe(
    trajectories: np.ndarray,
    observation: ObservationSpec,
    domain_box: Optional[np.ndarray] = None
) -> ObservedSymbols:
    """
    Apply a classical observation to ensemble trajectories

    Args:
        trajectories: (M, T, N) orbit points, or (T, N) for a single orbit
        observation: Observation with exactly one partition stage
        domain_box: (N, 2) box of the generating map, used when the partition
            stage has neither an explicit box nor auto-box

    Returns:
        ObservedSymbols with (M, T') cell indices
    """
    if observation.is_quantum:
        raise UsageError("Quantum observation stages cannot observe a classical orbit")
    if observation.partition_stage is None:
        raise UsageError("A classical observation needs a partition stage")

    data = np.asarray(trajectories, dtype=float)
    if data.ndim == 2:
        data = data[None, :, :]
    axes = np.arange(data.shape[-1])
    symbols: Optional[np.ndarray] = None
    partition: Optional[EquiPartition] = None

    for stage in observation.applied_order:
        if isinstance(stage, TimeScale):
            if symbols is None:
                data = data[:, ::stage.tau]
            else:
                symbols = symbols[:, ::stage.tau]
        elif isinstance(stage, CoordinateProjection):
            if symbols is not None:
                raise IncompatiblePartitionError("Coordinates cannot be projected after partitioning")
            if max(stage.axes) >= data.shape[-1] or min(stage.axes) < 0:
                raise IncompatiblePartitionError(
                    f"Projection axes {stage.axes} outside {data.shape[-1]}-dimensional data"
                )
            data = data[..., list(stage.axes)]
            axes = axes[list(stage.axes)]
        elif isinstance(stage, PartitionStage):
            partition = _resolve_partition(stage, data, axes, domain_box)
            symbols = symbolize(partition, data)

    if symbols.shape[1] < 2:
        raise UsageError("Observation leaves fewer than two points per orbit")
    logger.debug(
        "Observed orbit",
        extra={"observation": observation.describe(), "cells": partition.total_cells,
               "points": int(symbols.shape[1])}
    )
    return ObservedSymbols(symbols=symbols, partition=partition)


def _resolve_partition(
    stage: PartitionStage,
    data: np.ndarray,
    axes: np.ndarray,
    domain_box: Optional[np.ndarray]
) -> EquiPartition:
    dimension = data.shape[-1]
    cells = stage.cells_for(dimension)
    if stage.box is not None:
        lower, upper = stage.box
        if len(lower) != dimension or len(upper) != dimension:
            raise IncompatiblePartitionError(
                f"Partition box has {len(lower)} axes, observed data has {dimension}"
            )
        box = np.column_stack([lower, upper])
    elif stage.auto_box:
        lower, upper = bounding_box(data)
        box = np.column_stack([lower, upper])
    elif domain_box is not None:
        box = np.asarray(domain_box, dtype=float)[axes]
    else:
        raise UsageError("Partition needs an explicit box or auto-box when no map domain is known")
    return make_equipartition(box, cells)


def partition_family(
    cells_list: Sequence[Union[int, Sequence[int]]],
    box: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None,
    auto_box: bool = False
) -> List[ObservationSpec]:
    """One partition observation per entry of cells_list"""
    if not cells_list:
        raise UsageError("Observation family must not be empty")
    return [ObservationSpec.partition(cells, box=box, auto_box=auto_box) for cells in cells_list]


def difference_equation_family(
    cells_list: Sequence[int],
    dimension: int,
    auto_box: bool = False
) -> List[ObservationSpec]:
    """
    Observations natural for a difference equation: partitions of the full state
    and of every single coordinate, with no time-scaling or representation stages
    """
    family = partition_family(cells_list, auto_box=auto_box)
    if dimension > 1:
        for axis in range(dimension):
            for cells in cells_list:
                family.append(
                    ObservationSpec(stages=(
                        PartitionStage(cells=(int(cells),), auto_box=auto_box),
                        CoordinateProjection(axes=(axis,)),
                    ))
                )
    return family
