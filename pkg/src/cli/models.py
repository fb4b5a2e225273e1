"""
Pydantic models for command-line runs
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.utils.exceptions import EmptyGridError, UsageError


class Subcommand(str, Enum):
    """Subcommand enumeration"""
    ECD = "ecd"
    SWEEP = "sweep"
    BIFURCATION = "bifurcation"
    CIRCLE_DECAY = "circle-decay"
    LYAPUNOV = "lyapunov"
    QUANTUM_ECD = "quantum-ecd"
    INGEST = "ingest"


class OutputFormat(str, Enum):
    """Output format enumeration"""
    CSV = "csv"
    JSON = "json"


class ParameterGrid(BaseModel):
    """Parameter values for sweeps: an inclusive start:stop:step range or an explicit list"""

    name: str
    start: Optional[float] = None
    stop: Optional[float] = None
    step: Optional[float] = None
    values_list: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self) -> "ParameterGrid":
        if self.values_list is None and None in (self.start, self.stop, self.step):
            raise UsageError("A parameter grid needs start, stop and step or a value list")
        return self

    @classmethod
    def parse(cls, text: str) -> "ParameterGrid":
        """Parse NAME=START:STOP:STEP or NAME=V1,V2,..."""
        name, sep, spec = text.partition("=")
        if not sep or not name:
            raise UsageError(f"Invalid sweep '{text}'; expected NAME=START:STOP:STEP or NAME=V1,V2")
        try:
            if ":" in spec:
                parts = [float(p) for p in spec.split(":")]
                if len(parts) != 3:
                    raise ValueError(spec)
                return cls(name=name.strip(), start=parts[0], stop=parts[1], step=parts[2])
            return cls(name=name.strip(), values_list=[float(p) for p in spec.split(",") if p])
        except ValueError as e:
            raise UsageError(f"Invalid sweep values in '{text}'") from e

    def values(self) -> np.ndarray:
        """Grid values; round((stop - start) / step) + 1 points for a range"""
        if self.values_list is not None:
            if not self.values_list:
                raise EmptyGridError(f"Sweep over '{self.name}' has no values")
            return np.asarray(self.values_list, dtype=float)
        if self.step <= 0 or self.stop < self.start:
            raise EmptyGridError(
                f"Empty sweep range {self.start}:{self.stop}:{self.step} for '{self.name}'"
            )
        count = int(round((self.stop - self.start) / self.step)) + 1
        values = self.start + self.step * np.arange(count)
        # Snap rounding overshoot at the end point so stop stays inside parameter ranges
        return np.where(np.isclose(values, self.stop, rtol=0.0, atol=self.step * 1e-9), self.stop, values)


class RunConfig(BaseModel):
    """Fully resolved command-line run; a run is reproducible from this record"""

    subcommand: Subcommand

    # System
    map_name: str = "logistic"
    params: Dict[str, float] = Field(default_factory=dict)
    x0: Optional[List[float]] = None
    ensemble_size: Optional[int] = Field(default=None, ge=1)
    orbit_file: Optional[str] = None

    # Observation
    cells: str = "100"
    auto_box: bool = False
    family: Optional[List[str]] = None

    # Orbit and estimation
    skip: int = Field(ge=0)
    length: int = Field(ge=2)
    epsilon: float = Field(ge=0)
    log_base: Literal["e", "2"] = "e"
    seed: int = 0

    # Sweeps
    grid: Optional[ParameterGrid] = None
    keep: int = Field(default=200, ge=1)
    spectrum: bool = False
    reorthonormalize_every: int = Field(default=1, ge=1)

    # Circle decay
    count: int = Field(default=7, ge=1)
    min_denominator: int = Field(default=2, ge=1)
    theta0: float = 0.1

    # Quantum
    state_file: Optional[str] = None
    state_preset: Optional[str] = None
    kraus_file: Optional[str] = None
    channel_preset: Optional[str] = None
    strength: float = 0.0
    dim: int = Field(default=2, ge=1, le=32)
    trials: int = Field(default=64, ge=0)

    # Ingest
    expect_dim: Optional[int] = None
    export: Optional[str] = None

    # Output
    out: str = "ecd"
    output_dir: str = "."
    format: OutputFormat = OutputFormat.CSV
    svg: bool = False
    workers: int = Field(default=4, ge=1)

    def x0_tuple(self) -> Optional[Tuple[float, ...]]:
        return tuple(self.x0) if self.x0 is not None else None

    def to_record(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
