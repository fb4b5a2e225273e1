"""
Parameterized discrete-time maps on boxes in R^N and the built-in map catalog
"""

import logging
import math
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.utils.exceptions import ParamOutOfRangeError, UnknownMapError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# mu = 2 doubles in binary and drains the mantissa, so float orbits reach 0
TENT_DEFAULT_MU = 1.9999

StepFunction = Callable[[np.ndarray, Mapping[str, float]], np.ndarray]
JacobianFunction = Callable[[np.ndarray, Mapping[str, float]], np.ndarray]


class MapSystem(BaseModel):
    """A parameterized self-map of a box with optional analytic Jacobian.

    Points are arrays whose last axis has length ``dimension``; ``step_fn`` and
    ``jacobian_fn`` broadcast over any leading axes. ``wrap`` gives a period per
    axis (``None`` for unwrapped axes); wrapped axes are half-open ``[lo, hi)``.
    Jacobians follow ``J[i, j] = dF_i / dx_j``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    dimension: int = Field(ge=1)
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    params: Dict[str, float] = Field(default_factory=dict)
    step_fn: StepFunction
    jacobian_fn: Optional[JacobianFunction] = None
    wrap: Optional[Tuple[Optional[float], ...]] = None
    default_x0: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_box(self) -> "MapSystem":
        if len(self.lower) != self.dimension or len(self.upper) != self.dimension:
            raise ValueError("domain bounds must have one entry per axis")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("domain box must have positive width on every axis")
        if self.wrap is not None and len(self.wrap) != self.dimension:
            raise ValueError("wrap must have one entry per axis")
        return self

    @property
    def box(self) -> np.ndarray:
        """Domain box as an (N, 2) array of [lo, hi] rows"""
        return np.column_stack([self.lower, self.upper]).astype(float)

    @property
    def has_jacobian(self) -> bool:
        return self.jacobian_fn is not None

    @property
    def param_vector(self) -> np.ndarray:
        return np.array(list(self.params.values()), dtype=float)

    def raw_step(self, x: np.ndarray) -> np.ndarray:
        """Apply F without modular reduction"""
        return self.step_fn(x, self.params)

    def step(self, x: np.ndarray) -> np.ndarray:
        """Apply F followed by the per-axis wrap, if any"""
        y = self.step_fn(x, self.params)
        if self.wrap is None:
            return y
        return self._reduce(y)

    def _reduce(self, y: np.ndarray) -> np.ndarray:
        y = np.array(y, dtype=float, copy=True)
        for axis, period in enumerate(self.wrap):
            if period is None:
                continue
            lo = self.lower[axis]
            reduced = np.mod(y[..., axis] - lo, period)
            # np.mod can round a tiny negative remainder up to the period itself
            reduced = np.where(reduced >= period, 0.0, reduced)
            y[..., axis] = reduced + lo
        return y

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        if self.jacobian_fn is None:
            raise ValueError(f"Map '{self.name}' has no analytic Jacobian")
        return self.jacobian_fn(x, self.params)

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Elementwise domain membership over the leading axes of x"""
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        upper_ok = x <= hi
        if self.wrap is not None:
            wrapped = np.array([p is not None for p in self.wrap])
            upper_ok = np.where(wrapped, x < hi, upper_ok)
        return np.all((x >= lo) & upper_ok, axis=-1)


# Step functions and Jacobians. Module level so MapSystem instances pickle
# into worker processes.

def _logistic_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return p["a"] * x * (1.0 - x)


def _logistic_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return (p["a"] * (1.0 - 2.0 * x))[..., None]


def _tent_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return p["mu"] * np.minimum(x, 1.0 - x)


def _tent_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return (p["mu"] * np.where(x < 0.5, 1.0, -1.0))[..., None]


def _circle_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return x + TWO_PI * p["v"]


def _circle_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    return np.ones(np.shape(x) + (1,))


def _henon_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    u, w = x[..., 0], x[..., 1]
    return np.stack([1.0 - p["a"] * u * u + w, p["b"] * u], axis=-1)


def _henon_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    u = x[..., 0]
    row0 = np.stack([-2.0 * p["a"] * u, np.ones_like(u)], axis=-1)
    row1 = np.stack([np.full_like(u, p["b"]), np.zeros_like(u)], axis=-1)
    return np.stack([row0, row1], axis=-2)


def _baker_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    u, w = x[..., 0], x[..., 1]
    left = u < 0.5
    return np.stack(
        [np.where(left, 2.0 * u, 2.0 * u - 1.0),
         np.where(left, 0.5 * w, 0.5 * (w + 1.0))],
        axis=-1,
    )


def _baker_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    shape = np.shape(x)[:-1]
    jac = np.zeros(shape + (2, 2))
    jac[..., 0, 0] = 2.0
    jac[..., 1, 1] = 0.5
    return jac


def _tinkerbell_step(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    u, w = x[..., 0], x[..., 1]
    return np.stack(
        [u * u - w * w + p["a"] * u + p["b"] * w,
         2.0 * u * w + p["c"] * u + p["d"] * w],
        axis=-1,
    )


def _tinkerbell_jacobian(x: np.ndarray, p: Mapping[str, float]) -> np.ndarray:
    u, w = x[..., 0], x[..., 1]
    row0 = np.stack([2.0 * u + p["a"], -2.0 * w + p["b"]], axis=-1)
    row1 = np.stack([2.0 * w + p["c"], 2.0 * u + p["d"]], axis=-1)
    return np.stack([row0, row1], axis=-2)


class ParamRange(BaseModel):
    """Valid interval for a map parameter"""

    model_config = ConfigDict(frozen=True)

    low: float = -math.inf
    high: float = math.inf
    high_open: bool = False

    def contains(self, value: float) -> bool:
        if not math.isfinite(value) or value < self.low:
            return False
        return value < self.high if self.high_open else value <= self.high

    def describe(self) -> str:
        return f"[{self.low}, {self.high}{')' if self.high_open else ']'}"


class MapSpec(BaseModel):
    """Catalog entry describing a built-in map"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    dimension: int
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    defaults: Dict[str, float]
    ranges: Dict[str, ParamRange]
    default_x0: Tuple[float, ...]
    description: str
    step_fn: StepFunction
    jacobian_fn: Optional[JacobianFunction]
    wrap: Optional[Tuple[Optional[float], ...]] = None


MAP_CATALOG: Dict[str, MapSpec] = {
    "logistic": MapSpec(
        name="logistic", dimension=1, lower=(0.0,), upper=(1.0,),
        defaults={"a": 3.71}, ranges={"a": ParamRange(low=0.0, high=4.0)},
        default_x0=(0.3,),
        description="x -> a x (1 - x) on [0, 1]",
        step_fn=_logistic_step, jacobian_fn=_logistic_jacobian,
    ),
    "tent": MapSpec(
        name="tent", dimension=1, lower=(0.0,), upper=(1.0,),
        defaults={"mu": TENT_DEFAULT_MU}, ranges={"mu": ParamRange(low=0.0, high=2.0)},
        default_x0=(0.2137,),
        description="x -> mu min(x, 1 - x) on [0, 1]",
        step_fn=_tent_step, jacobian_fn=_tent_jacobian,
    ),
    "circle": MapSpec(
        name="circle", dimension=1, lower=(0.0,), upper=(TWO_PI,),
        defaults={"v": (math.sqrt(5.0) - 1.0) / 2.0},
        ranges={"v": ParamRange(low=0.0, high=1.0, high_open=True)},
        default_x0=(0.1,),
        description="theta -> theta + 2 pi v (mod 2 pi) on [0, 2 pi)",
        step_fn=_circle_step, jacobian_fn=_circle_jacobian, wrap=(TWO_PI,),
    ),
    "henon": MapSpec(
        name="henon", dimension=2, lower=(-1.5, -0.5), upper=(1.5, 0.5),
        defaults={"a": 1.4, "b": 0.3},
        ranges={"a": ParamRange(low=0.0, high=2.0), "b": ParamRange(low=-1.0, high=1.0)},
        default_x0=(0.0, 0.0),
        description="(x, y) -> (1 - a x^2 + y, b x) on [-1.5, 1.5] x [-0.5, 0.5]",
        step_fn=_henon_step, jacobian_fn=_henon_jacobian,
    ),
    "baker": MapSpec(
        name="baker", dimension=2, lower=(0.0, 0.0), upper=(1.0, 1.0),
        defaults={}, ranges={},
        default_x0=(0.1234567, 0.7654321),
        description=(
            "(x, y) -> (2x, y/2) for x < 1/2, (2x - 1, (y + 1)/2) otherwise, on [0, 1]^2"
        ),
        step_fn=_baker_step, jacobian_fn=_baker_jacobian,
    ),
    "tinkerbell": MapSpec(
        name="tinkerbell", dimension=2, lower=(-1.5, -2.0), upper=(1.0, 1.0),
        defaults={"a": 0.9, "b": -0.6013, "c": 2.0, "d": 0.5},
        ranges={k: ParamRange() for k in ("a", "b", "c", "d")},
        default_x0=(-0.72, -0.64),
        description=(
            "(x, y) -> (x^2 - y^2 + a x + b y, 2 x y + c x + d y) "
            "on [-1.5, 1.0] x [-2.0, 1.0]"
        ),
        step_fn=_tinkerbell_step, jacobian_fn=_tinkerbell_jacobian,
    ),
}


def builtin_map(
    name: str,
    params: Optional[Union[Mapping[str, float], Sequence[float]]] = None
) -> MapSystem:
    """
    Build a catalog map with validated parameters

    Args:
        name: Catalog name
        params: Parameter mapping, or a vector in catalog order; missing
            parameters take their defaults

    Returns:
        MapSystem for the named map
    """
    spec = MAP_CATALOG.get(name)
    if spec is None:
        raise UnknownMapError(name)

    values = dict(spec.defaults)
    if params is not None:
        if isinstance(params, Mapping):
            unknown = set(params) - set(spec.defaults)
            if unknown:
                raise ParamOutOfRangeError(
                    ",".join(sorted(unknown)), math.nan, f"one of {sorted(spec.defaults)}"
                )
            values.update({k: float(v) for k, v in params.items()})
        else:
            vector = list(params)
            if len(vector) > len(spec.defaults):
                raise ParamOutOfRangeError(
                    "params", float(len(vector)), f"at most {len(spec.defaults)} values"
                )
            for key, value in zip(spec.defaults, vector):
                values[key] = float(value)

    for key, value in values.items():
        valid = spec.ranges[key]
        if not valid.contains(value):
            raise ParamOutOfRangeError(key, value, valid.describe())

    logger.debug("Built map", extra={"map": name, "params": values})
    return MapSystem(
        name=spec.name,
        dimension=spec.dimension,
        lower=spec.lower,
        upper=spec.upper,
        params=values,
        step_fn=spec.step_fn,
        jacobian_fn=spec.jacobian_fn,
        wrap=spec.wrap,
        default_x0=spec.default_x0,
    )


def describe_catalog() -> str:
    """Render the map catalog for command-line help"""
    lines = []
    for spec in MAP_CATALOG.values():
        params = ", ".join(
            f"{k}={v:g} {spec.ranges[k].describe()}" for k, v in spec.defaults.items()
        ) or "no parameters"
        lines.append(f"  {spec.name:<11} {spec.description}; {params}")
    return "\n".join(lines)
