"""
Lyapunov exponents from analytic Jacobians along an orbit
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

from src.config import settings
from src.dynamics.maps import MapSystem
from src.dynamics.orbit import Orbit, iterate_map
from src.utils.exceptions import EmptyGridError, UsageError

logger = logging.getLogger(__name__)

HISTORY_SAMPLES = 10
DIRECT_LIMIT = 60


class LyapunovResult(BaseModel):
    """Top exponent, optional spectrum and the partial estimates behind them"""

    model_config = ConfigDict(frozen=True)

    top_exponent: float
    spectrum: Optional[Tuple[float, ...]] = None
    n_used: int = Field(ge=1)
    convergence_history: List[Tuple[int, float]] = Field(default_factory=list)
    converged: bool = True
    singular_steps: int = 0

    @model_validator(mode="after")
    def _check_spectrum(self) -> "LyapunovResult":
        if self.spectrum is not None:
            values = np.asarray(self.spectrum)
            if np.any(values[1:] > values[:-1]):
                raise ValueError("spectrum must be sorted non-increasing")
            if values[0] != self.top_exponent:
                raise ValueError("top exponent must equal the first spectrum entry")
        return self


def _checkpoints(n: int) -> np.ndarray:
    """Step counts at n/10 intervals, always ending at n"""
    marks = np.unique(np.linspace(n / HISTORY_SAMPLES, n, HISTORY_SAMPLES).astype(np.int64))
    return marks[marks >= 1]


def _is_converged(history: Sequence[Tuple[int, float]], tolerance: float) -> bool:
    if len(history) < 2:
        return True
    previous, last = history[-2][1], history[-1][1]
    return bool(np.isclose(previous, last, rtol=0.0, atol=tolerance))


def _require_jacobian(system: MapSystem) -> None:
    if not system.has_jacobian:
        raise UsageError(f"Map '{system.name}' has no analytic Jacobian")


def _orbit_points(system: MapSystem, x0, skip: int, n: int) -> np.ndarray:
    if n < 1:
        raise UsageError("Lyapunov exponents need n >= 1")
    orbit = iterate_map(system, x0, skip=skip, length=max(n, 2))
    return orbit.points[:n]


def _from_points(system: MapSystem, points: np.ndarray, tolerance: float) -> LyapunovResult:
    n = points.shape[0]
    derivatives = system.jacobian(points)[:, 0, 0]
    with np.errstate(divide="ignore"):
        terms = np.log(np.abs(derivatives))
    partial = np.cumsum(terms)
    marks = _checkpoints(n)
    history = [(int(k), float(partial[k - 1] / k)) for k in marks]
    top = history[-1][1]
    converged = _is_converged(history, tolerance)
    if not converged:
        logger.warning(
            "Lyapunov estimate not converged",
            extra={"map": system.name, "last": history[-2:], "tolerance": tolerance}
        )
    return LyapunovResult(
        top_exponent=top,
        n_used=n,
        convergence_history=history,
        converged=converged,
        singular_steps=int(np.count_nonzero(derivatives == 0)),
    )


def lyapunov_1d(
    system: MapSystem,
    x0: Union[float, Sequence[float], None] = None,
    skip: Optional[int] = None,
    n: Optional[int] = None
) -> LyapunovResult:
    """
    (1/n) sum_k log|f'(x_k)| over the post-transient orbit

    A zero derivative makes the estimate -inf.

    Args:
        system: One-dimensional map with an analytic derivative
        x0: Initial point, defaults to the map's default
        skip: Transient length, defaults to settings.DEFAULT_SKIP
        n: Number of derivative terms, defaults to settings.DEFAULT_LENGTH

    Returns:
        LyapunovResult with history at n/10 intervals
    """
    if system.dimension != 1:
        raise UsageError(f"lyapunov_1d needs a one-dimensional map, '{system.name}' has {system.dimension}")
    _require_jacobian(system)
    skip = settings.DEFAULT_SKIP if skip is None else skip
    n = settings.DEFAULT_LENGTH if n is None else n
    x0 = system.default_x0 if x0 is None else x0
    points = _orbit_points(system, x0, skip, n)
    return _from_points(system, points, settings.CONVERGENCE_TOL)


def lyapunov_from_orbit(system: MapSystem, orbit: Orbit) -> LyapunovResult:
    """One-dimensional exponent along an orbit that was already generated"""
    if system.dimension != 1 or orbit.dimension != 1:
        raise UsageError("lyapunov_from_orbit needs a one-dimensional map and orbit")
    _require_jacobian(system)
    return _from_points(system, orbit.points, settings.CONVERGENCE_TOL)


def lyapunov_md(
    system: MapSystem,
    x0: Union[float, Sequence[float], None] = None,
    skip: Optional[int] = None,
    n: Optional[int] = None,
    reorthonormalize_every: Optional[int] = None
) -> LyapunovResult:
    """
    Lyapunov spectrum by iterated Jacobian products with QR re-orthonormalization

    The log of |diag R| is accumulated at every factorization; the limits equal
    (1/n) log of the singular values of J_n = Df^n(x_0) without forming J_n.

    Args:
        system: Map with an analytic Jacobian
        x0: Initial point, defaults to the map's default
        skip: Transient length
        n: Number of Jacobian factors
        reorthonormalize_every: Steps between QR factorizations

    Returns:
        LyapunovResult with the full spectrum, sorted non-increasing
    """
    _require_jacobian(system)
    skip = settings.DEFAULT_SKIP if skip is None else skip
    n = settings.DEFAULT_LENGTH if n is None else n
    period = settings.REORTHONORMALIZE_EVERY if reorthonormalize_every is None else reorthonormalize_every
    if period < 1:
        raise UsageError("Re-orthonormalization period must be at least 1")
    x0 = system.default_x0 if x0 is None else x0
    points = _orbit_points(system, x0, skip, n)
    jacobians = system.jacobian(points)

    dimension = system.dimension
    basis = np.eye(dimension)
    sums = np.zeros(dimension)
    marks = set(_checkpoints(n).tolist())
    history: List[Tuple[int, float]] = []
    singular = 0
    with np.errstate(divide="ignore"):
        for k in range(1, n + 1):
            basis = jacobians[k - 1] @ basis
            if k % period == 0 or k in marks or k == n:
                basis, r = linalg.qr(basis)
                diagonal = np.abs(np.diag(r))
                if np.any(diagonal == 0):
                    singular += 1
                sums += np.log(diagonal)
            if k in marks:
                history.append((k, float(np.max(sums) / k)))

    exponents = np.sort(sums / n)[::-1]
    if singular:
        logger.warning(
            "Singular Jacobian along orbit",
            extra={"map": system.name, "singular_steps": singular}
        )
    converged = _is_converged(history, settings.CONVERGENCE_TOL)
    return LyapunovResult(
        top_exponent=float(exponents[0]),
        spectrum=tuple(float(v) for v in exponents),
        n_used=n,
        convergence_history=history,
        converged=converged,
        singular_steps=singular,
    )


def lyapunov_direct(
    system: MapSystem,
    x0: Union[float, Sequence[float], None] = None,
    skip: int = 0,
    n: int = 20
) -> LyapunovResult:
    """
    Exponents from the singular values of the explicit product J_n

    Only valid for short orbits; n above 60 overflows for typical chaotic maps.
    """
    _require_jacobian(system)
    if n > DIRECT_LIMIT:
        raise UsageError(f"Direct Jacobian products are limited to n <= {DIRECT_LIMIT}")
    x0 = system.default_x0 if x0 is None else x0
    points = _orbit_points(system, x0, skip, n)
    product = np.eye(system.dimension)
    for jac in system.jacobian(points):
        product = jac @ product
    singular_values = linalg.svdvals(product)
    with np.errstate(divide="ignore"):
        exponents = np.sort(np.log(singular_values) / n)[::-1]
    return LyapunovResult(
        top_exponent=float(exponents[0]),
        spectrum=tuple(float(v) for v in exponents),
        n_used=n,
        convergence_history=[(n, float(exponents[0]))],
    )


class AgreementPoint(BaseModel):
    """Paired chaos degree and top exponent at one parameter value"""

    model_config = ConfigDict(frozen=True)

    param: float
    ecd: float
    lyapunov: float


class AgreementStats(BaseModel):
    """Sign agreement between D - epsilon and the top exponent over a grid"""

    model_config = ConfigDict(frozen=True)

    total: int
    agreeing: int
    skipped: int = 0
    epsilon: float
    disagreements: List[AgreementPoint] = Field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.agreeing / self.total if self.total else math.nan


def ecd_lyapunov_agreement(
    samples: Sequence[Union[AgreementPoint, Tuple[float, float, float]]],
    epsilon: Optional[float] = None
) -> AgreementStats:
    """
    Fraction of grid points where (D > epsilon) matches (lambda > 0)

    Points with a NaN in either estimate are skipped.

    Args:
        samples: (param, D, lambda) triples
        epsilon: Chaos threshold on D

    Returns:
        AgreementStats listing the disagreeing points
    """
    if len(samples) == 0:
        raise EmptyGridError("Agreement needs at least one grid point")
    epsilon = settings.DEFAULT_EPSILON if epsilon is None else epsilon
    points = [
        s if isinstance(s, AgreementPoint) else AgreementPoint(param=s[0], ecd=s[1], lyapunov=s[2])
        for s in samples
    ]
    usable = [p for p in points if not (math.isnan(p.ecd) or math.isnan(p.lyapunov))]
    if not usable:
        raise EmptyGridError("Every grid point has a missing estimate")
    disagreements = [p for p in usable if (p.ecd > epsilon) != (p.lyapunov > 0)]
    stats = AgreementStats(
        total=len(usable),
        agreeing=len(usable) - len(disagreements),
        skipped=len(points) - len(usable),
        epsilon=epsilon,
        disagreements=disagreements,
    )
    logger.info(
        "Chaos degree and Lyapunov agreement",
        extra={"fraction": stats.fraction, "total": stats.total, "skipped": stats.skipped}
    )
    return stats
