"""
Entropic chaos degree of empirical models, dynamical systems and observation families
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import entr

from src.config import settings
from src.dynamics.maps import MapSystem
from src.dynamics.orbit import InitialEnsemble, Orbit, iterate_ensemble
from src.infodyn.entropy import conditional_entropy, mutual_entropy, to_base
from src.infodyn.observation import ObservationSpec, observe
from src.partition.empirical import ROW_TOL, EmpiricalModel, accumulate_symbols
from src.partition.equipartition import format_cells
from src.utils.exceptions import InconsistentModelError, UsageError

logger = logging.getLogger(__name__)

FORM_TOL = 1e-10


class Classification(str, Enum):
    """Chaos judgement for a single evaluation"""
    CHAOTIC = "chaotic"
    STABLE = "stable"


class EcdResult(BaseModel):
    """Chaos degree D = S(Λ*p) - I(p; Λ*) in nats, with the quantities behind it"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float = Field(ge=0)
    marginal_entropy_out: float = Field(ge=0)
    mutual: float = Field(ge=0)
    observation: Optional[ObservationSpec] = None
    sample_size: int = 0
    n_cells: int = 0

    # Run context
    system: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)
    skip: Optional[int] = None
    cells: Optional[str] = None

    @model_validator(mode="after")
    def _check_forms(self) -> "EcdResult":
        if abs(self.value - (self.marginal_entropy_out - self.mutual)) > FORM_TOL:
            raise InconsistentModelError(
                abs(self.value - (self.marginal_entropy_out - self.mutual))
            )
        if self.value > self.marginal_entropy_out + FORM_TOL:
            raise InconsistentModelError(self.value - self.marginal_entropy_out)
        return self

    def classify(self, epsilon: Optional[float] = None) -> Classification:
        return classify(self, epsilon)

    def to_record(
        self,
        epsilon: Optional[float] = None,
        log_base: Literal["e", "2"] = "e"
    ) -> Dict[str, Any]:
        """Flat record in the column order of the result CSV"""
        unit = "D_nats" if log_base == "e" else "D_bits"
        return {
            "map": self.system or "",
            "params": ";".join(f"{k}={v:.17g}" for k, v in self.params.items()),
            "L": self.cells or "",
            "skip": self.skip if self.skip is not None else 0,
            "n": self.sample_size,
            unit: to_base(self.value, log_base),
            "S_out": to_base(self.marginal_entropy_out, log_base),
            "I": to_base(self.mutual, log_base),
            "classification": self.classify(epsilon).value,
        }


def conditional_entropy_form(model: EmpiricalModel) -> float:
    """sum_ij p_ij log(p_i / p_ij)"""
    return conditional_entropy(model.joint, model.marginal)


def difference_form(model: EmpiricalModel) -> float:
    """S(Λ*p) - I(p; Λ*)"""
    output = model.output_marginal
    s_out = float(np.sum(entr(output)))
    return s_out - mutual_entropy(model.joint, model.marginal, output)


def ecd_from_model(
    model: EmpiricalModel,
    observation: Optional[ObservationSpec] = None
) -> EcdResult:
    """
    Chaos degree of a row-consistent empirical model

    Both the conditional-entropy form and the difference form are evaluated
    and must agree within 1e-10.

    Args:
        model: Empirical model
        observation: Observation that produced the model, for reporting

    Returns:
        EcdResult

    Raises:
        InconsistentModelError: if the model is not row-consistent or the forms disagree
    """
    deviation = model.row_deviation()
    if deviation > ROW_TOL:
        raise InconsistentModelError(deviation)

    output = model.output_marginal
    s_out = float(np.sum(entr(output)))
    mutual = mutual_entropy(model.joint, model.marginal, output)
    conditional = conditional_entropy_form(model)
    residual = abs(conditional - (s_out - mutual))
    logger.debug("Chaos degree forms", extra={"conditional": conditional, "residual": residual})
    if residual > FORM_TOL:
        raise InconsistentModelError(residual)

    value = max(conditional, 0.0)
    # Keep value = S_out - I exactly after clipping
    mutual = max(s_out - value, 0.0)
    return EcdResult(
        value=value,
        marginal_entropy_out=s_out,
        mutual=mutual,
        observation=observation,
        sample_size=model.pair_count,
        n_cells=model.n_cells,
        cells=(
            format_cells(observation.partition_stage.cells)
            if observation is not None and observation.partition_stage is not None else None
        ),
    )


def _context(system: MapSystem, skip: int) -> Dict[str, Any]:
    return {"system": system.name, "params": dict(system.params), "skip": skip}


def _trajectories(
    system: MapSystem,
    ensemble: InitialEnsemble,
    observations: Sequence[ObservationSpec],
    skip: int,
    length: int
) -> np.ndarray:
    check_domain = not all(obs.uses_auto_box for obs in observations)
    return iterate_ensemble(system, ensemble.points, skip, length, check_domain=check_domain)


def _evaluate(
    trajectories: np.ndarray,
    weights: np.ndarray,
    observation: ObservationSpec,
    domain_box: Optional[np.ndarray]
) -> EcdResult:
    observed = observe(trajectories, observation, domain_box)
    model = accumulate_symbols(observed.symbols, weights, observed.n_cells)
    return ecd_from_model(model, observation)


def ecd_of_system(
    system: MapSystem,
    ensemble: InitialEnsemble,
    observation: ObservationSpec,
    skip: Optional[int] = None,
    length: Optional[int] = None
) -> EcdResult:
    """
    Chaos degree of a map seen through an observation, D^O

    Args:
        system: Map to iterate
        ensemble: Initial point or weighted sample
        observation: Observation with a partition stage
        skip: Transient length, defaults to settings.DEFAULT_SKIP
        length: Retained points per orbit, defaults to settings.DEFAULT_LENGTH

    Returns:
        EcdResult carrying the map name, parameters and skip
    """
    skip = settings.DEFAULT_SKIP if skip is None else skip
    length = settings.DEFAULT_LENGTH if length is None else length
    if observation.partition_stage is None:
        raise UsageError("Chaos degree of a map needs a partition stage in the observation")
    trajectories = _trajectories(system, ensemble, [observation], skip, length)
    result = _evaluate(trajectories, ensemble.weights, observation, system.box)
    logger.debug(
        "Evaluated chaos degree",
        extra={"map": system.name, "observation": observation.describe(), "D": result.value}
    )
    return result.model_copy(update=_context(system, skip))


def ecd_of_orbit(
    orbit: Orbit,
    observation: ObservationSpec,
    domain_box: Optional[np.ndarray] = None
) -> EcdResult:
    """Chaos degree of a single orbit; without a domain box the partition needs a box or auto-box"""
    result = _evaluate(orbit.points, np.ones(1), observation, domain_box)
    return result.model_copy(update={"system": orbit.system_name, "skip": orbit.skip})


class TotalEcdResult(BaseModel):
    """Infimum of D^O over a finite observation family"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    argmin: int
    observation: ObservationSpec
    results: List[EcdResult]

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.results]


def total_ecd(
    system: MapSystem,
    ensemble: InitialEnsemble,
    family: Sequence[ObservationSpec],
    skip: Optional[int] = None,
    length: Optional[int] = None,
    max_workers: Optional[int] = None
) -> TotalEcdResult:
    """
    Minimum chaos degree over an observation family

    All family members observe the same trajectories. Ties go to the first
    member in family order.

    Args:
        system: Map to iterate
        ensemble: Initial point or weighted sample
        family: Non-empty list of observations
        skip: Transient length
        length: Retained points per orbit
        max_workers: Thread pool size, defaults to settings.MAX_WORKERS

    Returns:
        TotalEcdResult with the infimum, the attaining observation and every member's result
    """
    if not family:
        raise UsageError("Observation family must not be empty")
    if any(obs.partition_stage is None for obs in family):
        raise UsageError("Every observation in the family needs a partition stage")
    skip = settings.DEFAULT_SKIP if skip is None else skip
    length = settings.DEFAULT_LENGTH if length is None else length
    workers = settings.MAX_WORKERS if max_workers is None else max_workers

    trajectories = _trajectories(system, ensemble, family, skip, length)
    domain_box = system.box

    def evaluate(observation: ObservationSpec) -> EcdResult:
        return _evaluate(trajectories, ensemble.weights, observation, domain_box).model_copy(
            update=_context(system, skip)
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(evaluate, family))

    values = np.array([r.value for r in results])
    argmin = int(np.argmin(values))
    logger.info(
        "Total chaos degree",
        extra={"map": system.name, "family_size": len(family), "infimum": float(values[argmin]),
               "argmin": family[argmin].describe()}
    )
    return TotalEcdResult(
        value=float(values[argmin]),
        argmin=argmin,
        observation=family[argmin],
        results=results,
    )


def classify(
    result: Union[EcdResult, float],
    epsilon: Optional[float] = None
) -> Classification:
    """Chaotic iff D > epsilon"""
    epsilon = settings.DEFAULT_EPSILON if epsilon is None else epsilon
    if epsilon < 0:
        raise UsageError("epsilon must be non-negative")
    value = result.value if isinstance(result, EcdResult) else float(result)
    return Classification.CHAOTIC if value > epsilon else Classification.STABLE


def is_totally_chaotic(result: TotalEcdResult, epsilon: Optional[float] = None) -> bool:
    """Positive infimum over the family"""
    return classify(result.value, epsilon) is Classification.CHAOTIC
