"""
Information dynamics: entropies, the entropic chaos degree and observations
"""

from src.infodyn.axioms import AxiomCheck, AxiomReport, axiom_suite
from src.infodyn.ecd import (
    Classification,
    EcdResult,
    TotalEcdResult,
    classify,
    conditional_entropy_form,
    difference_form,
    ecd_from_model,
    ecd_of_orbit,
    ecd_of_system,
    is_totally_chaotic,
    total_ecd,
)
from src.infodyn.entropy import (
    ProbabilityVector,
    binary_entropy,
    conditional_entropy,
    joint_entropy,
    more_chaotic,
    mutual_entropy,
    product_distribution,
    shannon_entropy,
    to_base,
)
from src.infodyn.observation import (
    CoordinateProjection,
    ObservationSpec,
    PartitionStage,
    QuantumPVM,
    QuantumSchatten,
    TimeScale,
    difference_equation_family,
    observe,
    partition_family,
)

__all__ = [
    "AxiomCheck",
    "AxiomReport",
    "axiom_suite",
    "Classification",
    "EcdResult",
    "TotalEcdResult",
    "classify",
    "conditional_entropy_form",
    "difference_form",
    "ecd_from_model",
    "ecd_of_orbit",
    "ecd_of_system",
    "is_totally_chaotic",
    "total_ecd",
    "ProbabilityVector",
    "binary_entropy",
    "conditional_entropy",
    "joint_entropy",
    "more_chaotic",
    "mutual_entropy",
    "product_distribution",
    "shannon_entropy",
    "to_base",
    "CoordinateProjection",
    "ObservationSpec",
    "PartitionStage",
    "QuantumPVM",
    "QuantumSchatten",
    "TimeScale",
    "difference_equation_family",
    "observe",
    "partition_family",
]
