"""
Rotation map specialization: continued fractions and convergent decay
"""

from src.circlemap.continued_fraction import (
    ContinuedFraction,
    continued_fraction,
    convergent_bound_holds,
    floor_rule_holds,
    iter_convergents,
    leading_convergents,
)
from src.circlemap.decay import (
    DecayRow,
    DecayTable,
    convergent_decay,
    convergent_partition_family,
    theoretical_dp,
)

__all__ = [
    "ContinuedFraction",
    "continued_fraction",
    "convergent_bound_holds",
    "floor_rule_holds",
    "iter_convergents",
    "leading_convergents",
    "DecayRow",
    "DecayTable",
    "convergent_decay",
    "convergent_partition_family",
    "theoretical_dp",
]
