"""
Discrete-time maps, orbits and initial ensembles
"""

from src.dynamics.maps import MAP_CATALOG, MapSystem, builtin_map, describe_catalog
from src.dynamics.orbit import (
    InitialEnsemble,
    Orbit,
    bounding_box,
    finite_difference_jacobian,
    iterate_ensemble,
    iterate_map,
    sample_ensemble,
)

__all__ = [
    "MAP_CATALOG",
    "MapSystem",
    "builtin_map",
    "describe_catalog",
    "InitialEnsemble",
    "Orbit",
    "bounding_box",
    "finite_difference_jacobian",
    "iterate_ensemble",
    "iterate_map",
    "sample_ensemble",
]
