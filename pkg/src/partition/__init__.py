"""
Equi-partitions, symbolization and empirical models
"""

from src.partition.empirical import (
    Channel,
    EmpiricalModel,
    accumulate_symbols,
    channel_from,
    empirical_model,
    empirical_model_ensemble,
    model_from_joint,
    model_from_symbols,
)
from src.partition.equipartition import (
    EquiPartition,
    cell_of,
    format_cells,
    make_equipartition,
    parse_cells,
    symbolize,
)

__all__ = [
    "Channel",
    "EmpiricalModel",
    "accumulate_symbols",
    "channel_from",
    "empirical_model",
    "empirical_model_ensemble",
    "model_from_joint",
    "model_from_symbols",
    "EquiPartition",
    "cell_of",
    "format_cells",
    "make_equipartition",
    "parse_cells",
    "symbolize",
]
