"""
Chaos degree of the rotation map at convergent partitions
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from src.circlemap.continued_fraction import floor_of_multiple, leading_convergents
from src.config import settings
from src.dynamics.maps import TWO_PI, builtin_map
from src.dynamics.orbit import InitialEnsemble
from src.infodyn.ecd import ecd_of_system
from src.infodyn.entropy import binary_entropy
from src.infodyn.observation import ObservationSpec
from src.utils.exceptions import UsageError

logger = logging.getLogger(__name__)

DEFAULT_THETA0 = 0.1
CIRCLE_BOX = ((0.0,), (TWO_PI,))


def theoretical_dp(v: float, l: int) -> float:
    """
    Exact chaos degree of the rotation by 2 pi v on the l-cell equi-partition

    s = l v - floor(l v) is taken from the exact binary value of v.
    """
    if l < 1:
        raise UsageError("Partition size l must be at least 1")
    _, s = floor_of_multiple(v, l)
    return binary_entropy(float(s))


class DecayRow(BaseModel):
    """One convergent partition: empirical and exact chaos degree with the decay bound"""

    model_config = ConfigDict(frozen=True)

    j: int
    c_j: int
    D_emp: float
    D_theo: float
    bound: float


class DecayTable(BaseModel):
    """Rows of a convergent decay study"""

    model_config = ConfigDict(frozen=True)

    v: float
    rows: List[DecayRow]
    rational: bool = False
    truncated: bool = False

    @property
    def minimum(self) -> float:
        return min(row.D_emp for row in self.rows)


def convergent_partition_family(
    v: float,
    count: int,
    min_denominator: int = 2
) -> List[ObservationSpec]:
    """Equi-partitions of [0, 2 pi] with L = c_j for the leading convergents of v"""
    convergents, _, _ = leading_convergents(v, count, min_denominator)
    return [
        ObservationSpec(
            stages=ObservationSpec.partition(c, box=CIRCLE_BOX).stages,
            label=f"c{j}={c}",
        )
        for j, (_, c) in enumerate(convergents, start=1)
    ]


def convergent_decay(
    v: float,
    count: int = 7,
    length: Optional[int] = None,
    skip: int = 0,
    min_denominator: int = 2,
    theta0: float = DEFAULT_THETA0,
    max_workers: Optional[int] = None
) -> DecayTable:
    """
    Empirical and exact chaos degree at partitions of size c_j

    A terminating expansion yields the single row of its last convergent.
    Running out of precision yields a truncated table.

    Args:
        v: Rotation number in (0, 1)
        count: Number of convergents J
        length: Orbit length per row, defaults to settings.DEFAULT_LENGTH
        skip: Transient length
        min_denominator: Smallest convergent denominator used
        theta0: Initial angle
        max_workers: Thread pool size

    Returns:
        DecayTable with rows j, c_j, D_emp, D_theo, log(c_j)/c_j
    """
    length = settings.DEFAULT_LENGTH if length is None else length
    workers = settings.MAX_WORKERS if max_workers is None else max_workers
    convergents, rational, truncated = leading_convergents(v, count, min_denominator)
    if not convergents:
        raise UsageError(f"No convergents with denominator >= {min_denominator} for v={v!r}")

    system = builtin_map("circle", {"v": v})
    ensemble = InitialEnsemble.single(theta0)

    def evaluate(item) -> DecayRow:
        j, (_, c) = item
        result = ecd_of_system(
            system, ensemble, ObservationSpec.partition(c, box=CIRCLE_BOX), skip, length
        )
        return DecayRow(
            j=j,
            c_j=c,
            D_emp=result.value,
            D_theo=theoretical_dp(v, c),
            bound=math.log(c) / c,
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(executor.map(evaluate, enumerate(convergents, start=1)))

    logger.info(
        "Convergent decay",
        extra={"v": v, "rows": len(rows), "rational": rational, "truncated": truncated}
    )
    return DecayTable(v=v, rows=rows, rational=rational, truncated=truncated)
