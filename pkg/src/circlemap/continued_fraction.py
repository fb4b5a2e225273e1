"""
Continued fractions and convergents of rotation numbers
"""

import logging
import math
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.utils.exceptions import PrecisionExhaustedError, UsageError

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 20


class ContinuedFraction(BaseModel):
    """Simple continued fraction [a_0; a_1, a_2, ...] of v in (0, 1).

    ``convergents`` are the reduced approximants b_j/c_j with c_j >= 2, indexed
    from j = 1; ``terminated`` is set when an approximant reproduces v exactly
    in floating point.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    coefficients: List[int]
    convergents: List[Tuple[int, int]] = Field(default_factory=list)
    terminated: bool = False

    @property
    def denominators(self) -> List[int]:
        return [c for _, c in self.convergents]

    def convergent(self, j: int) -> Tuple[int, int]:
        """The j-th convergent, 1-based"""
        if not 1 <= j <= len(self.convergents):
            raise UsageError(f"Convergent index {j} outside 1..{len(self.convergents)}")
        return self.convergents[j - 1]


def _check_value(v: float) -> None:
    if not (0.0 < v < 1.0) or not math.isfinite(v):
        raise UsageError(f"Rotation number must lie in (0, 1), got {v}")


def iter_convergents(v: float) -> Iterator[Tuple[int, int, int, bool]]:
    """
    Yield (a_k, b_k, c_k, exact) along the Gauss map expansion of v

    The expansion runs on the exact binary value of v. ``exact`` marks the
    approximant whose float equals v, after which iteration stops.

    Raises:
        PrecisionExhaustedError: when c_k^2 exceeds the inverse spacing of v
    """
    _check_value(v)
    x = Fraction(v)
    resolution = float(np.spacing(v))
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    while True:
        a = math.floor(x)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k * k * resolution > 1.0:
            raise PrecisionExhaustedError(
                f"Convergent denominator {k} exceeds the floating-point resolution of v={v!r}",
                partial=(h, k),
            )
        exact = h / k == v
        yield a, h, k, exact
        remainder = x - a
        if exact or remainder == 0:
            return
        x = 1 / remainder


def continued_fraction(v: float, depth: int = DEFAULT_DEPTH) -> ContinuedFraction:
    """
    Continued-fraction expansion of v via the Gauss map

    Args:
        v: Rotation number in (0, 1)
        depth: Maximum number of coefficients after a_0

    Returns:
        ContinuedFraction with convergents b_j/c_j, c_j >= 2

    Raises:
        PrecisionExhaustedError: when further convergents are meaningless in
            double precision; ``partial`` holds the expansion computed so far
    """
    if depth < 1:
        raise UsageError("Continued fraction depth must be at least 1")
    coefficients: List[int] = []
    convergents: List[Tuple[int, int]] = []
    terminated = False
    try:
        for a, b, c, exact in iter_convergents(v):
            coefficients.append(int(a))
            if c >= 2:
                convergents.append((int(b), int(c)))
            if exact:
                terminated = True
            if exact or len(coefficients) > depth:
                break
    except PrecisionExhaustedError as e:
        e.partial = ContinuedFraction(value=v, coefficients=coefficients, convergents=convergents)
        raise
    logger.debug(
        "Continued fraction",
        extra={"v": v, "terms": len(coefficients), "terminated": terminated}
    )
    return ContinuedFraction(
        value=v, coefficients=coefficients, convergents=convergents, terminated=terminated
    )


def leading_convergents(
    v: float,
    count: int,
    min_denominator: int = 2
) -> Tuple[List[Tuple[int, int]], bool, bool]:
    """
    The first ``count`` convergents with c_j >= min_denominator

    Returns:
        (convergents, terminated, truncated); ``truncated`` means precision ran
        out before ``count`` convergents were found
    """
    if count < 1:
        raise UsageError("At least one convergent is required")
    found: List[Tuple[int, int]] = []
    try:
        for _, b, c, exact in iter_convergents(v):
            if exact:
                return [(int(b), int(c))], True, False
            if c >= min_denominator:
                found.append((int(b), int(c)))
            if len(found) == count:
                return found, False, False
    except PrecisionExhaustedError:
        logger.warning(
            "Convergents truncated at floating-point resolution",
            extra={"v": v, "found": len(found), "requested": count}
        )
        return found, False, True
    return found, False, False


def convergent_bound_holds(v: float, b: int, c: int) -> bool:
    """|v - b/c| <= 1/c^2, checked exactly"""
    return abs(Fraction(v) - Fraction(b, c)) <= Fraction(1, c * c)


def floor_of_multiple(v: float, l: int) -> Tuple[int, Fraction]:
    """Exact floor(l v) and fractional part s = l v - floor(l v)"""
    product = Fraction(v) * l
    whole = math.floor(product)
    return whole, product - whole


def floor_rule_holds(cf: ContinuedFraction, j: int) -> Optional[bool]:
    """
    Check floor(c_j v) = b_j when v > b_j/c_j and b_j - 1 otherwise

    Returns None when v equals the convergent exactly.
    """
    b, c = cf.convergent(j)
    difference = Fraction(cf.value) - Fraction(b, c)
    if difference == 0:
        return None
    whole, _ = floor_of_multiple(cf.value, c)
    expected = b if difference > 0 else b - 1
    return whole == expected
