"""
Tests for continued fractions and the convergent decay of the rotation map
"""

import math

import pytest

from src.circlemap import (
    continued_fraction,
    convergent_bound_holds,
    convergent_decay,
    convergent_partition_family,
    floor_rule_holds,
    leading_convergents,
    theoretical_dp,
)
from src.infodyn import binary_entropy
from src.utils.exceptions import PrecisionExhaustedError, UsageError

# Continued fraction [0; 1, 1, 2^38 + ...] whose third denominator overwhelms double precision
BEYOND_PRECISION = 0.5 + 2.0 ** -40


class TestContinuedFraction:
    def test_golden_ratio(self, golden):
        cf = continued_fraction(golden)
        assert cf.coefficients[:6] == [0, 1, 1, 1, 1, 1]
        assert cf.denominators[:7] == [2, 3, 5, 8, 13, 21, 34]
        assert cf.convergent(1) == (1, 2)
        assert not cf.terminated

    def test_pi_fractional_part(self):
        cf = continued_fraction(math.pi - 3.0, depth=4)
        assert cf.coefficients == [0, 7, 15, 1, 292]
        assert cf.denominators[:3] == [7, 106, 113]

    def test_rational_terminates(self):
        cf = continued_fraction(0.25)
        assert cf.terminated
        assert cf.coefficients == [0, 4]
        assert cf.convergents == [(1, 4)]

    def test_value_outside_unit_interval(self):
        with pytest.raises(UsageError):
            continued_fraction(1.5)
        with pytest.raises(UsageError):
            continued_fraction(0.0)

    def test_convergent_index_is_one_based(self, golden):
        cf = continued_fraction(golden)
        with pytest.raises(UsageError):
            cf.convergent(0)

    def test_precision_exhausted_keeps_partial_expansion(self):
        with pytest.raises(PrecisionExhaustedError) as e:
            continued_fraction(BEYOND_PRECISION)
        assert e.value.partial.coefficients == [0, 1, 1]
        assert e.value.partial.convergents == [(1, 2)]

    def test_convergent_bound(self, golden):
        cf = continued_fraction(golden)
        assert all(convergent_bound_holds(golden, b, c) for b, c in cf.convergents[:10])

    def test_floor_rule(self, golden):
        cf = continued_fraction(golden)
        assert all(floor_rule_holds(cf, j) for j in range(1, 11))


class TestLeadingConvergents:
    def test_minimum_denominator(self, golden):
        found, terminated, truncated = leading_convergents(golden, 7, min_denominator=5)
        assert [c for _, c in found] == [5, 8, 13, 21, 34, 55, 89]
        assert not terminated
        assert not truncated

    def test_rational_gives_single_convergent(self):
        assert leading_convergents(0.25, 3) == ([(1, 4)], True, False)

    def test_truncated_at_precision(self):
        assert leading_convergents(BEYOND_PRECISION, 5) == ([(1, 2)], False, True)

    def test_needs_positive_count(self, golden):
        with pytest.raises(UsageError):
            leading_convergents(golden, 0)


class TestDecay:
    def test_theoretical_value(self, golden):
        assert theoretical_dp(0.25, 4) == 0.0
        assert theoretical_dp(0.25, 8) == 0.0
        s = 10 * golden - math.floor(10 * golden)
        assert theoretical_dp(golden, 10) == pytest.approx(binary_entropy(s), abs=1e-12)

    def test_rational_collapse(self):
        table = convergent_decay(0.25, count=7, length=2000, max_workers=1)
        assert table.rational
        assert len(table.rows) == 1
        row = table.rows[0]
        assert row.c_j == 4
        assert row.D_emp <= 1e-12
        assert row.D_theo == 0.0

    def test_golden_decay(self, golden):
        table = convergent_decay(golden, count=7, length=100000, min_denominator=5, max_workers=2)
        assert [row.c_j for row in table.rows] == [5, 8, 13, 21, 34, 55, 89]
        assert [row.j for row in table.rows] == list(range(1, 8))
        for row in table.rows:
            assert row.D_emp > 0
            assert row.D_theo <= row.bound
            assert row.bound == pytest.approx(math.log(row.c_j) / row.c_j)
            assert row.D_emp == pytest.approx(row.D_theo, abs=5e-3)
        assert table.rows[-1].D_emp < table.rows[0].D_emp
        assert table.minimum == table.rows[-1].D_emp

    def test_truncated_table(self):
        table = convergent_decay(BEYOND_PRECISION, count=5, length=1000, max_workers=1)
        assert table.truncated
        assert [row.c_j for row in table.rows] == [2]

    def test_no_convergent_large_enough(self):
        with pytest.raises(UsageError):
            convergent_decay(BEYOND_PRECISION, min_denominator=5, length=100)

    def test_partition_family_labels(self, golden):
        family = convergent_partition_family(golden, 3)
        assert [obs.describe() for obs in family] == ["c1=2", "c2=3", "c3=5"]
