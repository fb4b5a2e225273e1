"""
Tests for Lyapunov exponents and their agreement with the chaos degree
"""

import math

import numpy as np
import pytest

from src.circlemap.decay import CIRCLE_BOX
from src.dynamics import InitialEnsemble, builtin_map, iterate_map
from src.infodyn import ObservationSpec, ecd_of_system
from src.lyapunov import (
    AgreementPoint,
    ecd_lyapunov_agreement,
    lyapunov_1d,
    lyapunov_direct,
    lyapunov_from_orbit,
    lyapunov_md,
)
from src.utils.exceptions import EmptyGridError, UsageError


class TestOneDimensional:
    def test_doubling_map(self, doubling_map):
        result = lyapunov_1d(doubling_map, 0.1, skip=0, n=1000)
        assert result.top_exponent == pytest.approx(math.log(2), abs=1e-12)
        assert result.converged

    def test_stable_logistic_is_negative(self):
        result = lyapunov_1d(builtin_map("logistic", {"a": 2.8}), 0.3, skip=1000, n=10000)
        assert result.top_exponent < 0

    def test_chaotic_logistic_is_positive(self, logistic):
        result = lyapunov_1d(logistic, 0.3, skip=1000, n=100000)
        assert result.top_exponent > 0.3

    @pytest.mark.slow
    def test_fully_chaotic_logistic(self):
        result = lyapunov_1d(builtin_map("logistic", {"a": 4.0}), 0.3, skip=1000, n=10_000_000)
        assert result.top_exponent == pytest.approx(math.log(2), abs=1e-3)

    @pytest.mark.parametrize("n", [1, 5, 12, 20])
    @pytest.mark.parametrize("name, params", [("logistic", {"a": 3.71}), ("tent", {"mu": 1.9999})])
    def test_matches_explicit_derivative_product(self, name, params, n):
        system = builtin_map(name, params)
        x = 0.3
        for _ in range(50):
            x = float(system.step(np.array([x]))[0])
        product = 1.0
        for _ in range(n):
            product *= abs(float(system.jacobian(np.array([x]))[0, 0]))
            x = float(system.step(np.array([x]))[0])
        result = lyapunov_1d(system, 0.3, skip=50, n=n)
        assert result.top_exponent == pytest.approx(math.log(product) / n, rel=1e-12, abs=1e-15)

    def test_superstable_point(self):
        result = lyapunov_1d(builtin_map("logistic", {"a": 2.0}), 0.5, skip=0, n=100)
        assert result.top_exponent == -math.inf
        assert result.singular_steps == 100

    def test_history_ends_at_n(self, logistic):
        result = lyapunov_1d(logistic, 0.3, skip=100, n=5000)
        assert len(result.convergence_history) == 10
        assert result.convergence_history[-1] == (5000, result.top_exponent)

    def test_from_orbit_matches_fresh_orbit(self, logistic):
        orbit = iterate_map(logistic, 0.3, skip=100, length=5000)
        assert lyapunov_from_orbit(logistic, orbit).top_exponent == lyapunov_1d(
            logistic, 0.3, skip=100, n=5000
        ).top_exponent

    def test_needs_one_dimensional_map(self):
        with pytest.raises(UsageError):
            lyapunov_1d(builtin_map("henon"))


class TestSpectrum:
    def test_linear_map(self, linear_map):
        result = lyapunov_md(linear_map, (0.0, 0.0), skip=0, n=500)
        np.testing.assert_allclose(result.spectrum, [math.log(2), -math.log(2)], atol=1e-12)
        assert result.top_exponent == result.spectrum[0]

    def test_direct_product_on_linear_map(self, linear_map):
        result = lyapunov_direct(linear_map, (0.0, 0.0), n=20)
        np.testing.assert_allclose(result.spectrum, [math.log(2), -math.log(2)], atol=1e-12)

    def test_henon_spectrum(self):
        system = builtin_map("henon")
        result = lyapunov_md(system, (0.0, 0.0), skip=1000, n=100000)
        assert result.top_exponent == pytest.approx(0.42, abs=0.02)
        assert sum(result.spectrum) == pytest.approx(math.log(0.3), abs=1e-9)

    def test_reorthonormalization_period(self):
        system = builtin_map("henon")
        every = lyapunov_md(system, (0.0, 0.0), skip=1000, n=20000, reorthonormalize_every=1)
        sparse = lyapunov_md(system, (0.0, 0.0), skip=1000, n=20000, reorthonormalize_every=5)
        assert sparse.top_exponent == pytest.approx(every.top_exponent, abs=1e-6)

    def test_direct_and_qr_share_volume_growth(self):
        system = builtin_map("henon")
        direct = lyapunov_direct(system, (0.0, 0.0), skip=100, n=8)
        qr = lyapunov_md(system, (0.0, 0.0), skip=100, n=8)
        assert sum(direct.spectrum) == pytest.approx(sum(qr.spectrum), abs=1e-6)

    def test_direct_product_limit(self, linear_map):
        with pytest.raises(UsageError):
            lyapunov_direct(linear_map, (0.0, 0.0), n=61)

    def test_baker_spectrum(self):
        result = lyapunov_md(builtin_map("baker"), skip=0, n=30)
        np.testing.assert_allclose(result.spectrum, [math.log(2), -math.log(2)], atol=1e-12)


class TestAgreement:
    def test_irrational_rotation_disagrees(self, golden):
        system = builtin_map("circle", {"v": golden})
        ecd = ecd_of_system(
            system, InitialEnsemble.single(0.1), ObservationSpec.partition(10, box=CIRCLE_BOX), 0, 100000
        )
        exponent = lyapunov_1d(system, 0.1, skip=0, n=100000).top_exponent
        assert ecd.value > 0.1
        assert exponent == 0.0
        stats = ecd_lyapunov_agreement([(golden, ecd.value, exponent)], epsilon=1e-6)
        assert stats.agreeing == 0
        assert stats.disagreements == [AgreementPoint(param=golden, ecd=ecd.value, lyapunov=0.0)]

    def test_counts_and_disagreements(self):
        stats = ecd_lyapunov_agreement(
            [(1.0, 0.5, 0.2), (2.0, 0.0, -0.1), (3.0, 0.5, -0.1), (4.0, math.nan, 0.1)],
            epsilon=1e-3,
        )
        assert stats.total == 3
        assert stats.agreeing == 2
        assert stats.skipped == 1
        assert stats.fraction == pytest.approx(2.0 / 3.0)
        assert stats.disagreements == [AgreementPoint(param=3.0, ecd=0.5, lyapunov=-0.1)]

    def test_empty_grid(self):
        with pytest.raises(EmptyGridError):
            ecd_lyapunov_agreement([])

    def test_all_missing(self):
        with pytest.raises(EmptyGridError):
            ecd_lyapunov_agreement([(1.0, math.nan, math.nan)])
