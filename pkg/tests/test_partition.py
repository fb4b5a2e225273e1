"""
Tests for equi-partitions and empirical models
"""

import math

import numpy as np
import pytest

from src.partition import (
    Channel,
    EmpiricalModel,
    accumulate_symbols,
    cell_of,
    channel_from,
    empirical_model,
    make_equipartition,
    model_from_joint,
    model_from_symbols,
    parse_cells,
    symbolize,
)
from src.dynamics import Orbit, builtin_map, iterate_map
from src.infodyn import shannon_entropy
from src.utils.exceptions import (
    EmptyAxisError,
    InconsistentModelError,
    InvalidDistributionError,
    OutOfBoxError,
    UsageError,
)


class TestEquiPartition:
    def test_parse_cells(self):
        assert parse_cells("100") == (100,)
        assert parse_cells("32X16") == (32, 16)

    @pytest.mark.parametrize("text", ["0", "4x0", "-3"])
    def test_parse_non_positive_cells_is_a_usage_error(self, text):
        with pytest.raises(UsageError):
            parse_cells(text)

    def test_parse_garbage(self):
        with pytest.raises(UsageError):
            parse_cells("many")

    def test_boundaries_go_to_upper_cell(self):
        partition = make_equipartition((0.0, 1.0), 4)
        assert cell_of(partition, 0.0) == 0
        assert cell_of(partition, 0.25) == 1
        assert cell_of(partition, 0.5) == 2
        assert cell_of(partition, 0.99) == 3

    def test_top_edge_is_in_last_cell(self):
        partition = make_equipartition((0.0, 1.0), 4)
        assert cell_of(partition, 1.0) == 3

    def test_row_major_indexing(self):
        partition = make_equipartition([(0.0, 1.0), (0.0, 1.0)], (2, 3))
        assert partition.total_cells == 6
        assert cell_of(partition, (0.75, 0.1)) == 3
        assert cell_of(partition, (0.1, 0.9)) == 2

    def test_every_point_lands_in_exactly_one_cell(self, rng):
        partition = make_equipartition([(-1.5, 1.5), (-0.5, 0.5)], (7, 5))
        points = rng.uniform((-1.5, -0.5), (1.5, 0.5), size=(1000, 2))
        symbols = symbolize(partition, points)
        assert symbols.shape == (1000,)
        assert symbols.min() >= 0
        assert symbols.max() < 35
        for point, symbol in zip(points[:20], symbols[:20]):
            lo, hi = partition.cell_bounds(int(symbol))
            assert np.all(point >= lo) and np.all(point <= hi)

    def test_point_outside_box(self):
        partition = make_equipartition((0.0, 1.0), 10)
        with pytest.raises(OutOfBoxError) as e:
            symbolize(partition, np.array([0.5, 1.5, 0.2]))
        assert e.value.index == 1

    def test_zero_cell_axis(self):
        with pytest.raises(EmptyAxisError):
            make_equipartition([(0.0, 1.0), (0.0, 1.0)], (3, 0))


class TestEmpiricalModel:
    def test_alternating_sequence(self):
        model = model_from_symbols([0, 1, 0, 1, 0], 2)
        np.testing.assert_allclose(model.marginal, [0.5, 0.5])
        np.testing.assert_allclose(model.joint.toarray(), [[0.0, 0.5], [0.5, 0.0]])
        assert model.pair_count == 4
        assert model.row_deviation() == 0.0

    def test_marginal_counts_first_element_of_each_pair(self):
        model = model_from_symbols([0, 0, 0, 1], 2)
        np.testing.assert_allclose(model.marginal, [1.0, 0.0])
        np.testing.assert_allclose(model.output_marginal, [2.0 / 3.0, 1.0 / 3.0])

    def test_rows_sum_to_marginal(self, rng):
        symbols = rng.integers(0, 6, size=500)
        model = model_from_symbols(symbols, 6)
        assert model.row_deviation() <= 1e-12

    def test_weighted_members(self):
        model = accumulate_symbols(np.array([[0, 0, 0], [1, 1, 1]]), [0.25, 0.75], 2)
        np.testing.assert_allclose(model.marginal, [0.25, 0.75])
        np.testing.assert_allclose(model.joint.toarray(), [[0.25, 0.0], [0.0, 0.75]])
        assert model.pair_count == 4

    def test_model_from_orbit(self):
        orbit = Orbit(points=[[0.1], [0.6], [0.1], [0.6]])
        model = empirical_model(orbit, make_equipartition((0.0, 1.0), 2))
        np.testing.assert_allclose(model.joint.toarray(), [[0.0, 2.0 / 3.0], [1.0 / 3.0, 0.0]])

    def test_marginal_must_sum_to_one(self):
        with pytest.raises(InvalidDistributionError):
            EmpiricalModel(marginal=[0.5, 0.6], joint=[[0.5, 0.0], [0.0, 0.5]])

    def test_negative_probability(self):
        with pytest.raises(InvalidDistributionError):
            model_from_joint([[1.2, -0.2], [0.0, 0.0]])

    def test_to_csv(self, tmp_path):
        model = model_from_symbols([0, 1, 0, 1, 0], 3)
        joint_path, marginal_path = model.to_csv(tmp_path / "model")
        assert joint_path.read_text().splitlines()[0] == "i,j,p_ij"
        assert marginal_path.read_text().splitlines() == ["i,p_i", "0,0.5", "1,0.5"]


class TestChannel:
    def test_channel_from_model(self):
        channel = channel_from(model_from_symbols([0, 1, 0, 1, 0], 2))
        np.testing.assert_allclose(channel.transition.toarray(), [[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(channel.support, [0, 1])

    def test_support_rows_are_probability_vectors(self, rng, random_model):
        channel = channel_from(model_from_joint(random_model(8)))
        rows = np.asarray(channel.transition.sum(axis=1)).ravel()
        np.testing.assert_allclose(rows[channel.support], 1.0, atol=1e-12)

    def test_inconsistent_model(self):
        model = EmpiricalModel(marginal=[0.5, 0.5], joint=[[0.5, 0.5], [0.0, 0.0]])
        with pytest.raises(InconsistentModelError):
            channel_from(model)

    def test_apply_pushes_marginal_forward(self):
        model = model_from_symbols([0, 0, 1, 2, 0, 1, 1, 2, 0], 3)
        channel = channel_from(model)
        np.testing.assert_allclose(channel.apply(model.marginal), model.output_marginal, atol=1e-12)

    def test_unvisited_rows_are_undefined(self):
        channel = channel_from(model_from_symbols([0, 1, 0, 1], 3))
        assert 2 not in channel.support
        assert channel.row(2).sum() == 0.0

    def test_identity(self):
        channel = Channel.identity(3)
        np.testing.assert_allclose(channel.apply([0.2, 0.3, 0.5]), [0.2, 0.3, 0.5])

    def test_rows_must_be_stochastic(self):
        with pytest.raises(InvalidDistributionError):
            Channel(transition=[[0.5, 0.2], [0.0, 1.0]], support=[0, 1])

    def test_from_matrix(self):
        channel = Channel.from_matrix([[0.5, 0.5], [0.0, 0.0]])
        np.testing.assert_array_equal(channel.support, [0])
        assert math.isclose(channel.row(0).sum(), 1.0)


class TestPartitionedOrbits:
    def test_rotation_channel_splits_each_cell_in_two(self, golden):
        cells = 10
        orbit = iterate_map(builtin_map("circle", {"v": golden}), 0.1, skip=0, length=100000)
        channel = channel_from(empirical_model(orbit, make_equipartition((0.0, 2.0 * math.pi), cells)))
        assert channel.support.size == cells
        assert np.all(channel.row_nonzeros() <= 2)
        shift, s = divmod(cells * golden, 1.0)
        for i in range(cells):
            row = channel.row(i)
            assert row[(i + int(shift)) % cells] == pytest.approx(1.0 - s, abs=5e-3)
            assert row[(i + int(shift) + 1) % cells] == pytest.approx(s, abs=5e-3)

    def test_refinement_never_lowers_entropy(self, logistic):
        orbit = iterate_map(logistic, 0.3, skip=1000, length=50000)
        marginal_entropy = []
        joint_entropy = []
        for cells in (5, 10, 20, 40, 80):
            model = empirical_model(orbit, make_equipartition((0.0, 1.0), cells))
            marginal_entropy.append(shannon_entropy(model.marginal))
            joint_entropy.append(shannon_entropy(model.joint.toarray()))
        assert np.all(np.diff(marginal_entropy) >= -1e-12)
        assert np.all(np.diff(joint_entropy) >= -1e-12)
