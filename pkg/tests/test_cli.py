"""
Tests for the command-line entry point, run configuration and result files
"""

import json
import logging
import math

import numpy as np
import pandas as pd
import pytest

from src.cli.commands import map_rows, sweep_row
from src.cli.models import ParameterGrid, RunConfig, Subcommand
from src.cli.output import output_path, read_orbit_csv, validate_record, write_json
from src.dynamics import Orbit, builtin_map, iterate_map
from src.main import main
from src.quantum import depolarizing_channel, write_matrices
from src.utils.exceptions import ChaosDegreeException, DimensionMismatchError, EmptyGridError, ParseError, UsageError


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers = handlers
    root.setLevel(level)


@pytest.fixture
def run(tmp_path):
    """Invoke main with output in tmp_path and a single worker"""
    def invoke(*args: str, workers: str = "1") -> int:
        return main([*args, "--output-dir", str(tmp_path), "--workers", workers, "--log-level", "WARNING"])
    return invoke


@pytest.fixture
def logistic_orbit_file(tmp_path):
    orbit = iterate_map(builtin_map("logistic"), 0.3, skip=100, length=1000)
    return orbit.to_csv(tmp_path / "observed.csv")


def read(tmp_path, name):
    return pd.read_csv(tmp_path / name, float_precision="round_trip")


class TestParameterGrid:
    def test_range(self):
        grid = ParameterGrid.parse("a=3.4:4.0:0.005")
        values = grid.values()
        assert grid.name == "a"
        assert len(values) == 121
        assert values[0] == 3.4
        assert values[-1] == 4.0

    def test_list(self):
        grid = ParameterGrid.parse("v=0.25,0.618")
        np.testing.assert_array_equal(grid.values(), [0.25, 0.618])

    def test_single_point_range(self):
        assert ParameterGrid.parse("a=3.5:3.5:0.1").values().tolist() == [3.5]

    def test_empty_range(self):
        with pytest.raises(EmptyGridError):
            ParameterGrid.parse("a=3.9:3.4:0.1").values()
        with pytest.raises(EmptyGridError):
            ParameterGrid.parse("a=3.4:3.9:0").values()

    def test_malformed(self):
        with pytest.raises(UsageError):
            ParameterGrid.parse("3.4:4.0:0.1")
        with pytest.raises(UsageError):
            ParameterGrid.parse("a=3.4:x:0.1")
        with pytest.raises(UsageError):
            ParameterGrid.parse("a=1:2")


class TestOutput:
    def test_output_path_drops_extension(self, tmp_path):
        assert output_path(tmp_path, "run.csv", ".json") == tmp_path / "run.json"
        assert output_path(tmp_path / "nested", "run", "_ecd.svg") == tmp_path / "nested" / "run_ecd.svg"
        assert (tmp_path / "nested").is_dir()

    def test_non_finite_values_become_null(self, tmp_path):
        config = RunConfig(subcommand=Subcommand.LYAPUNOV, skip=0, length=10, epsilon=1e-6).to_record()
        record = {
            "config": config,
            "results": [{
                "param": None, "lambda_top": -math.inf, "n": 10, "converged": True,
                "spectrum": None, "convergence_history": [[10, -math.inf]],
            }],
        }
        path = write_json(tmp_path / "out.json", record, "lyapunov-result-schema.json")
        loaded = json.loads(path.read_text())
        assert loaded["results"][0]["lambda_top"] is None

    def test_schema_violation(self, tmp_path):
        with pytest.raises(ChaosDegreeException) as e:
            write_json(tmp_path / "out.json", {"results": []}, "ecd-result-schema.json")
        assert e.value.error_code == "schema_error"
        assert not (tmp_path / "out.json").exists()

    def test_orbit_csv_round_trip(self, tmp_path):
        orbit = iterate_map(builtin_map("henon"), (0.0, 0.0), skip=10, length=500)
        loaded = read_orbit_csv(orbit.to_csv(tmp_path / "henon.csv"))
        np.testing.assert_array_equal(loaded.points, orbit.points)
        assert loaded.system_name == "henon"

    def test_malformed_value_reports_file_line(self, tmp_path):
        lines = ["step_index,x_1"] + [f"{k},{0.1 * k:.3f}" for k in range(30)]
        lines[16] = "15,abc"
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as e:
            read_orbit_csv(path)
        assert e.value.line == 17

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            read_orbit_csv(tmp_path / "absent.csv")

    def test_expected_dimension(self, logistic_orbit_file):
        with pytest.raises(DimensionMismatchError):
            read_orbit_csv(logistic_orbit_file, expected_dimension=2)


class TestMapRows:
    def test_single_worker_runs_inline(self, mocker):
        pool = mocker.patch("src.cli.commands.ProcessPoolExecutor")
        config = RunConfig(subcommand=Subcommand.SWEEP, skip=0, length=10, epsilon=0.0, workers=1)
        assert map_rows(lambda c, v: v * 2, config, [1.0, 2.0, 3.0]) == [2.0, 4.0, 6.0]
        pool.assert_not_called()

    def test_pool_results_keep_grid_order(self, mocker):
        pool = mocker.patch("src.cli.commands.ProcessPoolExecutor")
        executor = pool.return_value.__enter__.return_value
        executor.map.return_value = iter(["first", "second"])
        config = RunConfig(subcommand=Subcommand.SWEEP, skip=0, length=10, epsilon=0.0, workers=3)
        assert map_rows(sweep_row, config, [3.5, 3.6]) == ["first", "second"]
        pool.assert_called_once_with(max_workers=3)
        executor.map.assert_called_once_with(sweep_row, [config, config], [3.5, 3.6])

    def test_sweep_row_records_failures(self):
        config = RunConfig(
            subcommand=Subcommand.SWEEP, map_name="logistic", skip=0, length=100, epsilon=1e-6,
            grid=ParameterGrid.parse("a=3.0:5.0:1.0"),
        )
        row = sweep_row(config, 5.0)
        assert math.isnan(row["D"])
        assert row["warning"].startswith("param_out_of_range")


class TestEcdCommand:
    def test_rational_rotation(self, run, tmp_path, capsys):
        code = run("ecd", "--map", "circle", "--v", "0.25", "--cells", "4",
                   "--skip", "0", "--n", "1000", "--out", "run")
        assert code == 0
        frame = read(tmp_path, "run.csv")
        assert list(frame.columns) == ["map", "params", "L", "skip", "n", "D_nats", "S_out", "I", "classification"]
        assert frame.loc[0, "D_nats"] <= 1e-12
        assert frame.loc[0, "classification"] == "stable"
        assert frame.loc[0, "params"] == "v=0.25"
        assert "stable" in capsys.readouterr().out

    def test_json_record(self, run, tmp_path):
        code = run("ecd", "--a", "3.71", "--n", "20000", "--format", "json", "--out", "chaotic.json")
        assert code == 0
        record = json.loads((tmp_path / "chaotic.json").read_text())
        assert validate_record(record, "ecd-result-schema.json") == []
        assert validate_record(record["config"], "run-config-schema.json") == []
        assert record["results"][0]["classification"] == "chaotic"
        assert record["config"]["skip"] == 1000
        assert (tmp_path / "chaotic.csv").exists()

    def test_bits(self, run, tmp_path):
        assert run("ecd", "--map", "tent", "--cells", "16", "--n", "5000", "--log-base", "2") == 0
        row = read(tmp_path, "ecd.csv").loc[0]
        assert row["D_bits"] > 0.9
        assert row["classification"] == "chaotic"

    def test_family(self, run, tmp_path, capsys):
        code = run("ecd", "--map", "circle", "--family", "4,13", "--skip", "0", "--n", "20000",
                   "--format", "json")
        assert code == 0
        record = json.loads((tmp_path / "ecd.json").read_text())
        assert record["total"]["argmin"] == 1
        assert record["total"]["totally_chaotic"] is True
        assert len(record["results"]) == 2
        assert "infimum" in capsys.readouterr().out

    def test_ensemble(self, run, tmp_path):
        assert run("ecd", "--cells", "50", "--ensemble", "4", "--skip", "100", "--n", "2000") == 0
        assert read(tmp_path, "ecd.csv").loc[0, "n"] == 4 * 1999

    def test_orbit_file(self, run, tmp_path, logistic_orbit_file):
        assert run("ecd", "--orbit-file", str(logistic_orbit_file), "--auto-box", "--cells", "20") == 0
        frame = read(tmp_path, "ecd.csv")
        assert frame.loc[0, "map"] == "observed"
        assert frame.loc[0, "classification"] == "chaotic"

    def test_orbit_file_needs_box(self, run, logistic_orbit_file):
        assert run("ecd", "--orbit-file", str(logistic_orbit_file), "--cells", "20") == 2

    def test_unknown_map(self, run, capsys):
        assert run("ecd", "--map", "lorenz") == 1
        assert "error[unknown_map]" in capsys.readouterr().err

    def test_parameter_out_of_range(self, run):
        assert run("ecd", "--a", "4.5") == 1

    def test_domain_escape(self, run, capsys):
        assert run("ecd", "--x0", "1.5", "--n", "100") == 1
        assert "error[domain_escape]" in capsys.readouterr().err


class TestUsageErrors:
    def test_missing_subcommand(self):
        assert main([]) == 2

    def test_unknown_flag(self, run):
        assert run("ecd", "--bogus") == 2

    def test_invalid_orbit_length(self, run, capsys):
        assert run("ecd", "--n", "1") == 2
        assert "length" in capsys.readouterr().err

    def test_malformed_param(self, run):
        assert run("ecd", "--param", "a") == 2

    @pytest.mark.parametrize("flags", [("--cells", "0"), ("--cells", "8x0"), ("--family", "4,0")])
    def test_empty_partition_axis_is_a_usage_error(self, run, capsys, flags):
        assert run("ecd", "--n", "100", *flags) == 2
        assert "error[usage]" in capsys.readouterr().err

    def test_missing_config_file(self, run, tmp_path):
        assert run("ecd", "--config", str(tmp_path / "absent.env")) == 2

    def test_config_file_supplies_defaults(self, tmp_path, mocker):
        runner = mocker.patch("src.main.run_command")
        path = tmp_path / "ecd.env"
        path.write_text("ECD_DEFAULT_SKIP=7\nECD_DEFAULT_LENGTH=500\n")
        assert main(["ecd", "--config", str(path), "--output-dir", str(tmp_path)]) == 0
        config = runner.call_args[0][0]
        assert config.skip == 7
        assert config.length == 500
        assert config.subcommand is Subcommand.ECD

    def test_flags_override_config_file(self, tmp_path, mocker):
        runner = mocker.patch("src.main.run_command")
        path = tmp_path / "ecd.env"
        path.write_text("ECD_DEFAULT_SKIP=7\n")
        assert main(["ecd", "--config", str(path), "--skip", "3"]) == 0
        assert runner.call_args[0][0].skip == 3


class TestSweepCommand:
    def test_grid_rows(self, run, tmp_path):
        assert run("sweep", "--sweep", "a=3.4:4.0:0.005", "--skip", "100", "--n", "2000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert list(frame.columns) == ["param", "D", "lambda", "n", "converged", "classification", "warning"]
        assert len(frame) == 121
        assert frame["param"].iloc[-1] == 4.0
        assert frame["D"].notna().all()

    def test_rational_and_irrational_rotation(self, run, tmp_path):
        assert run("sweep", "--map", "circle", "--sweep", "v=0.25,0.6180339887498949",
                   "--cells", "4", "--skip", "0", "--n", "5000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert frame.loc[0, "D"] <= 1e-12
        assert frame.loc[1, "D"] > 0
        assert list(frame["classification"]) == ["stable", "chaotic"]

    def test_agreement_on_logistic(self, run, capsys):
        assert run("sweep", "--sweep", "a=2.8,3.2,3.71,4.0", "--skip", "1000", "--n", "20000") == 0
        assert "sign agreement 4/4" in capsys.readouterr().out

    def test_empty_range(self, run):
        assert run("sweep", "--sweep", "a=3.9:3.4:0.1") == 2

    def test_unknown_sweep_parameter(self, run):
        assert run("sweep", "--sweep", "mu=1:2:0.5") == 2

    def test_reproducible_bytes(self, run, tmp_path):
        args = ("sweep", "--sweep", "a=3.5:3.9:0.1", "--skip", "100", "--n", "3000")
        assert run(*args, "--out", "first") == 0
        assert run(*args, "--out", "second") == 0
        assert (tmp_path / "first.csv").read_bytes() == (tmp_path / "second.csv").read_bytes()

    def test_worker_count_does_not_change_output(self, run, tmp_path):
        args = ("sweep", "--sweep", "a=3.5:3.9:0.1", "--skip", "100", "--n", "3000")
        assert run(*args, "--out", "serial") == 0
        assert run(*args, "--out", "parallel", workers="2") == 0
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()

    def test_svg(self, run, tmp_path):
        assert run("sweep", "--sweep", "a=3.5:3.9:0.2", "--skip", "100", "--n", "2000", "--svg") == 0
        assert (tmp_path / "ecd_ecd.svg").read_text().lstrip().startswith("<?xml")
        assert (tmp_path / "ecd_lyapunov.svg").exists()

    @pytest.mark.slow
    def test_logistic_agreement_over_full_range(self, run, capsys):
        assert run("sweep", "--sweep", "a=3.4:4.0:0.005", "--skip", "1000", "--n", "100000",
                   workers="4") == 0
        out = capsys.readouterr().out
        agreeing, total = out.split("sign agreement ")[1].split()[0].split("/")
        assert int(agreeing) / int(total) >= 0.9


class TestBifurcationCommand:
    def test_fixed_point_and_period_two(self, run, tmp_path):
        assert run("bifurcation", "--sweep", "a=2.0,3.2", "--keep", "50", "--skip", "1000", "--svg") == 0
        frame = read(tmp_path, "ecd.csv")
        assert list(frame.columns) == ["param", "x"]
        fixed = frame[frame["param"] == 2.0]["x"]
        assert len(fixed) == 50
        np.testing.assert_allclose(fixed, 0.5, atol=1e-12)
        period_two = frame[np.isclose(frame["param"], 3.2)]["x"]
        assert len(np.unique(period_two.round(6))) == 2
        assert (tmp_path / "ecd.svg").exists()

    def test_needs_one_dimensional_map(self, run):
        assert run("bifurcation", "--map", "henon", "--sweep", "a=1.0:1.4:0.1") == 2


class TestCircleDecayCommand:
    def test_golden_rotation(self, run, tmp_path):
        assert run("circle-decay", "--skip", "0", "--n", "20000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert list(frame.columns) == ["j", "c_j", "D_emp", "D_theo", "bound"]
        assert frame["c_j"].tolist() == [2, 3, 5, 8, 13, 21, 34]

    def test_rational_rotation(self, run, tmp_path):
        assert run("circle-decay", "--v", "0.25", "--skip", "0", "--n", "2000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert len(frame) == 1
        assert frame.loc[0, "c_j"] == 4
        assert frame.loc[0, "D_emp"] <= 1e-12


class TestLyapunovCommand:
    def test_single_value(self, run, tmp_path):
        assert run("lyapunov", "--n", "50000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert list(frame.columns) == ["param", "lambda_top", "n", "converged"]
        assert frame.loc[0, "lambda_top"] > 0.3

    def test_spectrum_json(self, run, tmp_path):
        assert run("lyapunov", "--map", "henon", "--spectrum", "--n", "20000", "--format", "json") == 0
        frame = read(tmp_path, "ecd.csv")
        assert {"lambda_1", "lambda_2"} <= set(frame.columns)
        record = json.loads((tmp_path / "ecd.json").read_text())
        assert validate_record(record, "lyapunov-result-schema.json") == []
        assert len(record["results"][0]["spectrum"]) == 2

    def test_grid(self, run, tmp_path):
        assert run("lyapunov", "--sweep", "a=2.8,3.71", "--n", "20000") == 0
        frame = read(tmp_path, "ecd.csv")
        assert frame.loc[0, "lambda_top"] < 0 < frame.loc[1, "lambda_top"]

    def test_failure_without_grid(self, run):
        assert run("lyapunov", "--x0", "1.5") == 1


class TestQuantumCommand:
    def test_fully_depolarizing(self, run, tmp_path):
        assert run("quantum-ecd", "--channel", "fully-depolarizing") == 0
        frame = read(tmp_path, "ecd.csv")
        assert list(frame.columns) == ["D", "S_canonical", "degenerate", "trials"]
        assert frame.loc[0, "D"] == pytest.approx(math.log(2), abs=1e-10)

    def test_kraus_file(self, run, tmp_path):
        kraus = write_matrices(tmp_path / "kraus.txt", depolarizing_channel(0.3).kraus)
        assert run("quantum-ecd", "--kraus", str(kraus)) == 0
        assert read(tmp_path, "ecd.csv").loc[0, "D"] > 0

    def test_dimension_mismatch(self, run, tmp_path):
        kraus = write_matrices(tmp_path / "kraus.txt", depolarizing_channel(0.3).kraus)
        assert run("quantum-ecd", "--kraus", str(kraus), "--dim", "3") == 1

    def test_malformed_state_file(self, run, tmp_path, capsys):
        state = tmp_path / "state.txt"
        state.write_text("2\n1,0 0,0\n0,0 x\n")
        assert run("quantum-ecd", "--state", str(state)) == 1
        assert "error[parse_error]" in capsys.readouterr().err


class TestIngestCommand:
    def test_summary_and_export(self, run, tmp_path, logistic_orbit_file):
        export = tmp_path / "copy.csv"
        assert run("ingest", "--orbit-file", str(logistic_orbit_file), "--export", str(export),
                   "--out", "summary") == 0
        frame = read(tmp_path, "summary.csv")
        assert frame.loc[0, "length"] == 1000
        assert frame.loc[0, "dimension"] == 1
        original = read_orbit_csv(logistic_orbit_file)
        np.testing.assert_array_equal(read_orbit_csv(export).points, original.points)

    def test_parse_error_line(self, run, tmp_path, capsys):
        lines = ["step_index,x_1"] + [f"{k},0.5" for k in range(20)]
        lines[16] = "15,"
        path = tmp_path / "gap.csv"
        path.write_text("\n".join(lines) + "\n")
        assert run("ingest", "--orbit-file", str(path)) == 1
        assert ":17:" in capsys.readouterr().err

    def test_expected_dimension(self, run, logistic_orbit_file):
        assert run("ingest", "--orbit-file", str(logistic_orbit_file), "--expect-dim", "2") == 1

    def test_needs_orbit_file(self, run):
        assert run("ingest") == 2


def test_orbit_ecd_matches_library(tmp_path, run):
    orbit = Orbit(points=np.tile([[0.1], [0.6]], (50, 1)), system_name="periodic")
    path = orbit.to_csv(tmp_path / "periodic.csv")
    assert run("ecd", "--orbit-file", str(path), "--auto-box", "--cells", "2") == 0
    assert read(tmp_path, "ecd.csv").loc[0, "D_nats"] == 0.0
