"""
Subcommand implementations

Each command takes a resolved RunConfig, writes its files and returns the
domain result. Library errors propagate to the entry point.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Union

import numpy as np

from src.circlemap.decay import DecayTable, convergent_decay
from src.cli.models import RunConfig
from src.cli.output import ingest_orbit, output_path, write_json, write_rows
from src.cli.plots import plot_bifurcation, plot_curve, plot_decay
from src.dynamics.maps import MAP_CATALOG, MapSystem, builtin_map
from src.dynamics.orbit import (
    InitialEnsemble,
    Orbit,
    bounding_box,
    iterate_map,
    sample_ensemble,
)
from src.infodyn.ecd import (
    EcdResult,
    TotalEcdResult,
    ecd_of_orbit,
    ecd_of_system,
    is_totally_chaotic,
    total_ecd,
)
from src.infodyn.entropy import to_base
from src.infodyn.observation import ObservationSpec, partition_family
from src.lyapunov.exponents import (
    AgreementStats,
    LyapunovResult,
    ecd_lyapunov_agreement,
    lyapunov_from_orbit,
    lyapunov_md,
)
from src.partition.equipartition import parse_cells
from src.quantum.ecd import QuantumEcdResult, quantum_ecd
from src.quantum.matrix_io import read_channel, read_state
from src.quantum.states import (
    DensityMatrix,
    QuantumChannel,
    depolarizing_channel,
    fully_depolarizing_channel,
    identity_channel,
    random_state,
    random_unitary,
    unitary_channel,
)
from src.utils.exceptions import ChaosDegreeException, EmptyGridError, UsageError

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["param", "D", "lambda", "n", "converged", "classification", "warning"]
BIFURCATION_COLUMNS = ["param", "x"]
DECAY_COLUMNS = ["j", "c_j", "D_emp", "D_theo", "bound"]
LYAPUNOV_COLUMNS = ["param", "lambda_top", "n", "converged"]
QUANTUM_COLUMNS = ["D", "S_canonical", "degenerate", "trials"]
INGEST_COLUMNS = ["length", "dimension", "box"]

STATE_PRESETS = ("zero", "mixed", "random")
CHANNEL_PRESETS = ("identity", "depolarizing", "fully-depolarizing", "random-unitary")


def map_rows(fn: Callable[[RunConfig, float], Any], config: RunConfig, values: Iterable[float]) -> List[Any]:
    """
    Evaluate fn(config, value) for every grid value, results in grid order

    More than one worker uses a process pool; workers only see the immutable config.
    """
    values = [float(v) for v in values]
    if config.workers <= 1 or len(values) <= 1:
        return [fn(config, v) for v in values]
    with ProcessPoolExecutor(max_workers=config.workers) as executor:
        return list(executor.map(fn, [config] * len(values), values))


# System construction

def build_system(config: RunConfig, value: Optional[float] = None) -> MapSystem:
    params = dict(config.params)
    if value is not None and config.grid is not None:
        params[config.grid.name] = value
    return builtin_map(config.map_name, params)


def build_observation(config: RunConfig, cells: Optional[str] = None) -> ObservationSpec:
    return ObservationSpec.partition(parse_cells(cells or config.cells), auto_box=config.auto_box)


def build_ensemble(config: RunConfig, system: MapSystem) -> InitialEnsemble:
    if config.ensemble_size is not None:
        return sample_ensemble(system, config.ensemble_size, config.seed)
    return InitialEnsemble.single(config.x0_tuple() or system.default_x0)


def _grid_values(config: RunConfig) -> np.ndarray:
    if config.grid is None:
        raise UsageError(f"'{config.subcommand.value}' needs --sweep NAME=START:STOP:STEP")
    builtin_map(config.map_name, config.params)
    if config.grid.name not in MAP_CATALOG[config.map_name].defaults:
        raise UsageError(f"Map '{config.map_name}' has no parameter '{config.grid.name}'")
    return config.grid.values()


# ecd

def cmd_ecd(config: RunConfig) -> Union[EcdResult, TotalEcdResult]:
    """Chaos degree of a catalog map or an ingested orbit"""
    total: Optional[TotalEcdResult] = None
    if config.orbit_file:
        orbit = ingest_orbit(config.orbit_file)
        results = [ecd_of_orbit(orbit, build_observation(config))]
    else:
        system = build_system(config)
        ensemble = build_ensemble(config, system)
        if config.family:
            family = partition_family(
                [parse_cells(cells) for cells in config.family], auto_box=config.auto_box
            )
            total = total_ecd(system, ensemble, family, config.skip, config.length, config.workers)
            results = total.results
        else:
            results = [ecd_of_system(system, ensemble, build_observation(config), config.skip, config.length)]

    rows = [r.to_record(config.epsilon, config.log_base) for r in results]
    write_rows(output_path(config.output_dir, config.out, ".csv"), rows, list(rows[0]))
    if config.format.value == "json":
        record: Dict[str, Any] = {"config": config.to_record(), "results": rows}
        if total is not None:
            record["total"] = {
                "infimum": total.value,
                "argmin": total.argmin,
                "totally_chaotic": is_totally_chaotic(total, config.epsilon),
            }
        write_json(output_path(config.output_dir, config.out, ".json"), record, "ecd-result-schema.json")

    unit = "nats" if config.log_base == "e" else "bits"
    value_key = "D_nats" if config.log_base == "e" else "D_bits"
    for row in rows:
        print(f"{row['map']} L={row['L']} D={row[value_key]:.6g} {unit} ({row['classification']})")
    if total is not None:
        print(f"infimum over family: {total.value:.6g} nats at {total.observation.describe()}")
        return total
    return results[0]


# sweep

def sweep_row(config: RunConfig, value: float) -> Dict[str, Any]:
    """Chaos degree and top Lyapunov exponent at one parameter value; failures become NaN"""
    row: Dict[str, Any] = {
        "param": value, "D": math.nan, "lambda": math.nan, "n": config.length,
        "converged": False, "classification": "", "warning": "", "D_nats": math.nan,
    }
    warnings = []
    try:
        system = build_system(config, value)
        x0 = config.x0_tuple() or system.default_x0
        orbit = iterate_map(system, x0, config.skip, config.length, check_domain=not config.auto_box)
    except ChaosDegreeException as e:
        row["warning"] = f"{e.error_code}: {e.message}"
        logger.warning("Sweep row failed", extra={"param": value, "error": e.error_code})
        return row

    try:
        result = ecd_of_orbit(orbit, build_observation(config), system.box)
        row["D_nats"] = result.value
        row["D"] = to_base(result.value, config.log_base)
        row["classification"] = result.classify(config.epsilon).value
    except ChaosDegreeException as e:
        warnings.append(f"{e.error_code}: {e.message}")

    try:
        if system.dimension == 1:
            lyap = lyapunov_from_orbit(system, orbit)
        else:
            lyap = lyapunov_md(system, x0, config.skip, config.length, config.reorthonormalize_every)
        row["lambda"] = lyap.top_exponent
        row["converged"] = lyap.converged
    except ChaosDegreeException as e:
        warnings.append(f"{e.error_code}: {e.message}")

    if warnings:
        row["warning"] = "; ".join(warnings)
        logger.warning("Sweep row incomplete", extra={"param": value, "warnings": warnings})
    return row


def cmd_sweep(config: RunConfig) -> List[Dict[str, Any]]:
    """Chaos degree and Lyapunov exponent over a parameter grid"""
    values = _grid_values(config)
    logger.info(
        "Starting sweep",
        extra={"map": config.map_name, "param": config.grid.name, "points": len(values)}
    )
    rows = map_rows(sweep_row, config, values)
    path = write_rows(output_path(config.output_dir, config.out, ".csv"), rows, SWEEP_COLUMNS)

    failed = sum(1 for r in rows if r["warning"])
    if failed:
        logger.warning("Sweep rows with warnings", extra={"count": failed, "total": len(rows)})
    stats = _agreement(rows, config.epsilon)

    if config.svg:
        params = [r["param"] for r in rows]
        unit = "nats" if config.log_base == "e" else "bits"
        plot_curve(
            output_path(config.output_dir, config.out, "_ecd.svg"), params, [r["D"] for r in rows],
            config.grid.name, f"D ({unit})", f"Chaos degree: {config.map_name}",
        )
        plot_curve(
            output_path(config.output_dir, config.out, "_lyapunov.svg"), params,
            [r["lambda"] for r in rows],
            config.grid.name, "lambda", f"Lyapunov exponent: {config.map_name}",
        )

    print(f"{len(rows)} rows written to {path}")
    if stats is not None:
        print(f"sign agreement {stats.agreeing}/{stats.total} ({stats.fraction:.3f})")
    return rows


def _agreement(rows: List[Dict[str, Any]], epsilon: float) -> Optional[AgreementStats]:
    try:
        return ecd_lyapunov_agreement([(r["param"], r["D_nats"], r["lambda"]) for r in rows], epsilon)
    except EmptyGridError as e:
        logger.warning("No agreement statistics", extra={"reason": e.message})
        return None


# bifurcation

def bifurcation_points(config: RunConfig, value: float) -> List[float]:
    """Last k post-transient points at one parameter value; empty on failure"""
    try:
        system = build_system(config, value)
        x0 = config.x0_tuple() or system.default_x0
        orbit = iterate_map(system, x0, config.skip, max(config.keep, 2))
    except ChaosDegreeException as e:
        logger.warning("Bifurcation row failed", extra={"param": value, "error": e.error_code})
        return []
    return orbit.points[-config.keep:, 0].tolist()


def cmd_bifurcation(config: RunConfig) -> List[Dict[str, float]]:
    """Bifurcation data for a one-dimensional map"""
    if build_system(config).dimension != 1:
        raise UsageError(f"Bifurcation diagrams need a one-dimensional map, not '{config.map_name}'")
    values = _grid_values(config)
    points = map_rows(bifurcation_points, config, values)
    rows = []
    for value, xs in zip(values, points):
        if not xs:
            rows.append({"param": float(value), "x": math.nan})
        rows.extend({"param": float(value), "x": x} for x in xs)
    path = write_rows(output_path(config.output_dir, config.out, ".csv"), rows, BIFURCATION_COLUMNS)
    if config.svg:
        plot_bifurcation(
            output_path(config.output_dir, config.out, ".svg"),
            [r["param"] for r in rows], [r["x"] for r in rows], config.grid.name, config.map_name,
        )
    print(f"{len(rows)} points written to {path}")
    return rows


# circle-decay

def cmd_circle_decay(config: RunConfig) -> DecayTable:
    """Chaos degree of the rotation map at its convergent partitions"""
    v = config.params.get("v", MAP_CATALOG["circle"].defaults["v"])
    table = convergent_decay(
        v,
        count=config.count,
        length=config.length,
        skip=config.skip,
        min_denominator=config.min_denominator,
        theta0=config.theta0,
        max_workers=config.workers,
    )
    if table.truncated:
        logger.warning(
            "Decay table truncated at the floating-point resolution of v",
            extra={"v": v, "rows": len(table.rows), "requested": config.count}
        )
    rows = [row.model_dump() for row in table.rows]
    path = write_rows(output_path(config.output_dir, config.out, ".csv"), rows, DECAY_COLUMNS)
    if config.svg:
        plot_decay(
            output_path(config.output_dir, config.out, ".svg"),
            [r.c_j for r in table.rows], [r.D_emp for r in table.rows],
            [r.D_theo for r in table.rows], [r.bound for r in table.rows], v,
        )
    print(f"{len(rows)} convergents written to {path}; minimum D = {table.minimum:.6g} nats")
    return table


# lyapunov

def lyapunov_at(config: RunConfig, value: Optional[float] = None) -> LyapunovResult:
    system = build_system(config, value)
    x0 = config.x0_tuple() or system.default_x0
    if system.dimension == 1 and not config.spectrum:
        orbit = iterate_map(system, x0, config.skip, config.length)
        return lyapunov_from_orbit(system, orbit)
    return lyapunov_md(system, x0, config.skip, config.length, config.reorthonormalize_every)


def lyapunov_row(config: RunConfig, value: float) -> Optional[LyapunovResult]:
    try:
        return lyapunov_at(config, value)
    except ChaosDegreeException as e:
        logger.warning("Lyapunov row failed", extra={"param": value, "error": e.error_code})
        return None


def cmd_lyapunov(config: RunConfig) -> List[Optional[LyapunovResult]]:
    """Top Lyapunov exponent, and the spectrum with --spectrum, at one or many parameter values"""
    dimension = build_system(config).dimension
    if config.grid is None:
        values = np.array([math.nan])
        results: List[Optional[LyapunovResult]] = [lyapunov_at(config)]
    else:
        values = _grid_values(config)
        results = map_rows(lyapunov_row, config, values)
    if all(r is None for r in results):
        raise ChaosDegreeException("Every Lyapunov evaluation failed", "lyapunov_failed")

    columns = list(LYAPUNOV_COLUMNS)
    if config.spectrum:
        columns += [f"lambda_{k + 1}" for k in range(dimension)]
    rows = []
    for value, result in zip(values, results):
        row: Dict[str, Any] = {
            "param": None if math.isnan(value) else float(value),
            "lambda_top": math.nan if result is None else result.top_exponent,
            "n": config.length if result is None else result.n_used,
            "converged": False if result is None else result.converged,
        }
        if config.spectrum:
            spectrum = result.spectrum if result is not None and result.spectrum else ()
            for k in range(dimension):
                row[f"lambda_{k + 1}"] = spectrum[k] if k < len(spectrum) else math.nan
        rows.append(row)
    path = write_rows(output_path(config.output_dir, config.out, ".csv"), rows, columns)

    if config.format.value == "json":
        record = {
            "config": config.to_record(),
            "results": [
                {
                    "param": row["param"],
                    "lambda_top": row["lambda_top"],
                    "n": row["n"],
                    "converged": row["converged"],
                    "spectrum": list(result.spectrum) if result is not None and result.spectrum else None,
                    "convergence_history": (
                        [list(point) for point in result.convergence_history] if result is not None else []
                    ),
                }
                for row, result in zip(rows, results)
            ],
        }
        write_json(output_path(config.output_dir, config.out, ".json"), record, "lyapunov-result-schema.json")

    for row in rows:
        label = "" if row["param"] is None else f"{config.grid.name}={row['param']:.6g} "
        print(f"{label}lambda={row['lambda_top']:.6g} converged={row['converged']}")
    print(f"written to {path}")
    return results


# quantum-ecd

def build_state(config: RunConfig) -> DensityMatrix:
    if config.state_file:
        return read_state(config.state_file)
    preset = config.state_preset or "zero"
    if preset == "zero":
        vector = np.zeros(config.dim, dtype=complex)
        vector[0] = 1.0
        return DensityMatrix.pure(vector)
    if preset == "mixed":
        return DensityMatrix.maximally_mixed(config.dim)
    if preset == "random":
        return random_state(config.dim, np.random.default_rng(config.seed))
    raise UsageError(f"Unknown state preset '{preset}'; choose from {', '.join(STATE_PRESETS)}")


def build_channel(config: RunConfig, dim: int) -> QuantumChannel:
    if config.kraus_file:
        return read_channel(config.kraus_file)
    preset = config.channel_preset or "identity"
    if preset == "identity":
        return identity_channel(dim)
    if preset == "depolarizing":
        return depolarizing_channel(config.strength, dim)
    if preset == "fully-depolarizing":
        return fully_depolarizing_channel(dim)
    if preset == "random-unitary":
        return unitary_channel(random_unitary(dim, np.random.default_rng(config.seed)))
    raise UsageError(f"Unknown channel preset '{preset}'; choose from {', '.join(CHANNEL_PRESETS)}")


def cmd_quantum_ecd(config: RunConfig) -> QuantumEcdResult:
    """Quantum chaos degree of a state under a channel"""
    rho = build_state(config)
    channel = build_channel(config, rho.dim)
    result = quantum_ecd(rho, channel, config.trials, config.seed)
    path = write_rows(
        output_path(config.output_dir, config.out, ".csv"), [result.to_record()], QUANTUM_COLUMNS
    )
    print(f"D={result.value:.10g} nats (canonical {result.canonical:.10g}); written to {path}")
    return result


# ingest

def format_box(lower, upper) -> str:
    return ";".join(f"{lo:.17g}:{hi:.17g}" for lo, hi in zip(lower, upper))


def cmd_ingest(config: RunConfig) -> Orbit:
    """Read an external orbit, report its size and auto-box, optionally re-export it"""
    if not config.orbit_file:
        raise UsageError("ingest needs --orbit-file")
    orbit = ingest_orbit(config.orbit_file, expected_dimension=config.expect_dim)
    lower, upper = bounding_box(orbit.points)
    row = {"length": orbit.length, "dimension": orbit.dimension, "box": format_box(lower, upper)}
    path = write_rows(output_path(config.output_dir, config.out, ".csv"), [row], INGEST_COLUMNS)
    if config.export:
        orbit.to_csv(Path(config.export))
    print(f"length={orbit.length} dimension={orbit.dimension} box={row['box']}; written to {path}")
    return orbit


COMMANDS: Dict[str, Callable[[RunConfig], Any]] = {
    "ecd": cmd_ecd,
    "sweep": cmd_sweep,
    "bifurcation": cmd_bifurcation,
    "circle-decay": cmd_circle_decay,
    "lyapunov": cmd_lyapunov,
    "quantum-ecd": cmd_quantum_ecd,
    "ingest": cmd_ingest,
}


def run_command(config: RunConfig) -> Any:
    logger.info("Running command", extra={"command": config.subcommand.value})
    result = COMMANDS[config.subcommand.value](config)
    logger.info("Command finished", extra={"command": config.subcommand.value})
    return result
