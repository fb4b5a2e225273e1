"""
Command-line surface: run configuration, subcommands and result files
"""

from src.cli.commands import (
    COMMANDS,
    cmd_bifurcation,
    cmd_circle_decay,
    cmd_ecd,
    cmd_ingest,
    cmd_lyapunov,
    cmd_quantum_ecd,
    cmd_sweep,
    run_command,
)
from src.cli.models import OutputFormat, ParameterGrid, RunConfig, Subcommand
from src.cli.output import ingest_orbit, read_orbit_csv, validate_record, write_json, write_rows

__all__ = [
    "COMMANDS",
    "cmd_bifurcation",
    "cmd_circle_decay",
    "cmd_ecd",
    "cmd_ingest",
    "cmd_lyapunov",
    "cmd_quantum_ecd",
    "cmd_sweep",
    "run_command",
    "OutputFormat",
    "ParameterGrid",
    "RunConfig",
    "Subcommand",
    "ingest_orbit",
    "read_orbit_csv",
    "validate_record",
    "write_json",
    "write_rows",
]
