"""
Result files: CSV tables, schema-checked JSON records and orbit ingestion
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import jsonschema
import numpy as np
import pandas as pd

from src.dynamics.orbit import Orbit
from src.utils.exceptions import ChaosDegreeException, DimensionMismatchError, ParseError

logger = logging.getLogger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parents[2] / "schemas"
FLOAT_FORMAT = "%.17g"
RUN_CONFIG_SCHEMA = "run-config-schema.json"

_PANDAS_LINE = re.compile(r"line (\d+)")


def output_path(output_dir: Union[str, Path], out: str, suffix: str) -> Path:
    """<output_dir>/<out><suffix>, with any .csv/.json extension on out dropped"""
    stem = out[:-len(Path(out).suffix)] if Path(out).suffix in (".csv", ".json") else out
    path = Path(output_dir) / f"{stem}{suffix}"
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_rows(path: Path, rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> Path:
    """Write rows in a fixed column order with 17 significant digits"""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote table", extra={"path": str(path), "rows": len(frame)})
    return path


def load_schema(schema_name: str) -> Dict[str, Any]:
    with open(SCHEMA_DIR / schema_name, "r") as f:
        return json.load(f)


def validate_record(record: Dict[str, Any], schema_name: str) -> List[str]:
    """
    Validate a record against a JSON schema in schemas/

    Returns:
        List of "path: message" errors, empty when valid
    """
    validator = jsonschema.Draft7Validator(load_schema(schema_name))
    errors = []
    for error in validator.iter_errors(record):
        path = " -> ".join(str(p) for p in error.path) if error.path else "root"
        errors.append(f"{path}: {error.message}")
    return errors


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_json(path: Path, record: Dict[str, Any], schema_name: str) -> Path:
    """Validate and write a JSON record; non-finite floats become null"""
    record = _jsonable(record)
    errors = validate_record(record, schema_name)
    if "config" in record:
        errors += [f"config -> {e}" for e in validate_record(record["config"], RUN_CONFIG_SCHEMA)]
    if errors:
        raise ChaosDegreeException(
            f"Result record does not match {schema_name}: {errors[0]}",
            "schema_error",
            {"errors": errors}
        )
    path.write_text(json.dumps(record, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    logger.info("Wrote record", extra={"path": str(path), "schema": schema_name})
    return path


def read_orbit_csv(
    path: Union[str, Path],
    expected_dimension: Optional[int] = None
) -> Orbit:
    """
    Read an orbit CSV: a header line, then one point per row with the step index first

    Line numbers in ParseError count the header as line 1.

    Args:
        path: CSV file
        expected_dimension: Required number of coordinate columns

    Returns:
        Orbit with skip=0
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip", skip_blank_lines=False)
    except FileNotFoundError:
        raise ParseError(0, "file not found", str(path))
    except pd.errors.EmptyDataError:
        raise ParseError(1, "empty file", str(path))
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        raise ParseError(int(match.group(1)) if match else 0, "malformed row", str(path))

    if frame.shape[1] < 2:
        raise ParseError(1, "expected an index column and at least one coordinate", str(path))
    coordinates = frame.iloc[:, 1:].apply(pd.to_numeric, errors="coerce")
    bad = coordinates.isna().any(axis=1).to_numpy()
    if bad.any():
        raise ParseError(int(np.argmax(bad)) + 2, "missing or non-numeric value", str(path))
    if len(coordinates) < 2:
        raise ParseError(len(coordinates) + 1, "an orbit needs at least two rows", str(path))

    dimension = coordinates.shape[1]
    if expected_dimension is not None and dimension != expected_dimension:
        raise DimensionMismatchError(expected_dimension, dimension, "orbit columns")
    logger.info(
        "Ingested orbit",
        extra={"path": str(path), "length": len(coordinates), "dimension": dimension}
    )
    return Orbit(
        points=coordinates.to_numpy(dtype=float),
        skip=0,
        system_name=path.stem,
    )


def ingest_orbit(
    path: Union[str, Path],
    format: str = "csv",
    expected_dimension: Optional[int] = None
) -> Orbit:
    """Read an externally observed orbit"""
    if format != "csv":
        raise ParseError(0, f"unsupported orbit format '{format}'", str(path))
    return read_orbit_csv(path, expected_dimension)
