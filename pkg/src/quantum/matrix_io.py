"""
Plain-text complex matrix files.

Format: blank lines and lines starting with ``#`` are ignored. Each matrix is a
header line holding its dimension d, followed by d rows of d whitespace-separated
``re,im`` tokens. A state file holds one matrix; a Kraus file holds one or more.
Values are written with 17 significant digits so files round-trip exactly.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.quantum.states import MAX_DIMENSION, DensityMatrix, QuantumChannel
from src.utils.exceptions import DimensionMismatchError, ParseError

logger = logging.getLogger(__name__)


def _content_lines(path: Path) -> List[Tuple[int, str]]:
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.strip()
            if text and not text.startswith("#"):
                lines.append((number, text))
    return lines


def _parse_token(token: str, number: int, path: str) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise ParseError(number, f"expected 're,im', got '{token}'", path)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ParseError(number, f"non-numeric entry '{token}'", path)


def read_matrices(path: Union[str, Path]) -> List[np.ndarray]:
    """Read every matrix in a file"""
    path = Path(path)
    lines = _content_lines(path)
    matrices: List[np.ndarray] = []
    position = 0
    while position < len(lines):
        number, header = lines[position]
        try:
            dim = int(header)
        except ValueError:
            raise ParseError(number, f"expected a dimension header, got '{header}'", str(path))
        if not 1 <= dim <= MAX_DIMENSION:
            raise ParseError(number, f"dimension {dim} outside 1..{MAX_DIMENSION}", str(path))
        rows = lines[position + 1:position + 1 + dim]
        if len(rows) < dim:
            last = rows[-1][0] if rows else number
            raise ParseError(last, f"expected {dim} rows, found {len(rows)}", str(path))
        matrix = np.empty((dim, dim), dtype=complex)
        for i, (row_number, text) in enumerate(rows):
            tokens = text.split()
            if len(tokens) != dim:
                raise ParseError(row_number, f"expected {dim} entries, found {len(tokens)}", str(path))
            matrix[i] = [_parse_token(t, row_number, str(path)) for t in tokens]
        matrices.append(matrix)
        position += 1 + dim
    if not matrices:
        raise ParseError(1, "no matrix found", str(path))
    logger.debug("Read matrices", extra={"path": str(path), "count": len(matrices)})
    return matrices


def write_matrices(path: Union[str, Path], matrices: Sequence[np.ndarray]) -> Path:
    """Write matrices in the plain-text format"""
    path = Path(path)
    lines = []
    for matrix in matrices:
        matrix = np.asarray(matrix, dtype=complex)
        lines.append(str(matrix.shape[0]))
        for row in matrix:
            lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_state(path: Union[str, Path]) -> DensityMatrix:
    matrices = read_matrices(path)
    if len(matrices) != 1:
        raise DimensionMismatchError(1, len(matrices), "matrices in a state file")
    return DensityMatrix(matrix=matrices[0])


def read_channel(path: Union[str, Path]) -> QuantumChannel:
    return QuantumChannel(kraus=read_matrices(path))
