"""
Custom exceptions for the Entropic Chaos Degree toolkit
"""

from typing import Optional, Dict, Any, Sequence


class ChaosDegreeException(Exception):
    """Base exception for all toolkit errors"""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.error_code = error_code or "error"
        self.details = details or {}
        super().__init__(self.message)


class UsageError(ChaosDegreeException):
    """Raised when a command or operation is called with unusable arguments"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "usage", details)


class EmptyGridError(UsageError):
    """Raised when a sweep or agreement check receives no grid points"""
    pass


# Dynamics

class MapError(ChaosDegreeException):
    """Raised when a map cannot be built or iterated"""
    pass


class UnknownMapError(MapError):
    """Raised when a map name is not in the catalog"""

    def __init__(self, name: str):
        super().__init__(f"Unknown map '{name}'", "unknown_map", {"name": name})


class ParamOutOfRangeError(MapError):
    """Raised when a map parameter lies outside its documented range"""

    def __init__(self, name: str, value: float, valid: str):
        super().__init__(
            f"Parameter {name}={value} outside valid range {valid}",
            "param_out_of_range",
            {"param": name, "value": value, "valid": valid}
        )


class DomainEscapeError(MapError):
    """Raised when an iterate leaves the map's domain box"""

    def __init__(self, step: int, point: Sequence[float], member: Optional[int] = None):
        self.step = step
        self.point = [float(v) for v in point]
        self.member = member
        where = f" (ensemble member {member})" if member is not None else ""
        super().__init__(
            f"Orbit left the domain at step {step}: {self.point}{where}",
            "domain_escape",
            {"step": step, "point": self.point, "member": member}
        )


# Partitions and empirical models

class PartitionError(ChaosDegreeException):
    """Raised for invalid partitions or symbolization failures"""
    pass


class EmptyAxisError(PartitionError):
    """Raised when an axis is given zero cells"""

    def __init__(self, axis: int):
        super().__init__(f"Axis {axis} has no cells", "empty_axis", {"axis": axis})


class OutOfBoxError(PartitionError):
    """Raised when a point lies outside the partitioned box"""

    def __init__(self, index: int, point: Sequence[float]):
        self.index = index
        super().__init__(
            f"Point {index} lies outside the partition box: {[float(v) for v in point]}",
            "out_of_box",
            {"index": index}
        )


class IncompatiblePartitionError(PartitionError):
    """Raised when an observation's partition does not fit the observed data"""

    def __init__(self, message: str):
        super().__init__(message, "incompatible_partition")


class ModelError(ChaosDegreeException):
    """Raised for malformed distributions, joints or channels"""
    pass


class InvalidDistributionError(ModelError):
    """Raised when a vector is not a probability distribution"""

    def __init__(self, message: str):
        super().__init__(message, "invalid_distribution")


class InconsistentModelError(ModelError):
    """Raised when joint row sums disagree with the marginal"""

    def __init__(self, deviation: float):
        super().__init__(
            f"Joint row sums deviate from the marginal by {deviation:.3e}",
            "inconsistent_model",
            {"deviation": deviation}
        )


class MarginalMismatchError(ModelError):
    """Raised when a joint's marginals differ from the supplied marginals"""

    def __init__(self, deviation: float):
        super().__init__(
            f"Joint marginals deviate from the supplied marginals by {deviation:.3e}",
            "marginal_mismatch",
            {"deviation": deviation}
        )


# Circle map

class PrecisionExhaustedError(ChaosDegreeException):
    """Raised when further convergents exceed floating-point resolution"""

    def __init__(self, message: str, partial: Any = None):
        self.partial = partial
        super().__init__(message, "precision_exhausted")


# Quantum and I/O

class DimensionMismatchError(ChaosDegreeException):
    """Raised when operands have incompatible dimensions"""

    def __init__(self, expected: Any, actual: Any, what: str = "operand"):
        super().__init__(
            f"Dimension mismatch for {what}: expected {expected}, got {actual}",
            "dimension_mismatch",
            {"expected": expected, "actual": actual}
        )


class QuantumError(ChaosDegreeException):
    """Raised for invalid quantum states or channels"""
    pass


class InvalidStateError(QuantumError):
    """Raised when a matrix is not a density matrix"""

    def __init__(self, message: str):
        super().__init__(message, "invalid_state")


class InvalidChannelError(QuantumError):
    """Raised when Kraus operators do not form a CPTP map"""

    def __init__(self, message: str):
        super().__init__(message, "invalid_channel")


class ParseError(ChaosDegreeException):
    """Raised when an input file cannot be parsed"""

    def __init__(self, line: int, message: str, path: Optional[str] = None):
        self.line = line
        super().__init__(
            f"{path or 'input'}:{line}: {message}",
            "parse_error",
            {"line": line, "path": path}
        )
