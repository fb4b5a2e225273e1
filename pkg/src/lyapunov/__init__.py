"""
Lyapunov exponents for cross-validation of the chaos degree
"""

from src.lyapunov.exponents import (
    AgreementPoint,
    AgreementStats,
    LyapunovResult,
    ecd_lyapunov_agreement,
    lyapunov_1d,
    lyapunov_direct,
    lyapunov_from_orbit,
    lyapunov_md,
)

__all__ = [
    "AgreementPoint",
    "AgreementStats",
    "LyapunovResult",
    "ecd_lyapunov_agreement",
    "lyapunov_1d",
    "lyapunov_direct",
    "lyapunov_from_orbit",
    "lyapunov_md",
]
