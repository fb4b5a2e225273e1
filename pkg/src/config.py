"""
Toolkit Configuration
"""

from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from ECD_* environment variables or a key=value file"""

    model_config = SettingsConfigDict(
        env_prefix="ECD_",
        env_file=None,
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    APP_NAME: str = "Entropic Chaos Degree Toolkit"
    VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True
    LOG_FILE: str = ""

    # Orbit defaults
    DEFAULT_SKIP: int = Field(default=1000, ge=0)
    DEFAULT_LENGTH: int = Field(default=100000, ge=2)
    DEFAULT_SEED: int = 0
    AUTO_BOX_MARGIN: float = Field(default=1e-9, gt=0)

    # Chaos degree
    DEFAULT_EPSILON: float = Field(default=1e-6, ge=0)
    LOG_BASE: Literal["e", "2"] = "e"

    # Lyapunov exponents
    REORTHONORMALIZE_EVERY: int = Field(default=1, ge=1)
    CONVERGENCE_TOL: float = Field(default=1e-3, gt=0)
    FD_STEP: float = Field(default=1e-6, gt=0)

    # Quantum
    QUANTUM_SEARCH_TRIALS: int = Field(default=64, ge=0)
    DEGENERACY_TOL: float = Field(default=1e-10, gt=0)

    # Execution
    MAX_WORKERS: int = Field(default=4, ge=1)
    OUTPUT_DIR: str = "."


def load_settings(config_file: Optional[Union[str, Path]] = None) -> Settings:
    """
    Build settings, optionally layering a key=value config file under the environment

    Args:
        config_file: Path to a dotenv-style file with ECD_* keys

    Returns:
        Settings instance
    """
    if config_file is None:
        return Settings()
    return Settings(_env_file=str(config_file))


# Create global settings instance
settings = Settings()


def apply_settings(loaded: Settings) -> Settings:
    """Copy loaded values into the global instance that modules imported"""
    for name in Settings.model_fields:
        setattr(settings, name, getattr(loaded, name))
    return settings
