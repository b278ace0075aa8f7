"""Lab configuration using dataclasses with validation."""

import os
from dataclasses import dataclass, field
from typing import Final

from .constants import QuadratureDefaults

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(slots=True, frozen=True)
class LabConfig:
    """Process-wide numerical and logging settings."""

    log_level: str = field(
        default_factory=lambda: os.getenv("ENTROPY_LAB_LOG_LEVEL", "INFO").upper()
    )
    log_file: str = field(
        default_factory=lambda: os.getenv("ENTROPY_LAB_LOG_FILE", "")
    )
    workers: int = field(
        default_factory=lambda: int(os.getenv("ENTROPY_LAB_WORKERS", "1"))
    )
    quad_epsrel: float = field(
        default_factory=lambda: float(
            os.getenv("ENTROPY_LAB_QUAD_EPSREL", str(QuadratureDefaults.EPSREL))
        )
    )
    quad_limit: int = field(
        default_factory=lambda: int(
            os.getenv("ENTROPY_LAB_QUAD_LIMIT", str(QuadratureDefaults.LIMIT))
        )
    )

    def __post_init__(self) -> None:
        """Validate configuration values."""
        if self.log_level not in _LOG_LEVELS:
            raise ValueError(
                f"log_level must be one of {', '.join(_LOG_LEVELS)}, got {self.log_level}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if not 0.0 < self.quad_epsrel <= 1e-6:
            raise ValueError(
                f"quad_epsrel must lie in (0, 1e-6], got {self.quad_epsrel}"
            )
        if self.quad_limit < 50:
            raise ValueError(f"quad_limit must be at least 50, got {self.quad_limit}")


# Singleton instance
LAB_CONFIG: Final[LabConfig] = LabConfig()
