"""
Runtime configuration.

Defaults can be overridden through environment variables (optionally
loaded from a ``.env`` file):

    SUPG_OUTPUT_DIR   directory for every artifact      (default: results)
    SUPG_WORKERS      parallel configurations per sweep (default: 1)
    SUPG_LOG_LEVEL    logging level name                (default: INFO)
    SUPG_REFERENCE_N  fine-grid divisions for Test 3    (default: 400)
    SUPG_CACHE_DIR    fine-grid reference cache         (default: <output>/.cache)
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

from dotenv import load_dotenv

from .errors import InvalidArgumentError

VERSION = "1.0.0"


@dataclass(frozen=True)
class OptimizerSettings:
    """Golden-section search settings for the τ optimization."""

    bracket: Tuple[float, float] = (1e-8, 1e2)
    tol: float = 1e-3
    budget: int = 200

    def __post_init__(self):
        lo, hi = self.bracket
        if not 0.0 < lo < hi:
            raise InvalidArgumentError(f"Invalid bracket {self.bracket}: need 0 < lo < hi")
        if not 1e-6 < self.tol < 1e-1:
            raise InvalidArgumentError(f"Tolerance {self.tol} outside (1e-6, 1e-1)")
        if self.budget < 5:
            raise InvalidArgumentError(f"Budget {self.budget} too small (need >= 5)")

    def as_dict(self) -> dict:
        return {"bracket": list(self.bracket), "tol": self.tol, "budget": self.budget}


@dataclass(frozen=True)
class Settings:
    output_dir: Path = Path("results")
    workers: int = 1
    log_level: str = "INFO"
    reference_n: int = 400
    cache_dir: Path = Path("results/.cache")
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        output_dir = Path(os.getenv("SUPG_OUTPUT_DIR", "results"))
        cache_dir = Path(os.getenv("SUPG_CACHE_DIR", str(output_dir / ".cache")))
        return cls(
            output_dir=output_dir,
            workers=_env_int("SUPG_WORKERS", 1),
            log_level=os.getenv("SUPG_LOG_LEVEL", "INFO").upper(),
            reference_n=_env_int("SUPG_REFERENCE_N", 400),
            cache_dir=cache_dir,
        )

    def as_dict(self) -> dict:
        return {
            "output_dir": str(self.output_dir),
            "workers": self.workers,
            "log_level": self.log_level,
            "reference_n": self.reference_n,
            "cache_dir": str(self.cache_dir),
            "optimizer": self.optimizer.as_dict(),
        }


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidArgumentError(f"{name} must be positive, got {value}")
    return value
