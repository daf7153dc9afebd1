"""
Toolkit settings

Defaults live on ``ToolkitSettings``; ``load_settings`` layers ``.env`` and
``CORANK_*`` environment variables on top.
"""

import os
from fractions import Fraction
from typing import Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator


def default_gamma_schedule(length: int = 20) -> List[Fraction]:
    """gamma_k = 1 - 2^-k for k = 1..length"""
    return [1 - Fraction(1, 2 ** k) for k in range(1, length + 1)]


class ToolkitSettings(BaseModel):
    """Effective configuration for one toolkit run"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    default_horizon: int = Field(default=64, ge=1)
    default_gamma_schedule: List[Fraction] = Field(default_factory=default_gamma_schedule)
    conversion_precision_bits: int = Field(default=128, ge=53)
    conversion_tolerance: float = Field(default=1e-9, gt=0)
    max_iterations: int = Field(default=10_000, ge=1)
    seed: Optional[int] = None
    log_file: Optional[str] = None
    sweep_workers: int = Field(default=1, ge=1)

    @field_validator("default_gamma_schedule")
    @classmethod
    def _gammas_in_unit_interval(cls, value: List[Fraction]) -> List[Fraction]:
        if not value:
            raise ValueError("gamma schedule must be nonempty")
        for gamma in value:
            if not 0 <= gamma < 1:
                raise ValueError(f"gamma {gamma} outside [0, 1)")
        return value

    def header(self) -> Dict[str, str]:
        """Defaults echoed in every report header"""
        schedule = self.default_gamma_schedule
        return {
            "default_horizon": str(self.default_horizon),
            "default_gamma_schedule": f"1-2^-k, k=1..{len(schedule)}",
            "conversion_precision_bits": str(self.conversion_precision_bits),
            "seed": "none" if self.seed is None else str(self.seed),
        }


def load_settings(env_file: Optional[str] = None) -> ToolkitSettings:
    """Build settings from the environment (after loading an optional .env)"""
    load_dotenv(env_file)
    overrides = {}
    if os.getenv("CORANK_SEED"):
        overrides["seed"] = int(os.environ["CORANK_SEED"])
    if os.getenv("CORANK_HORIZON"):
        overrides["default_horizon"] = int(os.environ["CORANK_HORIZON"])
    if os.getenv("CORANK_LOG_FILE"):
        overrides["log_file"] = os.environ["CORANK_LOG_FILE"]
    if os.getenv("CORANK_SWEEP_WORKERS"):
        overrides["sweep_workers"] = int(os.environ["CORANK_SWEEP_WORKERS"])
    return ToolkitSettings(**overrides)
