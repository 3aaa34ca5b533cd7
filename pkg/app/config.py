from __future__ import annotations

import os

from pydantic import BaseModel, ConfigDict, Field, model_validator

RUNS_DIR = os.getenv("RUNS_DIR", "./data/runs")
DEFAULT_WORKERS = int(os.getenv("DEFAULT_WORKERS", "1"))
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")


class TrackerConfig(BaseModel):
    """
    All tunables of the a-priori step control.

    Defaults follow the published experiments: beta1 = 0.005, beta2 = 0.5,
    a (5, 1) Pade type and a maximum step of 0.5.
    """

    model_config = ConfigDict(frozen=True)

    L: int = Field(5, ge=0)
    M: int = Field(1, ge=0)
    beta1: float = 0.005
    beta2: float = 0.5
    t_end_game: float = 1.0
    max_step: float = 0.5
    min_step: float = 1e-12
    corrector_tol: float = 1e-12
    corrector_max_iters: int = Field(4, ge=1)
    max_steps_per_path: int = Field(10000, ge=1)
    eta_floor: float = 1e-30

    # endpoint refinement / bookkeeping
    refine_max_iters: int = Field(6, ge=1)
    endpoint_residual_tol: float = 1e-9
    endpoint_condition_limit: float = 1e12
    max_halvings: int = Field(5, ge=0)
    duplicate_tol: float = 1e-6

    @model_validator(mode="after")
    def _check_ranges(self) -> "TrackerConfig":
        if not 0.0 < self.beta1 < 1.0:
            raise ValueError("beta1 must lie in (0, 1)")
        if not 0.0 < self.beta2 < 1.0:
            raise ValueError("beta2 must lie in (0, 1)")
        if not 0.0 < self.t_end_game <= 1.0:
            raise ValueError("t_end_game must lie in (0, 1]")
        if not 0.0 < self.min_step < self.max_step <= 1.0:
            raise ValueError("need 0 < min_step < max_step <= 1")
        if self.corrector_tol <= 0.0 or self.eta_floor <= 0.0:
            raise ValueError("tolerances must be positive")
        return self

    @property
    def series_order(self) -> int:
        return self.L + self.M + 2

    @property
    def defect_order(self) -> int:
        return self.L + self.M + 1
