# models/run_config.py - VALIDATED RUN CONFIGURATION

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from config.settings import settings
from config.wave_problems import ProblemName
from utils.exceptions import ConfigError

# Test cases selectable from the command line
CaseName = ProblemName


class StudyKind(str, Enum):
    SINGLE = "single"
    H_STUDY = "h-study"
    TAU_STUDY = "tau-study"

    @classmethod
    def _missing_(cls, value):
        shorthand = {"h": cls.H_STUDY, "tau": cls.TAU_STUDY}
        return shorthand.get(str(value).strip().lower())


class RunConfig(BaseModel):
    """One invocation: a single run or a convergence study"""

    case: CaseName = Field(default=CaseName.SMOOTH, description="Test problem")
    study: StudyKind = Field(default=StudyKind.SINGLE)
    levels: List[int] = Field(default_factory=lambda: [4], description="Cells per unit length n (h = 1/n)")
    tau: Optional[float] = Field(default=None, gt=0.0, description="Time step")
    steps: Optional[int] = Field(default=None, ge=1, description="Number of time steps N")
    final_time: float = Field(default=settings.DEFAULT_FINAL_TIME, gt=0.0, description="T")
    taus: List[float] = Field(default_factory=list, description="Time steps of a tau-study")
    output_dir: Path = Field(default=settings.OUTPUTS_DIR)
    export_fields: bool = True
    export_energy: bool = False
    export_matrices: bool = False
    workers: int = Field(default=1, ge=1)
    allow_deep_levels: bool = False

    @model_validator(mode="after")
    def _check_invariants(self):
        clock = settings.CLOCK_TOL
        if self.tau is None and self.steps is None:
            self.tau = settings.DEFAULT_TAU
        if self.tau is None:
            self.tau = self.final_time / self.steps
        if self.steps is None:
            self.steps = max(1, int(round(self.final_time / self.tau)))
        if abs(self.tau * self.steps - self.final_time) > clock:
            raise ConfigError("tau", f"tau * N = {self.tau * self.steps!r} does not equal T = {self.final_time!r}")

        if not self.levels:
            raise ConfigError("levels", "at least one mesh level is required")
        if any(n < 1 for n in self.levels):
            raise ConfigError("levels", f"levels must be positive, got {self.levels}")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ConfigError("levels", f"levels must be strictly increasing, got {self.levels}")
        if not self.allow_deep_levels and max(self.levels) > settings.DESK_MAX_LEVEL:
            raise ConfigError(
                "levels", f"n > {settings.DESK_MAX_LEVEL} needs allow_deep_levels = true (got {max(self.levels)})"
            )

        if self.study is StudyKind.TAU_STUDY:
            if len(self.levels) != 1:
                raise ConfigError("levels", "a tau-study runs on exactly one mesh level")
            if not self.taus:
                raise ConfigError("taus", "a tau-study needs at least one time step")
            if any(tau <= 0.0 for tau in self.taus) or any(b >= a for a, b in zip(self.taus, self.taus[1:])):
                raise ConfigError("taus", f"time steps must be positive and strictly decreasing, got {self.taus}")
            for tau in self.taus:
                n_steps = round(self.final_time / tau)
                if n_steps < 1 or abs(n_steps * tau - self.final_time) > clock:
                    raise ConfigError("taus", f"T = {self.final_time} is not a multiple of tau = {tau}")
        elif self.study is StudyKind.SINGLE and len(self.levels) != 1:
            raise ConfigError("levels", "a single run uses exactly one mesh level")
        return self

    @property
    def level(self) -> int:
        return self.levels[0]
