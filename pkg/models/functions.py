# models/functions.py - ANALYTIC DATA AND SOLUTION FUNCTIONS

from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class Smoothness(str, Enum):
    SMOOTH = "smooth"
    PIECEWISE_AXIS_ALIGNED = "piecewise-smooth-aligned-with-axes"


class ScalarFunction(BaseModel):
    """Pure, vectorised evaluator (x, y, t) -> scalar"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    evaluator: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    smoothness: Smoothness = Field(default=Smoothness.SMOOTH)
    name: str = Field(default="", description="Label used in logs")

    def __call__(self, x, y, t: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = np.asarray(self.evaluator(x, np.asarray(y, dtype=float), float(t)), dtype=float)
        return np.array(np.broadcast_to(values, x.shape))

    def at_points(self, points: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Evaluate at points (..., 2)"""
        return self(points[..., 0], points[..., 1], t)

    @classmethod
    def constant(cls, value: float, name: Optional[str] = None) -> "ScalarFunction":
        return cls(evaluator=lambda x, y, t: value, name=name or f"{value:g}")

    @classmethod
    def zero(cls) -> "ScalarFunction":
        return cls.constant(0.0, name="0")


class VectorFunction(BaseModel):
    """Pure, vectorised evaluator (x, y, t) -> 2-vector (stacked along the last axis)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    evaluator: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    smoothness: Smoothness = Field(default=Smoothness.SMOOTH)
    name: str = Field(default="", description="Label used in logs")

    def __call__(self, x, y, t: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = np.asarray(self.evaluator(x, np.asarray(y, dtype=float), float(t)), dtype=float)
        return np.array(np.broadcast_to(values, x.shape + (2,)))

    def at_points(self, points: np.ndarray, t: float = 0.0) -> np.ndarray:
        return self(points[..., 0], points[..., 1], t)

    @classmethod
    def constant(cls, value: Sequence[float], name: Optional[str] = None) -> "VectorFunction":
        vector = np.asarray(value, dtype=float)
        return cls(evaluator=lambda x, y, t: vector, name=name or str(tuple(vector)))

    @classmethod
    def zero(cls) -> "VectorFunction":
        return cls.constant((0.0, 0.0), name="0")
