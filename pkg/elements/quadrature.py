# elements/quadrature.py - SYMMETRIC TRIANGLE AND EDGE QUADRATURE

from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from utils.exceptions import QuadratureError

MAX_DEGREE = 6


class QuadratureRule(BaseModel):
    """Quadrature on the reference triangle (0,0), (1,0), (0,1); weights sum to its area 1/2"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(description="Reference coordinates, shape (n_points, 2)")
    weights: np.ndarray = Field(description="Weights, shape (n_points,)")
    degree: int = Field(ge=1, le=MAX_DEGREE, description="Polynomial exactness degree")

    @property
    def n_points(self) -> int:
        return int(self.weights.shape[0])


def _orbit_s3(a: float) -> np.ndarray:
    """Barycentric points (a, a, 1-2a) and their rotations"""
    b = 1.0 - 2.0 * a
    return np.array([[a, a, b], [a, b, a], [b, a, a]])


def _orbit_s21(a: float, b: float) -> np.ndarray:
    """All six permutations of (a, b, 1-a-b)"""
    c = 1.0 - a - b
    return np.array([[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]])


@lru_cache(maxsize=None)
def _barycentric_rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Dunavant-type rules; weights normalised to sum to one"""
    if degree == 1:
        return np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0])
    if degree == 2:
        return _orbit_s3(1 / 6), np.full(3, 1 / 3)
    if degree in (3, 4):
        # Positive-weight degree-4 rule also serves degree 3.
        bary = np.vstack((_orbit_s3(0.445948490915965), _orbit_s3(0.091576213509771)))
        weights = np.concatenate((np.full(3, 0.223381589678011), np.full(3, 0.109951743655322)))
        return bary, weights
    if degree == 5:
        root = np.sqrt(15.0)
        bary = np.vstack(([[1 / 3, 1 / 3, 1 / 3]], _orbit_s3((6 + root) / 21), _orbit_s3((6 - root) / 21)))
        weights = np.concatenate(([0.225], np.full(3, (155 + root) / 1200), np.full(3, (155 - root) / 1200)))
        return bary, weights
    if degree == 6:
        bary = np.vstack(
            (
                _orbit_s3(0.249286745170910),
                _orbit_s3(0.063089014491502),
                _orbit_s21(0.053145049844817, 0.310352451033784),
            )
        )
        weights = np.concatenate(
            (np.full(3, 0.116786275726379), np.full(3, 0.050844906370207), np.full(6, 0.082851075618374))
        )
        return bary, weights
    raise QuadratureError(f"Triangle quadrature of degree {degree} not supported (1..{MAX_DEGREE})")


@lru_cache(maxsize=None)
def quadrature(degree: int) -> QuadratureRule:
    """Symmetric rule on the reference triangle exact for polynomials up to ``degree``"""
    if isinstance(degree, bool) or not isinstance(degree, (int, np.integer)) or not 1 <= degree <= MAX_DEGREE:
        raise QuadratureError(f"Triangle quadrature of degree {degree!r} not supported (1..{MAX_DEGREE})")
    bary, weights = _barycentric_rule(int(degree))
    points = np.ascontiguousarray(bary[:, 1:])
    weights = 0.5 * weights / weights.sum()
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=points, weights=weights, degree=int(degree))


@lru_cache(maxsize=None)
def edge_gauss(n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    if n_points < 1:
        raise QuadratureError(f"Edge rule needs at least one point, got {n_points}")
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
