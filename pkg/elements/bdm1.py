# elements/bdm1.py - REFERENCE BDM1 BASIS

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from loguru import logger

from config.settings import settings
from elements.quadrature import edge_gauss

REFERENCE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

# Local edge i is opposite vertex i and is parameterised from its lower to its
# higher local vertex index.
REFERENCE_EDGE_ENDPOINTS = np.array([[1, 2], [0, 2], [0, 1]])
REFERENCE_EDGE_NORMALS = np.array([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]) / np.array([[np.sqrt(2.0)], [1.0], [1.0]])
REFERENCE_EDGE_LENGTHS = np.array([np.sqrt(2.0), 1.0, 1.0])

# Monomial vector basis of P1^2: (1,0), (x,0), (y,0), (0,1), (0,x), (0,y)
MONOMIAL_DIVERGENCE = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 1.0])


def _monomials(points: np.ndarray) -> np.ndarray:
    """Monomial vector fields at ``points`` (..., 2) -> (..., 6, 2)"""
    x = points[..., 0]
    y = points[..., 1]
    one = np.ones_like(x)
    zero = np.zeros_like(x)
    components = [(one, zero), (x, zero), (y, zero), (zero, one), (zero, x), (zero, y)]
    return np.stack([np.stack(pair, axis=-1) for pair in components], axis=-2)


def reference_edge_points(edge: int, s: np.ndarray) -> np.ndarray:
    """Points on local reference edge ``edge`` at parameters s in [-1, 1]"""
    start, end = REFERENCE_VERTICES[REFERENCE_EDGE_ENDPOINTS[edge]]
    s = np.asarray(s, dtype=float)[..., None]
    return 0.5 * (1.0 - s) * start + 0.5 * (1.0 + s) * end


def edge_moments(vector_field: Callable[[np.ndarray], np.ndarray], n_points: int) -> np.ndarray:
    """
    The six BDM1 degrees of freedom of a reference vector field.

    Dof 2*i + k is the flux moment of edge i against the Legendre polynomial
    L_k(s), k in {0, 1}: integral of (v . n) L_k ds over the edge.
    ``vector_field`` maps points (n, 2) to vectors (n, 2) or (n, m, 2).
    """
    nodes, weights = edge_gauss(n_points)
    legendre = np.stack((np.ones_like(nodes), nodes))
    moments = []
    for edge in range(3):
        values = vector_field(reference_edge_points(edge, nodes))
        flux = np.einsum("q...d,d->q...", values, REFERENCE_EDGE_NORMALS[edge])
        scale = 0.5 * REFERENCE_EDGE_LENGTHS[edge]
        for k in range(2):
            moments.append(scale * np.einsum("q,q...->...", weights * legendre[k], flux))
    return np.array(moments)


class ReferenceBasisBDM1:
    """
    Dual basis of BDM1 on the reference triangle.

    The coefficients are obtained once by inverting the dof matrix of the
    monomial vector basis, so that dof_i(basis_j) = delta_ij.
    """

    def __init__(self, n_points: int):
        self.dof_matrix = edge_moments(_monomials, n_points)
        self.coefficients = np.linalg.inv(self.dof_matrix)
        self.divergences = MONOMIAL_DIVERGENCE @ self.coefficients
        self.coefficients.setflags(write=False)
        self.divergences.setflags(write=False)
        logger.debug(f"BDM1 reference basis ready (dof matrix condition {np.linalg.cond(self.dof_matrix):.2e})")

    def values(self, points: np.ndarray) -> np.ndarray:
        """Basis values at reference points (..., 2) -> (..., 6, 2)"""
        monomials = _monomials(np.asarray(points, dtype=float))
        return np.einsum("...md,mj->...jd", monomials, self.coefficients)

    def duality_matrix(self, n_points: int) -> np.ndarray:
        """dof_i(basis_j); the identity up to round-off"""
        return edge_moments(self.values, n_points)


@lru_cache(maxsize=None)
def reference_basis() -> ReferenceBasisBDM1:
    return ReferenceBasisBDM1(settings.DUALITY_GAUSS_POINTS)


def bdm1_eval(ref_point: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Values (..., 6, 2) and constant divergences (6,) of the BDM1 dual basis"""
    basis = reference_basis()
    return basis.values(ref_point), basis.divergences.copy()
