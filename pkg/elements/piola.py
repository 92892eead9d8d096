# elements/piola.py - AFFINE ELEMENT MAPS AND CONTRAVARIANT PIOLA TRANSFORM

import threading
import weakref
from typing import NamedTuple, Optional

import numpy as np

from config.settings import settings
from utils.exceptions import DegenerateElementError


class PiolaImage(NamedTuple):
    point: np.ndarray
    vector: np.ndarray


def _jacobian(vertices: np.ndarray) -> np.ndarray:
    vertices = np.asarray(vertices, dtype=float)
    return np.stack((vertices[..., 1, :] - vertices[..., 0, :], vertices[..., 2, :] - vertices[..., 0, :]), axis=-1)


def piola_map(vertices: np.ndarray, ref_vector: np.ndarray, ref_point: np.ndarray) -> PiolaImage:
    """
    Contravariant Piola transform of a reference vector on one triangle.

    x = x0 + J x_hat and v(x) = J v_hat(x_hat) / det J; divergences
    transform as div v = div_hat v_hat / det J.
    """
    vertices = np.asarray(vertices, dtype=float)
    jacobian = _jacobian(vertices)
    det = float(np.linalg.det(jacobian))
    if abs(det) < settings.JACOBIAN_FLOOR:
        raise DegenerateElementError(f"Degenerate triangle, det J = {det:.3e}")
    point = vertices[0] + np.asarray(ref_point, dtype=float) @ jacobian.T
    vector = np.asarray(ref_vector, dtype=float) @ jacobian.T / det
    return PiolaImage(point=point, vector=vector)


class AffineMaps:
    """Affine reference-to-physical maps of every triangle of a mesh"""

    def __init__(self, corner_coordinates: np.ndarray):
        corners = np.asarray(corner_coordinates, dtype=float)
        self.origins = corners[:, 0, :]
        self.jacobians = _jacobian(corners)
        self.determinants = np.linalg.det(self.jacobians)
        if np.any(np.abs(self.determinants) < settings.JACOBIAN_FLOOR):
            bad = int(np.argmin(np.abs(self.determinants)))
            raise DegenerateElementError(f"Degenerate triangle {bad}, det J = {self.determinants[bad]:.3e}")
        self.inverse_jacobians = np.linalg.inv(self.jacobians)

    def _select(self, cells: Optional[np.ndarray]):
        if cells is None:
            return self.origins, self.jacobians, self.determinants
        return self.origins[cells], self.jacobians[cells], self.determinants[cells]

    def to_physical(self, ref_points: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        """Reference points (q, 2) shared or (K, q, 2) per cell -> physical (K, q, 2)"""
        origins, jacobians, _ = self._select(cells)
        ref_points = np.asarray(ref_points, dtype=float)
        if ref_points.ndim == 2:
            return origins[:, None, :] + np.einsum("kij,qj->kqi", jacobians, ref_points)
        return origins[:, None, :] + np.einsum("kij,kqj->kqi", jacobians, ref_points)

    def to_reference(self, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """Physical points (K, q, 2) -> reference coordinates in the given cells"""
        shifted = np.asarray(points, dtype=float) - self.origins[cells][:, None, :]
        return np.einsum("kij,kqj->kqi", self.inverse_jacobians[cells], shifted)

    def piola(self, ref_vectors: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        """Contravariant transform of per-cell reference vectors (K, ..., 2)"""
        _, jacobians, determinants = self._select(cells)
        ref_vectors = np.asarray(ref_vectors, dtype=float)
        extra = ref_vectors.ndim - 2
        mapped = np.einsum("kij,k...j->k...i", jacobians, ref_vectors)
        return mapped / determinants.reshape((-1,) + (1,) * (extra + 1))


_MAPS_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_MAPS_LOCK = threading.Lock()


def affine_maps(mesh) -> AffineMaps:
    """Per-mesh affine maps, computed once and released with the mesh"""
    with _MAPS_LOCK:
        maps = _MAPS_CACHE.get(mesh)
        if maps is None:
            maps = AffineMaps(mesh.corner_coordinates)
            _MAPS_CACHE[mesh] = maps
    return maps
