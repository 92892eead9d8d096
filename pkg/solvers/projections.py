# solvers/projections.py - L2 PROJECTIONS, BDM1 INTERPOLANT AND NESTED-MESH TRANSFER

"""
pi0 (elementwise means), pi1 (elementwise linear L2 projection), the BDM1
interpolant rho_h defined by edge Legendre moments of the normal component,
and transfer/difference operators between nested meshes.
"""

from typing import Optional, Union

import numpy as np

from config.settings import settings
from elements.dofmap import DofMap, build_dofmap
from elements.piola import affine_maps
from elements.quadrature import edge_gauss, quadrature
from models.fields import FieldBDM1, FieldP0, FieldP1, _DiscreteField
from models.functions import ScalarFunction, VectorFunction
from utils.exceptions import MeshNestingError

AnyField = Union[FieldP0, FieldP1, FieldBDM1]


def _quadrature_points(mesh):
    """Physical quadrature points (K, q, 2) and weights scaled by |det J| (K, q)"""
    rule = quadrature(settings.QUADRATURE_DEGREE)
    maps = affine_maps(mesh)
    points = maps.to_physical(rule.points)
    weights = np.abs(maps.determinants)[:, None] * rule.weights[None, :]
    return points, weights


def _p1_basis(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Centroid-centred basis {1, x - x_c, y - y_c} at points (K, q, 2) -> (K, q, 3)"""
    offsets = points - centroids[:, None, :]
    return np.concatenate((np.ones(points.shape[:-1] + (1,)), offsets), axis=-1)


def p1_mass_matrices(mesh) -> np.ndarray:
    """Element mass matrices of the centroid-centred P1 basis, shape (K, 3, 3)"""
    points, weights = _quadrature_points(mesh)
    basis = _p1_basis(points, mesh.centroids)
    return np.einsum("kq,kqi,kqj->kij", weights, basis, basis)


def project_p0(function: ScalarFunction, t: float, mesh) -> FieldP0:
    """Elementwise mean value (pi0)"""
    points, weights = _quadrature_points(mesh)
    values = function.at_points(points, t)
    means = np.einsum("kq,kq->k", weights, values) / weights.sum(axis=1)
    return FieldP0(mesh=mesh, coefficients=means)


def project_p1(function: Union[ScalarFunction, VectorFunction], t: float, mesh) -> FieldP1:
    """Elementwise linear L2 projection (pi1), componentwise for vector functions"""
    points, weights = _quadrature_points(mesh)
    basis = _p1_basis(points, mesh.centroids)
    values = function.at_points(points, t)
    mass = np.einsum("kq,kqi,kqj->kij", weights, basis, basis)
    if values.ndim == 3:
        load = np.einsum("kq,kqi,kqc->kic", weights, basis, values)
    else:
        load = np.einsum("kq,kqi,kq->ki", weights, basis, values)[..., None]
    coefficients = np.linalg.solve(mass, load)
    if values.ndim == 2:
        coefficients = coefficients[..., 0]
    return FieldP1(mesh=mesh, coefficients=coefficients)


def _edge_points(mesh, nodes: np.ndarray) -> np.ndarray:
    """Points (n_edges, q, 2) along every edge, parameterised from lower to higher global vertex"""
    start = mesh.vertices[mesh.edges[:, 0]]
    end = mesh.vertices[mesh.edges[:, 1]]
    return 0.5 * (1.0 - nodes)[None, :, None] * start[:, None, :] + 0.5 * (1.0 + nodes)[None, :, None] * end[:, None, :]


def bdm1_normal_traces(field: FieldBDM1, nodes: np.ndarray, side: int = 0) -> np.ndarray:
    """
    Normal component v . n_e of a BDM1 field at edge parameters ``nodes``,
    evaluated from neighbour ``side`` (0 or 1) of every edge.

    Edges without a second neighbour (boundary edges) return NaN for side 1.
    """
    mesh = field.mesh
    nodes = np.asarray(nodes, dtype=float)
    cells = mesh.edge_triangles[:, side]
    present = cells >= 0
    traces = np.full((mesh.n_edges, nodes.size), np.nan)
    if not np.any(present):
        return traces
    points = _edge_points(mesh, nodes)[present]
    ref_points = affine_maps(mesh).to_reference(points, cells[present])
    values = field.evaluate(ref_points, cells[present])
    traces[present] = np.einsum("eqd,ed->eq", values, mesh.edge_normals[present])
    return traces


def interpolate_bdm1(
    function: Union[VectorFunction, FieldBDM1],
    t: float,
    mesh,
    dofmap: Optional[DofMap] = None,
) -> FieldBDM1:
    """
    BDM1 interpolant rho_h: global dof 2e + k is the moment of u . n_e
    against L_k(s) along edge e, with a Gauss rule per edge.

    Satisfies div rho_h u = pi0 div u elementwise.
    """
    if dofmap is None:
        dofmap = function.dofmap if isinstance(function, FieldBDM1) else build_dofmap(mesh)
    nodes, weights = edge_gauss(settings.EDGE_GAUSS_POINTS)
    if isinstance(function, FieldBDM1):
        flux = bdm1_normal_traces(function, nodes)
    else:
        values = function.at_points(_edge_points(mesh, nodes), t)
        flux = np.einsum("eqd,ed->eq", values, mesh.edge_normals)
    legendre = np.stack((np.ones_like(nodes), nodes))
    moments = 0.5 * mesh.edge_lengths[:, None] * np.einsum("eq,kq,q->ek", flux, legendre, weights)
    return FieldBDM1(dofmap=dofmap, coefficients=moments.reshape(-1))


def restrict_p0(fine: FieldP0, coarse_mesh) -> FieldP0:
    """L2 projection of a fine P0 field onto an ancestor mesh (area-weighted child means)"""
    ancestors = fine.mesh.ancestor_triangles(coarse_mesh)
    integrals = np.bincount(ancestors, weights=fine.coefficients * fine.mesh.areas, minlength=coarse_mesh.n_triangles)
    return FieldP0(mesh=coarse_mesh, coefficients=integrals / coarse_mesh.areas)


def restrict_p1(fine: FieldP1, coarse_mesh) -> FieldP1:
    """Elementwise L2 projection of a fine P1 field onto P1 over an ancestor mesh"""
    ancestors = fine.mesh.ancestor_triangles(coarse_mesh)
    rule = quadrature(settings.QUADRATURE_DEGREE)
    points, weights = _quadrature_points(fine.mesh)
    values = fine.evaluate(rule.points)
    basis = _p1_basis(points, coarse_mesh.centroids[ancestors])

    if fine.is_vector:
        local = np.einsum("kq,kqi,kqc->kic", weights, basis, values)
        load = np.zeros((coarse_mesh.n_triangles, 3, 2))
    else:
        local = np.einsum("kq,kqi,kq->ki", weights, basis, values)[..., None]
        load = np.zeros((coarse_mesh.n_triangles, 3, 1))
    np.add.at(load, ancestors, local)
    coefficients = np.linalg.solve(p1_mass_matrices(coarse_mesh), load)
    if not fine.is_vector:
        coefficients = coefficients[..., 0]
    return FieldP1(mesh=coarse_mesh, coefficients=coefficients)


def _as_components(values: np.ndarray) -> np.ndarray:
    return values if values.ndim == 3 else values[..., None]


def diff_norm_nested(fine_field: AnyField, coarse_field: AnyField) -> float:
    """
    L2 norm over the domain of fine_field - coarse_field.

    The coarse mesh must be the fine mesh itself or one of its ancestors;
    both fields are evaluated at the fine-mesh quadrature points.
    """
    if not isinstance(fine_field, _DiscreteField) or not isinstance(coarse_field, _DiscreteField):
        raise TypeError("diff_norm_nested compares discrete fields")
    fine_mesh, coarse_mesh = fine_field.mesh, coarse_field.mesh
    try:
        ancestors = fine_mesh.ancestor_triangles(coarse_mesh)
    except MeshNestingError:
        raise MeshNestingError(f"Cannot compare fields on non-nested meshes {fine_mesh} and {coarse_mesh}")

    rule = quadrature(settings.QUADRATURE_DEGREE)
    points, weights = _quadrature_points(fine_mesh)
    fine_values = _as_components(fine_field.evaluate(rule.points))
    coarse_ref = affine_maps(coarse_mesh).to_reference(points, ancestors)
    coarse_values = _as_components(coarse_field.evaluate(coarse_ref, ancestors))
    if fine_values.shape != coarse_values.shape:
        raise ValueError("Cannot compare scalar and vector fields")
    squared = np.sum((fine_values - coarse_values) ** 2, axis=-1)
    return float(np.sqrt(np.einsum("kq,kq->", weights, squared)))
