# solvers/postprocess.py - LOCAL P1 PRESSURE RECONSTRUCTION

"""
Element-local post-processing. On every triangle K find p~ in P1(K) with

    (grad p~, grad q)_K = (g - b dtu, grad q)_K   for all q in P1(K)
    (p~, 1)_K = (p_h, 1)_K

In the centroid basis {1, x - x_c, y - y_c} the gradient Gram matrix is
|K| I, so the linear part is a 2x2 solve and the constant is the P0 mean.
"""

from typing import Callable, Optional, Union

import numpy as np
from loguru import logger

from config.settings import settings
from elements.piola import AffineMaps, affine_maps
from elements.quadrature import quadrature
from models.fields import FieldBDM1, FieldP0, FieldP1, HalfStepContext, PostprocessedPressure
from models.functions import ScalarFunction, VectorFunction
from utils.exceptions import PostprocessError


def _solve_local(maps: AffineMaps, centroids: np.ndarray, source: np.ndarray, p_mean: np.ndarray) -> np.ndarray:
    """
    Shared kernel over a batch of elements.

    ``source`` holds g - b dtu at the reference quadrature points mapped to
    each element, shape (K, q, 2). Returns centroid-basis coefficients (K, 3).
    """
    rule = quadrature(settings.QUADRATURE_DEGREE)
    jacobian_weights = np.abs(maps.determinants)
    areas = 0.5 * jacobian_weights
    rhs = jacobian_weights[:, None] * np.einsum("q,kqd->kd", rule.weights, source)
    gram = areas[:, None, None] * np.eye(2)[None, :, :]
    gradients = np.linalg.solve(gram, rhs[..., None])[..., 0]
    coefficients = np.column_stack((p_mean, gradients))

    # The linear part integrates to zero over K only up to round-off; check it.
    points = maps.to_physical(rule.points)
    offsets = points - centroids[:, None, :]
    means = coefficients[:, 0] + np.einsum("q,kqd,kd->k", rule.weights, offsets, gradients) * jacobian_weights / areas
    defect = float(np.max(np.abs(means - p_mean))) if means.size else 0.0
    if defect > settings.MEAN_PRESERVATION_TOL:
        raise PostprocessError(f"Reconstruction changed an element mean by {defect:.3e}")
    return coefficients


def local_reconstruct(
    vertices: np.ndarray,
    dtu: Callable[[np.ndarray], np.ndarray],
    g_eval: Optional[Callable[[np.ndarray], np.ndarray]],
    p_mean: float,
    b: ScalarFunction,
) -> np.ndarray:
    """
    Reconstruct p~ on a single triangle.

    ``dtu`` and ``g_eval`` map physical points (q, 2) to vectors (q, 2).
    Returns the coefficients of {1, x - x_c, y - y_c}.
    """
    vertices = np.asarray(vertices, dtype=float)
    maps = AffineMaps(vertices[None, :, :])
    centroid = vertices.mean(axis=0)[None, :]
    points = maps.to_physical(quadrature(settings.QUADRATURE_DEGREE).points)[0]
    source = -b.at_points(points)[:, None] * np.asarray(dtu(points), dtype=float)
    if g_eval is not None:
        source = source + np.asarray(g_eval(points), dtype=float)
    return _solve_local(maps, centroid, source[None], np.array([p_mean]))[0]


def reconstruct_elements(mesh, source: np.ndarray, p_mean: np.ndarray) -> FieldP1:
    """Batched reconstruction from g - b dtu sampled at the quadrature points of every element"""
    coefficients = _solve_local(affine_maps(mesh), mesh.centroids, source, np.asarray(p_mean, dtype=float))
    return FieldP1(mesh=mesh, coefficients=coefficients)


def _source(mesh, dtu: Union[FieldBDM1, VectorFunction], g_values: Optional[np.ndarray], b: ScalarFunction, t: float):
    rule = quadrature(settings.QUADRATURE_DEGREE)
    points = affine_maps(mesh).to_physical(rule.points)
    if isinstance(dtu, FieldBDM1):
        dtu_values = dtu.evaluate(rule.points)
    else:
        dtu_values = dtu.at_points(points, t)
    source = -b.at_points(points)[..., None] * dtu_values
    if g_values is not None:
        source = source + g_values
    return source


def postprocess_generic(
    dtu: Union[FieldBDM1, VectorFunction],
    p_h: FieldP0,
    g: Optional[VectorFunction],
    t: float,
    b: ScalarFunction,
) -> PostprocessedPressure:
    """Reconstruction at time t from a caller-supplied velocity time derivative"""
    mesh = p_h.mesh
    rule = quadrature(settings.QUADRATURE_DEGREE)
    g_values = None if g is None else g.at_points(affine_maps(mesh).to_physical(rule.points), t)
    source = _source(mesh, dtu, g_values, b, t)
    return PostprocessedPressure(field=reconstruct_elements(mesh, source, p_h.coefficients), time=t)


def postprocess_halfstep(ctx: HalfStepContext, b: ScalarFunction) -> PostprocessedPressure:
    """Fully discrete reconstruction at t^{n-1/2} from one Crank-Nicolson step"""
    mesh = ctx.p_next.mesh
    dtu = (ctx.u_next - ctx.u_prev) / ctx.tau
    p_mean = 0.5 * (ctx.p_prev.coefficients + ctx.p_next.coefficients)
    g_values = None
    if ctx.g is not None:
        points = affine_maps(mesh).to_physical(quadrature(settings.QUADRATURE_DEGREE).points)
        g_values = 0.5 * (ctx.g.at_points(points, ctx.t_prev) + ctx.g.at_points(points, ctx.t_next))
    source = _source(mesh, dtu, g_values, b, ctx.t_half)
    field = reconstruct_elements(mesh, source, p_mean)
    logger.trace(f"Post-processed pressure at t={ctx.t_half:.6f}")
    return PostprocessedPressure(field=field, time=ctx.t_half)
