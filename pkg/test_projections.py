# test_projections.py - pi0, pi1, the BDM1 interpolant and nested-mesh transfer

import numpy as np
import pytest

from analysis.norms import l2_difference
from elements.piola import affine_maps
from meshing.lshape import build_lshape, refine_uniform
from models.fields import FieldBDM1, FieldP0, FieldP1
from models.functions import ScalarFunction, VectorFunction
from solvers.projections import (
    diff_norm_nested,
    interpolate_bdm1,
    project_p0,
    project_p1,
    restrict_p0,
    restrict_p1,
)
from utils.exceptions import MeshNestingError


def _scalar(expression):
    return ScalarFunction(evaluator=lambda x, y, t: expression(x, y))


def _vector(first, second):
    return VectorFunction(evaluator=lambda x, y, t: np.stack(np.broadcast_arrays(first(x, y), second(x, y)), axis=-1))


def test_p0_projection_of_linear_is_centroid_value(mesh4):
    field = project_p0(_scalar(lambda x, y: 3.0 * x - y + 1.0), 0.0, mesh4)
    c = mesh4.centroids
    assert np.allclose(field.coefficients, 3.0 * c[:, 0] - c[:, 1] + 1.0, atol=1e-14)


def test_p0_projection_uses_time_argument(mesh2):
    function = ScalarFunction(evaluator=lambda x, y, t: t + 0.0 * x)
    assert np.allclose(project_p0(function, 0.75, mesh2).coefficients, 0.75)


def test_p1_projection_reproduces_linear_functions(mesh2):
    field = project_p1(_scalar(lambda x, y: 2.0 + 0.5 * x - 4.0 * y), 0.0, mesh2)
    c = mesh2.centroids
    assert np.allclose(field.coefficients[:, 0], 2.0 + 0.5 * c[:, 0] - 4.0 * c[:, 1], atol=1e-13)
    assert np.allclose(field.coefficients[:, 1], 0.5, atol=1e-13)
    assert np.allclose(field.coefficients[:, 2], -4.0, atol=1e-13)


def test_vector_p1_projection_is_componentwise(mesh2):
    field = project_p1(_vector(lambda x, y: x, lambda x, y: 2.0 * y), 0.0, mesh2)
    assert field.is_vector
    assert np.allclose(field.coefficients[:, 1, 0], 1.0, atol=1e-13)
    assert np.allclose(field.coefficients[:, 2, 1], 2.0, atol=1e-13)
    assert np.allclose(field.coefficients[:, 2, 0], 0.0, atol=1e-13)


def test_p1_projection_converges_at_second_order():
    function = _scalar(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    errors = []
    for n in (4, 8, 16):
        field = project_p1(function, 0.0, build_lshape(n))
        errors.append(l2_difference(field, function, 0.0))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(np.abs(rates - 2.0) < 0.15)


def test_bdm1_interpolant_reproduces_linear_fields(mesh2):
    function = _vector(lambda x, y: 1.0 + 2.0 * x - y, lambda x, y: 3.0 * y + x)
    field = interpolate_bdm1(function, 0.0, mesh2)
    ref_points = np.array([[0.2, 0.3], [0.6, 0.1], [1 / 3, 1 / 3]])
    physical = affine_maps(mesh2).to_physical(ref_points)
    assert np.allclose(field.evaluate(ref_points), function.at_points(physical), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_commuting_diagram_for_polynomial_fields(n):
    mesh = build_lshape(n)
    function = _vector(lambda x, y: x ** 2 * y - y ** 3, lambda x, y: x * y ** 2 + x ** 3)
    divergence = _scalar(lambda x, y: 2.0 * x * y + 2.0 * x * y)
    interpolant = interpolate_bdm1(function, 0.0, mesh)
    expected = project_p0(divergence, 0.0, mesh).coefficients
    assert np.allclose(interpolant.divergence(), expected, atol=1e-9)


def test_commuting_diagram_for_trigonometric_field():
    function = _vector(
        lambda x, y: np.cos(np.pi * x) * np.sin(np.pi * y), lambda x, y: np.sin(np.pi * x) * np.cos(np.pi * y)
    )
    divergence = _scalar(lambda x, y: -2.0 * np.pi * np.sin(np.pi * x) * np.sin(np.pi * y))
    defects = []
    for n in (1, 2, 4, 8):
        mesh = build_lshape(n)
        gap = interpolate_bdm1(function, 0.0, mesh).divergence() - project_p0(divergence, 0.0, mesh).coefficients
        defects.append(np.sqrt(np.sum(mesh.areas * gap ** 2)))
    # quadrature error only, shrinking by roughly 2^8 per level
    assert all(coarse > 64.0 * fine for coarse, fine in zip(defects, defects[1:]))
    assert defects[-1] < 1e-9


def test_interpolating_a_discrete_field_is_identity(dofmap2, mesh2):
    rng = np.random.default_rng(3)
    field = FieldBDM1(dofmap=dofmap2, coefficients=rng.standard_normal(dofmap2.n_bdm))
    again = interpolate_bdm1(field, 0.0, mesh2)
    assert np.allclose(again.coefficients, field.coefficients, atol=1e-12)


def test_restrict_p0_matches_coarse_projection(mesh2, refined2):
    function = _scalar(lambda x, y: x ** 2 * y + 1.0)
    restricted = restrict_p0(project_p0(function, 0.0, refined2), mesh2)
    assert np.allclose(restricted.coefficients, project_p0(function, 0.0, mesh2).coefficients, atol=1e-13)


def test_restrict_p1_keeps_coarse_linear_functions(mesh2, refined2):
    function = _scalar(lambda x, y: 1.0 - x + 2.0 * y)
    restricted = restrict_p1(project_p1(function, 0.0, refined2), mesh2)
    assert np.allclose(restricted.coefficients, project_p1(function, 0.0, mesh2).coefficients, atol=1e-12)


def test_restrict_p1_of_vector_field(mesh2, refined2):
    function = _vector(lambda x, y: x * y, lambda x, y: y)
    restricted = restrict_p1(project_p1(function, 0.0, refined2), mesh2)
    assert restricted.is_vector
    assert np.allclose(restricted.coefficients[:, 2, 1], 1.0, atol=1e-12)


def test_diff_norm_of_constant_fields(mesh2):
    ones = FieldP0(mesh=mesh2, coefficients=np.ones(mesh2.n_triangles))
    assert diff_norm_nested(ones, FieldP0.zeros(mesh2)) == pytest.approx(np.sqrt(3.0), abs=1e-13)
    assert diff_norm_nested(ones, ones) == 0.0


def test_diff_norm_across_levels_sees_identical_functions(mesh2):
    fine = refine_uniform(refine_uniform(mesh2))
    function = _scalar(lambda x, y: 0.5 - x + y)
    assert diff_norm_nested(project_p1(function, 0.0, fine), project_p1(function, 0.0, mesh2)) < 1e-12


def test_diff_norm_requires_nested_meshes(mesh2, mesh4):
    with pytest.raises(MeshNestingError):
        diff_norm_nested(FieldP0.zeros(mesh4), FieldP0.zeros(mesh2))


def test_diff_norm_rejects_scalar_against_vector(mesh2):
    scalar = FieldP1(mesh=mesh2, coefficients=np.zeros((mesh2.n_triangles, 3)))
    vector = FieldP1(mesh=mesh2, coefficients=np.zeros((mesh2.n_triangles, 3, 2)))
    with pytest.raises(ValueError):
        diff_norm_nested(scalar, vector)


def test_diff_norm_rejects_non_fields(mesh2):
    with pytest.raises(TypeError):
        diff_norm_nested(np.zeros(mesh2.n_triangles), FieldP0.zeros(mesh2))
