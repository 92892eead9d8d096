# test_postprocess.py - Local P1 pressure reconstruction

import numpy as np
import pytest

from config.wave_problems import SmoothTestCase
from elements.bdm1 import REFERENCE_VERTICES
from meshing.lshape import build_lshape
from models.fields import FieldBDM1, FieldP0, HalfStepContext
from models.functions import ScalarFunction, VectorFunction
from solvers.postprocess import local_reconstruct, postprocess_generic, postprocess_halfstep
from solvers.projections import diff_norm_nested, project_p0, project_p1

TRIANGLE = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.25]])
ONE = ScalarFunction.constant(1.0)


def _constant(vector):
    return lambda points: np.broadcast_to(np.asarray(vector, dtype=float), points.shape)


def test_constant_source_sets_gradient_and_keeps_mean():
    coefficients = local_reconstruct(TRIANGLE, _constant((0.0, 0.0)), _constant((1.0, 2.0)), 3.0, ONE)
    assert np.allclose(coefficients, [3.0, 1.0, 2.0], atol=1e-14)


def test_velocity_derivative_enters_with_weight_b():
    coefficients = local_reconstruct(TRIANGLE, _constant((0.5, -1.0)), None, 0.0, ScalarFunction.constant(2.0))
    assert np.allclose(coefficients, [0.0, -1.0, 2.0], atol=1e-14)


def test_linear_source_gives_centroid_gradient():
    def g_eval(points):
        return np.column_stack((points[:, 0] + points[:, 1], 2.0 * points[:, 1]))

    coefficients = local_reconstruct(REFERENCE_VERTICES, _constant((0.0, 0.0)), g_eval, -1.0, ONE)
    centroid = REFERENCE_VERTICES.mean(axis=0)
    assert np.allclose(coefficients, [-1.0, centroid.sum(), 2.0 * centroid[1]], atol=1e-14)


def test_reconstruction_of_linear_pressure_is_exact(mesh2):
    # p = 1 + x - 2y with u_t = 0 and g = grad p
    p = ScalarFunction(evaluator=lambda x, y, t: 1.0 + x - 2.0 * y)
    g = VectorFunction.constant((1.0, -2.0))
    result = postprocess_generic(VectorFunction.zero(), project_p0(p, 0.0, mesh2), g, 0.0, ONE)
    assert result.time == 0.0
    assert diff_norm_nested(result.field, project_p1(p, 0.0, mesh2)) < 1e-13


def test_means_are_preserved(dofmap2, mesh2):
    rng = np.random.default_rng(5)
    means = rng.standard_normal(mesh2.n_triangles)
    dtu = FieldBDM1(dofmap=dofmap2, coefficients=rng.standard_normal(dofmap2.n_bdm))
    result = postprocess_generic(dtu, FieldP0(mesh=mesh2, coefficients=means), None, 0.0, ONE)
    assert np.allclose(result.field.element_means(), means, atol=1e-14)


def test_zero_step_gives_zero_reconstruction(dofmap2, mesh2):
    context = HalfStepContext(
        u_prev=FieldBDM1.zeros(dofmap2),
        u_next=FieldBDM1.zeros(dofmap2),
        p_prev=FieldP0.zeros(mesh2),
        p_next=FieldP0.zeros(mesh2),
        tau=0.1,
    )
    result = postprocess_halfstep(context, ONE)
    assert result.time == pytest.approx(0.05)
    assert not np.any(result.field.coefficients)


def test_halfstep_averages_pressures_and_sources(dofmap2, mesh2):
    p_prev = FieldP0(mesh=mesh2, coefficients=np.full(mesh2.n_triangles, 1.0))
    p_next = FieldP0(mesh=mesh2, coefficients=np.full(mesh2.n_triangles, 3.0))
    g = VectorFunction(evaluator=lambda x, y, t: np.stack(np.broadcast_arrays(t + 0.0 * x, 0.0 * y), axis=-1))
    context = HalfStepContext(
        u_prev=FieldBDM1.zeros(dofmap2),
        u_next=FieldBDM1.zeros(dofmap2),
        p_prev=p_prev,
        p_next=p_next,
        tau=0.5,
        t_prev=1.0,
        g=g,
    )
    result = postprocess_halfstep(context, ONE)
    assert result.time == pytest.approx(1.25)
    assert np.allclose(result.field.coefficients[:, 0], 2.0)
    assert np.allclose(result.field.coefficients[:, 1], 1.25)
    assert np.allclose(result.field.coefficients[:, 2], 0.0, atol=1e-15)


def test_exact_data_superconverges():
    problem = SmoothTestCase()
    t = 0.3
    errors = []
    for n in (4, 8, 16):
        mesh = build_lshape(n)
        result = postprocess_generic(problem.exact_u_dt, project_p0(problem.exact_p, t, mesh), problem.g, t, problem.b)
        errors.append(diff_norm_nested(result.field, project_p1(problem.exact_p, t, mesh)))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(np.abs(rates - 2.0) < 0.15)


def test_random_linear_velocity_matches_constrained_oracle():
    rng = np.random.default_rng(13)
    slope, offset = rng.standard_normal((2, 2)), rng.standard_normal(2)

    def dtu(points):
        return points @ slope.T + offset

    coefficients = local_reconstruct(TRIANGLE, dtu, None, 0.7, ONE)

    # Saddle point form: gradient Gram matrix with the mean as a Lagrange constraint.
    area = 0.5 * abs(np.linalg.det(np.column_stack((TRIANGLE[1] - TRIANGLE[0], TRIANGLE[2] - TRIANGLE[0]))))
    centroid = TRIANGLE.mean(axis=0)
    source_integral = -area * dtu(centroid[None, :])[0]
    kkt = np.zeros((4, 4))
    kkt[1, 1] = kkt[2, 2] = area
    kkt[0, 3] = kkt[3, 0] = area
    rhs = np.array([0.0, source_integral[0], source_integral[1], 0.7 * area])
    oracle = np.linalg.solve(kkt, rhs)[:3]
    assert np.allclose(coefficients, oracle, atol=1e-13)
