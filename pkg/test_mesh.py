# test_mesh.py - L-shape triangulation, edges and refinement

import numpy as np
import pytest

from meshing.lshape import Mesh, build_lshape, mesh_stats, refine_uniform
from utils.exceptions import MeshError, MeshNestingError


def test_coarsest_mesh_counts(mesh1):
    assert mesh1.n_triangles == 6
    assert mesh1.n_vertices == 8
    assert mesh1.n_edges == 13
    assert mesh1.euler_characteristic() == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_counts_scale_with_level(n):
    mesh = build_lshape(n)
    assert mesh.n_triangles == 6 * n * n
    assert mesh.euler_characteristic() == 1
    assert np.count_nonzero(mesh.boundary_edges) == 8 * n
    assert mesh.total_area == pytest.approx(3.0, abs=1e-13)


def test_level_four_has_96_triangles(mesh4):
    assert mesh4.n_triangles == 96


def test_triangles_are_counterclockwise(mesh4):
    assert np.all(mesh4.signed_areas > 0.0)


def test_no_triangle_inside_removed_square(mesh4):
    centroids = mesh4.centroids
    assert not np.any((centroids[:, 0] > 0.0) & (centroids[:, 1] > 0.0))


def test_mesh_size_and_shape_regularity(mesh4):
    stats = mesh_stats(mesh4)
    assert stats.h == pytest.approx(np.sqrt(2.0) / 4, abs=1e-14)
    assert stats.gamma == pytest.approx((2.0 - np.sqrt(2.0)) / (2.0 * np.sqrt(2.0)), abs=1e-14)


def test_edges_point_from_lower_vertex(mesh2):
    assert np.all(mesh2.edges[:, 0] < mesh2.edges[:, 1])
    assert np.all(mesh2.edge_triangles[:, 0] >= 0)
    interior = ~mesh2.boundary_edges
    assert np.all(mesh2.edge_triangles[interior, 0] < mesh2.edge_triangles[interior, 1])


def test_normals_are_unit_and_leave_first_triangle(mesh2):
    normals = mesh2.edge_normals
    assert np.allclose(np.linalg.norm(normals, axis=1), 1.0, atol=1e-14)
    midpoints = mesh2.vertices[mesh2.edges].mean(axis=1)
    outward = midpoints - mesh2.centroids[mesh2.edge_triangles[:, 0]]
    assert np.all(np.einsum("ed,ed->e", normals, outward) > 0.0)


def test_boundary_normals_point_out_of_domain(mesh2):
    boundary = mesh2.boundary_edges
    midpoints = mesh2.vertices[mesh2.edges[boundary]].mean(axis=1)
    probes = midpoints + 1e-3 * mesh2.edge_normals[boundary]
    inside_box = np.all(np.abs(probes) < 1.0, axis=1)
    in_notch = (probes[:, 0] > 0.0) & (probes[:, 1] > 0.0)
    assert not np.any(inside_box & ~in_notch)


def test_axes_are_mesh_lines(mesh4):
    x = mesh4.corner_coordinates[..., 0]
    y = mesh4.corner_coordinates[..., 1]
    # No triangle straddles x = 0 or y = 0.
    assert not np.any((x.min(axis=1) < 0.0) & (x.max(axis=1) > 0.0))
    assert not np.any((y.min(axis=1) < 0.0) & (y.max(axis=1) > 0.0))


def test_build_is_deterministic():
    first, second = build_lshape(3), build_lshape(3)
    assert np.array_equal(first.vertices, second.vertices)
    assert np.array_equal(first.triangles, second.triangles)
    assert np.array_equal(first.edges, second.edges)


def test_refinement_quadruples_and_links_parents(mesh4):
    fine = refine_uniform(mesh4)
    assert fine.n_triangles == 384
    assert fine.parent is mesh4
    assert fine.level == mesh4.level + 1
    assert np.all(np.bincount(fine.parent_triangle) == 4)
    children_area = np.bincount(fine.parent_triangle, weights=fine.areas)
    assert np.allclose(children_area, mesh4.areas, atol=1e-15)


def test_refinement_matches_direct_construction(mesh2):
    fine = refine_uniform(mesh2)
    direct = build_lshape(4)
    assert np.allclose(fine.vertices, direct.vertices, atol=1e-14)
    assert fine.n_edges == direct.n_edges


def test_children_lie_inside_parent(refined2):
    parent = refined2.parent
    corners = parent.corner_coordinates[refined2.parent_triangle]
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    jac = np.stack((e1, e2), axis=-1)
    local = np.linalg.solve(jac, (refined2.centroids - corners[:, 0])[..., None])[..., 0]
    assert np.all(local > 0.0)
    assert np.all(local.sum(axis=1) < 1.0)


def test_ancestor_triangles_compose_over_levels(mesh2, refined2):
    finer = refine_uniform(refined2)
    mapping = finer.ancestor_triangles(mesh2)
    assert np.array_equal(mapping, refined2.parent_triangle[finer.parent_triangle])
    assert np.array_equal(mesh2.ancestor_triangles(mesh2), np.arange(mesh2.n_triangles))


def test_ancestor_of_unrelated_mesh_fails(mesh2, mesh4):
    with pytest.raises(MeshNestingError):
        mesh4.ancestor_triangles(mesh2)


@pytest.mark.parametrize("n", [0, -1, 1.5, True])
def test_invalid_level_rejected(n):
    with pytest.raises(MeshError):
        build_lshape(n)


def test_clockwise_triangle_rejected():
    with pytest.raises(MeshError):
        Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 2, 1]]))


def test_mesh_arrays_are_read_only(mesh1):
    with pytest.raises(ValueError):
        mesh1.vertices[0, 0] = 5.0
