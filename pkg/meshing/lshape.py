# meshing/lshape.py - L-SHAPE TRIANGULATION AND RED REFINEMENT

from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger

from utils.exceptions import MeshError, MeshNestingError

# Local edge i is opposite local vertex i; endpoints listed lower local index first.
LOCAL_EDGES = np.array([[1, 2], [0, 2], [0, 1]])


class MeshStats(NamedTuple):
    h: float
    gamma: float


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class Mesh:
    """
    Conforming triangulation with the oriented edge connectivity needed by
    H(div) elements.

    Triangles are stored counterclockwise. Edges are vertex pairs with the
    lower index first; ``edge_triangles`` lists the adjacent triangles in
    ascending order (-1 marks the missing neighbour of a boundary edge) and
    ``edge_normals`` points out of the lower-numbered adjacent triangle.
    A refined mesh keeps a reference to its parent and, per triangle, the
    index of the parent triangle. Instances are immutable.
    """

    name = "Triangular"

    def __init__(
        self,
        vertices: np.ndarray,
        triangles: np.ndarray,
        level: int = 0,
        parent: Optional["Mesh"] = None,
        parent_triangle: Optional[np.ndarray] = None,
    ):
        vertices = np.array(vertices, dtype=float)
        triangles = np.array(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise MeshError(f"Vertices must have shape (N, 2), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or triangles.shape[0] == 0:
            raise MeshError(f"Triangles must have shape (M, 3), got {triangles.shape}")
        if triangles.min() < 0 or triangles.max() >= vertices.shape[0]:
            raise MeshError("Triangle references a vertex that does not exist")
        if level < 0:
            raise MeshError(f"Refinement level must be non-negative, got {level}")
        if (parent is None) != (parent_triangle is None):
            raise MeshError("Parent mesh and parent triangle links must be given together")

        self.vertices = _freeze(vertices)
        self.triangles = _freeze(triangles)
        self.level = level
        self.parent = parent
        self.parent_triangle = None if parent_triangle is None else _freeze(np.array(parent_triangle, dtype=np.int64))

        if np.any(self.signed_areas <= 0.0):
            raise MeshError("All triangles must be counterclockwise with positive area")
        self._build_edges()
        if self.parent_triangle is not None:
            self._check_nesting()

    def __str__(self):
        string = self.name + " mesh (level {}) with {} nodes, {} edges and {} cells."
        return string.format(self.level, self.n_vertices, self.n_edges, self.n_triangles)

    def __repr__(self):
        return self.__str__()

    # ------------------------------------------------------------------
    # Connectivity
    # ------------------------------------------------------------------

    def _build_edges(self):
        n_tri = self.n_triangles
        pairs = np.sort(self.triangles[:, LOCAL_EDGES], axis=2).reshape(-1, 2)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        triangle_edges = np.asarray(inverse).reshape(n_tri, 3)

        edge_ids = triangle_edges.ravel()
        tri_ids = np.repeat(np.arange(n_tri), 3)
        counts = np.bincount(edge_ids, minlength=edges.shape[0])
        if np.any(counts > 2):
            raise MeshError("Non-conforming mesh: an edge is shared by more than two triangles")

        order = np.lexsort((tri_ids, edge_ids))
        sorted_tris = tri_ids[order]
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        edge_triangles = np.full((edges.shape[0], 2), -1, dtype=np.int64)
        edge_triangles[:, 0] = sorted_tris[starts]
        interior = counts == 2
        edge_triangles[interior, 1] = sorted_tris[starts[interior] + 1]

        tangent = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        lengths = np.linalg.norm(tangent, axis=1)
        normals = np.column_stack((tangent[:, 1], -tangent[:, 0])) / lengths[:, None]
        # Orient away from the lower-numbered neighbour.
        towards_first = self.centroids[edge_triangles[:, 0]] - self.vertices[edges[:, 0]]
        flip = np.einsum("ij,ij->i", normals, towards_first) > 0.0
        normals[flip] *= -1.0

        self.edges = _freeze(edges.astype(np.int64))
        self.triangle_edges = _freeze(triangle_edges.astype(np.int64))
        self.edge_triangles = _freeze(edge_triangles)
        self.edge_normals = _freeze(normals)
        self.edge_lengths = _freeze(lengths)
        self.boundary_edges = _freeze(~interior)

    def _check_nesting(self):
        parent = self.parent
        if self.parent_triangle.shape != (self.n_triangles,):
            raise MeshError("Parent links must give one parent triangle per triangle")
        counts = np.bincount(self.parent_triangle, minlength=parent.n_triangles)
        if counts.shape[0] != parent.n_triangles or np.any(counts != 4):
            raise MeshError("Every parent triangle must have exactly four children")

    # ------------------------------------------------------------------
    # Sizes and geometry
    # ------------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def corner_coordinates(self) -> np.ndarray:
        """(n_triangles, 3, 2) array of triangle corner coordinates"""
        return _freeze(self.vertices[self.triangles])

    @cached_property
    def signed_areas(self) -> np.ndarray:
        x = self.vertices[self.triangles]
        e1 = x[:, 1] - x[:, 0]
        e2 = x[:, 2] - x[:, 0]
        return _freeze(0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]))

    @property
    def areas(self) -> np.ndarray:
        return self.signed_areas

    @cached_property
    def centroids(self) -> np.ndarray:
        return _freeze(self.vertices[self.triangles].mean(axis=1))

    @cached_property
    def side_lengths(self) -> np.ndarray:
        x = self.vertices[self.triangles]
        return _freeze(np.linalg.norm(x[:, [1, 2, 0]] - x, axis=2))

    @property
    def diameters(self) -> np.ndarray:
        return self.side_lengths.max(axis=1)

    @property
    def inradii(self) -> np.ndarray:
        return 2.0 * self.areas / self.side_lengths.sum(axis=1)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def ancestor_triangles(self, coarse: "Mesh") -> np.ndarray:
        """Index of the containing coarse triangle for every triangle of this mesh"""
        mapping = np.arange(self.n_triangles)
        mesh = self
        while mesh is not coarse:
            if mesh.parent is None:
                raise MeshNestingError(f"{coarse} is not an ancestor of {self}")
            mapping = mesh.parent_triangle[mapping]
            mesh = mesh.parent
        return mapping


def _canonicalize(vertices: np.ndarray, triangles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lexicographic vertex and triangle numbering; returns the triangle permutation applied"""
    vertex_order = np.lexsort((vertices[:, 1], vertices[:, 0]))
    rank = np.empty_like(vertex_order)
    rank[vertex_order] = np.arange(vertex_order.size)
    vertices = vertices[vertex_order]
    triangles = rank[triangles]

    centroids = vertices[triangles].mean(axis=1)
    triangle_order = np.lexsort((centroids[:, 1], centroids[:, 0]))
    triangles = triangles[triangle_order]

    # Start every counterclockwise triple at its lowest vertex index.
    shift = np.argmin(triangles, axis=1)
    rolled = (shift[:, None] + np.arange(3)[None, :]) % 3
    triangles = np.take_along_axis(triangles, rolled, axis=1)
    return vertices, triangles, triangle_order


def build_lshape(n: int) -> Mesh:
    """
    Structured triangulation of the L-shape (-1,1)^2 minus [0,1]^2.

    Each of the three unit squares is split into n x n cells of side 1/n and
    every cell into two triangles along its lower-left to upper-right
    diagonal, so the lines x=0 and y=0 are mesh lines at every level.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise MeshError(f"Cells per unit length must be a positive integer, got {n!r}")
    n = int(n)
    side = 2 * n + 1

    # Integer grid coordinates; ij-ordering is already lexicographic in (x, y).
    grid_i, grid_j = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    grid_i, grid_j = grid_i.ravel(), grid_j.ravel()
    keep = ~((grid_i > 0) & (grid_j > 0))
    vertex_id = np.full(side * side, -1, dtype=np.int64)
    vertex_id[keep] = np.arange(np.count_nonzero(keep))
    vertices = np.column_stack((grid_i[keep], grid_j[keep])) / n

    def vid(i, j):
        return vertex_id[(i + n) * side + (j + n)]

    cell_i, cell_j = np.meshgrid(np.arange(-n, n), np.arange(-n, n), indexing="ij")
    cell_i, cell_j = cell_i.ravel(), cell_j.ravel()
    in_domain = ~((cell_i >= 0) & (cell_j >= 0))
    ci, cj = cell_i[in_domain], cell_j[in_domain]
    ll, lr, ur, ul = vid(ci, cj), vid(ci + 1, cj), vid(ci + 1, cj + 1), vid(ci, cj + 1)
    triangles = np.concatenate((np.column_stack((ll, lr, ur)), np.column_stack((ll, ur, ul))))

    vertices, triangles, _ = _canonicalize(vertices, triangles)
    mesh = Mesh(vertices, triangles)
    logger.debug(f"Built L-shape mesh n={n}: {mesh}")
    return mesh


def refine_uniform(mesh: Mesh) -> Mesh:
    """Red refinement: every triangle is split into four congruent children through its edge midpoints"""
    n_vertices = mesh.n_vertices
    midpoints = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    vertices = np.vstack((mesh.vertices, midpoints))

    v0, v1, v2 = mesh.triangles.T
    m0, m1, m2 = (mesh.triangle_edges + n_vertices).T
    children = np.stack(
        (
            np.column_stack((v0, m2, m1)),
            np.column_stack((m2, v1, m0)),
            np.column_stack((m1, m0, v2)),
            np.column_stack((m0, m1, m2)),
        ),
        axis=1,
    ).reshape(-1, 3)
    parent_of = np.repeat(np.arange(mesh.n_triangles), 4)

    vertices, triangles, order = _canonicalize(vertices, children)
    fine = Mesh(vertices, triangles, level=mesh.level + 1, parent=mesh, parent_triangle=parent_of[order])
    logger.debug(f"Refined {mesh.n_triangles} -> {fine.n_triangles} triangles (level {fine.level})")
    return fine


def mesh_stats(mesh: Mesh) -> MeshStats:
    """Mesh size h (largest diameter) and shape regularity gamma = min rho_K / h_K"""
    diameters = mesh.diameters
    return MeshStats(h=float(diameters.max()), gamma=float((mesh.inradii / diameters).min()))
