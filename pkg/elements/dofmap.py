# elements/dofmap.py - GLOBAL DOF NUMBERING FOR BDM1 AND P0

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from elements.bdm1 import REFERENCE_EDGE_ENDPOINTS


class DofMap(BaseModel):
    """
    Global numbering of BDM1 (two moments per edge) and P0 (one per triangle) dofs.

    ``signs`` relates the local dual basis of a triangle to the global basis:
    the flux moment flips with the normal orientation, the first-order
    moment additionally flips when the local edge parameterisation runs
    against the global one (lower to higher global vertex index).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mesh: Any = Field(description="Mesh the numbering belongs to")
    bdm_dofs: np.ndarray = Field(description="Global BDM1 dofs per triangle, shape (n_triangles, 6)")
    signs: np.ndarray = Field(description="Orientation signs of the local BDM1 dofs, shape (n_triangles, 6)")
    normal_signs: np.ndarray = Field(description="+1 where the outward normal equals the global edge normal")
    p0_dofs: np.ndarray = Field(description="Global P0 dof per triangle")
    n_bdm: int = Field(ge=0)
    n_p0: int = Field(ge=0)


def build_dofmap(mesh) -> DofMap:
    n_tri = mesh.n_triangles
    triangle_edges = mesh.triangle_edges
    owner = mesh.edge_triangles[triangle_edges, 0]
    normal_signs = np.where(owner == np.arange(n_tri)[:, None], 1, -1)

    local_ends = mesh.triangles[:, REFERENCE_EDGE_ENDPOINTS]
    direction = np.where(local_ends[..., 0] < local_ends[..., 1], 1, -1)

    bdm_dofs = np.stack((2 * triangle_edges, 2 * triangle_edges + 1), axis=2).reshape(n_tri, 6)
    signs = np.stack((normal_signs, normal_signs * direction), axis=2).reshape(n_tri, 6).astype(float)

    for array in (bdm_dofs, signs, normal_signs):
        array.setflags(write=False)
    return DofMap(
        mesh=mesh,
        bdm_dofs=bdm_dofs,
        signs=signs,
        normal_signs=normal_signs,
        p0_dofs=np.arange(n_tri),
        n_bdm=2 * mesh.n_edges,
        n_p0=n_tri,
    )
