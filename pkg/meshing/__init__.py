# meshing/__init__.py - Triangulations of the L-shaped domain

from .lshape import Mesh, MeshStats, build_lshape, mesh_stats, refine_uniform

__all__ = ['Mesh', 'MeshStats', 'build_lshape', 'mesh_stats', 'refine_uniform']
