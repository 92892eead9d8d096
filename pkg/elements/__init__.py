# elements/__init__.py - Reference elements, quadrature and dof numbering

from .bdm1 import ReferenceBasisBDM1, bdm1_eval, reference_basis
from .dofmap import DofMap, build_dofmap
from .piola import AffineMaps, affine_maps, piola_map
from .quadrature import QuadratureRule, edge_gauss, quadrature

__all__ = [
    'ReferenceBasisBDM1', 'bdm1_eval', 'reference_basis',
    'DofMap', 'build_dofmap',
    'AffineMaps', 'affine_maps', 'piola_map',
    'QuadratureRule', 'edge_gauss', 'quadrature',
]
