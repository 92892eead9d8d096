# solvers/assembly.py - SPARSE MASS, DIVERGENCE AND LOAD ASSEMBLY

from typing import NamedTuple, Optional, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from scipy.sparse import coo_matrix, csr_matrix

from config.settings import settings
from elements.bdm1 import reference_basis
from elements.dofmap import DofMap
from elements.piola import affine_maps
from elements.quadrature import quadrature
from models.functions import ScalarFunction, VectorFunction
from utils.exceptions import CoefficientError

DIV_ROUNDOFF = 1e-12


class ProblemCoefficients(BaseModel):
    """Time-independent, uniformly positive model parameters a and b"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: ScalarFunction = Field(description="Weight of dp/dt")
    b: ScalarFunction = Field(description="Weight of du/dt")

    def sample(self, name: str, points: np.ndarray) -> np.ndarray:
        """Evaluate a or b at points and enforce the positivity floor"""
        values = getattr(self, name).at_points(points, 0.0)
        low = float(values.min()) if values.size else 1.0
        if not np.all(np.isfinite(values)) or low < settings.COEFFICIENT_FLOOR:
            raise CoefficientError(f"Coefficient {name} must be uniformly positive (sampled minimum {low:.3e})")
        return values


class SystemMatrices(NamedTuple):
    mass_p0: csr_matrix
    mass_bdm1: csr_matrix
    div: csr_matrix


def _rule_on(mesh):
    rule = quadrature(settings.QUADRATURE_DEGREE)
    maps = affine_maps(mesh)
    return rule, maps, maps.to_physical(rule.points)


def _finalize(matrix) -> csr_matrix:
    matrix = matrix.tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


def assemble_mass_p0(coefficients: ProblemCoefficients, mesh, dofmap: DofMap) -> csr_matrix:
    """Diagonal M_a with entries int_K a dx"""
    rule, maps, points = _rule_on(mesh)
    a = coefficients.sample("a", points)
    entries = np.abs(maps.determinants) * (a @ rule.weights)
    matrix = coo_matrix((entries, (dofmap.p0_dofs, dofmap.p0_dofs)), shape=(dofmap.n_p0, dofmap.n_p0))
    return _finalize(matrix)


def assemble_mass_bdm1(coefficients: ProblemCoefficients, mesh, dofmap: DofMap) -> csr_matrix:
    """M_b = (b u, v) over the BDM1 space, from Piola-mapped 6x6 element blocks"""
    rule, maps, points = _rule_on(mesh)
    b = coefficients.sample("b", points)
    basis = reference_basis().values(rule.points)
    metric = np.einsum("kdi,kdj->kij", maps.jacobians, maps.jacobians)
    weighted = b * rule.weights[None, :]
    blocks = np.einsum("kq,qid,kde,qje->kij", weighted, basis, metric, basis) / np.abs(maps.determinants)[:, None, None]
    blocks *= dofmap.signs[:, :, None] * dofmap.signs[:, None, :]

    rows = np.broadcast_to(dofmap.bdm_dofs[:, :, None], blocks.shape)
    cols = np.broadcast_to(dofmap.bdm_dofs[:, None, :], blocks.shape)
    matrix = coo_matrix((blocks.ravel(), (rows.ravel(), cols.ravel())), shape=(dofmap.n_bdm, dofmap.n_bdm))
    return _finalize(matrix)


def assemble_div(mesh, dofmap: DofMap) -> csr_matrix:
    """D[q, v] = (div v, q); one row per triangle"""
    maps = affine_maps(mesh)
    # |K| div v = |det J| / 2 * div_hat / det J
    scale = 0.5 * np.sign(maps.determinants)
    entries = scale[:, None] * reference_basis().divergences[None, :] * dofmap.signs
    rows = np.broadcast_to(dofmap.p0_dofs[:, None], entries.shape)
    # linear-moment dofs are divergence free; drop their round-off entries
    keep = np.abs(entries) > DIV_ROUNDOFF * np.abs(entries).max(initial=0.0)
    matrix = coo_matrix((entries[keep], (rows[keep], dofmap.bdm_dofs[keep])), shape=(dofmap.n_p0, dofmap.n_bdm))
    return _finalize(matrix)


def assemble_load_p0(function: Optional[ScalarFunction], t: float, mesh, dofmap: DofMap) -> np.ndarray:
    """(f(t), q) for every P0 basis function; None means f = 0"""
    load = np.zeros(dofmap.n_p0)
    if function is None:
        return load
    rule, maps, points = _rule_on(mesh)
    values = function.at_points(points, t)
    load[dofmap.p0_dofs] = np.abs(maps.determinants) * (values @ rule.weights)
    return load


def assemble_load_bdm1(function: Optional[VectorFunction], t: float, mesh, dofmap: DofMap) -> np.ndarray:
    """(g(t), v) for every global BDM1 basis function; None means g = 0"""
    if function is None:
        return np.zeros(dofmap.n_bdm)
    rule, maps, points = _rule_on(mesh)
    values = function.at_points(points, t)
    basis = reference_basis().values(rule.points)
    # |det J| * g . (J phi_hat / det J)
    local = np.einsum("q,kqd,kde,qje->kj", rule.weights, values, maps.jacobians, basis)
    local *= np.sign(maps.determinants)[:, None] * dofmap.signs
    return np.bincount(dofmap.bdm_dofs.ravel(), weights=local.ravel(), minlength=dofmap.n_bdm)


def assemble_load(
    function: Optional[Union[ScalarFunction, VectorFunction]], t: float, mesh, dofmap: DofMap, space: str = "p0"
) -> np.ndarray:
    """Load vector against P0 (scalar data) or BDM1 (vector data) test functions"""
    if isinstance(function, VectorFunction) or (function is None and space == "bdm1"):
        return assemble_load_bdm1(function, t, mesh, dofmap)
    if isinstance(function, ScalarFunction) or function is None:
        return assemble_load_p0(function, t, mesh, dofmap)
    raise TypeError(f"Cannot assemble a load from {type(function).__name__}")


def assemble_system(coefficients: ProblemCoefficients, mesh, dofmap: DofMap) -> SystemMatrices:
    """M_a, M_b and D for one mesh"""
    matrices = SystemMatrices(
        mass_p0=assemble_mass_p0(coefficients, mesh, dofmap),
        mass_bdm1=assemble_mass_bdm1(coefficients, mesh, dofmap),
        div=assemble_div(mesh, dofmap),
    )
    logger.debug(
        f"Assembled system on {mesh}: M_a nnz={matrices.mass_p0.nnz}, "
        f"M_b nnz={matrices.mass_bdm1.nnz}, D nnz={matrices.div.nnz}"
    )
    return matrices
