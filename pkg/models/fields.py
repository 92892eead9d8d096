# models/fields.py - DISCRETE FIELDS AND SOLUTION SNAPSHOTS

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from elements.bdm1 import reference_basis
from elements.dofmap import DofMap
from elements.piola import affine_maps
from models.functions import VectorFunction


def _as_frozen_array(value) -> np.ndarray:
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


class _DiscreteField(BaseModel):
    """Coefficient vector over a dof layout; supports linear combinations of like fields"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coefficients: np.ndarray

    @field_validator("coefficients", mode="before")
    @classmethod
    def _freeze_coefficients(cls, value):
        return _as_frozen_array(value)

    def _like(self, coefficients: np.ndarray) -> "_DiscreteField":
        return self.model_copy(update={"coefficients": _as_frozen_array(coefficients)})

    def _check_compatible(self, other: "_DiscreteField"):
        if type(other) is not type(self) or other.mesh is not self.mesh or other.coefficients.shape != self.coefficients.shape:
            raise ValueError(f"Cannot combine {type(self).__name__} with {type(other).__name__} on a different layout")

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.coefficients + other.coefficients)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.coefficients - other.coefficients)

    def __mul__(self, scalar: float):
        return self._like(float(scalar) * self.coefficients)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return self._like(self.coefficients / float(scalar))

    def evaluate(self, ref_points: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        """Values at reference points (q, 2) shared by all cells or (K, q, 2) per selected cell"""
        raise NotImplementedError


class FieldP0(_DiscreteField):
    """Elementwise constant scalar field (the discrete pressure space)"""

    mesh: Any = Field(description="Mesh the field lives on")

    @model_validator(mode="after")
    def _check_length(self):
        if self.coefficients.shape != (self.mesh.n_triangles,):
            raise ValueError(f"P0 field needs {self.mesh.n_triangles} coefficients, got {self.coefficients.shape}")
        return self

    @classmethod
    def zeros(cls, mesh) -> "FieldP0":
        return cls(mesh=mesh, coefficients=np.zeros(mesh.n_triangles))

    def evaluate(self, ref_points: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        values = self.coefficients if cells is None else self.coefficients[cells]
        n_points = np.shape(ref_points)[-2]
        return np.repeat(values[:, None], n_points, axis=1)

    def element_means(self) -> np.ndarray:
        return np.array(self.coefficients)


class FieldP1(_DiscreteField):
    """
    Elementwise linear field in the centroid-centred basis {1, x - x_c, y - y_c}.

    Coefficients have shape (n_triangles, 3) for scalars and
    (n_triangles, 3, 2) for componentwise vector fields.
    """

    mesh: Any = Field(description="Mesh the field lives on")

    @model_validator(mode="after")
    def _check_length(self):
        shape = self.coefficients.shape
        if shape[:2] != (self.mesh.n_triangles, 3) or len(shape) not in (2, 3) or (len(shape) == 3 and shape[2] != 2):
            raise ValueError(f"P1 field needs ({self.mesh.n_triangles}, 3[, 2]) coefficients, got {shape}")
        return self

    @property
    def is_vector(self) -> bool:
        return self.coefficients.ndim == 3

    def evaluate(self, ref_points: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        mesh = self.mesh
        points = affine_maps(mesh).to_physical(ref_points, cells)
        centroids = mesh.centroids if cells is None else mesh.centroids[cells]
        offsets = points - centroids[:, None, :]
        coefficients = self.coefficients if cells is None else self.coefficients[cells]
        if self.is_vector:
            return (
                coefficients[:, None, 0, :]
                + offsets[..., 0, None] * coefficients[:, None, 1, :]
                + offsets[..., 1, None] * coefficients[:, None, 2, :]
            )
        return coefficients[:, None, 0] + offsets[..., 0] * coefficients[:, None, 1] + offsets[..., 1] * coefficients[:, None, 2]

    def element_means(self) -> np.ndarray:
        return np.array(self.coefficients[:, 0])


class FieldBDM1(_DiscreteField):
    """H(div)-conforming piecewise linear velocity, one coefficient per global BDM1 dof"""

    dofmap: DofMap

    @model_validator(mode="after")
    def _check_length(self):
        if self.coefficients.shape != (self.dofmap.n_bdm,):
            raise ValueError(f"BDM1 field needs {self.dofmap.n_bdm} coefficients, got {self.coefficients.shape}")
        return self

    @property
    def mesh(self):
        return self.dofmap.mesh

    @classmethod
    def zeros(cls, dofmap: DofMap) -> "FieldBDM1":
        return cls(dofmap=dofmap, coefficients=np.zeros(dofmap.n_bdm))

    def local_coefficients(self, cells: Optional[np.ndarray] = None) -> np.ndarray:
        dofs = self.dofmap.bdm_dofs if cells is None else self.dofmap.bdm_dofs[cells]
        signs = self.dofmap.signs if cells is None else self.dofmap.signs[cells]
        return self.coefficients[dofs] * signs

    def evaluate(self, ref_points: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
        local = self.local_coefficients(cells)
        basis = reference_basis().values(ref_points)
        if basis.ndim == 3:
            reference_vectors = np.einsum("kj,qjd->kqd", local, basis)
        else:
            reference_vectors = np.einsum("kj,kqjd->kqd", local, basis)
        return affine_maps(self.mesh).piola(reference_vectors, cells)

    def divergence(self) -> np.ndarray:
        """Elementwise constant divergence, shape (n_triangles,)"""
        local = self.local_coefficients()
        return local @ reference_basis().divergences / affine_maps(self.mesh).determinants


class SolutionState(BaseModel):
    """Snapshot (t^n, p_h^n, u_h^n) of the discrete evolution"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    step: int = Field(ge=0, description="Step index n")
    time: float = Field(description="t^n")
    p: FieldP0
    u: FieldBDM1

    @model_validator(mode="after")
    def _same_mesh(self):
        if self.p.mesh is not self.u.mesh:
            raise ValueError("Pressure and velocity must live on the same mesh")
        return self

    @property
    def mesh(self):
        return self.p.mesh


class TimeGrid(BaseModel):
    """Uniform grid t^n = n tau, tau = T / N"""

    model_config = ConfigDict(frozen=True)

    final_time: float = Field(gt=0.0, description="T")
    steps: int = Field(ge=1, description="N")

    @property
    def tau(self) -> float:
        return self.final_time / self.steps

    def node(self, n: int) -> float:
        return n * self.tau

    def half_node(self, n: int) -> float:
        """t^{n-1/2}"""
        return (n - 0.5) * self.tau

    def nodes(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.tau

    @classmethod
    def from_tau(cls, final_time: float, tau: float, tolerance: float = 1e-12) -> "TimeGrid":
        if tau <= 0.0:
            raise ValueError(f"Time step must be positive, got {tau}")
        steps = int(round(final_time / tau))
        if steps < 1 or abs(steps * tau - final_time) > tolerance:
            raise ValueError(f"T={final_time} is not an integer multiple of tau={tau}")
        return cls(final_time=final_time, steps=steps)


class HalfStepContext(BaseModel):
    """Data of one Crank-Nicolson step needed to post-process at t^{n-1/2}"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u_prev: FieldBDM1
    u_next: FieldBDM1
    p_prev: FieldP0
    p_next: FieldP0
    tau: float = Field(gt=0.0)
    t_prev: float = Field(default=0.0, description="t^{n-1}")
    g: Optional[VectorFunction] = Field(default=None, description="Right-hand side g; None means zero")

    @model_validator(mode="after")
    def _same_mesh(self):
        mesh = self.u_prev.mesh
        if any(field.mesh is not mesh for field in (self.u_next, self.p_prev, self.p_next)):
            raise ValueError("All half-step fields must live on one mesh")
        return self

    @property
    def t_next(self) -> float:
        return self.t_prev + self.tau

    @property
    def t_half(self) -> float:
        return self.t_prev + 0.5 * self.tau

    @classmethod
    def from_states(cls, prev: SolutionState, new: SolutionState, g: Optional[VectorFunction] = None) -> "HalfStepContext":
        return cls(
            u_prev=prev.u,
            u_next=new.u,
            p_prev=prev.p,
            p_next=new.p,
            tau=new.time - prev.time,
            t_prev=prev.time,
            g=g,
        )


class PostprocessedPressure(BaseModel):
    """Elementwise P1 pressure reconstruction labelled with its time"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    field: FieldP1
    time: float
