# config/wave_problems.py - ACOUSTIC WAVE TEST PROBLEMS

"""
Problem data for a dp/dt + div u = f, b du/dt + grad p = g on the L-shape
with p = 0 on the boundary. All numerical tests use a = 2, b = 1 and T = 1.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from models.functions import ScalarFunction, Smoothness, VectorFunction

PI = np.pi


class ProblemName(str, Enum):
    """Supported test problems"""
    SMOOTH = "smooth"
    NONSMOOTH = "nonsmooth"
    MANUFACTURED = "manufactured"
    STATIC = "static"
    ZERO = "zero"


class WaveProblem(BaseModel):
    """Coefficients, right-hand sides, initial data and (when known) the exact solution"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    a: ScalarFunction = Field(default_factory=lambda: ScalarFunction.constant(2.0))
    b: ScalarFunction = Field(default_factory=lambda: ScalarFunction.constant(1.0))
    f: Optional[ScalarFunction] = Field(default=None, description="None means f = 0")
    g: Optional[VectorFunction] = Field(default=None, description="None means g = 0")
    p0: ScalarFunction = Field(default_factory=ScalarFunction.zero)
    u0: VectorFunction = Field(default_factory=VectorFunction.zero)
    final_time: float = Field(default=1.0, gt=0.0)

    # Exact solution and derivatives, used for reference projections and identity checks
    exact_p: Optional[ScalarFunction] = None
    exact_u: Optional[VectorFunction] = None
    exact_p_dt: Optional[ScalarFunction] = None
    exact_u_dt: Optional[VectorFunction] = None
    exact_div_u: Optional[ScalarFunction] = None
    exact_grad_p: Optional[VectorFunction] = None

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_p is not None and self.exact_u is not None

    def pde_residuals(self, x, y, t) -> Tuple[np.ndarray, np.ndarray]:
        """Pointwise residuals of both equations for the exact solution"""
        required = (self.exact_p_dt, self.exact_u_dt, self.exact_div_u, self.exact_grad_p)
        if any(item is None for item in required):
            raise ValueError(f"Problem '{self.name}' has no analytic derivatives")
        f = 0.0 if self.f is None else self.f(x, y, t)
        g = 0.0 if self.g is None else self.g(x, y, t)
        first = self.a(x, y, t) * self.exact_p_dt(x, y, t) + self.exact_div_u(x, y, t) - f
        second = self.b(x, y, t)[..., None] * self.exact_u_dt(x, y, t) + self.exact_grad_p(x, y, t) - g
        return first, second


def _psi(x, y):
    return np.sin(PI * x) * np.sin(PI * y)


def _grad_psi(x, y):
    return PI * np.stack((np.cos(PI * x) * np.sin(PI * y), np.sin(PI * x) * np.cos(PI * y)), axis=-1)


def _position(x, y):
    return np.stack(np.broadcast_arrays(x, y), axis=-1)


def _bubble(x, y):
    """Polynomial vanishing on the whole L-shape boundary (and on x=0, y=0)"""
    return x * y * (1.0 - x ** 2) * (1.0 - y ** 2)


def _grad_bubble(x, y):
    return np.stack((y * (1.0 - y ** 2) * (1.0 - 3.0 * x ** 2), x * (1.0 - x ** 2) * (1.0 - 3.0 * y ** 2)), axis=-1)


class SmoothTestCase(WaveProblem):
    """p = sin(pi x) sin(pi y) cos(pi t), u = -(cos(pi x) sin(pi y), sin(pi x) cos(pi y)) sin(pi t)"""

    name: str = ProblemName.SMOOTH.value
    p0: ScalarFunction = Field(default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: _psi(x, y), name="p0"))
    exact_p: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: _psi(x, y) * np.cos(PI * t), name="p")
    )
    exact_u: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: -_grad_psi(x, y) / PI * np.sin(PI * t), name="u")
    )
    exact_p_dt: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: -PI * _psi(x, y) * np.sin(PI * t))
    )
    exact_u_dt: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: -_grad_psi(x, y) * np.cos(PI * t), name="du/dt")
    )
    exact_div_u: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: 2.0 * PI * _psi(x, y) * np.sin(PI * t))
    )
    exact_grad_p: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _grad_psi(x, y) * np.cos(PI * t))
    )


def _kinked_p0(x, y, t):
    return np.where((x <= 0.0) & (y <= 0.0), _psi(x, y), 0.0)


class NonsmoothTestCase(WaveProblem):
    """u0 = 0 and p0 = sin(pi x) sin(pi y) on [-1,0]^2, zero elsewhere (kinks on x=0 and y=0)"""

    name: str = ProblemName.NONSMOOTH.value
    p0: ScalarFunction = Field(
        default_factory=lambda: ScalarFunction(
            evaluator=_kinked_p0, smoothness=Smoothness.PIECEWISE_AXIS_ALIGNED, name="p0"
        )
    )


class ManufacturedTestCase(WaveProblem):
    """
    Solution linear in time: p = t psi, u = t (x, y), psi = xy(1 - x^2)(1 - y^2).

    With f = 2 psi + 2t and g = (x, y) + t grad psi every load integrand is a
    polynomial the quadrature integrates exactly, so the discrete solution is
    (t pi0 psi, t (x, y)) and Crank-Nicolson reproduces it for every time step.
    """

    name: str = ProblemName.MANUFACTURED.value
    f: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: 2.0 * _bubble(x, y) + 2.0 * t, name="f")
    )
    g: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _position(x, y) + t * _grad_bubble(x, y), name="g")
    )
    exact_p: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: t * _bubble(x, y), name="p")
    )
    exact_u: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: t * _position(x, y), name="u")
    )
    exact_p_dt: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: _bubble(x, y))
    )
    exact_u_dt: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _position(x, y), name="du/dt")
    )
    exact_div_u: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: 2.0 * t + 0.0 * x)
    )
    exact_grad_p: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: t * _grad_bubble(x, y))
    )


class StaticTestCase(WaveProblem):
    """Steady state p = xy(1 - x^2)(1 - y^2), u = (x, y) with f = 2 and g = grad p"""

    name: str = ProblemName.STATIC.value
    f: Optional[ScalarFunction] = Field(default_factory=lambda: ScalarFunction.constant(2.0, name="f"))
    g: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _grad_bubble(x, y), name="g")
    )
    p0: ScalarFunction = Field(default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: _bubble(x, y), name="p0"))
    u0: VectorFunction = Field(default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _position(x, y), name="u0"))
    exact_p: Optional[ScalarFunction] = Field(
        default_factory=lambda: ScalarFunction(evaluator=lambda x, y, t: _bubble(x, y), name="p")
    )
    exact_u: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _position(x, y), name="u")
    )
    exact_p_dt: Optional[ScalarFunction] = Field(default_factory=ScalarFunction.zero)
    exact_u_dt: Optional[VectorFunction] = Field(default_factory=VectorFunction.zero)
    exact_div_u: Optional[ScalarFunction] = Field(default_factory=lambda: ScalarFunction.constant(2.0))
    exact_grad_p: Optional[VectorFunction] = Field(
        default_factory=lambda: VectorFunction(evaluator=lambda x, y, t: _grad_bubble(x, y))
    )


class ZeroTestCase(WaveProblem):
    """All data zero; the discrete trajectory stays zero"""

    name: str = ProblemName.ZERO.value
    exact_p: Optional[ScalarFunction] = Field(default_factory=ScalarFunction.zero)
    exact_u: Optional[VectorFunction] = Field(default_factory=VectorFunction.zero)


PROBLEMS = {
    ProblemName.SMOOTH: SmoothTestCase,
    ProblemName.NONSMOOTH: NonsmoothTestCase,
    ProblemName.MANUFACTURED: ManufacturedTestCase,
    ProblemName.STATIC: StaticTestCase,
    ProblemName.ZERO: ZeroTestCase,
}


def get_problem(name: str) -> WaveProblem:
    """Instantiate a test problem by name"""
    try:
        return PROBLEMS[ProblemName(name)]()
    except ValueError:
        raise ValueError(f"Unknown test problem: {name}")
