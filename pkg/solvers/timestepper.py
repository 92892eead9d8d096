# solvers/timestepper.py - CRANK-NICOLSON TIME INTEGRATION

"""
Crank-Nicolson for the mixed system

    M_a (p^n - p^{n-1}) / tau + D (u^n + u^{n-1}) / 2 = F^{n-1/2}
    M_b (u^n - u^{n-1}) / tau - D^T (p^n + p^{n-1}) / 2 = G^{n-1/2}

with F^{n-1/2}, G^{n-1/2} the averages of the endpoint loads. The block
matrix is factorised once per (mesh, tau) and reused for every step.
"""

import time
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from scipy.sparse import bmat, csr_matrix
from scipy.sparse.linalg import splu
from tqdm import tqdm

from config.settings import settings
from config.wave_problems import WaveProblem
from elements.dofmap import DofMap, build_dofmap
from models.fields import FieldBDM1, FieldP0, SolutionState, TimeGrid
from models.functions import ScalarFunction, VectorFunction
from solvers.assembly import ProblemCoefficients, SystemMatrices, assemble_load_bdm1, assemble_load_p0, assemble_system
from solvers.projections import interpolate_bdm1, project_p0
from utils.exceptions import SolverError


class LinearStepOperator:
    """Factorised Crank-Nicolson step matrix plus the matrix applied to the previous state"""

    def __init__(self, system: csr_matrix, history: csr_matrix, tau: float, n_p0: int, n_bdm: int):
        self.system = system
        self.history = history
        self.tau = tau
        self.n_p0 = n_p0
        self.n_bdm = n_bdm
        self.last_residual = 0.0
        try:
            self._lu = splu(system.tocsc(), permc_spec=settings.PERMC_SPEC)
        except RuntimeError as e:
            raise SolverError(f"Step matrix factorisation failed: {e}")

    @property
    def size(self) -> int:
        return self.n_p0 + self.n_bdm

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A x = rhs and enforce the residual contract"""
        rhs_norm = float(np.linalg.norm(rhs))
        if rhs_norm == 0.0:
            self.last_residual = 0.0
            return np.zeros_like(rhs)
        solution = self._lu.solve(rhs)
        residual = float(np.linalg.norm(self.system @ solution - rhs)) / rhs_norm
        self.last_residual = residual
        if not np.isfinite(residual) or residual > settings.SOLVE_RESIDUAL_TOL:
            raise SolverError(f"Relative solve residual {residual:.3e} exceeds {settings.SOLVE_RESIDUAL_TOL:.1e}")
        return solution

    def apply(self, previous: np.ndarray, load: np.ndarray) -> np.ndarray:
        """One step: solve A x^n = B x^{n-1} + load"""
        return self.solve(self.history @ previous + load)


def build_step_operator(M_a, M_b, D, tau: float, reverse: bool = False) -> LinearStepOperator:
    """
    Factorise [[M_a/tau, D/2], [-D^T/2, M_b/tau]].

    ``reverse`` builds the operator for stepping backwards in time (tau -> -tau).
    """
    if not tau > 0.0:
        raise ValueError(f"Time step must be positive, got {tau}")
    n_p0, n_bdm = M_a.shape[0], M_b.shape[0]
    if M_a.shape != (n_p0, n_p0) or M_b.shape != (n_bdm, n_bdm) or D.shape != (n_p0, n_bdm):
        raise ValueError(f"Inconsistent block shapes M_a {M_a.shape}, M_b {M_b.shape}, D {D.shape}")

    signed_tau = -tau if reverse else tau
    system = bmat([[M_a / signed_tau, 0.5 * D], [-0.5 * D.T, M_b / signed_tau]], format="csr")
    history = bmat([[M_a / signed_tau, -0.5 * D], [0.5 * D.T, M_b / signed_tau]], format="csr")
    started = time.perf_counter()
    operator = LinearStepOperator(system, history, signed_tau, n_p0, n_bdm)
    logger.debug(f"Factorised {operator.size}x{operator.size} step matrix in {time.perf_counter() - started:.3f}s")
    return operator


def pack_state(state: SolutionState) -> np.ndarray:
    return np.concatenate((state.p.coefficients, state.u.coefficients))


def unpack_state(vector: np.ndarray, like: SolutionState, step: int, t: float) -> SolutionState:
    n_p0 = like.p.coefficients.shape[0]
    return SolutionState(
        step=step,
        time=t,
        p=FieldP0(mesh=like.mesh, coefficients=vector[:n_p0]),
        u=FieldBDM1(dofmap=like.u.dofmap, coefficients=vector[n_p0:]),
    )


def init_state(p0: ScalarFunction, u0: VectorFunction, mesh, dofmap: Optional[DofMap] = None, t: float = 0.0) -> SolutionState:
    """p_h^0 = pi0 p0, u_h^0 = rho_h u0"""
    dofmap = dofmap or build_dofmap(mesh)
    return SolutionState(step=0, time=t, p=project_p0(p0, t, mesh), u=interpolate_bdm1(u0, t, mesh, dofmap))


def step_loads(f: Optional[ScalarFunction], g: Optional[VectorFunction], t: float, dofmap: DofMap) -> np.ndarray:
    """Stacked load vector [F(t); G(t)]"""
    mesh = dofmap.mesh
    return np.concatenate((assemble_load_p0(f, t, mesh, dofmap), assemble_load_bdm1(g, t, mesh, dofmap)))


def _advance(
    op: LinearStepOperator,
    state: SolutionState,
    f: Optional[ScalarFunction],
    g: Optional[VectorFunction],
    load_prev: Optional[np.ndarray] = None,
) -> Tuple[SolutionState, np.ndarray]:
    dofmap = state.u.dofmap
    t_next = state.time + op.tau
    if load_prev is None:
        load_prev = step_loads(f, g, state.time, dofmap)
    load_next = step_loads(f, g, t_next, dofmap)
    vector = op.apply(pack_state(state), 0.5 * (load_prev + load_next))
    next_step = state.step + 1 if op.tau > 0 else max(state.step - 1, 0)
    return unpack_state(vector, state, next_step, t_next), load_next


def step(
    op: LinearStepOperator,
    state: SolutionState,
    f: Optional[ScalarFunction] = None,
    g: Optional[VectorFunction] = None,
) -> SolutionState:
    """Advance (p, u) from t^{n-1} to t^n"""
    new_state, _ = _advance(op, state, f, g)
    return new_state


def discrete_energy(state: SolutionState, M_a, M_b) -> float:
    """E = (M_a p, p) + (M_b u, u)"""
    p = state.p.coefficients
    u = state.u.coefficients
    return float(p @ (M_a @ p) + u @ (M_b @ u))


class Simulation:
    """
    One Crank-Nicolson run that can be advanced a step at a time.

    Observers see every state transition; comparison studies drive two
    simulations side by side instead of storing trajectories.
    """

    def __init__(
        self,
        problem: WaveProblem,
        mesh,
        grid: TimeGrid,
        observers: Sequence[Any] = (),
        initial_state: Optional[SolutionState] = None,
        label: str = "",
    ):
        self.problem = problem
        self.mesh = mesh
        self.grid = grid
        self.label = label or f"{problem.name} {mesh} tau={grid.tau:.3e}"
        self.observers: List[Any] = list(observers)

        self.dofmap = initial_state.u.dofmap if initial_state is not None else build_dofmap(mesh)
        self.coefficients = ProblemCoefficients(a=problem.a, b=problem.b)
        self.matrices: SystemMatrices = assemble_system(self.coefficients, mesh, self.dofmap)
        self.operator = build_step_operator(
            self.matrices.mass_p0, self.matrices.mass_bdm1, self.matrices.div, grid.tau
        )
        self.state = initial_state or init_state(problem.p0, problem.u0, mesh, self.dofmap)
        self._load = None

        for observer in self.observers:
            observer.bind(self)
            observer.on_start(self.state)

    @property
    def finished(self) -> bool:
        return self.state.step >= self.grid.steps

    def energy(self) -> float:
        return discrete_energy(self.state, self.matrices.mass_p0, self.matrices.mass_bdm1)

    def advance(self) -> SolutionState:
        if self.finished:
            raise SolverError(f"{self.label}: already at T={self.grid.final_time}")
        previous = self.state
        self.state, self._load = _advance(self.operator, previous, self.problem.f, self.problem.g, self._load)
        # Nodes from the grid keep t^n = n tau free of accumulated round-off.
        self.state = self.state.model_copy(update={"time": self.grid.node(self.state.step)})
        for observer in self.observers:
            observer.on_step(previous, self.state, self.grid.tau)
        return self.state

    def run_to_end(self) -> SolutionState:
        steps = range(self.state.step, self.grid.steps)
        if settings.SHOW_PROGRESS:
            steps = tqdm(steps, desc=self.label, leave=False)
        for _ in steps:
            self.advance()
        return self.state


class RunResult(BaseModel):
    """Final state of a run together with the observers that watched it"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    final_state: SolutionState
    observers: List[Any] = Field(default_factory=list)
    steps: int = Field(ge=0)
    elapsed_seconds: float = Field(ge=0.0)
    last_residual: float = Field(default=0.0, description="Relative solve residual of the final step")


def run(problem: WaveProblem, mesh, grid: TimeGrid, observers: Sequence[Any] = ()) -> RunResult:
    """Integrate ``problem`` from 0 to T on ``mesh``"""
    started = time.perf_counter()
    simulation = Simulation(problem, mesh, grid, observers)
    logger.info(f"▶️ Running {simulation.label}: {grid.steps} steps, {simulation.operator.size} unknowns")
    final_state = simulation.run_to_end()
    elapsed = time.perf_counter() - started
    logger.info(f"✅ Finished {simulation.label} in {elapsed:.2f}s")
    return RunResult(
        final_state=final_state,
        observers=list(observers),
        steps=grid.steps,
        elapsed_seconds=elapsed,
        last_residual=simulation.operator.last_residual,
    )
