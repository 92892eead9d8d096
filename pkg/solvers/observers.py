# solvers/observers.py - PER-STEP HOOKS FOR ENERGY, ERRORS AND POST-PROCESSING

from typing import Any, List, Optional

import numpy as np
from loguru import logger

from analysis.norms import tracking_norm
from models.fields import HalfStepContext, PostprocessedPressure, SolutionState
from solvers.postprocess import postprocess_halfstep
from solvers.projections import diff_norm_nested, project_p0, project_p1
from solvers.timestepper import discrete_energy


class StepObserver:
    """Base hook; a Simulation binds itself, then reports the start state and every step"""

    def __init__(self):
        self.simulation: Optional[Any] = None

    def bind(self, simulation):
        self.simulation = simulation

    def on_start(self, state: SolutionState):
        pass

    def on_step(self, prev: SolutionState, new: SolutionState, tau: float):
        pass


class EnergyRecorder(StepObserver):
    """Discrete energy (M_a p, p) + (M_b u, u) at every time node"""

    def __init__(self):
        super().__init__()
        self.steps: List[int] = []
        self.times: List[float] = []
        self.energies: List[float] = []

    def _record(self, state: SolutionState):
        matrices = self.simulation.matrices
        self.steps.append(state.step)
        self.times.append(state.time)
        self.energies.append(discrete_energy(state, matrices.mass_p0, matrices.mass_bdm1))

    def on_start(self, state: SolutionState):
        self._record(state)

    def on_step(self, prev: SolutionState, new: SolutionState, tau: float):
        self._record(new)

    @property
    def max_relative_drift(self) -> float:
        """max_n |E^n - E^0| / E^0 (absolute drift when E^0 = 0)"""
        if not self.energies:
            return 0.0
        energies = np.asarray(self.energies)
        scale = energies[0] if energies[0] > 0.0 else 1.0
        return float(np.max(np.abs(energies - energies[0])) / scale)


class HalfStepPostprocessor(StepObserver):
    """Reconstructs p~ at every half step; keeps the latest (and optionally all) reconstructions"""

    def __init__(self, keep_history: bool = False):
        super().__init__()
        self.keep_history = keep_history
        self.latest: Optional[PostprocessedPressure] = None
        self.history: List[PostprocessedPressure] = []

    def on_step(self, prev: SolutionState, new: SolutionState, tau: float):
        problem = self.simulation.problem
        context = HalfStepContext.from_states(prev, new, problem.g)
        self.latest = postprocess_halfstep(context, problem.b)
        if self.keep_history:
            self.history.append(self.latest)


class ErrorRecorder(StepObserver):
    """
    Tracks the errors against projections of the exact solution:
    ||pi1 u - u_h|| and ||pi0 p - p_h|| at every node (including t=0),
    ||pi1 p - p~_h|| at every half step.
    """

    def __init__(self, track_postprocessed: bool = True):
        super().__init__()
        self.postprocessor = HalfStepPostprocessor() if track_postprocessed else None
        self.errors_u: List[float] = []
        self.errors_p: List[float] = []
        self.errors_pt: List[float] = []
        self.half_times: List[float] = []

    def bind(self, simulation):
        super().bind(simulation)
        if not simulation.problem.has_exact_solution:
            raise ValueError(f"Problem '{simulation.problem.name}' has no exact solution to compare with")
        if self.postprocessor is not None:
            self.postprocessor.bind(simulation)

    def _record_nodes(self, state: SolutionState):
        problem = self.simulation.problem
        mesh = state.mesh
        self.errors_u.append(diff_norm_nested(project_p1(problem.exact_u, state.time, mesh), state.u))
        self.errors_p.append(diff_norm_nested(project_p0(problem.exact_p, state.time, mesh), state.p))

    def on_start(self, state: SolutionState):
        self._record_nodes(state)

    def on_step(self, prev: SolutionState, new: SolutionState, tau: float):
        self._record_nodes(new)
        if self.postprocessor is not None:
            self.postprocessor.on_step(prev, new, tau)
            reconstruction = self.postprocessor.latest
            reference = project_p1(self.simulation.problem.exact_p, reconstruction.time, new.mesh)
            self.errors_pt.append(diff_norm_nested(reconstruction.field, reference))
            self.half_times.append(reconstruction.time)
        logger.trace(f"Step {new.step}: err_u={self.errors_u[-1]:.3e} err_p={self.errors_p[-1]:.3e}")

    @property
    def error_u(self) -> float:
        return tracking_norm(self.errors_u)

    @property
    def error_p(self) -> float:
        return tracking_norm(self.errors_p)

    @property
    def error_pt(self) -> float:
        return tracking_norm(self.errors_pt) if self.errors_pt else float("nan")
