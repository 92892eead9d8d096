# solvers/__init__.py - Assembly, time stepping and post-processing

from .assembly import ProblemCoefficients, assemble_div, assemble_load, assemble_mass_bdm1, assemble_mass_p0
from .projections import diff_norm_nested, interpolate_bdm1, project_p0, project_p1, restrict_p0, restrict_p1
from .timestepper import Simulation, build_step_operator, discrete_energy, init_state, run, step

__all__ = [
    'ProblemCoefficients', 'assemble_div', 'assemble_load', 'assemble_mass_bdm1', 'assemble_mass_p0',
    'diff_norm_nested', 'interpolate_bdm1', 'project_p0', 'project_p1', 'restrict_p0', 'restrict_p1',
    'Simulation', 'build_step_operator', 'discrete_energy', 'init_state', 'run', 'step',
]
