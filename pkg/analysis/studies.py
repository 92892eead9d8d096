# analysis/studies.py - MESH-SIZE AND TIME-STEP CONVERGENCE STUDIES

"""
Drivers for the four convergence studies:

- smooth solution, errors against projections of the exact solution, vs h and vs tau;
- non-smooth solution, errors against the solution on the next finer mesh
  (vs h) or with half the time step (vs tau).

Rows are independent and may run in worker threads; the table is always
assembled in input order.
"""

import asyncio
from typing import Callable, List, NamedTuple, Optional, Sequence

from loguru import logger

from config.settings import settings
from config.wave_problems import NonsmoothTestCase, SmoothTestCase, WaveProblem
from meshing.lshape import build_lshape, refine_uniform
from models.convergence import ConvergenceTable
from models.fields import TimeGrid
from solvers.observers import EnergyRecorder, ErrorRecorder, HalfStepPostprocessor
from solvers.projections import diff_norm_nested, restrict_p0, restrict_p1
from solvers.timestepper import Simulation
from utils.exceptions import AnalysisError


class RowErrors(NamedTuple):
    err_u: float
    err_p: float
    err_pt: float
    energy_drift: float


async def _gather_rows(jobs: Sequence[Callable[[], RowErrors]], workers: int) -> List[RowErrors]:
    semaphore = asyncio.Semaphore(max(1, workers))

    async def run_one(job):
        async with semaphore:
            return await asyncio.to_thread(job)

    results = await asyncio.gather(*(run_one(job) for job in jobs), return_exceptions=True)
    for result in results:
        if isinstance(result, BaseException):
            raise result
    return list(results)


def run_rows(jobs: Sequence[Callable[[], RowErrors]], workers: Optional[int] = None) -> List[RowErrors]:
    """Run study rows concurrently (bounded by ``workers``), results in job order"""
    workers = settings.MAX_WORKERS if workers is None else workers
    if workers <= 1:
        return [job() for job in jobs]
    return asyncio.run(_gather_rows(jobs, workers))


def _check_levels(levels: Sequence[int]):
    if not levels:
        raise AnalysisError("A study needs at least one level")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise AnalysisError(f"Levels must be strictly increasing, got {list(levels)}")


def _check_taus(taus: Sequence[float]):
    if not taus:
        raise AnalysisError("A study needs at least one time step")
    if any(tau <= 0.0 for tau in taus) or any(b >= a for a, b in zip(taus, taus[1:])):
        raise AnalysisError(f"Time steps must be positive and strictly decreasing, got {list(taus)}")


def _table(title: str, param_name: str, params: Sequence[float], rows: List[RowErrors]) -> ConvergenceTable:
    table = ConvergenceTable.from_errors(
        title,
        param_name,
        params,
        [row.err_u for row in rows],
        [row.err_p for row in rows],
        [row.err_pt for row in rows],
        max_energy_drift=max((row.energy_drift for row in rows), default=0.0),
    )
    logger.info(f"📊 {title}: {len(rows)} rows, max energy drift {table.max_energy_drift:.2e}")
    return table


# ---------------------------------------------------------------------------
# Errors against the exact solution
# ---------------------------------------------------------------------------


def exact_error_row(problem: WaveProblem, n: int, tau: float, final_time: float) -> RowErrors:
    """One run tracking |||pi1 u - u_h|||, |||pi0 p - p_h|||, |||pi1 p - p~_h|||"""
    mesh = build_lshape(n)
    grid = TimeGrid.from_tau(final_time, tau, settings.CLOCK_TOL)
    errors = ErrorRecorder()
    energy = EnergyRecorder()
    Simulation(problem, mesh, grid, [errors, energy], label=f"{problem.name} n={n} tau={tau:g}").run_to_end()
    row = RowErrors(errors.error_u, errors.error_p, errors.error_pt, energy.max_relative_drift)
    logger.info(f"Row n={n} tau={tau:g}: u {row.err_u:.4e}  p {row.err_p:.4e}  p~ {row.err_pt:.4e}")
    return row


def study_smooth_h(
    levels: Sequence[int],
    tau: float,
    final_time: float = 1.0,
    problem: Optional[WaveProblem] = None,
    workers: Optional[int] = None,
) -> ConvergenceTable:
    """Errors vs mesh size h = 1/n at fixed tau"""
    _check_levels(levels)
    problem = problem or SmoothTestCase()
    jobs = [lambda n=n: exact_error_row(problem, n, tau, final_time) for n in levels]
    rows = run_rows(jobs, workers)
    return _table(f"{problem.name} h-study (tau={tau:g})", "h", [1.0 / n for n in levels], rows)


def study_smooth_tau(
    n: int,
    taus: Sequence[float],
    final_time: float = 1.0,
    problem: Optional[WaveProblem] = None,
    workers: Optional[int] = None,
) -> ConvergenceTable:
    """Errors vs time step on the fixed mesh h = 1/n"""
    _check_taus(taus)
    problem = problem or SmoothTestCase()
    jobs = [lambda tau=tau: exact_error_row(problem, n, tau, final_time) for tau in taus]
    rows = run_rows(jobs, workers)
    return _table(f"{problem.name} tau-study (h=1/{n})", "tau", list(taus), rows)


# ---------------------------------------------------------------------------
# Errors against a finer reference run
# ---------------------------------------------------------------------------


def _observed(problem: WaveProblem, mesh, grid: TimeGrid, label: str):
    postprocessor = HalfStepPostprocessor()
    energy = EnergyRecorder()
    simulation = Simulation(problem, mesh, grid, [postprocessor, energy], label=label)
    return simulation, postprocessor, energy


def nested_mesh_row(problem: WaveProblem, n: int, tau: float, final_time: float) -> RowErrors:
    """Run on h = 1/n and its uniform refinement side by side and track their distance"""
    coarse_mesh = build_lshape(n)
    fine_mesh = refine_uniform(coarse_mesh)
    grid = TimeGrid.from_tau(final_time, tau, settings.CLOCK_TOL)
    coarse, coarse_pp, coarse_energy = _observed(problem, coarse_mesh, grid, f"{problem.name} n={n}")
    fine, fine_pp, fine_energy = _observed(problem, fine_mesh, grid, f"{problem.name} n={2 * n}")

    err_u = diff_norm_nested(fine.state.u, coarse.state.u)
    err_p = diff_norm_nested(restrict_p0(fine.state.p, coarse_mesh), coarse.state.p)
    err_pt = 0.0
    while not coarse.finished:
        coarse.advance()
        fine.advance()
        err_u = max(err_u, diff_norm_nested(fine.state.u, coarse.state.u))
        err_p = max(err_p, diff_norm_nested(restrict_p0(fine.state.p, coarse_mesh), coarse.state.p))
        reference = restrict_p1(fine_pp.latest.field, coarse_mesh)
        err_pt = max(err_pt, diff_norm_nested(reference, coarse_pp.latest.field))

    drift = max(coarse_energy.max_relative_drift, fine_energy.max_relative_drift)
    logger.info(f"Row n={n} vs {2 * n}: u {err_u:.4e}  p {err_p:.4e}  p~ {err_pt:.4e}")
    return RowErrors(err_u, err_p, err_pt, drift)


def halved_step_row(problem: WaveProblem, n: int, tau: float, final_time: float) -> RowErrors:
    """
    Run with tau and tau/2 on one mesh and track their distance at the common nodes.

    The coarse half step t^{n-1/2} lies between two fine half steps; p~ is
    compared with the average of those two fine reconstructions.
    """
    mesh = build_lshape(n)
    coarse_grid = TimeGrid.from_tau(final_time, tau, settings.CLOCK_TOL)
    fine_grid = TimeGrid(final_time=final_time, steps=2 * coarse_grid.steps)
    coarse, coarse_pp, coarse_energy = _observed(problem, mesh, coarse_grid, f"{problem.name} tau={tau:g}")
    fine, fine_pp, fine_energy = _observed(problem, mesh, fine_grid, f"{problem.name} tau={tau / 2:g}")

    err_u = diff_norm_nested(fine.state.u, coarse.state.u)
    err_p = diff_norm_nested(fine.state.p, coarse.state.p)
    err_pt = 0.0
    while not coarse.finished:
        coarse.advance()
        fine.advance()
        first_half = fine_pp.latest.field
        fine.advance()
        reference = 0.5 * (first_half + fine_pp.latest.field)
        err_u = max(err_u, diff_norm_nested(fine.state.u, coarse.state.u))
        err_p = max(err_p, diff_norm_nested(fine.state.p, coarse.state.p))
        err_pt = max(err_pt, diff_norm_nested(reference, coarse_pp.latest.field))

    drift = max(coarse_energy.max_relative_drift, fine_energy.max_relative_drift)
    logger.info(f"Row tau={tau:g} vs {tau / 2:g}: u {err_u:.4e}  p {err_p:.4e}  p~ {err_pt:.4e}")
    return RowErrors(err_u, err_p, err_pt, drift)


def study_nonsmooth_h(
    levels: Sequence[int],
    tau: float,
    final_time: float = 1.0,
    problem: Optional[WaveProblem] = None,
    workers: Optional[int] = None,
) -> ConvergenceTable:
    """Distance to the solution on the next finer mesh vs h = 1/n"""
    _check_levels(levels)
    problem = problem or NonsmoothTestCase()
    jobs = [lambda n=n: nested_mesh_row(problem, n, tau, final_time) for n in levels]
    rows = run_rows(jobs, workers)
    return _table(f"{problem.name} h-study vs h/2 (tau={tau:g})", "h", [1.0 / n for n in levels], rows)


def study_nonsmooth_tau(
    n: int,
    taus: Sequence[float],
    final_time: float = 1.0,
    problem: Optional[WaveProblem] = None,
    workers: Optional[int] = None,
) -> ConvergenceTable:
    """Distance to the solution with time step tau/2 vs tau on the fixed mesh h = 1/n"""
    _check_taus(taus)
    problem = problem or NonsmoothTestCase()
    jobs = [lambda tau=tau: halved_step_row(problem, n, tau, final_time) for tau in taus]
    rows = run_rows(jobs, workers)
    return _table(f"{problem.name} tau-study vs tau/2 (h=1/{n})", "tau", list(taus), rows)
