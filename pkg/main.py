# main.py - MIXEDWAVE COMMAND LINE ENTRY POINT

"""
Mixed BDM1-P0 solver for the acoustic wave system on the L-shape.

    python main.py run --case smooth --levels 4 --tau 0.001
    python main.py convergence --config configs/table1.cfg
    python main.py mesh-info --levels 1 2 4 8
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from analysis.studies import study_nonsmooth_h, study_nonsmooth_tau, study_smooth_h, study_smooth_tau
from config.settings import settings
from config.wave_problems import get_problem
from elements.dofmap import build_dofmap
from meshing.lshape import build_lshape, mesh_stats
from models.fields import TimeGrid
from models.run_config import RunConfig, StudyKind
from solvers.observers import EnergyRecorder, ErrorRecorder, HalfStepPostprocessor
from solvers.timestepper import Simulation
from utils.config_parser import parse_config
from utils.exceptions import ConfigError, MixedWaveError
from utils.file_writers import (
    write_energy_csv,
    write_matrix_dump,
    write_mesh_vtk,
    write_postprocessed_vtk,
    write_solution_vtk,
    write_table,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_ERROR = 3


def configure_logging(level: Optional[str] = None):
    logger.remove()
    logger.add(sys.stderr, level=(level or settings.LOG_LEVEL).upper())


def cmd_run(config: RunConfig) -> int:
    """Single simulation; writes final fields, energy log and matrices as requested"""
    problem = get_problem(config.case.value)
    mesh = build_lshape(config.level)
    grid = TimeGrid(final_time=config.final_time, steps=config.steps)
    stem = f"{problem.name}_n{config.level}_N{config.steps}"

    energy = EnergyRecorder()
    observers: List = [energy]
    errors = ErrorRecorder() if problem.has_exact_solution else None
    if errors is not None:
        observers.append(errors)
        postprocessor = errors.postprocessor
    else:
        postprocessor = HalfStepPostprocessor()
        observers.append(postprocessor)

    simulation = Simulation(problem, mesh, grid, observers)
    logger.info(f"▶️ {simulation.label}: {grid.steps} steps, {simulation.operator.size} unknowns")
    final_state = simulation.run_to_end()
    logger.info(f"✅ Reached t={final_state.time:.6f}; max relative energy drift {energy.max_relative_drift:.3e}")
    if errors is not None:
        logger.info(f"|||pi1 u - u_h||| = {errors.error_u:.6e}")
        logger.info(f"|||pi0 p - p_h||| = {errors.error_p:.6e}")
        logger.info(f"|||pi1 p - p~_h||| = {errors.error_pt:.6e}")

    output_dir = Path(config.output_dir)
    if config.export_fields:
        write_solution_vtk(final_state, output_dir / f"{stem}_fields.vtk")
        if postprocessor.latest is not None:
            write_postprocessed_vtk(postprocessor.latest, output_dir / f"{stem}_p_tilde.vtk")
    if config.export_energy:
        extra: Dict[str, list] = {}
        if errors is not None:
            extra = {
                "err_u": errors.errors_u,
                "err_p": errors.errors_p,
                "err_pt": [float("nan")] + errors.errors_pt,
            }
        write_energy_csv(energy, output_dir / f"{stem}_energy.csv", extra)
    if config.export_matrices:
        matrices = simulation.matrices
        write_matrix_dump(matrices.mass_p0, output_dir / f"{stem}_M_a.txt")
        write_matrix_dump(matrices.mass_bdm1, output_dir / f"{stem}_M_b.txt")
        write_matrix_dump(matrices.div, output_dir / f"{stem}_D.txt")
    return EXIT_OK


def cmd_convergence(config: RunConfig) -> int:
    """h- or tau-study; writes the table as CSV and text and prints it"""
    problem = get_problem(config.case.value)
    exact = problem.has_exact_solution
    if config.study is StudyKind.H_STUDY:
        study = study_smooth_h if exact else study_nonsmooth_h
        table = study(config.levels, config.tau, config.final_time, problem=problem, workers=config.workers)
    elif config.study is StudyKind.TAU_STUDY:
        study = study_smooth_tau if exact else study_nonsmooth_tau
        table = study(config.level, config.taus, config.final_time, problem=problem, workers=config.workers)
    else:
        raise ConfigError("study", "convergence needs study = h-study or tau-study")

    write_table(table, config.output_dir, f"{problem.name}_{config.study.value}")
    print(table.to_text())
    return EXIT_OK


def cmd_mesh_info(config: RunConfig) -> int:
    """Counts, mesh size and shape regularity for every requested level"""
    records = []
    for n in config.levels:
        mesh = build_lshape(n)
        stats = mesh_stats(mesh)
        dofmap = build_dofmap(mesh)
        records.append(
            {
                "n": n,
                "vertices": mesh.n_vertices,
                "edges": mesh.n_edges,
                "triangles": mesh.n_triangles,
                "boundary_edges": int(np.count_nonzero(mesh.boundary_edges)),
                "euler": mesh.euler_characteristic(),
                "h": f"{stats.h:.6f}",
                "gamma": f"{stats.gamma:.6f}",
                "bdm1_dofs": dofmap.n_bdm,
                "p0_dofs": dofmap.n_p0,
            }
        )
        if config.export_fields:
            write_mesh_vtk(mesh, Path(config.output_dir) / f"lshape_n{n}.vtk")
    print(pd.DataFrame.from_records(records).to_string(index=False))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "mesh-info": cmd_mesh_info}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixedwave", description="Mixed BDM1-P0 acoustic wave solver on the L-shape")
    parser.add_argument("--log-level", default=None, help="loguru level (default from settings)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", type=Path, help="key = value configuration file")
        sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
        sub.add_argument("--case")
        sub.add_argument("--study")
        sub.add_argument("--levels", nargs="+")
        sub.add_argument("--tau")
        sub.add_argument("-N", "--steps")
        sub.add_argument("-T", "--final-time", dest="final_time")
        sub.add_argument("--taus", nargs="+")
        sub.add_argument("--output-dir", dest="output_dir")
        sub.add_argument("--workers")
        for flag in ("export-fields", "export-energy", "export-matrices", "allow-deep-levels"):
            sub.add_argument(f"--{flag}", dest=flag.replace("-", "_"), action=argparse.BooleanOptionalAction, default=None)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, str]:
    """Flag values as raw strings keyed like the config file"""
    overrides: Dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(None, f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()

    direct = {
        "case": args.case,
        "study": args.study,
        "levels": " ".join(args.levels) if args.levels else None,
        "tau": args.tau,
        "steps": args.steps,
        "final_time": args.final_time,
        "taus": " ".join(args.taus) if args.taus else None,
        "output_dir": args.output_dir,
        "workers": args.workers,
        "export_fields": args.export_fields,
        "export_energy": args.export_energy,
        "export_matrices": args.export_matrices,
        "allow_deep_levels": args.allow_deep_levels,
    }
    for key, value in direct.items():
        if value is not None:
            overrides[key] = str(value).lower() if isinstance(value, bool) else str(value)
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        overrides = collect_overrides(args)
        if args.command == "mesh-info":
            overrides.setdefault("study", StudyKind.H_STUDY.value)
        elif args.command == "convergence" and "study" not in overrides and args.config is None:
            overrides["study"] = StudyKind.H_STUDY.value
        config = parse_config(args.config, overrides)
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    try:
        return COMMANDS[args.command](config)
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except MixedWaveError as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return EXIT_SOLVER_ERROR


if __name__ == "__main__":
    sys.exit(main())
