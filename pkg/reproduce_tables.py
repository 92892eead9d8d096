# reproduce_tables.py - BATCH DRIVER FOR THE FOUR CONVERGENCE TABLES

import argparse
import sys
import time
from pathlib import Path
from typing import Callable, Dict

from loguru import logger

from analysis.studies import study_nonsmooth_h, study_nonsmooth_tau, study_smooth_h, study_smooth_tau
from config.settings import settings
from models.convergence import ConvergenceTable
from utils.file_writers import write_table

TAU_LEVELS = [2.0 ** -k for k in range(2, 6)]


def desk_scale_tables(quick: bool, workers: int) -> Dict[str, Callable[[], ConvergenceTable]]:
    """Table name -> study call; ``quick`` stops one level earlier everywhere"""
    levels = [4, 8, 16] if quick else [4, 8, 16, 32]
    nested_levels = [4, 8] if quick else [4, 8, 16]
    fixed_n = 16 if quick else 32
    tau = 1e-2 if quick else 1e-3
    return {
        "table1_smooth_h": lambda: study_smooth_h(levels, tau, workers=workers),
        "table2_smooth_tau": lambda: study_smooth_tau(fixed_n, TAU_LEVELS, workers=workers),
        "table3_nonsmooth_h": lambda: study_nonsmooth_h(nested_levels, tau, workers=workers),
        "table4_nonsmooth_tau": lambda: study_nonsmooth_tau(fixed_n, TAU_LEVELS, workers=workers),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description="Reproduce the smooth and non-smooth convergence tables")
    parser.add_argument("--output-dir", type=Path, default=settings.OUTPUTS_DIR / "tables")
    parser.add_argument("--quick", action="store_true", help="coarser levels and tau = 1/100")
    parser.add_argument("--workers", type=int, default=settings.MAX_WORKERS)
    parser.add_argument("--only", nargs="+", help="subset of table names")
    args = parser.parse_args()

    tables = desk_scale_tables(args.quick, args.workers)
    selected = args.only or list(tables)
    unknown = [name for name in selected if name not in tables]
    if unknown:
        logger.error(f"❌ Unknown tables: {unknown}; choose from {list(tables)}")
        return 2

    for name in selected:
        started = time.perf_counter()
        logger.info(f"🚀 Computing {name}")
        table = tables[name]()
        write_table(table, args.output_dir, name)
        print(table.to_text())
        print()
        logger.info(f"✅ {name} done in {time.perf_counter() - started:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
