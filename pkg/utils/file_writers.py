# utils/file_writers.py - VTK, CSV AND MATRIX OUTPUT

from pathlib import Path
from typing import Dict, Optional, Union

import meshio
import numpy as np
import pandas as pd
from loguru import logger
from scipy.sparse import coo_matrix

from elements.bdm1 import REFERENCE_VERTICES
from models.convergence import ConvergenceTable
from models.fields import PostprocessedPressure, SolutionState

PathLike = Union[str, Path]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _points_3d(points: np.ndarray) -> np.ndarray:
    return np.column_stack((points, np.zeros(points.shape[0])))


def _vectors_3d(vectors: np.ndarray) -> np.ndarray:
    return np.column_stack((vectors, np.zeros(vectors.shape[0])))


def _write_vtk(path: PathLike, mesh: meshio.Mesh) -> Path:
    path = _prepare(path)
    meshio.write(str(path), mesh, file_format="vtk42", binary=False)
    logger.debug(f"💾 Wrote {path}")
    return path


def write_mesh_vtk(mesh, path: PathLike) -> Path:
    """Triangulation only (POINTS and triangle CELLS)"""
    return _write_vtk(path, meshio.Mesh(_points_3d(mesh.vertices), [("triangle", np.asarray(mesh.triangles))]))


def write_solution_vtk(state: SolutionState, path: PathLike) -> Path:
    """P0 pressure and the velocity at the centroids as CELL_DATA"""
    mesh = state.mesh
    centroid = REFERENCE_VERTICES.mean(axis=0)[None, :]
    velocity = state.u.evaluate(centroid)[:, 0, :]
    cell_data: Dict[str, list] = {
        "pressure": [np.asarray(state.p.coefficients, dtype=float)],
        "velocity": [_vectors_3d(velocity)],
    }
    vtk_mesh = meshio.Mesh(
        _points_3d(mesh.vertices),
        [("triangle", np.asarray(mesh.triangles))],
        cell_data=cell_data,
    )
    return _write_vtk(path, vtk_mesh)


def write_postprocessed_vtk(pressure: PostprocessedPressure, path: PathLike) -> Path:
    """Discontinuous P1 pressure: three private points per cell carrying the corner values"""
    field = pressure.field
    mesh = field.mesh
    points = mesh.corner_coordinates.reshape(-1, 2)
    cells = np.arange(points.shape[0]).reshape(-1, 3)
    values = field.evaluate(REFERENCE_VERTICES).reshape(-1)
    vtk_mesh = meshio.Mesh(
        _points_3d(points),
        [("triangle", cells)],
        point_data={"p_tilde": values},
    )
    return _write_vtk(path, vtk_mesh)


def write_matrix_dump(matrix, path: PathLike) -> Path:
    """Coordinate text format, one 'row col value' line per stored entry"""
    path = _prepare(path)
    entries = coo_matrix(matrix)
    order = np.lexsort((entries.col, entries.row))
    with path.open("w", encoding="utf-8") as handle:
        handle.write(f"# {entries.shape[0]} {entries.shape[1]} {entries.nnz}\n")
        for row, col, value in zip(entries.row[order], entries.col[order], entries.data[order]):
            handle.write(f"{row} {col} {value:.17e}\n")
    logger.debug(f"💾 Wrote {entries.nnz} entries to {path}")
    return path


def write_energy_csv(recorder, path: PathLike, extra: Optional[Dict[str, list]] = None) -> Path:
    """Per-step log step,time,energy plus optional error columns of equal length"""
    path = _prepare(path)
    frame = pd.DataFrame({"step": recorder.steps, "time": recorder.times, "energy": recorder.energies})
    for name, column in (extra or {}).items():
        frame[name] = column
    frame.to_csv(path, index=False, float_format="%.12e", lineterminator="\n")
    return path


def write_table(table: ConvergenceTable, directory: PathLike, stem: str) -> Dict[str, Path]:
    """CSV and aligned text renderings of a convergence table"""
    directory = Path(directory)
    csv_path = table.to_csv(directory / f"{stem}.csv")
    text_path = _prepare(directory / f"{stem}.txt")
    text_path.write_text(table.to_text() + "\n", encoding="utf-8")
    logger.info(f"💾 Wrote {csv_path} and {text_path}")
    return {"csv": csv_path, "text": text_path}
