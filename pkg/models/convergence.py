# models/convergence.py - CONVERGENCE TABLE MODELS

from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from analysis.norms import eoc

COLUMNS = ["param", "err_u", "eoc_u", "err_p", "eoc_p", "err_pt", "eoc_pt"]


class ConvergenceRow(BaseModel):
    """One refinement level of a study"""
    param: float = Field(gt=0.0, description="h or tau")
    err_u: float
    eoc_u: Optional[float] = None
    err_p: float
    eoc_p: Optional[float] = None
    err_pt: float
    eoc_pt: Optional[float] = None


class ConvergenceTable(BaseModel):
    """Errors and experimental orders of a mesh-size or time-step study"""

    title: str = Field(description="Study label, e.g. 'smooth h-study'")
    param_name: str = Field(default="h", description="Name of the refined parameter")
    rows: List[ConvergenceRow] = Field(default_factory=list)
    max_energy_drift: float = Field(default=0.0, description="Largest relative energy drift over all runs")

    @classmethod
    def from_errors(
        cls,
        title: str,
        param_name: str,
        params: Sequence[float],
        errors_u: Sequence[float],
        errors_p: Sequence[float],
        errors_pt: Sequence[float],
        max_energy_drift: float = 0.0,
    ) -> "ConvergenceTable":
        """Build rows and fill the rate columns; the first row has no rates"""
        columns = [list(errors_u), list(errors_p), list(errors_pt)]
        if len(params) >= 2:
            rates = [[None] + eoc(errors, params) for errors in columns]
        else:
            rates = [[None] * len(params) for _ in columns]
        rows = [
            ConvergenceRow(
                param=params[i],
                err_u=columns[0][i],
                eoc_u=rates[0][i],
                err_p=columns[1][i],
                eoc_p=rates[1][i],
                err_pt=columns[2][i],
                eoc_pt=rates[2][i],
            )
            for i in range(len(params))
        ]
        return cls(title=title, param_name=param_name, rows=rows, max_energy_drift=max_energy_drift)

    def column(self, name: str) -> List[Optional[float]]:
        """Raw values of one column (errors or rates)"""
        return [getattr(row, name) for row in self.rows]

    def to_dataframe(self) -> pd.DataFrame:
        """Formatted table; error cells '%.6e', rate cells '%.4f', empty first-row rates"""

        def fmt_error(value: float) -> str:
            return "nan" if not np.isfinite(value) else f"{value:.6e}"

        def fmt_rate(value: Optional[float]) -> str:
            if value is None:
                return ""
            return "nan" if not np.isfinite(value) else f"{value:.4f}"

        records = []
        for row in self.rows:
            records.append(
                {
                    "param": fmt_error(row.param),
                    "err_u": fmt_error(row.err_u),
                    "eoc_u": fmt_rate(row.eoc_u),
                    "err_p": fmt_error(row.err_p),
                    "eoc_p": fmt_rate(row.eoc_p),
                    "err_pt": fmt_error(row.err_pt),
                    "eoc_pt": fmt_rate(row.eoc_pt),
                }
            )
        return pd.DataFrame.from_records(records, columns=COLUMNS)

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(path, index=False, lineterminator="\n")
        return path

    def to_text(self) -> str:
        """Aligned plain-text rendering"""
        frame = self.to_dataframe()
        header = f"{self.title} ({self.param_name})"
        if frame.empty:
            return f"{header}\n(no rows)"
        return f"{header}\n{frame.to_string(index=False)}"
