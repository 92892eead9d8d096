# test_analysis.py - Norms, rates, convergence tables and study drivers

import math

import numpy as np
import pytest

from analysis.norms import eoc, l2_difference, l2_norm, tracking_norm
from analysis.studies import (
    halved_step_row,
    nested_mesh_row,
    run_rows,
    study_nonsmooth_h,
    study_nonsmooth_tau,
    study_smooth_h,
    study_smooth_tau,
)
from config.wave_problems import ManufacturedTestCase, NonsmoothTestCase, SmoothTestCase, StaticTestCase
from models.convergence import COLUMNS, ConvergenceTable
from models.fields import FieldP0
from models.functions import ScalarFunction
from utils.exceptions import AnalysisError


def test_rate_of_quartered_error_is_two():
    assert eoc([0.4, 0.1], [0.25, 0.125]) == pytest.approx([2.0])


def test_rate_from_published_smooth_errors():
    assert eoc([0.142499, 0.037066], [0.25, 0.125])[0] == pytest.approx(1.94, abs=5e-3)


def test_equal_errors_have_zero_rate():
    assert eoc([0.3, 0.3, 0.3], [0.5, 0.25, 0.125]) == pytest.approx([0.0, 0.0])


def test_nonpositive_error_gives_nan_rate():
    rates = eoc([0.1, 0.0, 0.01], [0.5, 0.25, 0.125])
    assert math.isnan(rates[0]) and math.isnan(rates[1])


@pytest.mark.parametrize(
    "errors, params",
    [([0.1], [0.5]), ([0.1, 0.05], [0.5]), ([0.1, 0.05], [0.25, 0.5]), ([0.1, 0.05], [0.5, 0.0])],
)
def test_invalid_rate_input(errors, params):
    with pytest.raises(AnalysisError):
        eoc(errors, params)


def test_tracking_norm_is_maximum():
    assert tracking_norm([0.1, 0.4, 0.2]) == 0.4
    with pytest.raises(AnalysisError):
        tracking_norm([])


def test_l2_norms(mesh2):
    ones = FieldP0(mesh=mesh2, coefficients=np.ones(mesh2.n_triangles))
    assert l2_norm(ones) == pytest.approx(np.sqrt(3.0), abs=1e-13)
    assert l2_difference(ones, ScalarFunction.constant(1.0), 0.0) == pytest.approx(0.0, abs=1e-14)


def test_table_rates_are_recomputable():
    table = ConvergenceTable.from_errors("demo", "h", [0.5, 0.25, 0.125], [0.4, 0.1, 0.025], [1.0, 0.5, 0.25], [0.2, 0.1, 0.05])
    assert table.column("eoc_u") == [None, pytest.approx(2.0), pytest.approx(2.0)]
    assert table.column("eoc_p")[1:] == eoc(table.column("err_p"), [0.5, 0.25, 0.125])


def test_table_formatting():
    table = ConvergenceTable.from_errors("demo", "tau", [0.25, 0.125], [0.4, 0.1], [0.2, float("nan")], [0.1, 0.05])
    frame = table.to_dataframe()
    assert list(frame.columns) == COLUMNS
    assert frame.loc[0, "eoc_u"] == ""
    assert frame.loc[1, "err_u"] == "1.000000e-01"
    assert frame.loc[1, "eoc_u"] == "2.0000"
    assert frame.loc[1, "err_p"] == "nan"
    assert frame.loc[1, "eoc_p"] == "nan"
    assert table.to_text().startswith("demo (tau)")


def test_single_row_table_has_empty_rates():
    table = ConvergenceTable.from_errors("one", "h", [0.25], [0.1], [0.1], [0.1])
    assert table.to_dataframe().loc[0, ["eoc_u", "eoc_p", "eoc_pt"]].tolist() == ["", "", ""]


def test_csv_header_and_determinism(tmp_path):
    table = ConvergenceTable.from_errors("demo", "h", [0.5, 0.25], [0.4, 0.1], [0.3, 0.2], [0.2, 0.1])
    first = table.to_csv(tmp_path / "a.csv").read_bytes()
    second = table.to_csv(tmp_path / "b.csv").read_bytes()
    assert first == second
    assert first.decode().splitlines()[0] == "param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt"


def test_run_rows_keeps_job_order():
    jobs = [lambda i=i: i * i for i in range(6)]
    assert run_rows(jobs, workers=3) == [0, 1, 4, 9, 16, 25]
    assert run_rows(jobs, workers=1) == [0, 1, 4, 9, 16, 25]


def test_run_rows_propagates_failures():
    def failing():
        raise AnalysisError("boom")

    with pytest.raises(AnalysisError):
        run_rows([lambda: 1, failing], workers=2)


def test_smooth_h_study_on_coarse_levels():
    table = study_smooth_h([1, 2], 0.25)
    assert [row.param for row in table.rows] == [1.0, 0.5]
    assert all(np.isfinite(table.column("err_u")))
    assert all(value > 0.0 for value in table.column("err_pt"))
    assert table.max_energy_drift < 1e-9


def test_concurrent_rows_match_sequential_rows():
    sequential = study_smooth_tau(2, [0.5, 0.25], workers=1)
    concurrent = study_smooth_tau(2, [0.5, 0.25], workers=2)
    assert sequential.model_dump() == concurrent.model_dump()


def test_halved_step_of_linear_in_time_solution_is_zero():
    row = halved_step_row(ManufacturedTestCase(), 2, 0.25, 1.0)
    assert row.err_u < 1e-9
    assert row.err_p < 1e-9
    assert row.err_pt < 1e-9


def test_nested_mesh_row_of_static_solution():
    row = nested_mesh_row(StaticTestCase(), 2, 0.5, 1.0)
    assert row.err_u < 1e-9
    assert row.err_p < 1e-9


def test_nonsmooth_studies_run_on_coarse_levels():
    h_table = study_nonsmooth_h([1, 2], 0.25)
    tau_table = study_nonsmooth_tau(2, [0.5, 0.25])
    for table in (h_table, tau_table):
        assert len(table.rows) == 2
        assert all(value > 0.0 for value in table.column("err_u"))
        assert table.max_energy_drift < 1e-9


def test_study_argument_checks():
    with pytest.raises(AnalysisError):
        study_smooth_h([4, 2], 0.25)
    with pytest.raises(AnalysisError):
        study_nonsmooth_tau(2, [0.25, 0.5])


# Reference errors at tau = 1/1000 keyed by n; they are quoted for h = 1/(2n), measured ratio about 0.88
SMOOTH_H_REFERENCE = {
    4: (0.142499, 0.136521, 0.144388),
    8: (0.037066, 0.036047, 0.037627),
    16: (0.009359, 0.009128, 0.009499),
}


@pytest.mark.slow
def test_smooth_h_study_rates():
    table = study_smooth_h([4, 8, 16], 1e-3, workers=2)
    for name in ("eoc_u", "eoc_p", "eoc_pt"):
        assert abs(table.column(name)[-1] - 2.0) < 0.15
    for n, row in zip((4, 8, 16), table.rows):
        for value, reference in zip((row.err_u, row.err_p, row.err_pt), SMOOTH_H_REFERENCE[n]):
            assert reference / 2.0 < value < reference * 2.0


@pytest.mark.slow
def test_nonsmooth_h_study_rates():
    table = study_nonsmooth_h([8, 16, 32], 1e-3, problem=NonsmoothTestCase(), workers=2)
    for name in ("eoc_u", "eoc_p", "eoc_pt"):
        assert abs(table.column(name)[-1] - 1.0) < 0.3


@pytest.mark.slow
def test_smooth_tau_study_rates():
    table = study_smooth_tau(32, [2.0 ** -2, 2.0 ** -3, 2.0 ** -4], problem=SmoothTestCase(), workers=2)
    # first pair, before the spatial error on n = 32 takes over
    for name in ("eoc_u", "eoc_p", "eoc_pt"):
        assert abs(table.column(name)[1] - 2.0) < 0.3
    assert abs(table.column("eoc_u")[-1] - 2.0) < 0.3


@pytest.mark.slow
def test_nonsmooth_tau_study_rates():
    taus = [2.0 ** -k for k in range(2, 6)]
    table = study_nonsmooth_tau(32, taus, problem=NonsmoothTestCase(), workers=2)
    for name in ("eoc_u", "eoc_p", "eoc_pt"):
        assert all(abs(rate - 1.0) < 0.3 for rate in table.column(name)[1:])
