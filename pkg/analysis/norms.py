# analysis/norms.py - ERROR NORMS AND CONVERGENCE RATES

from typing import List, Sequence, Union

import numpy as np

from config.settings import settings
from elements.piola import affine_maps
from elements.quadrature import quadrature
from models.fields import FieldBDM1, FieldP0, FieldP1
from models.functions import ScalarFunction, VectorFunction
from utils.exceptions import AnalysisError

AnyField = Union[FieldP0, FieldP1, FieldBDM1]


def _integrate_squared(mesh, values: np.ndarray) -> float:
    rule = quadrature(settings.QUADRATURE_DEGREE)
    if values.ndim == 3:
        values = np.sum(values ** 2, axis=-1)
    else:
        values = values ** 2
    weights = np.abs(affine_maps(mesh).determinants)[:, None] * rule.weights[None, :]
    return float(np.einsum("kq,kq->", weights, values))


def l2_norm(field: AnyField) -> float:
    """L2 norm of a discrete field over its mesh"""
    rule = quadrature(settings.QUADRATURE_DEGREE)
    return float(np.sqrt(_integrate_squared(field.mesh, field.evaluate(rule.points))))


def l2_difference(field: AnyField, function: Union[ScalarFunction, VectorFunction], t: float) -> float:
    """True L2 error ||function(t) - field|| by quadrature"""
    rule = quadrature(settings.QUADRATURE_DEGREE)
    points = affine_maps(field.mesh).to_physical(rule.points)
    difference = function.at_points(points, t) - field.evaluate(rule.points)
    return float(np.sqrt(_integrate_squared(field.mesh, difference)))


def tracking_norm(values: Sequence[float]) -> float:
    """|||e||| = max over the recorded times of the spatial L2 norms"""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise AnalysisError("Cannot take the tracking norm of an empty record")
    return float(values.max())


def eoc(errors: Sequence[float], params: Sequence[float]) -> List[float]:
    """
    Experimental orders of convergence for consecutive pairs,
    log(e_{i-1}/e_i) / log(param_{i-1}/param_i).

    Pairs with a nonpositive error are reported as NaN.
    """
    errors = np.asarray(list(errors), dtype=float)
    params = np.asarray(list(params), dtype=float)
    if errors.shape != params.shape:
        raise AnalysisError(f"Got {errors.size} errors for {params.size} parameters")
    if errors.size < 2:
        raise AnalysisError("Rates need at least two levels")
    if np.any(params <= 0.0) or np.any(np.diff(params) >= 0.0):
        raise AnalysisError(f"Parameters must be positive and strictly decreasing, got {params.tolist()}")

    rates = []
    for i in range(1, errors.size):
        if errors[i - 1] <= 0.0 or errors[i] <= 0.0:
            rates.append(float("nan"))
            continue
        rates.append(float(np.log(errors[i - 1] / errors[i]) / np.log(params[i - 1] / params[i])))
    return rates
