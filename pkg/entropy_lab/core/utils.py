"""Utility functions shared by the experiment modules."""

import math
import warnings
from collections.abc import Callable, Iterable, Sequence
from typing import Any

import numpy as np
from scipy import integrate
from scipy.special import xlogy

from ..logging_config import get_logger
from .config import LAB_CONFIG
from .constants import QuadratureDefaults
from .exceptions import NumericalError

logger = get_logger(__name__)


def adaptive_quad(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    points: Sequence[float] | None = None,
    epsrel: float | None = None,
) -> float:
    """Integrate ``func`` over ``[lower, upper]`` with QUADPACK Gauss-Kronrod.

    Args:
        func: Scalar integrand
        lower: Lower limit
        upper: Upper limit (finite)
        points: Interior breakpoints (kinks, characteristic scales)
        epsrel: Relative tolerance (defaults to the lab configuration)

    Returns:
        Value of the integral

    Raises:
        NumericalError: If the result is not finite or its error estimate
            exceeds the acceptance bound
    """
    interior = None
    if points:
        interior = sorted({float(x) for x in points if lower < x < upper})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value, abserr = integrate.quad(
            func,
            lower,
            upper,
            epsabs=0.0,
            epsrel=epsrel if epsrel is not None else LAB_CONFIG.quad_epsrel,
            limit=LAB_CONFIG.quad_limit,
            points=interior or None,
        )
    for warning in caught:
        logger.debug(f"quad on [{lower:g}, {upper:g}]: {warning.message} (err={abserr:.3g})")
    if not math.isfinite(value):
        raise NumericalError(f"non-finite integral on [{lower}, {upper}]")
    accepted = QuadratureDefaults.ACCEPT_ERR * max(abs(value), 1.0)
    if not abserr <= accepted:
        reason = f": {caught[-1].message}" if caught else ""
        raise NumericalError(
            f"integral on [{lower}, {upper}] not resolved, "
            f"error estimate {abserr:.3g} for value {value:.6g}{reason}"
        )
    return float(value)


def xlogx(t: Any) -> Any:
    """t log t with the continuous extension 0 log 0 = 0."""
    return xlogy(t, t)


def build_record(**kwargs: Any) -> dict[str, Any]:
    """Build a flat report record excluding None values.

    Sequences and arrays are joined with ``;`` so every value fits a CSV cell.

    Example:
        build_record(q=1.5, argmax=(1.0, 2.0), note=None)  # {q: 1.5, argmax: "1.0;2.0"}
    """
    record: dict[str, Any] = {}
    for key, value in kwargs.items():
        if value is None:
            continue
        if isinstance(value, np.ndarray):
            value = value.tolist()
        if isinstance(value, list | tuple):
            value = ";".join(repr(float(v)) for v in value)
        elif isinstance(value, np.floating | np.integer):
            value = value.item()
        record[key] = value
    return record


def running_max(values: Iterable[float]) -> list[float]:
    """Cumulative maximum of a sequence."""
    result: list[float] = []
    current = -math.inf
    for value in values:
        current = max(current, value)
        result.append(current)
    return result

