"""Multi-start bounded Nelder-Mead maximization with deterministic seeding."""

import math
import zlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..core.constants import OptimizerDefaults
from ..core.exceptions import DomainError, EntropyLabError
from ..logging_config import get_logger

logger = get_logger(__name__)


@dataclass(slots=True, frozen=True)
class SearchBudget:
    """Restarts, evaluations per restart and base seed of a search."""

    restarts: int = OptimizerDefaults.RESTARTS
    max_evals: int = OptimizerDefaults.MAX_EVALS
    seed: int = OptimizerDefaults.SEED

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise DomainError(f"budget needs at least one restart, got {self.restarts}")
        if self.max_evals < 1:
            raise DomainError(f"budget needs at least one evaluation, got {self.max_evals}")


@dataclass(slots=True, frozen=True)
class SearchOutcome:
    """Best value found, where, and how much it cost."""

    value: float
    params: tuple[float, ...]
    evals: int
    nonfinite: int

    @property
    def flagged(self) -> bool:
        return self.nonfinite > 0 or not math.isfinite(self.value)


def rng_for(seed: int, key: str) -> np.random.Generator:
    """Generator keyed by (seed, key): independent of the order searches run in."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(key.encode())]))


class _Tracker:
    """Wraps an objective, counting calls and keeping the best point seen."""

    def __init__(self, objective: Callable[[tuple[float, ...]], float]) -> None:
        self.objective = objective
        self.evals = 0
        self.nonfinite = 0
        self.best_value = -math.inf
        self.best_params: tuple[float, ...] = ()

    def __call__(self, x: Sequence[float]) -> float:
        params = tuple(float(v) for v in x)
        self.evals += 1
        try:
            value = self.objective(params)
        except (EntropyLabError, ArithmeticError) as e:
            logger.debug(f"objective failed at {params}: {e}")
            value = math.nan
        if not math.isfinite(value):
            self.nonfinite += 1
            return OptimizerDefaults.PENALTY
        self.offer(value, params)
        return -value

    def offer(self, value: float, params: tuple[float, ...]) -> None:
        if value > self.best_value + OptimizerDefaults.TIE_TOL:
            self.best_value, self.best_params = value, params
        elif abs(value - self.best_value) <= OptimizerDefaults.TIE_TOL and (
            params < self.best_params
        ):
            self.best_params = params


def _finite_start(
    tracker: _Tracker,
    start: np.ndarray,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray | None:
    """``start`` if the objective is finite there, else a redrawn point.

    Falls back to the best point seen so far; None when there is none.
    """
    for _ in range(OptimizerDefaults.START_ATTEMPTS):
        failures = tracker.nonfinite
        tracker(start)
        if tracker.nonfinite == failures:
            return start
        start = rng.uniform(lower, upper)
    if tracker.best_params:
        return np.array(tracker.best_params)
    return None


def multistart_maximize(
    objective: Callable[[tuple[float, ...]], float],
    bounds: Sequence[tuple[float, float]],
    budget: SearchBudget,
    key: str,
    initial_points: Sequence[Sequence[float]] = (),
) -> SearchOutcome:
    """Maximize ``objective`` over a box with restarted bounded simplex searches.

    The first restarts start from ``initial_points``; the rest from uniform
    draws of a generator keyed by ``(budget.seed, key)``. A start where the
    objective is not finite is redrawn, so no restart is spent on a plateau of
    failed evaluations. Ties within 1e-12 keep the lexicographically smallest
    parameter vector.
    """
    tracker = _Tracker(objective)
    if not bounds:
        tracker(())
        return SearchOutcome(
            tracker.best_value, tracker.best_params, tracker.evals, tracker.nonfinite
        )

    lower = np.array([lo for lo, _ in bounds])
    upper = np.array([hi for _, hi in bounds])
    rng = rng_for(budget.seed, key)
    starts = [np.clip(np.asarray(x, dtype=float), lower, upper) for x in initial_points]
    starts = starts[: budget.restarts]
    while len(starts) < budget.restarts:
        starts.append(rng.uniform(lower, upper))

    for index, first in enumerate(starts):
        start = _finite_start(tracker, first, rng, lower, upper)
        if start is None:
            logger.warning(f"{key} restart {index}: no finite start point, skipped")
            continue
        result = minimize(
            tracker,
            start,
            method="Nelder-Mead",
            bounds=list(bounds),
            options={"maxfev": budget.max_evals, "xatol": 1e-9, "fatol": 1e-13},
        )
        logger.debug(
            f"{key} restart {index}: best={tracker.best_value:.12g} "
            f"nfev={result.nfev} status={result.status}"
        )

    return SearchOutcome(
        tracker.best_value, tracker.best_params, tracker.evals, tracker.nonfinite
    )
