"""Euclidean Lp-Nash quotients and lower-bound estimates of N(p, q).

N(p, q) is only ever approached from below: the estimate is a supremum over
a finite-dimensional family, so it is a certified lower bound and the
entropy constant A0(p) is the matching upper bound.
"""

import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any

from ..core.config import LAB_CONFIG
from ..core.constants import TOOL_VERSION, RowStatus, ScanDefaults
from ..core.exceptions import DegenerateProfileError, DomainError
from ..core.utils import build_record
from ..logging_config import get_logger
from ..models import Params
from .closedform import a0_constant
from .families import ProfileFamily, default_family
from .radial import (
    RadialFunction,
    dirichlet,
    entropy,
    lq_excess,
    lq_mass,
    require_normalized,
)
from .search import SearchBudget, multistart_maximize

logger = get_logger(__name__)

SANDWICH_TOL = 1e-6


@dataclass(slots=True, frozen=True)
class NashScanRow:
    """One lower-bound estimate of N(p, q)."""

    n: int
    p: float
    q: float
    theta: float
    n_hat: float
    a0: float
    argmax_params: tuple[float, ...]
    family: str
    status: RowStatus
    seed: int
    evals: int

    def to_record(self) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            q=self.q,
            theta=self.theta,
            N_hat=self.n_hat,
            A0=self.a0,
            ratio=self.n_hat / self.a0,
            family=self.family,
            argmax_params=self.argmax_params,
            status=str(self.status),
            seed=self.seed,
            evals=self.evals,
            tool_version=TOOL_VERSION,
        )


@dataclass(slots=True, frozen=True)
class LimitRow:
    q: float
    gap: float
    value: float
    error: float
    status: RowStatus


@dataclass(slots=True, frozen=True)
class LimitTrace:
    """Difference quotients approaching (p/n) Ent(u^p) as q -> p-."""

    n: int
    p: float
    rows: tuple[LimitRow, ...]
    target: float
    rate_constant: float
    first_order: bool

    def to_records(self) -> list[dict[str, Any]]:
        return [
            build_record(
                n=self.n,
                p=self.p,
                q=row.q,
                gap=row.gap,
                value=row.value,
                target=self.target,
                error=row.error,
                rate_constant=self.rate_constant,
                status=str(row.status),
                tool_version=TOOL_VERSION,
            )
            for row in self.rows
        ]


def log_nash_quotient(profile: RadialFunction, n: int, p: float, q: float) -> float:
    """log of (int u^p)^(1/theta) / (int |grad u|^p (int u^q)^(p(1-theta)/(q theta)))."""
    params = Params(n, p, q)
    p_mass = lq_mass(profile, n, p, p)
    q_mass = lq_mass(profile, n, q, p)
    energy = dirichlet(profile, n, p)
    if energy <= 0:
        raise DegenerateProfileError(
            f"zero Dirichlet energy for {profile.describe()}: Nash quotient undefined"
        )
    if p_mass <= 0 or q_mass <= 0:
        raise DegenerateProfileError(f"vanishing mass for {profile.describe()}")
    return (
        math.log(p_mass) / params.theta
        - math.log(energy)
        - params.nash_exponent * math.log(q_mass)
    )


def nash_quotient(profile: RadialFunction, n: int, p: float, q: float) -> float:
    """Nash quotient; bounded above by N(p, q) <= A0(p) for every profile."""
    return math.exp(log_nash_quotient(profile, n, p, q))


def _member_outcome(
    member: ProfileFamily, n: int, p: float, q: float, budget: SearchBudget
):
    def objective(x: tuple[float, ...]) -> float:
        return log_nash_quotient(member.build(x), n, p, q)

    return multistart_maximize(
        objective,
        member.bounds(),
        budget,
        key=member.name,
        initial_points=member.initial_points(),
    )


def estimate_nash_constant(
    n: int,
    p: float,
    q: float,
    family: ProfileFamily | None = None,
    budget: SearchBudget | None = None,
) -> NashScanRow:
    """Lower bound for N(p, q): the best Nash quotient found over ``family``."""
    params = Params(n, p, q)
    family = family if family is not None else default_family()
    budget = budget if budget is not None else SearchBudget()
    a0 = a0_constant(n, p)

    best_value, best_params, best_name = -math.inf, (), family.name
    evals = nonfinite = 0
    for member in family.members():
        outcome = _member_outcome(member, n, p, q, budget)
        evals += outcome.evals
        nonfinite += outcome.nonfinite
        if outcome.value > best_value:
            best_value, best_params, best_name = outcome.value, outcome.params, member.name

    status = RowStatus.OK
    if nonfinite or not math.isfinite(best_value):
        status = RowStatus.NONFINITE
        logger.warning(f"q={q}: {nonfinite} non-finite quotient evaluations")
    n_hat = math.exp(best_value) if math.isfinite(best_value) else math.nan
    if n_hat > a0 + SANDWICH_TOL:
        logger.warning(f"q={q}: estimate {n_hat!r} exceeds A0={a0!r}")
    logger.info(f"N_hat(p={p}, q={q}) = {n_hat:.10g} ({n_hat / a0:.6f} A0) via {best_name}")

    return NashScanRow(
        n=n,
        p=p,
        q=q,
        theta=params.theta,
        n_hat=n_hat,
        a0=a0,
        argmax_params=best_params,
        family=best_name,
        status=status,
        seed=budget.seed,
        evals=evals,
    )


def jensen_gap(profile: RadialFunction, n: int, p: float, q: float) -> float:
    """((p-q)/p) Ent(u^p) + log int u^q; nonnegative by Jensen's inequality."""
    Params(n, p, q)
    ent = entropy(profile, n, p)
    return (p - q) / p * ent + math.log(lq_mass(profile, n, q, p))


def jensen_nash_bound(
    profile: RadialFunction, n: int, p: float, q: float
) -> tuple[float, float]:
    """((int u^q)^(-p^2/(n(p-q))), A0 int |grad u|^p) for unit-mass u; lhs <= rhs."""
    Params(n, p, q)
    require_normalized(profile, n, p)
    lhs = math.exp(-(p**2) / (n * (p - q)) * math.log(lq_mass(profile, n, q, p)))
    return lhs, a0_constant(n, p) * dirichlet(profile, n, p)


def interpolation_monotonicity(
    profile: RadialFunction, n: int, p: float, q1: float, q2: float
) -> tuple[float, float]:
    """(Q_{q1}(u), Q_{q2}(u)); the quotient of a fixed profile grows with q."""
    if not q1 < q2:
        raise DomainError(f"requires q1 < q2, got q1={q1}, q2={q2}")
    return nash_quotient(profile, n, p, q1), nash_quotient(profile, n, p, q2)


def entropy_limit_trace(
    profile: RadialFunction, n: int, p: float, q_sequence: Sequence[float]
) -> LimitTrace:
    """(p^3/n) (p-q)^(-1) log(||u||_p / ||u||_q) along q -> p-.

    The Lq mass enters through int u^p expm1((q-p) log u), so the difference
    quotient keeps full relative precision down to p - q ~ 1e-7.
    """
    Params(n, p)
    if not q_sequence:
        raise DomainError("q_sequence must not be empty")
    if any(not 1.0 <= q < p for q in q_sequence):
        raise DomainError(f"requires 1 ≤ q < p for every q, got {list(q_sequence)}")
    if any(b <= a for a, b in zip(q_sequence, q_sequence[1:], strict=False)):
        raise DomainError("q_sequence must increase strictly")

    target = p / n * entropy(profile, n, p)
    p_mass = lq_mass(profile, n, p, p)
    rows: list[LimitRow] = []
    for q in q_sequence:
        gap = p - q
        excess = lq_excess(profile, n, p, q)
        log_ratio = (1.0 / p - 1.0 / q) * math.log(p_mass) - math.log1p(
            excess / p_mass
        ) / q
        value = p**3 / n * log_ratio / gap
        status = (
            RowStatus.PRECISION_FLOOR
            if gap < ScanDefaults.PRECISION_FLOOR
            else RowStatus.OK
        )
        rows.append(LimitRow(q, gap, value, abs(value - target), status))

    usable = [row for row in rows if row.status == RowStatus.OK]
    if usable:
        rate = sum(row.error * row.gap for row in usable) / sum(
            row.gap**2 for row in usable
        )
        last = usable[-1]
        first_order = last.error <= 2.0 * rate * last.gap + 1e-12
    else:
        rate, first_order = math.nan, False
    return LimitTrace(n, p, tuple(rows), target, rate, first_order)


def _scan_row(args: tuple[int, float, float, ProfileFamily, SearchBudget]) -> NashScanRow:
    n, p, q, family, budget = args
    return estimate_nash_constant(n, p, q, family, budget)


def monotonicity_scan(
    n: int,
    p: float,
    q_grid: Sequence[float],
    family: ProfileFamily | None = None,
    budget: SearchBudget | None = None,
    workers: int | None = None,
) -> list[NashScanRow]:
    """Estimates of N(p, q) along an increasing q grid, in q order.

    Rows are estimated independently (optionally in worker processes), then
    every row also tries the maximizers of the lower-q rows: a fixed profile's
    quotient does not decrease in q, so the resulting column is monotone.
    """
    if not q_grid:
        raise DomainError("q_grid must not be empty")
    if any(b <= a for a, b in zip(q_grid, q_grid[1:], strict=False)):
        raise DomainError("q_grid must increase strictly")
    for q in q_grid:
        Params(n, p, q)
    family = family if family is not None else default_family()
    budget = budget if budget is not None else SearchBudget()
    workers = workers if workers is not None else LAB_CONFIG.workers

    tasks = [(n, p, q, family, budget) for q in q_grid]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, tasks))
    else:
        rows = [_scan_row(task) for task in tasks]

    members = {member.name: member for member in family.members()}
    carried: list[NashScanRow] = []
    for row in rows:
        for earlier in carried:
            if earlier.family not in members or not math.isfinite(earlier.n_hat):
                continue
            candidate = members[earlier.family].build(earlier.argmax_params)
            value = nash_quotient(candidate, n, p, row.q)
            if not value <= row.n_hat:
                logger.debug(
                    f"q={row.q}: carried maximizer from q={earlier.q} improves "
                    f"{row.n_hat!r} -> {value!r}"
                )
                row = replace(
                    row,
                    n_hat=value,
                    argmax_params=earlier.argmax_params,
                    family=earlier.family,
                    evals=row.evals + 1,
                )
        carried.append(row)

    last = carried[-1]
    logger.info(
        f"scan n={n} p={p}: N_hat(q={last.q}) = {last.n_hat / last.a0:.6f} A0"
    )
    return carried
