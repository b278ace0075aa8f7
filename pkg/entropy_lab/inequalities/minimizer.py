"""Penalized Nash functional on S^n and the second-constant trace as q -> p-.

For a unit-mass zonal u the functional is

    J(u) = (int |grad u|^p + C) (int u^q)^(p(1-theta)/(q theta)),

minimized over nodal values on a colatitude grid through its scale-invariant
extension F(U) = J(U / ||U||_p). At a critical point the Euler-Lagrange
equation

    A Delta_p u + A C u^(p-1) + ((1-theta)/theta) B u^(q-1) = (nu/theta) u^(p-1)

holds with A = (int u^q)^e, B = (D + C)(int u^q)^(e-1) and B int u^q = nu.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize

from ..core.constants import TOOL_VERSION, MinimizerDefaults, RowStatus
from ..core.exceptions import DegenerateProfileError, DomainError
from ..core.utils import build_record, running_max
from ..logging_config import get_logger
from ..models import Params
from .closedform import a0_constant, surface_area
from .families import ProfileFamily
from .nash import estimate_nash_constant
from .search import SearchBudget, multistart_maximize
from .sphere import (
    BubbleSpec,
    ZonalFamily,
    ZonalProfile,
    bubble_values,
    build_zonal,
    constant_profile,
    default_zonal_family,
    require_unit_mass,
    sphere_volume,
    uniform_zonal_grid,
    zonal_dirichlet,
    zonal_lq_mass,
)

logger = get_logger(__name__)

CHUNK_ITERATIONS = 1000
STALL_TOL = 1e-15
INIT_BUBBLE_DELTA = 1.4


def j_functional(profile: ZonalProfile, n: int, p: float, q: float, c_value: float) -> float:
    """(int |grad u|^p + C) (int u^q)^(p(1-theta)/(q theta)) for unit-mass u.

    The power is applied in log space: it diverges as q -> p while int u^q -> 1.
    """
    params = Params(n, p, q)
    require_unit_mass(profile, n, p)
    energy = zonal_dirichlet(profile, n, p)
    q_mass = zonal_lq_mass(profile, n, q)
    factor = energy + c_value
    if factor == 0.0:
        return 0.0
    magnitude = math.exp(math.log(abs(factor)) + params.nash_exponent * math.log(q_mass))
    return math.copysign(magnitude, factor)


class NodalDiscretization:
    """Lumped finite differences for zonal nodal values on S^n.

    Mass integrals use trapezoid weights m_i with polar caps
    omega (h/2)^n / n; the energy uses one-sided differences on each cell,
    weighted by sin^(n-1) at the cell midpoint.
    """

    def __init__(self, grid: np.ndarray, n: int) -> None:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
            raise DegenerateProfileError("nodal grid must increase strictly with 3+ nodes")
        self.grid = grid
        self.n = n
        omega = surface_area(n)
        self.h = np.diff(grid)
        midpoints = 0.5 * (grid[:-1] + grid[1:])
        self.cell_weight = omega * np.sin(midpoints) ** (n - 1) * self.h
        mass = np.empty_like(grid)
        mass[1:-1] = omega * np.sin(grid[1:-1]) ** (n - 1) * 0.5 * (self.h[:-1] + self.h[1:])
        mass[0] = omega * (0.5 * self.h[0]) ** n / n
        mass[-1] = omega * (0.5 * self.h[-1]) ** n / n
        self.mass_weight = mass

    def power_mass(self, values: np.ndarray, exponent: float) -> float:
        return float(np.dot(self.mass_weight, values**exponent))

    def power_mass_gradient(self, values: np.ndarray, exponent: float) -> np.ndarray:
        return exponent * self.mass_weight * values ** (exponent - 1.0)

    def energy(self, values: np.ndarray, p: float) -> float:
        slopes = np.diff(values) / self.h
        return float(np.dot(self.cell_weight, np.abs(slopes) ** p))

    def energy_gradient(self, values: np.ndarray, p: float, mu: float = 0.0) -> np.ndarray:
        """Gradient of the discrete energy; ``mu > 0`` regularizes |d|^(p-2)."""
        slopes = np.diff(values) / self.h
        if mu > 0.0:
            flux = (slopes**2 + mu**2) ** (0.5 * (p - 2.0)) * slopes
        else:
            flux = np.sign(slopes) * np.abs(slopes) ** (p - 1.0)
        flux = p * self.cell_weight * flux / self.h
        gradient = np.zeros_like(values)
        gradient[:-1] -= flux
        gradient[1:] += flux
        return gradient

    def normalize(self, values: np.ndarray, p: float) -> np.ndarray:
        mass = self.power_mass(values, p)
        if mass <= 0 or not math.isfinite(mass):
            raise DegenerateProfileError(f"discrete Lp mass {mass!r}")
        return values / mass ** (1.0 / p)


@dataclass(slots=True, frozen=True)
class _Terms:
    """Discrete quantities of one unit-mass nodal vector."""

    energy: float
    q_mass: float
    a_value: float
    b_value: float
    nu: float


def _terms(disc: NodalDiscretization, values: np.ndarray, params: Params, c_value: float) -> _Terms:
    e = params.nash_exponent
    energy = disc.energy(values, params.p)
    q_mass = disc.power_mass(values, params.q)
    a_value = q_mass**e
    b_value = (energy + c_value) * q_mass ** (e - 1.0)
    return _Terms(energy, q_mass, a_value, b_value, (energy + c_value) * a_value)


def _quadrature_terms(profile: ZonalProfile, params: Params, c_value: float) -> _Terms:
    """The same quantities on a unit-mass profile, with the quadrature of ``j_functional``."""
    e = params.nash_exponent
    energy = zonal_dirichlet(profile, params.n, params.p)
    q_mass = zonal_lq_mass(profile, params.n, params.q)
    nu = j_functional(profile, params.n, params.p, params.q, c_value)
    a_value = math.exp(e * math.log(q_mass))
    b_value = (energy + c_value) * math.exp((e - 1.0) * math.log(q_mass))
    return _Terms(energy, q_mass, a_value, b_value, nu)


def _log_objective(
    disc: NodalDiscretization, values: np.ndarray, params: Params, c_value: float, mu: float
) -> tuple[float, np.ndarray]:
    """log F(U) and its gradient for the scale-invariant extension F."""
    p, q, e = params.p, params.q, params.nash_exponent
    mass = disc.power_mass(values, p)
    q_mass = disc.power_mass(values, q)
    energy = disc.energy(values, p)
    factor = energy / mass + c_value
    value = math.log(factor) + e * (math.log(q_mass) - (q / p) * math.log(mass))

    grad_mass = disc.power_mass_gradient(values, p)
    grad_q = disc.power_mass_gradient(values, q)
    grad_energy = disc.energy_gradient(values, p, mu)
    gradient = (grad_energy / mass - energy * grad_mass / mass**2) / factor + e * (
        grad_q / q_mass - (q / p) * grad_mass / mass
    )
    return value, gradient


def _residual(
    disc: NodalDiscretization, values: np.ndarray, params: Params, c_value: float
) -> tuple[float, _Terms]:
    unit = disc.normalize(values, params.p)
    terms = _terms(disc, unit, params, c_value)
    if terms.energy + c_value <= 0:
        return 0.0, terms
    log_value, gradient = _log_objective(disc, unit, params, c_value, 0.0)
    # r = grad F / (p m) at unit mass, measured in sqrt(sum m r^2)
    pointwise = math.exp(log_value) * gradient / (params.p * disc.mass_weight)
    return float(math.sqrt(np.dot(disc.mass_weight, pointwise**2))), terms


def euler_lagrange_residual(
    profile: ZonalProfile, n: int, p: float, q: float, c_value: float
) -> float:
    """Discrete Euler-Lagrange residual of J at ``profile``, in the dual grid norm."""
    params = Params(n, p, q)
    disc = NodalDiscretization(profile.grid, n)
    residual, _ = _residual(disc, np.asarray(profile.values, dtype=float), params, c_value)
    return residual


def default_init(n: int, p: float, num: int = MinimizerDefaults.NODES) -> ZonalProfile:
    """Unit-mass constant plus a small bubble at the north pole."""
    Params(n, p)
    grid = uniform_zonal_grid(num)
    spec = BubbleSpec(MinimizerDefaults.INIT_BUBBLE_EPS, INIT_BUBBLE_DELTA, n, p)
    bump, bump_slope = bubble_values(grid, spec)
    weight = MinimizerDefaults.INIT_BUBBLE_WEIGHT
    level = sphere_volume(n) ** (-1.0 / p)
    values = level + weight * bump
    return ZonalProfile(grid, values, weight * bump_slope, "constant+bubble").normalized(n, p)


@dataclass(slots=True, frozen=True)
class MinimizeResult:
    """Outcome of one descent on the penalized Nash functional."""

    n: int
    p: float
    q: float
    c_value: float
    u_star: ZonalProfile
    nu: float
    a_value: float
    b_value: float
    q_mass: float
    theta: float
    el_residual: float
    relation_error: float
    iterations: int
    j_history: tuple[float, ...]
    status: RowStatus

    def to_record(self, seed: int | None = None) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            q=self.q,
            C=self.c_value,
            theta=self.theta,
            nu=self.nu,
            A_k=self.a_value,
            B_k=self.b_value,
            q_mass=self.q_mass,
            nu_reference=1.0 / a0_constant(self.n, self.p),
            el_residual=self.el_residual,
            relation_error=self.relation_error,
            iterations=self.iterations,
            status=str(self.status),
            seed=seed,
            tool_version=TOOL_VERSION,
        )


def _on_grid(init: ZonalProfile, grid: np.ndarray) -> np.ndarray:
    if init.grid.shape == grid.shape and np.allclose(init.grid, grid, rtol=0, atol=1e-14):
        return np.array(init.values, dtype=float)
    return np.interp(grid, init.grid, init.values)


def _result(
    disc: NodalDiscretization,
    values: np.ndarray,
    params: Params,
    c_value: float,
    iterations: int,
    history: list[float],
) -> MinimizeResult:
    n, p = params.n, params.p
    unit = disc.normalize(values, p)
    u_star = ZonalProfile(disc.grid, unit, label="minimizer").normalized(n, p)
    # reported values use the quadrature of j_functional, never the lumped measure
    constant = constant_profile(n, p, num=disc.grid.size)
    if j_functional(constant, n, p, params.q, c_value) <= j_functional(
        u_star, n, p, params.q, c_value
    ):
        u_star = constant
    residual, _ = _residual(disc, np.asarray(u_star.values, dtype=float), params, c_value)
    terms = _quadrature_terms(u_star, params, c_value)
    relation = abs(terms.b_value * terms.q_mass - terms.nu) / max(abs(terms.nu), 1e-300)
    converged = residual < MinimizerDefaults.EL_TOL and relation < MinimizerDefaults.RELATION_TOL
    status = RowStatus.OK if converged else RowStatus.NOT_CONVERGED
    if not converged:
        logger.warning(
            f"minimize q={params.q} C={c_value}: residual {residual:.3g} after "
            f"{iterations} iterations"
        )
    return MinimizeResult(
        n=params.n,
        p=params.p,
        q=float(params.q),
        c_value=c_value,
        u_star=u_star,
        nu=terms.nu,
        a_value=terms.a_value,
        b_value=terms.b_value,
        q_mass=terms.q_mass,
        theta=params.theta,
        el_residual=residual,
        relation_error=relation,
        iterations=iterations,
        j_history=tuple(history),
        status=status,
    )


def minimize_j(
    n: int,
    p: float,
    q: float,
    c_value: float,
    init: ZonalProfile | None = None,
    budget: int = MinimizerDefaults.MAX_ITER,
    nodes: int = MinimizerDefaults.NODES,
    mu: float = MinimizerDefaults.MU,
) -> MinimizeResult:
    """Minimize J over zonal nodal values with L-BFGS-B.

    ``budget`` caps the total number of iterations. Iterates are renormalized
    to unit discrete mass between restarts of the quasi-Newton memory. For
    C <= 0 the constant is the minimizer and is returned directly.

    Raises:
        NormalizationError: If ``init`` does not have unit Lp mass.
    """
    params = Params(n, p, q)
    if budget < 1:
        raise DomainError(f"iteration budget must be positive, got {budget}")
    grid = uniform_zonal_grid(nodes)
    disc = NodalDiscretization(grid, n)

    if c_value <= 0:
        constant = np.full_like(grid, sphere_volume(n) ** (-1.0 / p))
        logger.info(f"minimize q={q} C={c_value}: C <= 0, the constant is the minimizer")
        nu = _terms(disc, disc.normalize(constant, p), params, c_value).nu
        return _result(disc, constant, params, c_value, 0, [nu])

    init = init if init is not None else default_init(n, p, nodes)
    require_unit_mass(init, n, p)
    values = disc.normalize(_on_grid(init, grid), p)

    # precondition by the square root of the mass weights
    scale = np.sqrt(disc.mass_weight / disc.mass_weight.mean())

    def objective(z: np.ndarray) -> tuple[float, np.ndarray]:
        value, gradient = _log_objective(disc, z / scale, params, c_value, mu)
        return value, gradient / scale

    history = [math.exp(objective(values * scale)[0])]

    def record(z: np.ndarray) -> None:
        history.append(math.exp(objective(z)[0]))

    iterations = 0
    while iterations < budget:
        start = values * scale
        before = objective(start)[0]
        outcome = minimize(
            objective,
            start,
            jac=True,
            method="L-BFGS-B",
            bounds=[(0.0, None)] * grid.size,
            callback=record,
            options={
                "maxiter": min(CHUNK_ITERATIONS, budget - iterations),
                "ftol": 1e-16,
                "gtol": 1e-11,
                "maxcor": 20,
            },
        )
        iterations += int(outcome.nit)
        values = disc.normalize(outcome.x / scale, p)
        residual, _ = _residual(disc, values, params, c_value)
        logger.debug(
            f"minimize q={q} C={c_value}: {iterations} iterations, "
            f"J={history[-1]:.12g}, residual={residual:.3g}, {outcome.message}"
        )
        if residual < MinimizerDefaults.EL_TOL:
            break
        if outcome.nit == 0 or before - outcome.fun <= STALL_TOL:
            break

    result = _result(disc, values, params, c_value, iterations, history)
    logger.info(
        f"minimize n={n} p={p} q={q} C={c_value}: nu={result.nu:.10g} "
        f"residual={result.el_residual:.3g} status={result.status}"
    )
    return result


def nash_defect(
    profile: ZonalProfile, n: int, p: float, q: float, n_ref: float
) -> float:
    """(int u^q)^(-p(1-theta)/(q theta)) - N int |grad u|^p for a unit-mass u."""
    params = Params(n, p, q)
    require_unit_mass(profile, n, p)
    q_mass = zonal_lq_mass(profile, n, q)
    energy = zonal_dirichlet(profile, n, p)
    return math.exp(-params.nash_exponent * math.log(q_mass)) - n_ref * energy


@dataclass(slots=True, frozen=True)
class TraceRow:
    """One q of the second-constant trace."""

    n: int
    p: float
    q: float
    theta: float
    n_ref: float
    b_hat: float
    c_k: float
    nu: float
    el_residual: float
    running_max: float
    family: str
    status: RowStatus
    seed: int

    def to_record(self) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            q=self.q,
            theta=self.theta,
            N_ref=self.n_ref,
            B_hat=self.b_hat,
            C_k=self.c_k,
            nu=self.nu,
            el_residual=self.el_residual,
            running_max=self.running_max,
            family=self.family,
            status=str(self.status),
            seed=self.seed,
            tool_version=TOOL_VERSION,
        )


def _b_hat(
    n: int, p: float, q: float, n_ref: float, family: ZonalFamily, budget: SearchBudget
) -> tuple[float, str, int]:
    best = nash_defect(constant_profile(n, p), n, p, q, n_ref)
    best_name, nonfinite = "constant", 0
    for member in family.members():

        def objective(x: tuple[float, ...], member: ZonalFamily = member) -> float:
            return nash_defect(build_zonal(member, x, n, p), n, p, q, n_ref)

        outcome = multistart_maximize(
            objective,
            member.bounds(),
            budget,
            key=member.name,
            initial_points=member.initial_points(),
        )
        nonfinite += outcome.nonfinite
        if outcome.value > best:
            best, best_name = outcome.value, member.name
    return best, best_name, nonfinite


def b_lower_trace(
    n: int,
    p: float,
    q_sequence: Sequence[float],
    family: ZonalFamily | None = None,
    budget: SearchBudget | None = None,
    n_ref: float | None = None,
    nash_family: ProfileFamily | None = None,
    max_iter: int = MinimizerDefaults.MAX_ITER,
    nodes: int = MinimizerDefaults.NODES,
) -> list[TraceRow]:
    """Lower estimates of B(p, q) along q -> p- with the matching minimizations.

    N_ref is, in order of preference, the given ``n_ref``, the Euclidean
    estimate over ``nash_family``, or A0(p). C_k = (B_hat - (p - q)) / N_ref.
    """
    if not q_sequence:
        raise DomainError("q_sequence must not be empty")
    if any(b <= a for a, b in zip(q_sequence, q_sequence[1:], strict=False)):
        raise DomainError("q_sequence must increase strictly")
    for q in q_sequence:
        Params(n, p, q)
    family = family if family is not None else default_zonal_family()
    budget = budget if budget is not None else SearchBudget()

    rows: list[TraceRow] = []
    b_values: list[float] = []
    for q in q_sequence:
        params = Params(n, p, q)
        if n_ref is not None:
            reference = n_ref
        elif nash_family is not None:
            reference = estimate_nash_constant(n, p, q, nash_family, budget).n_hat
        else:
            reference = a0_constant(n, p)
        b_hat, argmax, nonfinite = _b_hat(n, p, q, reference, family, budget)
        c_k = (b_hat - (p - q)) / reference
        result = minimize_j(n, p, q, c_k, budget=max_iter, nodes=nodes)
        b_values.append(b_hat)
        status = RowStatus.NONFINITE if nonfinite else result.status
        rows.append(
            TraceRow(
                n=n,
                p=p,
                q=q,
                theta=params.theta,
                n_ref=reference,
                b_hat=b_hat,
                c_k=c_k,
                nu=result.nu,
                el_residual=result.el_residual,
                running_max=running_max(b_values)[-1],
                family=argmax,
                status=status,
                seed=budget.seed,
            )
        )
        logger.info(f"b-trace q={q}: B_hat={b_hat:.10g} C_k={c_k:.6g} nu={result.nu:.10g}")
    return rows
