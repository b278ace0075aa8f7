"""Zonal functions on the unit round sphere S^n.

A zonal u(theta) depends on the colatitude only, which is also the geodesic
distance to the north pole. Its gradient is u'(theta) and every integral is

    omega_{n-1} int_0^pi f(u, u') sin(theta)^(n-1) dtheta

by composite Simpson. The geodesic bubble eta(theta) eps^(-n/p) u0(theta/eps)
reproduces the small-scale expansions of its mass, entropy and energy, whose
eps^2 coefficients carry the scalar curvature R = n(n-1).
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from ..core.constants import (
    TOOL_VERSION,
    BubbleDefaults,
    Observable,
    QuadratureDefaults,
    RowStatus,
    ZonalFamilyName,
)
from ..core.exceptions import DegenerateProfileError, DomainError, NormalizationError
from ..core.utils import build_record, xlogx
from ..logging_config import get_logger
from ..models import FunctionalReport, Params
from .closedform import a0_constant, extremal_spec, moments, surface_area
from .radial import Integrand
from .search import SearchBudget, multistart_maximize

logger = get_logger(__name__)

ILL_CONDITIONED_ABOVE = 1e10
COSINE_BOX = (0.0, 0.95)
SEARCH_NODES_PER_EPS = 40


@dataclass(slots=True, frozen=True)
class ZonalProfile:
    """Zonal function sampled on 0 = theta_0 < ... < theta_N = pi.

    ``derivative_values`` holds the exact colatitude derivative when known;
    otherwise it is taken from a cubic spline through the samples.
    """

    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray | None = None
    label: str = field(default="zonal")

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 3:
            raise DegenerateProfileError("grid and values must be matching 1-D arrays")
        if grid[0] != 0.0 or not math.isclose(grid[-1], math.pi, abs_tol=1e-12):
            raise DegenerateProfileError("zonal grid must span [0, pi]")
        if np.any(np.diff(grid) <= 0):
            raise DegenerateProfileError("zonal grid must increase strictly")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DegenerateProfileError("values must be finite and nonnegative")
        if not np.any(values > 0):
            raise DegenerateProfileError("profile is identically zero")
        arrays = [grid, values]
        if self.derivative_values is not None:
            slope = np.asarray(self.derivative_values, dtype=float)
            if slope.shape != grid.shape or not np.all(np.isfinite(slope)):
                raise DegenerateProfileError("derivative must match the grid and be finite")
            arrays.append(slope)
            object.__setattr__(self, "derivative_values", slope)
        for array in arrays:
            array.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def derivative(self) -> np.ndarray:
        if self.derivative_values is not None:
            return self.derivative_values
        return CubicSpline(self.grid, self.values)(self.grid, 1)

    def zonal_integral(self, n: int, integrand: Integrand) -> float:
        """omega_{n-1} int_0^pi integrand(theta, u, u') sin^(n-1) theta dtheta."""
        theta = self.grid
        y = integrand(theta, self.values, self.derivative()) * np.sin(theta) ** (n - 1)
        return surface_area(n) * float(simpson(y, x=theta))

    def scaled(self, k: float) -> "ZonalProfile":
        if k <= 0:
            raise DomainError(f"amplitude factor must be positive, got {k}")
        slope = None if self.derivative_values is None else k * self.derivative_values
        return ZonalProfile(self.grid, k * self.values, slope, self.label)

    def normalized(self, n: int, p: float) -> "ZonalProfile":
        return self.scaled(1.0 / zonal_lp_norm(self, n, p))

    def describe(self) -> str:
        return self.label


def uniform_zonal_grid(num: int = QuadratureDefaults.ZONAL_NODES) -> np.ndarray:
    if num < 3:
        raise DegenerateProfileError(f"zonal grid needs at least 3 nodes, got {num}")
    return np.linspace(0.0, math.pi, num)


def constant_profile(
    n: int, p: float, num: int = QuadratureDefaults.ZONAL_NODES
) -> ZonalProfile:
    """The unit-mass constant v^(-1/p)."""
    grid = uniform_zonal_grid(num)
    level = sphere_volume(n) ** (-1.0 / p)
    return ZonalProfile(grid, np.full_like(grid, level), np.zeros_like(grid), "constant")


def cosine_profile(
    t: float, num: int = QuadratureDefaults.ZONAL_NODES
) -> ZonalProfile:
    """1 + t cos(theta), positive for |t| < 1."""
    if not abs(t) < 1.0:
        raise DomainError(f"cosine profile needs |t| < 1, got t={t}")
    grid = uniform_zonal_grid(num)
    return ZonalProfile(grid, 1.0 + t * np.cos(grid), -t * np.sin(grid), f"cosine[{t:.10g}]")


def sphere_volume(n: int) -> float:
    """Volume of the unit round S^n, 2 pi^((n+1)/2) / Gamma((n+1)/2)."""
    if n < 2:
        raise DomainError(f"requires n >= 2, got n={n}")
    return surface_area(n + 1)


def zonal_mass(profile: ZonalProfile, n: int, p: float) -> float:
    return profile.zonal_integral(n, lambda t, u, du: u**p)


def zonal_lp_norm(profile: ZonalProfile, n: int, p: float) -> float:
    mass = zonal_mass(profile, n, p)
    if mass <= 0 or not math.isfinite(mass):
        raise DegenerateProfileError(f"Lp mass {mass!r} for {profile.describe()}")
    return mass ** (1.0 / p)


def zonal_lq_mass(profile: ZonalProfile, n: int, q: float) -> float:
    return profile.zonal_integral(n, lambda t, u, du: u**q)


def zonal_entropy(profile: ZonalProfile, n: int, p: float) -> float:
    """int u^p log(u^p) dv, without normalization check."""
    return profile.zonal_integral(n, lambda t, u, du: xlogx(u**p))


def zonal_dirichlet(profile: ZonalProfile, n: int, p: float) -> float:
    return profile.zonal_integral(n, lambda t, u, du: np.abs(du) ** p)


def require_unit_mass(profile: ZonalProfile, n: int, p: float) -> None:
    norm = zonal_lp_norm(profile, n, p)
    if abs(norm - 1.0) > QuadratureDefaults.NORMALIZATION_TOL:
        raise NormalizationError(
            f"requires unit Lp mass, got ||u||_p = {norm!r} for {profile.describe()}"
        )


def sphere_functionals(profile: ZonalProfile, n: int, p: float) -> FunctionalReport:
    """Lp norm, entropy and p-Dirichlet energy of a zonal profile on S^n."""
    params = Params(n, p)
    return FunctionalReport(
        lp_mass=zonal_lp_norm(profile, n, p),
        entropy=zonal_entropy(profile, n, p),
        dirichlet=zonal_dirichlet(profile, n, p),
        deficit=None,
        params=params,
        provenance=profile.describe(),
    )


@dataclass(slots=True, frozen=True)
class BubbleSpec:
    """Geodesic bubble of scale ``eps`` cut off at colatitude ``delta``."""

    eps: float
    delta: float
    n: int
    p: float

    def __post_init__(self) -> None:
        Params(self.n, self.p)
        if not 0.0 < self.delta < math.pi / 2:
            raise DomainError(f"requires 0 < delta < pi/2, got delta={self.delta}")
        if not 0.0 < self.eps <= self.delta / 4:
            raise DomainError(
                f"requires 0 < eps ≤ delta/4, got eps={self.eps}, delta={self.delta}"
            )


def cutoff(theta: Any, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """C^1 smoothstep: 1 on [0, delta/2], 0 beyond delta. Returns (eta, eta')."""
    half = 0.5 * delta
    t = np.clip((np.asarray(theta, dtype=float) - half) / half, 0.0, 1.0)
    eta = 1.0 - (3.0 * t**2 - 2.0 * t**3)
    slope = -(6.0 * t - 6.0 * t**2) / half
    return eta, slope


def bubble_grid(
    spec: BubbleSpec,
    nodes_per_eps: int = BubbleDefaults.NODES_PER_EPS,
    outer_nodes: int = BubbleDefaults.OUTER_NODES,
) -> np.ndarray:
    """Uniform nodes of spacing eps/nodes_per_eps on [0, delta], coarse beyond."""
    inner = max(int(math.ceil(spec.delta * nodes_per_eps / spec.eps)), 2)
    core = np.linspace(0.0, spec.delta, inner + 1)
    outer = np.linspace(spec.delta, math.pi, outer_nodes)
    return np.unique(np.concatenate((core, outer)))


def make_bubble(
    spec: BubbleSpec,
    nodes_per_eps: int = BubbleDefaults.NODES_PER_EPS,
    outer_nodes: int = BubbleDefaults.OUTER_NODES,
) -> ZonalProfile:
    """eta(theta) eps^(-n/p) u0(theta/eps) with its exact derivative."""
    theta = bubble_grid(spec, nodes_per_eps, outer_nodes)
    values, slope = bubble_values(theta, spec)
    return ZonalProfile(theta, values, slope, f"bubble[{spec.eps:.10g}]")


def bubble_values(theta: np.ndarray, spec: BubbleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Bubble values and colatitude derivative at arbitrary nodes."""
    extremal = extremal_spec(spec.n, spec.p)
    a, s = extremal.a, extremal.s
    eta, eta_slope = cutoff(theta, spec.delta)
    r = np.asarray(theta, dtype=float) / spec.eps
    core = a * np.exp(-(r**s))
    core_slope = -a * s * r ** (s - 1.0) * np.exp(-(r**s))
    amplitude = spec.eps ** (-spec.n / spec.p)
    values = amplitude * eta * core
    slope = amplitude * (eta_slope * core + eta * core_slope / spec.eps)
    return values, slope


@dataclass(slots=True, frozen=True)
class ExpansionFit:
    """Least-squares fit of a bubble observable against its eps expansion."""

    observable: Observable
    fitted_coeffs: tuple[float, ...]
    predicted_coeffs: tuple[float, ...]
    relative_error: tuple[float, ...]
    residual: float
    condition_number: float
    eps_grid: tuple[float, ...]
    delta: float
    n: int
    p: float

    @property
    def status(self) -> RowStatus:
        if self.condition_number > ILL_CONDITIONED_ABOVE:
            return RowStatus.ILL_CONDITIONED
        return RowStatus.OK

    def to_record(self, seed: int | None = None) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            observable=str(self.observable),
            fitted=self.fitted_coeffs,
            predicted=self.predicted_coeffs,
            relative_error=self.relative_error,
            residual=self.residual,
            condition_number=self.condition_number,
            eps_grid=self.eps_grid,
            delta=self.delta,
            status=str(self.status),
            seed=seed,
            tool_version=TOOL_VERSION,
        )


def _observable_row(
    observable: Observable, profile: ZonalProfile, n: int, p: float, eps: float
) -> tuple[list[float], float]:
    match observable:
        case Observable.MASS:
            return [1.0, eps**2], zonal_mass(profile, n, p)
        case Observable.ENTROPY:
            y = zonal_entropy(profile, n, p) + n * math.log(eps)
            return [1.0, eps**2, eps**2 * math.log(eps)], y
        case Observable.ENERGY:
            return [1.0, eps**2], eps**p * zonal_dirichlet(profile, n, p)
    raise DomainError(f"unknown observable {observable!r}")


def predicted_coefficients(n: int, p: float, observable: Observable) -> tuple[float, ...]:
    """Expansion coefficients from the extremal moments and R = n(n-1)."""
    m = moments(n, p)
    curvature = n * (n - 1.0)
    match observable:
        case Observable.MASS:
            return (1.0, -curvature * m.J1 / (6.0 * n))
        case Observable.ENTROPY:
            return (m.I1, -curvature * m.J3 / (6.0 * n), curvature * m.J1 / 6.0)
        case Observable.ENERGY:
            return (m.I2, -curvature * m.J2 / (6.0 * n))
    raise DomainError(f"unknown observable {observable!r}")


def default_fit_delta(eps_grid: Sequence[float]) -> float:
    """Smallest cutoff radius, at least the default, that keeps eps ≤ delta/8."""
    return max(BubbleDefaults.DELTA, 8.0 * max(eps_grid))


def expansion_fit(
    n: int,
    p: float,
    eps_grid: Sequence[float] = BubbleDefaults.EPS_GRID,
    observable: Observable = Observable.MASS,
    delta: float | None = None,
    nodes_per_eps: int = BubbleDefaults.NODES_PER_EPS,
) -> ExpansionFit:
    """Fit mass, shifted entropy or scaled energy of bubbles over ``eps_grid``.

    Raises:
        DomainError: Fewer than six scales, or a scale above delta/8.
    """
    Params(n, p)
    observable = Observable(observable)
    eps_values = sorted({float(e) for e in eps_grid})
    if len(eps_values) < BubbleDefaults.MIN_FIT_POINTS:
        raise DomainError(
            f"expansion fit needs at least {BubbleDefaults.MIN_FIT_POINTS} distinct "
            f"scales, got {len(eps_values)}"
        )
    if eps_values[0] <= 0:
        raise DomainError("bubble scales must be positive")
    delta = default_fit_delta(eps_values) if delta is None else delta
    if eps_values[-1] > delta / 8:
        raise DomainError(
            f"requires eps ≤ delta/8, got eps={eps_values[-1]}, delta={delta}"
        )

    rows, targets = [], []
    for eps in eps_values:
        bubble = make_bubble(BubbleSpec(eps, delta, n, p), nodes_per_eps)
        row, y = _observable_row(observable, bubble, n, p, eps)
        rows.append(row)
        targets.append(y)
    design = np.array(rows)
    y = np.array(targets)
    fitted, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.linalg.norm(design @ fitted - y))
    condition = float(np.linalg.cond(design))

    predicted = predicted_coefficients(n, p, observable)
    relative = tuple(
        abs(f - e) / max(abs(e), 1e-300) for f, e in zip(fitted, predicted, strict=True)
    )
    fit = ExpansionFit(
        observable=observable,
        fitted_coeffs=tuple(float(c) for c in fitted),
        predicted_coeffs=predicted,
        relative_error=relative,
        residual=residual,
        condition_number=condition,
        eps_grid=tuple(eps_values),
        delta=delta,
        n=n,
        p=p,
    )
    if fit.status != RowStatus.OK:
        logger.warning(f"{observable} fit n={n} p={p}: condition number {condition:.3g}")
    logger.info(
        f"{observable} fit n={n} p={p}: fitted={fit.fitted_coeffs} "
        f"predicted={predicted} residual={residual:.3g}"
    )
    return fit


def bubble_curvature_coefficient(n: int, p: float) -> float:
    """eps^2 coefficient of the bubble test of L(A0(p), B).

    -(R/6n) (I1 J1 + (n/p) J2/I2 - (n/p - 1) J1 - J3) with R = n(n-1).
    """
    m = moments(n, p)
    curvature = n * (n - 1.0)
    ratio = n / p
    return -(curvature / (6.0 * n)) * (
        m.I1 * m.J1 + ratio * m.J2 / m.I2 - (ratio - 1.0) * m.J1 - m.J3
    )


@dataclass(slots=True, frozen=True)
class FirstConstantRow:
    n: int
    p: float
    eps: float
    a_factor: float
    b_value: float
    slack: float

    def to_record(self, seed: int | None = None) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            eps=self.eps,
            a_factor=self.a_factor,
            B=self.b_value,
            slack=self.slack,
            status=str(RowStatus.OK),
            seed=seed,
            tool_version=TOOL_VERSION,
        )


def first_constant_scan(
    n: int,
    p: float,
    a_factor: float,
    b_value: float,
    eps_grid: Sequence[float] = BubbleDefaults.EPS_GRID,
    delta: float | None = None,
) -> list[FirstConstantRow]:
    """Slack of L(a_factor A0, B) on bubbles, in increasing eps.

    slack = (n/p) log(A D + B M) - [Ent/M + (n/p - 1) log M]; negative slack
    means the inequality fails on that bubble.
    """
    Params(n, p)
    if a_factor <= 0:
        raise DomainError(f"requires a_factor > 0, got {a_factor}")
    if b_value < 0:
        raise DomainError(f"requires B ≥ 0, got {b_value}")
    eps_values = sorted({float(e) for e in eps_grid})
    if not eps_values or eps_values[0] <= 0:
        raise DomainError("bubble scales must be positive")
    delta = default_fit_delta(eps_values) if delta is None else delta
    a_value = a_factor * a0_constant(n, p)

    rows = []
    for eps in eps_values:
        bubble = make_bubble(BubbleSpec(eps, delta, n, p))
        mass = zonal_mass(bubble, n, p)
        ent = zonal_entropy(bubble, n, p)
        energy = zonal_dirichlet(bubble, n, p)
        slack = (n / p) * math.log(a_value * energy + b_value * mass) - (
            ent / mass + (n / p - 1.0) * math.log(mass)
        )
        rows.append(FirstConstantRow(n, p, eps, a_factor, b_value, slack))
        logger.debug(f"first-constant eps={eps}: slack={slack:.6g}")
    return rows


class ZonalFamily(Protocol):
    """Box-constrained parametrization of zonal profiles on S^n."""

    name: str

    def bounds(self) -> list[tuple[float, float]]: ...

    def build(self, x: Sequence[float], n: int, p: float) -> ZonalProfile: ...

    def initial_points(self) -> list[tuple[float, ...]]: ...

    def members(self) -> tuple["ZonalFamily", ...]: ...


@dataclass(slots=True, frozen=True)
class ConstantZonal:
    num: int = QuadratureDefaults.ZONAL_NODES
    name: str = ZonalFamilyName.CONSTANT

    def bounds(self) -> list[tuple[float, float]]:
        return []

    def build(self, x: Sequence[float], n: int, p: float) -> ZonalProfile:
        return constant_profile(n, p, self.num)

    def initial_points(self) -> list[tuple[float, ...]]:
        return []

    def members(self) -> tuple[ZonalFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class CosineZonal:
    """1 + t cos(theta) for t in [0, 0.95]."""

    num: int = QuadratureDefaults.ZONAL_NODES
    name: str = ZonalFamilyName.COSINE

    def bounds(self) -> list[tuple[float, float]]:
        return [COSINE_BOX]

    def build(self, x: Sequence[float], n: int, p: float) -> ZonalProfile:
        return cosine_profile(float(x[0]), self.num)

    def initial_points(self) -> list[tuple[float, ...]]:
        return [(0.1,)]

    def members(self) -> tuple[ZonalFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class BubbleZonal:
    """Bubbles over log eps with a fixed cutoff radius."""

    delta: float = BubbleDefaults.DELTA
    min_eps: float = min(BubbleDefaults.EPS_GRID)
    name: str = ZonalFamilyName.BUBBLE

    def bounds(self) -> list[tuple[float, float]]:
        return [(math.log(self.min_eps), math.log(self.delta / 4))]

    def build(self, x: Sequence[float], n: int, p: float) -> ZonalProfile:
        spec = BubbleSpec(math.exp(float(x[0])), self.delta, n, p)
        return make_bubble(spec, nodes_per_eps=SEARCH_NODES_PER_EPS)

    def initial_points(self) -> list[tuple[float, ...]]:
        return [(math.log(self.delta / 8),)]

    def members(self) -> tuple[ZonalFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class ZonalUnion:
    parts: tuple[ZonalFamily, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise DomainError("union family needs at least one member")

    @property
    def name(self) -> str:
        return "+".join(part.name for part in self.members())

    def bounds(self) -> list[tuple[float, float]]:
        raise DomainError("a union family has no single parameter box")

    def build(self, x: Sequence[float], n: int, p: float) -> ZonalProfile:
        raise DomainError("a union family is searched member by member")

    def initial_points(self) -> list[tuple[float, ...]]:
        return []

    def members(self) -> tuple[ZonalFamily, ...]:
        return tuple(m for part in self.parts for m in part.members())


def default_zonal_family() -> ZonalUnion:
    return ZonalUnion((ConstantZonal(), CosineZonal(), BubbleZonal()))


def zonal_family_by_name(name: str) -> ZonalFamily:
    try:
        family = ZonalFamilyName(name)
    except ValueError as e:
        raise DomainError(f"unknown zonal family {name!r}") from e
    match family:
        case ZonalFamilyName.CONSTANT:
            return ConstantZonal()
        case ZonalFamilyName.COSINE:
            return CosineZonal()
        case ZonalFamilyName.BUBBLE:
            return BubbleZonal()
        case _:
            return default_zonal_family()


def build_zonal(family: ZonalFamily, x: Sequence[float], n: int, p: float) -> ZonalProfile:
    """Unit-mass member of ``family`` at parameters ``x``."""
    return family.build(x, n, p).normalized(n, p)


@dataclass(slots=True, frozen=True)
class BSearchResult:
    """Lower estimate of the second constant B for a given first constant A."""

    n: int
    p: float
    a_value: float
    b_hat: float
    volume_bound: float
    curvature_reference: float | None
    argmax_family: str
    argmax_params: tuple[float, ...]
    status: RowStatus
    evals: int
    seed: int

    def to_record(self) -> dict[str, Any]:
        return build_record(
            n=self.n,
            p=self.p,
            A=self.a_value,
            B_hat=self.b_hat,
            volume_bound=self.volume_bound,
            curvature_reference=self.curvature_reference,
            family=self.argmax_family,
            argmax_params=self.argmax_params,
            status=str(self.status),
            evals=self.evals,
            seed=self.seed,
            tool_version=TOOL_VERSION,
        )


def b_defect(profile: ZonalProfile, n: int, p: float, a_value: float) -> float:
    """exp((p/n) Ent(u^p)) - A int |grad u|^p for a unit-mass zonal u."""
    require_unit_mass(profile, n, p)
    ent = zonal_entropy(profile, n, p)
    return math.exp(p / n * ent) - a_value * zonal_dirichlet(profile, n, p)


def b_search(
    n: int,
    p: float,
    a_value: float | None = None,
    family: ZonalFamily | None = None,
    budget: SearchBudget | None = None,
) -> BSearchResult:
    """Smallest B making L(A, B) hold on every profile of ``family``.

    The constant function is always evaluated, so the result is at least
    v^(-p/n).
    """
    Params(n, p)
    a_value = a0_constant(n, p) if a_value is None else a_value
    if a_value <= 0:
        raise DomainError(f"requires A > 0, got A={a_value}")
    family = family if family is not None else default_zonal_family()
    budget = budget if budget is not None else SearchBudget()
    volume_bound = sphere_volume(n) ** (-p / n)

    constant = constant_profile(n, p)
    best_value = b_defect(constant, n, p, a_value)
    best_name, best_params = str(ZonalFamilyName.CONSTANT), ()
    evals, nonfinite = 1, 0
    for member in family.members():

        def objective(x: tuple[float, ...], member: ZonalFamily = member) -> float:
            return b_defect(build_zonal(member, x, n, p), n, p, a_value)

        outcome = multistart_maximize(
            objective,
            member.bounds(),
            budget,
            key=member.name,
            initial_points=member.initial_points(),
        )
        evals += outcome.evals
        nonfinite += outcome.nonfinite
        if outcome.value > best_value:
            best_value, best_name, best_params = outcome.value, member.name, outcome.params

    status = RowStatus.NONFINITE if nonfinite else RowStatus.OK
    reference = n * (n - 1.0) / (2.0 * n * math.pi * math.e) if p == 2.0 else None
    logger.info(
        f"b_search n={n} p={p}: B_hat={best_value:.10g} (volume bound "
        f"{volume_bound:.10g}) via {best_name}"
    )
    return BSearchResult(
        n=n,
        p=p,
        a_value=a_value,
        b_hat=best_value,
        volume_bound=volume_bound,
        curvature_reference=reference,
        argmax_family=best_name,
        argmax_params=best_params,
        status=status,
        evals=evals,
        seed=budget.seed,
    )
