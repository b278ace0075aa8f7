"""Radial profiles on R^n and the Euclidean entropy functionals.

A radial function u(|x|) turns every integral over R^n into

    omega_{n-1} int_0^R f(u(r), u'(r)) r^(n-1) dr,

evaluated by adaptive Gauss-Kronrod for analytic profiles and by composite
Simpson for sampled ones.
"""

import csv
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from ..core.constants import FamilyName, QuadratureDefaults
from ..core.exceptions import DegenerateProfileError, DomainError, NormalizationError
from ..core.utils import adaptive_quad, xlogx
from ..logging_config import get_logger
from ..models import FunctionalReport, Params
from .closedform import a0_constant, extremal_spec, surface_area

logger = get_logger(__name__)

# integrand(r, u, du) -> value; must accept floats and arrays
Integrand = Callable[[Any, Any, Any], Any]


@dataclass(slots=True, frozen=True)
class StretchedExp:
    """c exp(-b r^s); a Gaussian when s = 2."""

    c: float
    b: float
    s: float

    def __post_init__(self) -> None:
        if self.c < 0 or self.b <= 0 or self.s < 1.0:
            raise DomainError(
                f"stretched exponential needs c >= 0, b > 0, s >= 1; got {self}"
            )

    def value(self, r: Any) -> Any:
        return self.c * np.exp(-self.b * r**self.s)

    def derivative(self, r: Any) -> Any:
        return -self.c * self.b * self.s * r ** (self.s - 1.0) * np.exp(-self.b * r**self.s)

    def scale(self) -> float:
        return self.b ** (-1.0 / self.s)

    def tail_radius(self, p: float) -> float:
        return (QuadratureDefaults.TAIL_LOG_DECAY / (p * self.b)) ** (1.0 / self.s)

    def scaled(self, k: float) -> "StretchedExp":
        return StretchedExp(self.c * k, self.b, self.s)

    def dilated(self, lam: float) -> "StretchedExp":
        return StretchedExp(self.c, self.b * lam**self.s, self.s)

    def params(self) -> tuple[float, ...]:
        return (self.c, self.b, self.s)

    @property
    def amplitude(self) -> float:
        return self.c


@dataclass(slots=True, frozen=True)
class Bump:
    """w (1 - (r/rho)^kappa)_+^2, compactly supported on the ball of radius rho.

    Large kappa approaches the indicator of the ball.
    """

    w: float
    rho: float
    kappa: float

    def __post_init__(self) -> None:
        if self.w < 0 or self.rho <= 0 or self.kappa < 1.0:
            raise DomainError(f"bump needs w >= 0, rho > 0, kappa >= 1; got {self}")

    def value(self, r: Any) -> Any:
        t = np.minimum(r / self.rho, 1.0)
        return self.w * (1.0 - t**self.kappa) ** 2

    def derivative(self, r: Any) -> Any:
        t = np.minimum(r / self.rho, 1.0)
        return (
            -2.0 * self.w * (1.0 - t**self.kappa) * self.kappa * t ** (self.kappa - 1.0)
            / self.rho
        )

    def scale(self) -> float:
        return self.rho

    def tail_radius(self, p: float) -> float:
        return self.rho

    def scaled(self, k: float) -> "Bump":
        return Bump(self.w * k, self.rho, self.kappa)

    def dilated(self, lam: float) -> "Bump":
        return Bump(self.w, self.rho / lam, self.kappa)

    def params(self) -> tuple[float, ...]:
        return (self.w, self.rho, self.kappa)

    @property
    def amplitude(self) -> float:
        return self.w


class RadialFunction(Protocol):
    """Anything the Euclidean functionals can integrate."""

    def radial_integral(self, n: int, integrand: Integrand, p: float) -> float: ...

    def describe(self) -> str: ...


@dataclass(slots=True, frozen=True)
class ParametricProfile:
    """Sum of analytic components with closed-form radial derivative."""

    family: FamilyName
    components: tuple[StretchedExp | Bump, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise DegenerateProfileError("profile needs at least one component")
        if all(component.amplitude == 0 for component in self.components):
            raise DegenerateProfileError("profile is identically zero")

    def value(self, r: Any) -> Any:
        return sum(component.value(r) for component in self.components)

    def derivative(self, r: Any) -> Any:
        return sum(component.derivative(r) for component in self.components)

    @property
    def params(self) -> tuple[float, ...]:
        return tuple(x for component in self.components for x in component.params())

    def tail_radius(self, p: float) -> float:
        return max(component.tail_radius(p) for component in self.components)

    def breakpoints(self) -> tuple[float, ...]:
        scales = {component.scale() for component in self.components}
        return tuple(sorted(scales))

    def scaled(self, k: float) -> "ParametricProfile":
        if k <= 0:
            raise DomainError(f"amplitude factor must be positive, got {k}")
        return ParametricProfile(
            self.family, tuple(component.scaled(k) for component in self.components)
        )

    def dilated(self, lam: float, n: int, p: float) -> "ParametricProfile":
        """Mass-preserving dilation lam^(n/p) u(lam x)."""
        if lam <= 0:
            raise DomainError(f"dilation factor must be positive, got {lam}")
        factor = lam ** (n / p)
        return ParametricProfile(
            self.family,
            tuple(component.dilated(lam).scaled(factor) for component in self.components),
        )

    def normalized(self, n: int, p: float) -> "ParametricProfile":
        return self.scaled(1.0 / lp_norm(self, n, p))

    def radial_integral(self, n: int, integrand: Integrand, p: float) -> float:
        omega = surface_area(n)
        upper = self.tail_radius(p)

        def weighted(r: float) -> float:
            return float(integrand(r, self.value(r), self.derivative(r))) * r ** (n - 1)

        return omega * adaptive_quad(weighted, 0.0, upper, points=self.breakpoints())

    def describe(self) -> str:
        return f"{self.family}[{';'.join(f'{x:.10g}' for x in self.params)}]"


def stretched_exp(c: float = 1.0, b: float = 1.0, s: float = 2.0) -> ParametricProfile:
    return ParametricProfile(FamilyName.STRETCHED_EXP, (StretchedExp(c, b, s),))


def gaussian(amplitude: float = 1.0, rate: float = 1.0) -> ParametricProfile:
    return stretched_exp(amplitude, rate, 2.0)


def gaussian_mixture(
    weights: tuple[float, ...], rates: tuple[float, ...]
) -> ParametricProfile:
    if len(weights) != len(rates):
        raise DomainError("gaussian mixture needs as many weights as rates")
    return ParametricProfile(
        FamilyName.GAUSSIAN_MIXTURE,
        tuple(StretchedExp(w, b, 2.0) for w, b in zip(weights, rates, strict=True)),
    )


def bump_mixture(
    weights: tuple[float, ...], radii: tuple[float, ...], kappas: tuple[float, ...]
) -> ParametricProfile:
    if not len(weights) == len(radii) == len(kappas):
        raise DomainError("bump mixture needs matching weights, radii and kappas")
    return ParametricProfile(
        FamilyName.BUMP_MIXTURE,
        tuple(Bump(w, rho, k) for w, rho, k in zip(weights, radii, kappas, strict=True)),
    )


def extremal_profile(n: int, p: float) -> ParametricProfile:
    """The unit-mass extremal a e^{-r^(p/(p-1))}."""
    spec = extremal_spec(n, p)
    return stretched_exp(spec.a, spec.b, spec.s)


@dataclass(slots=True, frozen=True)
class RadialProfile:
    """Radial function sampled on a strictly increasing grid 0 = r_0 < ... < r_N.

    When ``n`` and ``p`` are given the samples must also pass the tail
    criterion: u(R)^p R^n at most 1e-12 of the Lp mass.
    """

    grid: np.ndarray
    values: np.ndarray
    label: str = field(default="sampled")
    n: int | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 3:
            raise DegenerateProfileError("grid and values must be matching 1-D arrays")
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise DegenerateProfileError("grid must start at 0 and increase strictly")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DegenerateProfileError("values must be finite and nonnegative")
        if not np.any(values > 0):
            raise DegenerateProfileError("profile is identically zero")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.n is not None and self.p is not None:
            tail = self.tail_fraction(self.n, self.p)
            if not tail <= QuadratureDefaults.TAIL_FRACTION_MAX:
                raise DegenerateProfileError(
                    f"truncated tail: u(R)^p R^n is {tail:.3g} of the mass at R={grid[-1]:g}"
                )

    @classmethod
    def sample(
        cls,
        profile: ParametricProfile,
        p: float,
        num: int = QuadratureDefaults.SAMPLED_NODES,
    ) -> "RadialProfile":
        """Sample an analytic profile on the nonuniform grid."""
        grid = radial_grid(profile.tail_radius(p), num, min(profile.breakpoints()))
        return cls(grid, np.asarray(profile.value(grid), dtype=float), profile.describe())

    def derivative(self) -> np.ndarray:
        return CubicSpline(self.grid, self.values)(self.grid, 1)

    def radial_integral(self, n: int, integrand: Integrand, p: float) -> float:
        r = self.grid
        y = integrand(r, self.values, self.derivative()) * r ** (n - 1)
        return surface_area(n) * float(simpson(y, x=r))

    def tail_fraction(self, n: int, p: float) -> float:
        """u(R)^p R^n relative to the total Lp mass."""
        mass = self.radial_integral(n, lambda r, u, du: u**p, p)
        if not mass > 0:
            raise DegenerateProfileError(f"Lp mass {mass!r} for {self.describe()}")
        return float(self.values[-1] ** p * self.grid[-1] ** n / mass)

    def describe(self) -> str:
        return self.label

    def to_csv(self, path: str | Path, n: int, p: float, family: str, params: str) -> None:
        """Two-column (radius, value) CSV with a metadata comment line."""
        with open(path, "w", newline="") as handle:
            handle.write(f"# n={n} p={p!r} family={family} params={params}\n")
            writer = csv.writer(handle)
            writer.writerow(["radius", "value"])
            for r, u in zip(self.grid, self.values, strict=True):
                writer.writerow([repr(float(r)), repr(float(u))])

    @classmethod
    def from_csv(cls, path: str | Path) -> tuple["RadialProfile", dict[str, str]]:
        metadata: dict[str, str] = {}
        radii: list[float] = []
        values: list[float] = []
        with open(path, newline="") as handle:
            first = handle.readline()
            if first.startswith("#"):
                for token in first[1:].split():
                    key, _, value = token.partition("=")
                    metadata[key] = value
            else:
                handle.seek(0)
            reader = csv.DictReader(handle)
            for row in reader:
                radii.append(float(row["radius"]))
                values.append(float(row["value"]))
        label = metadata.get("family", "sampled")
        n = int(metadata["n"]) if "n" in metadata else None
        p = float(metadata["p"]) if "p" in metadata else None
        return cls(np.array(radii), np.array(values), label, n, p), metadata


def radial_grid(r_max: float, num: int, core: float) -> np.ndarray:
    """Grid on [0, r_max]: geometric near 0, uniform over the core, geometric tail."""
    if r_max <= 0 or num < 10 or core <= 0:
        raise DegenerateProfileError(
            f"degenerate grid request r_max={r_max}, num={num}, core={core}"
        )
    core = min(core, r_max / 4.0)
    n_inner = max(num // 10, 2)
    n_tail = max(3 * num // 10, 2)
    n_core = num - n_inner - n_tail
    inner = np.geomspace(core * 1e-4, 0.1 * core, n_inner, endpoint=False)
    middle = np.linspace(0.1 * core, 4.0 * core, n_core, endpoint=False)
    tail = np.geomspace(4.0 * core, r_max, n_tail)
    return np.unique(np.concatenate(([0.0], inner, middle, tail)))


def _mass(profile: RadialFunction, n: int, p: float) -> float:
    return profile.radial_integral(n, lambda r, u, du: u**p, p)


def require_normalized(profile: RadialFunction, n: int, p: float) -> None:
    norm = lp_norm(profile, n, p)
    if abs(norm - 1.0) > QuadratureDefaults.NORMALIZATION_TOL:
        raise NormalizationError(
            f"requires unit Lp mass, got ||u||_p = {norm!r} for {profile.describe()}"
        )


def lp_norm(profile: RadialFunction, n: int, p: float) -> float:
    """(int_{R^n} u^p dx)^(1/p)."""
    mass = _mass(profile, n, p)
    if mass <= 0 or not math.isfinite(mass):
        raise DegenerateProfileError(f"Lp mass {mass!r} for {profile.describe()}")
    return mass ** (1.0 / p)


def lq_mass(profile: RadialFunction, n: int, q: float, p: float) -> float:
    """int_{R^n} u^q dx; ``p`` only selects the tail radius."""
    return profile.radial_integral(n, lambda r, u, du: u**q, p)


def lq_excess(profile: RadialFunction, n: int, p: float, q: float) -> float:
    """int u^q - int u^p computed as int u^p expm1((q - p) log u) without cancellation."""

    def integrand(r: Any, u: Any, du: Any) -> Any:
        positive = np.asarray(u) > 0
        safe = np.where(positive, u, 1.0)
        return np.where(positive, safe**p * np.expm1((q - p) * np.log(safe)), 0.0)

    return profile.radial_integral(n, integrand, p)


def raw_entropy(profile: RadialFunction, n: int, p: float) -> float:
    """int u^p log(u^p) without any normalization check."""
    return profile.radial_integral(n, lambda r, u, du: xlogx(u**p), p)


def entropy(profile: RadialFunction, n: int, p: float) -> float:
    """Ent(u^p) = int u^p log(u^p) for a unit-mass profile."""
    require_normalized(profile, n, p)
    return raw_entropy(profile, n, p)


def dirichlet(profile: RadialFunction, n: int, p: float) -> float:
    """int_{R^n} |grad u|^p dx."""
    return profile.radial_integral(n, lambda r, u, du: np.abs(du) ** p, p)


def entropy_deficit(profile: RadialFunction, n: int, p: float) -> float:
    """(n/p) log(A0(p) int |grad u|^p) - Ent(u^p); nonnegative, zero on extremals."""
    ent = entropy(profile, n, p)
    energy = dirichlet(profile, n, p)
    if energy <= 0:
        raise DegenerateProfileError(
            f"zero Dirichlet energy for {profile.describe()}: deficit undefined"
        )
    return (n / p) * math.log(a0_constant(n, p) * energy) - ent


def holder_interpolation_check(
    profile: RadialFunction, n: int, p: float
) -> tuple[float, float]:
    """(Ent(u^p), (n/p) log ||u||_{p*}^p); the first never exceeds the second."""
    params = Params(n, p)
    ent = entropy(profile, n, p)
    p_star = params.p_star
    critical_mass = lq_mass(profile, n, p_star, p)
    if not math.isfinite(critical_mass) or critical_mass <= 0:
        raise DegenerateProfileError(
            f"L^{p_star:g} mass {critical_mass!r} for {profile.describe()}"
        )
    rhs = (n / p) * (p / p_star) * math.log(critical_mass)
    return ent, rhs


def evaluate(profile: RadialFunction, params: Params) -> FunctionalReport:
    """All Euclidean functionals of one profile."""
    n, p = params.n, params.p
    norm = lp_norm(profile, n, p)
    energy = dirichlet(profile, n, p)
    normalized = abs(norm - 1.0) <= QuadratureDefaults.NORMALIZATION_TOL
    ent = raw_entropy(profile, n, p)
    deficit = None
    if normalized and energy > 0:
        deficit = (n / p) * math.log(a0_constant(n, p) * energy) - ent
    return FunctionalReport(
        lp_mass=norm,
        entropy=ent,
        dirichlet=energy,
        deficit=deficit,
        params=params,
        provenance=profile.describe(),
    )
