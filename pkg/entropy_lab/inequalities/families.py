"""Finite-dimensional search families of radial profiles.

Every family fixes the amplitude and length gauge of one component: the
Nash quotient does not see either, so the free parameters are shape only.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

from ..core.constants import FamilyName
from ..core.exceptions import DomainError
from .radial import ParametricProfile, bump_mixture, gaussian_mixture, stretched_exp

LOG_WEIGHT_BOX = (-5.0, 5.0)
LOG_RATE_BOX = (-4.0, 4.0)
LOG_RADIUS_BOX = (-2.5, 2.5)
KAPPA_BOX = (1.0, 12.0)
TAIL_EXPONENT_BOX = (1.05, 8.0)


class ProfileFamily(Protocol):
    """Box-constrained parametrization of radial profiles."""

    name: str

    def bounds(self) -> list[tuple[float, float]]: ...

    def build(self, x: Sequence[float]) -> ParametricProfile: ...

    def initial_points(self) -> list[tuple[float, ...]]: ...

    def members(self) -> tuple["ProfileFamily", ...]: ...


@dataclass(slots=True, frozen=True)
class StretchedExpFamily:
    """exp(-r^s) over the tail exponent s."""

    name: str = FamilyName.STRETCHED_EXP

    def bounds(self) -> list[tuple[float, float]]:
        return [TAIL_EXPONENT_BOX]

    def build(self, x: Sequence[float]) -> ParametricProfile:
        return stretched_exp(1.0, 1.0, float(x[0]))

    def initial_points(self) -> list[tuple[float, ...]]:
        return [(2.0,)]

    def members(self) -> tuple[ProfileFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class GaussianMixtureFamily:
    """sum_k w_k exp(-b_k r^2) with w_1 = b_1 = 1 and log-parametrized others."""

    components: int = 3
    name: str = FamilyName.GAUSSIAN_MIXTURE

    def __post_init__(self) -> None:
        if self.components < 1:
            raise DomainError("gaussian mixture needs at least one component")

    def bounds(self) -> list[tuple[float, float]]:
        return [LOG_WEIGHT_BOX, LOG_RATE_BOX] * (self.components - 1)

    def build(self, x: Sequence[float]) -> ParametricProfile:
        weights = [1.0] + [math.exp(v) for v in x[0::2]]
        rates = [1.0] + [math.exp(v) for v in x[1::2]]
        return gaussian_mixture(tuple(weights), tuple(rates))

    def initial_points(self) -> list[tuple[float, ...]]:
        return [(-5.0, 0.0) * (self.components - 1)]

    def members(self) -> tuple[ProfileFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class BumpMixtureFamily:
    """sum_k w_k (1 - (r/rho_k)^kappa_k)_+^2 with w_1 = rho_1 = 1."""

    components: int = 2
    name: str = FamilyName.BUMP_MIXTURE

    def __post_init__(self) -> None:
        if self.components < 1:
            raise DomainError("bump mixture needs at least one component")

    def bounds(self) -> list[tuple[float, float]]:
        return [KAPPA_BOX] + [LOG_WEIGHT_BOX, LOG_RADIUS_BOX, KAPPA_BOX] * (
            self.components - 1
        )

    def build(self, x: Sequence[float]) -> ParametricProfile:
        weights = [1.0] + [math.exp(v) for v in x[1::3]]
        radii = [1.0] + [math.exp(v) for v in x[2::3]]
        kappas = [float(x[0])] + [float(v) for v in x[3::3]]
        return bump_mixture(tuple(weights), tuple(radii), tuple(kappas))

    def initial_points(self) -> list[tuple[float, ...]]:
        return [(2.0,) + (-5.0, 0.0, 2.0) * (self.components - 1)]

    def members(self) -> tuple[ProfileFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class FixedFamily:
    """A single profile with no free parameters."""

    profile: ParametricProfile
    name: str = FamilyName.FIXED

    def bounds(self) -> list[tuple[float, float]]:
        return []

    def build(self, x: Sequence[float]) -> ParametricProfile:
        return self.profile

    def initial_points(self) -> list[tuple[float, ...]]:
        return []

    def members(self) -> tuple[ProfileFamily, ...]:
        return (self,)


@dataclass(slots=True, frozen=True)
class UnionFamily:
    """Members searched independently; the best member wins."""

    parts: tuple[ProfileFamily, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise DomainError("union family needs at least one member")

    @property
    def name(self) -> str:
        return "+".join(part.name for part in self.members())

    def bounds(self) -> list[tuple[float, float]]:
        raise DomainError("a union family has no single parameter box")

    def build(self, x: Sequence[float]) -> ParametricProfile:
        raise DomainError("a union family is searched member by member")

    def initial_points(self) -> list[tuple[float, ...]]:
        return []

    def members(self) -> tuple[ProfileFamily, ...]:
        return tuple(m for part in self.parts for m in part.members())


def default_family() -> UnionFamily:
    """Stretched exponentials together with Gaussian and bump mixtures."""
    return UnionFamily((StretchedExpFamily(), GaussianMixtureFamily(), BumpMixtureFamily()))


def family_by_name(name: str) -> ProfileFamily:
    """Resolve a family name from the CLI or a config file."""
    try:
        family = FamilyName(name)
    except ValueError as e:
        raise DomainError(f"unknown profile family {name!r}") from e
    match family:
        case FamilyName.STRETCHED_EXP:
            return StretchedExpFamily()
        case FamilyName.GAUSSIAN_MIXTURE:
            return GaussianMixtureFamily()
        case FamilyName.BUMP_MIXTURE:
            return BumpMixtureFamily()
        case FamilyName.DEFAULT:
            return default_family()
        case _:
            raise DomainError(f"family {name!r} cannot be built from its name")
