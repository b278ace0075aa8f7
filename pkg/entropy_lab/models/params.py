"""Exponent bookkeeping and closed-form records."""

from dataclasses import dataclass, replace

from ..core.exceptions import DomainError


@dataclass(slots=True, frozen=True)
class Params:
    """Dimension and exponents (n, p, q) with their domain guards.

    ``q`` is optional: entropy-only experiments never need it. ``p <= 2`` is
    enforced unless ``allow_large_p`` is set; ``p < n`` always is.
    """

    n: int
    p: float
    q: float | None = None
    allow_large_p: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise DomainError(f"requires an integer dimension n >= 2, got n={self.n}")
        if not 1.0 < self.p < self.n:
            raise DomainError(
                f"requires 1 < p < n, got n={self.n}, p={self.p}"
            )
        if self.p > 2.0 and not self.allow_large_p:
            raise DomainError(f"requires p < n and p ≤ 2, got n={self.n}, p={self.p}")
        if self.q is not None and not 1.0 <= self.q < self.p:
            raise DomainError(f"requires 1 ≤ q < p, got p={self.p}, q={self.q}")

    def with_q(self, q: float) -> "Params":
        return replace(self, q=q)

    @property
    def tail_exponent(self) -> float:
        """s = p/(p-1), the decay exponent of the entropy extremal."""
        return self.p / (self.p - 1.0)

    @property
    def p_star(self) -> float:
        return self.n * self.p / (self.n - self.p)

    @property
    def theta(self) -> float:
        """Interpolation exponent n(p-q)/(q(p-n)+np)."""
        q = self._require_q()
        return self.n * (self.p - q) / (q * (self.p - self.n) + self.n * self.p)

    @property
    def nash_exponent(self) -> float:
        """p(1-theta)/(q theta), the power carried by the Lq mass."""
        q = self._require_q()
        theta = self.theta
        return self.p * (1.0 - theta) / (q * theta)

    def _require_q(self) -> float:
        if self.q is None:
            raise DomainError("this quantity needs the subcritical exponent q")
        return self.q


@dataclass(slots=True, frozen=True)
class ExtremalSpec:
    """Amplitude a, rate b and tail exponent s of a e^{-b r^s}."""

    n: int
    p: float
    a: float
    b: float
    s: float
    literature_prefactor: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise DomainError(f"extremal needs a, b > 0, got a={self.a}, b={self.b}")


@dataclass(slots=True, frozen=True)
class Moments:
    """Euclidean integrals of the normalized extremal and its gradient.

    I1 = int u0^p log u0^p, I2 = int |grad u0|^p,
    J1 = int u0^p |x|^2, J2 = int |grad u0|^p |x|^2, J3 = int u0^p log(u0^p) |x|^2.
    """

    n: int
    p: float
    I1: float
    I2: float
    J1: float
    J2: float
    J3: float

    def as_dict(self) -> dict[str, float]:
        return {
            "I1": self.I1,
            "I2": self.I2,
            "J1": self.J1,
            "J2": self.J2,
            "J3": self.J3,
        }
