"""Closed-form constants, exponents and extremal moments.

Every quantity here reduces to the one-dimensional identity

    int_0^inf r^(m-1) exp(-c r^s) dr = Gamma(m/s) / (s c^(m/s))

so Gamma is the only special function needed. log(u0^p) is affine in r^s,
which keeps the log-weighted moments inside the same identity.
"""

import math

from scipy.special import gammaln

from ..core.exceptions import DomainError, NumericalError
from ..core.utils import adaptive_quad
from ..logging_config import get_logger
from ..models import ExtremalSpec, Moments, Params

logger = get_logger(__name__)

MOMENT_CROSSCHECK_RTOL = 1e-8


def surface_area(n: int) -> float:
    """Area of the unit sphere S^(n-1) in R^n, 2 pi^(n/2) / Gamma(n/2)."""
    if n < 2:
        raise DomainError(f"requires n >= 2, got n={n}")
    return math.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - gammaln(0.5 * n))


def gamma_integral(m: float, s: float, c: float) -> float:
    """int_0^inf r^(m-1) e^(-c r^s) dr for positive m, s, c."""
    if m <= 0 or s <= 0 or c <= 0:
        raise DomainError(
            f"gamma_integral requires positive arguments, got m={m}, s={s}, c={c}"
        )
    return math.exp(gammaln(m / s) - math.log(s) - (m / s) * math.log(c))


def a0_constant(n: int, p: float) -> float:
    """Best constant of the Euclidean Lp-entropy inequality.

    A0(p) = (p/n) ((p-1)/e)^(p-1) pi^(-p/2)
            (Gamma(n/2 + 1) / Gamma(n(p-1)/p + 1))^(p/n)
    """
    Params(n, p, allow_large_p=True)
    log_value = (
        math.log(p / n)
        + (p - 1.0) * (math.log(p - 1.0) - 1.0)
        - 0.5 * p * math.log(math.pi)
        + (p / n) * (gammaln(0.5 * n + 1.0) - gammaln(n * (p - 1.0) / p + 1.0))
    )
    return math.exp(log_value)


def theta(n: int, p: float, q: float) -> float:
    """Nash interpolation exponent theta(n, p, q) in (0, 1)."""
    if q >= p:
        raise DomainError(f"requires q < p, got p={p}, q={q}")
    return Params(n, p, q, allow_large_p=True).theta


def extremal_spec(n: int, p: float) -> ExtremalSpec:
    """Extremal a e^{-r^s} of the entropy inequality with unit Lp mass (b = 1)."""
    params = Params(n, p, allow_large_p=True)
    s = params.tail_exponent
    mass_without_amplitude = surface_area(n) * gamma_integral(n, s, p)
    a = mass_without_amplitude ** (-1.0 / p)
    prefactor = math.exp(
        -0.5 * n * math.log(math.pi)
        + gammaln(0.5 * n + 1.0)
        - gammaln(n * (p - 1.0) / p + 1.0)
    )
    return ExtremalSpec(n=n, p=p, a=a, b=1.0, s=s, literature_prefactor=prefactor)


def _closed_form_moments(spec: ExtremalSpec) -> Moments:
    n, p, s = spec.n, spec.p, spec.s
    weight = spec.a**p * surface_area(n)
    log_ap = p * math.log(spec.a)

    J1 = weight * gamma_integral(n + 2.0, s, p)
    I2 = weight * s**p * gamma_integral(n + s, s, p)
    J2 = weight * s**p * gamma_integral(n + s + 2.0, s, p)
    # u0^p log u0^p = u0^p (p log a - p r^s)
    I1 = log_ap - p * weight * gamma_integral(n + s, s, p)
    J3 = log_ap * J1 - p * weight * gamma_integral(n + s + 2.0, s, p)
    return Moments(n=n, p=p, I1=I1, I2=I2, J1=J1, J2=J2, J3=J3)


def moments_by_quadrature(n: int, p: float) -> Moments:
    """The five moments by adaptive quadrature in t = r^s.

    Independent of the Gamma reductions; used as their cross-check.
    """
    spec = extremal_spec(n, p)
    s = spec.s
    weight = spec.a**p * surface_area(n) / s
    log_ap = p * math.log(spec.a)
    upper = 60.0 / p

    def radial(m: float, factor) -> float:
        # int_0^inf r^(m-1) F(r^s) dr = (1/s) int_0^inf t^(m/s - 1) F(t) dt
        def integrand(t: float) -> float:
            return t ** (m / s - 1.0) * math.exp(-p * t) * factor(t)

        return weight * adaptive_quad(integrand, 0.0, upper, points=(1.0 / p,))

    def one(t: float) -> float:
        return 1.0

    def log_density(t: float) -> float:
        return log_ap - p * t

    gradient_power = s**p
    # |grad u0|^p carries r^s = t
    return Moments(
        n=n,
        p=p,
        I1=radial(n, log_density),
        I2=gradient_power * radial(n + s, one),
        J1=radial(n + 2.0, one),
        J2=gradient_power * radial(n + s + 2.0, one),
        J3=radial(n + 2.0, log_density),
    )


def moments(n: int, p: float, verify: bool = True) -> Moments:
    """Moments of the normalized extremal, cross-checked against quadrature.

    Raises:
        NumericalError: If closed forms and quadrature disagree beyond 1e-8.
    """
    result = _closed_form_moments(extremal_spec(n, p))
    if not verify:
        return result

    check = moments_by_quadrature(n, p)
    for name, exact in result.as_dict().items():
        numeric = check.as_dict()[name]
        scale = max(abs(exact), 1.0)
        if abs(exact - numeric) > MOMENT_CROSSCHECK_RTOL * scale:
            raise NumericalError(
                f"moment {name} for n={n}, p={p}: closed form {exact!r} "
                f"vs quadrature {numeric!r}"
            )
    logger.debug(f"moments n={n} p={p} verified: {result.as_dict()}")
    return result
