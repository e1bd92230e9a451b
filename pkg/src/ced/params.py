"""Model parameters, exact rational weights, and closed-form critical quantities.

The model lives on the rooted d-ary tree: red spreads to white children at
rate lambda, blue overtakes red at rate 1, red dies at rate rho.  Everything
downstream consumes the height-indexed step weights defined here:

    u(j) = lambda / (1 + lambda + (j+1) rho)      rise from height j
    v(j) = 1 / (1 + lambda + (j+2) rho)           fall ending at height j
    a(j) = u(j) v(j)                              per-excursion weight
    b(j) = d a(j)                                 tree-weighted variant

All certified computation happens in exact rational arithmetic
(`fractions.Fraction`: lowest terms, positive denominator, exact ops,
division by zero raises).  Irrational quantities, such as the endpoints of
the coexistence window

    lambda_c^-/+ = 2d - 1 -/+ 2 sqrt(d^2 - d),

are returned as directed enclosures: intervals with rational endpoints,
outward rounded, so strict inequality tests against them stay sound
without symbolic algebra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

# Exact scalars throughout the package are stdlib Fractions.
ExactScalar = Fraction

#: Default width of directed enclosures for irrational quantities.
DEFAULT_ENCLOSURE_WIDTH = Fraction(1, 10**30)

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Enclosure:
    """Directed interval [lo, hi] with rational endpoints.

    The enclosed real value r satisfies lo <= r <= hi.  When the value is
    known to be irrational the bounds are strict, so `hi < x` certifies
    r < x and `lo > x` certifies r > x.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"inverted enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: object) -> bool:
        return self.lo <= x <= self.hi  # type: ignore[operator]


def sqrt_enclosure(x: Fraction | int, width: Fraction = DEFAULT_ENCLOSURE_WIDTH) -> Enclosure:
    """Enclose sqrt(x) in a rational interval no wider than `width`.

    Uses the integer square root (monotone Newton refinement under the
    hood) on a scaled radicand: with x = p/q and N = ceil(1 / (width q)),

        s = isqrt(p q N^2)  gives  s <= N sqrt(pq) < s + 1,

    so sqrt(x) = sqrt(pq)/q lies in [s/(Nq), (s+1)/(Nq)], an interval of
    width 1/(Nq) <= width.  Exact when x is a perfect rational square.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative rational")
    if width <= 0:
        raise ValueError("enclosure width must be positive")
    if x == 0:
        return Enclosure(_ZERO, _ZERO)
    p, q = x.numerator, x.denominator
    n = p * q
    scale = max(1, math.ceil(1 / (width * q)))
    s = math.isqrt(n * scale * scale)
    if s * s == n * scale * scale:
        root = Fraction(s, scale * q)
        return Enclosure(root, root)
    return Enclosure(Fraction(s, scale * q), Fraction(s + 1, scale * q))


@dataclass(frozen=True)
class ModelParams:
    """The triple (d, lambda, rho): branching factor, spread rate, death rate.

    d >= 2 children per vertex, lambda > 0 exact rational, rho >= 0 exact
    rational.  rho = 0 is allowed (the classic chase-escape limit).
    """

    d: int
    lam: Fraction
    rho: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or isinstance(self.d, bool) or self.d < 2:
            raise ValueError(f"branching factor d must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.lam <= 0:
            raise ValueError(f"spread rate lambda must be positive, got {self.lam}")
        if self.rho < 0:
            raise ValueError(f"death rate rho must be nonnegative, got {self.rho}")


@dataclass(frozen=True)
class LambdaInterval:
    """Enclosures of the coexistence-window endpoints.

    `lower` and `upper` enclose the two roots of x^2 - (4d-2)x + 1 = 0,
    i.e. 2d - 1 -/+ 2 sqrt(d^2 - d).  Spread rates strictly between the
    roots admit a positive critical death rate; outside, it is zero.
    """

    lower: Enclosure
    upper: Enclosure


class WindowPosition(enum.Enum):
    """Certified location of a rational spread rate relative to the window."""

    INSIDE = "inside"
    OUTSIDE_LEFT = "outside-left"
    OUTSIDE_RIGHT = "outside-right"
    BOUNDARY = "boundary"

    @property
    def is_outside(self) -> bool:
        return self in (WindowPosition.OUTSIDE_LEFT, WindowPosition.OUTSIDE_RIGHT)


def lambda_interval(d: int, width: Fraction = DEFAULT_ENCLOSURE_WIDTH) -> LambdaInterval:
    """Enclose both endpoints of the coexistence window for branching factor d.

    Each endpoint enclosure has width <= `width`.  d(d-1) is never a
    perfect square for d >= 2, so the bounds are strict on both sides.
    """
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ValueError(f"branching factor d must be an integer >= 2, got {d!r}")
    root = sqrt_enclosure(Fraction(d * d - d), Fraction(width, 4))
    center = Fraction(2 * d - 1)
    return LambdaInterval(
        lower=Enclosure(center - 2 * root.hi, center - 2 * root.lo),
        upper=Enclosure(center + 2 * root.lo, center + 2 * root.hi),
    )


def window_position(
    d: int,
    lam: Fraction | int,
    width: Fraction = DEFAULT_ENCLOSURE_WIDTH,
    max_refinements: int = 4,
) -> WindowPosition:
    """Certified trichotomy: is lam inside, outside, or unresolvably near the window?

    Enclosures are refined (width -> width/10^30, repeatedly) until the
    rational lam separates from both endpoints.  Both endpoints are
    irrational, so for rational lam this terminates; BOUNDARY survives only
    if `max_refinements` rounds still cannot separate, and is reported
    rather than guessed.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("spread rate lambda must be positive")
    w = width
    for _ in range(max_refinements):
        iv = lambda_interval(d, w)
        if lam <= iv.lower.lo:
            return WindowPosition.OUTSIDE_LEFT
        if lam >= iv.upper.hi:
            return WindowPosition.OUTSIDE_RIGHT
        if lam >= iv.lower.hi and lam <= iv.upper.lo:
            return WindowPosition.INSIDE
        w = w * Fraction(1, 10**30)
    return WindowPosition.BOUNDARY


def rho_extinction(d: int, lam: Fraction | int) -> Fraction:
    """Death rate at which red itself dies out: lambda (d - 1), exactly."""
    lam = Fraction(lam)
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ValueError(f"branching factor d must be an integer >= 2, got {d!r}")
    if lam <= 0:
        raise ValueError(f"spread rate lambda must be positive, got {lam}")
    return lam * (d - 1)


def growth_bounds(
    d: int,
    lam: Fraction | int,
    width: Fraction = DEFAULT_ENCLOSURE_WIDTH,
) -> tuple[Enclosure, Enclosure]:
    """Enclose the closed-form bounds that bracket the critical death rate.

    Both bounds have the shape ( sqrt(c lambda + lambda^2 + 1) - 3 lambda - 3 ) / 4
    with c = 8d + 2 for the lower and c = 32d + 2 for the upper.  For lam
    inside the coexistence window they bracket the critical rate from
    below and strictly above.  The lower bound is clamped at zero (a
    negative bound says nothing for rho >= 0); the upper is left
    unclamped so a certified-negative value signals lam outside the
    window.
    """
    lam = Fraction(lam)
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ValueError(f"branching factor d must be an integer >= 2, got {d!r}")
    if lam <= 0:
        raise ValueError(f"spread rate lambda must be positive, got {lam}")

    def radical_bound(coeff: int) -> Enclosure:
        radicand = coeff * lam + lam * lam + 1
        root = sqrt_enclosure(radicand, 4 * width)
        return Enclosure((root.lo - 3 * lam - 3) / 4, (root.hi - 3 * lam - 3) / 4)

    lower = radical_bound(8 * d + 2)
    upper = radical_bound(32 * d + 2)
    clamped = Enclosure(max(_ZERO, lower.lo), max(_ZERO, lower.hi))
    return clamped, upper


def m_at_zero(lam: Fraction | int) -> Fraction:
    """Radius of convergence of the weighted Catalan series at rho = 0.

    Exactly (1 + lambda)^2 / (4 lambda); symmetric under lambda <-> 1/lambda.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError(f"spread rate lambda must be positive, got {lam}")
    return (1 + lam) ** 2 / (4 * lam)


def weight_u(p: ModelParams, j: int) -> Fraction:
    """Rise weight at height j."""
    if j < 0:
        raise ValueError("height index must be nonnegative")
    return p.lam / (1 + p.lam + (j + 1) * p.rho)


def weight_v(p: ModelParams, j: int) -> Fraction:
    """Fall weight ending at height j."""
    if j < 0:
        raise ValueError("height index must be nonnegative")
    return _ONE / (1 + p.lam + (j + 2) * p.rho)


def weight_a(p: ModelParams, j: int) -> Fraction:
    """Excursion weight a_j = u(j) v(j); strictly decreasing in j when rho > 0."""
    if j < 0:
        raise ValueError("height index must be nonnegative")
    return p.lam / ((1 + p.lam + (j + 1) * p.rho) * (1 + p.lam + (j + 2) * p.rho))


def weight_b(p: ModelParams, j: int) -> Fraction:
    """Tree-weighted excursion weight b_j = d a_j."""
    return p.d * weight_a(p, j)
