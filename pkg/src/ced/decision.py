"""Deciding a death rate against the critical one, with certificates.

For a spread rate certified inside the coexistence window and rho not
exactly critical, a finite amount of exact arithmetic settles which side
of the threshold rho is on:

* Below: some partial continued fraction K[b_i, ..., b_m] exceeds 1 (or
  blows up).  Certificate: the pair (m, i); re-verifiable by one slice
  evaluation.
* Above: b_m < 1/4 and the flattened kernel at depth m is good.
  Certificate: that m; re-verifiable by one good sweep.

Truncation depths follow a doubling schedule (1, 2, 4, ...) up to m_max:
the below witness tends to need large depth near the threshold while the
above test usually fires early, and doubling balances both without
quadratic total work.  Witnesses and goodness both persist as m grows, so
the schedule misses nothing reachable by m_max.  Undecided is a
first-class outcome: rho exactly at the threshold can never terminate,
and bisection callers stop gracefully instead of looping.

Bisection starts from the closed-form growth bounds, snapped outward to a
dyadic grid so midpoint denominators stay small, and certifies both
endpoints of the final bracket.
"""

from __future__ import annotations

import concurrent.futures
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from ced.contfrac import below_witness, eval_finite, km_good
from ced.params import (
    Enclosure,
    ModelParams,
    WindowPosition,
    growth_bounds,
    rho_extinction,
    weight_b,
    window_position,
)

DEFAULT_M_MAX = 4096

#: Bisection endpoints are snapped outward to multiples of 1/_DYADIC_GRID;
#: plain midpoint averaging then keeps every kernel input's denominator a
#: small power of two, which is what keeps the exact sweeps fast.
_DYADIC_GRID = 1 << 30

_ZERO = Fraction(0)
_QUARTER = Fraction(1, 4)


class Verdict(enum.Enum):
    BELOW = "below"
    ABOVE = "above"
    UNDECIDED = "undecided"


class Phase(enum.Enum):
    COEXISTENCE = "coexistence"
    ESCAPE = "escape"
    EXTINCTION = "extinction"
    BOUNDARY_UNRESOLVED = "boundary-unresolved"


@dataclass(frozen=True)
class KernelBelow:
    """K[b_level, ..., b_m] exceeds 1 or blows up."""

    m: int
    level: int


@dataclass(frozen=True)
class KernelAbove:
    """b_m < 1/4 and the flattened kernel at depth m is good."""

    m: int


@dataclass(frozen=True)
class OutsideWindowAbove:
    """lambda certified outside the coexistence window (zero threshold), rho > 0."""

    side: str  # "left" | "right"


@dataclass(frozen=True)
class ZeroRhoBelow:
    """rho = 0 with lambda certified inside the window (positive threshold)."""


Certificate = Union[KernelBelow, KernelAbove, OutsideWindowAbove, ZeroRhoBelow]


@dataclass(frozen=True)
class DecisionOutcome:
    verdict: Verdict
    certificate: Optional[Certificate]
    m_reached: int  # deepest truncation examined; 0 for short-circuits


class OutsideWindowError(ValueError):
    """Raised when an operation requires lambda inside the coexistence window."""


class BracketError(RuntimeError):
    """Raised when bisection cannot certify its initial endpoints."""


def _m_schedule(m_max: int) -> list[int]:
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    out = []
    m = 1
    while m < m_max:
        out.append(m)
        m *= 2
    out.append(m_max)
    return out


def decide(p: ModelParams, m_max: int = DEFAULT_M_MAX) -> DecisionOutcome:
    """Is rho below or above the critical death rate?  Certified either way.

    Short circuits: lambda certified outside the window with rho > 0 is
    Above (the threshold is zero there); rho = 0 inside the window is
    Below (the threshold is positive there).  rho = 0 outside the window
    sits exactly at the zero threshold and is reported Undecided, as is
    anything the kernels cannot separate by depth m_max.
    """
    pos = window_position(p.d, p.lam)
    if pos is WindowPosition.BOUNDARY:
        return DecisionOutcome(Verdict.UNDECIDED, None, 0)
    if pos.is_outside:
        if p.rho > 0:
            side = "left" if pos is WindowPosition.OUTSIDE_LEFT else "right"
            return DecisionOutcome(Verdict.ABOVE, OutsideWindowAbove(side), 0)
        return DecisionOutcome(Verdict.UNDECIDED, None, 0)  # rho == 0 == threshold
    if p.rho == 0:
        return DecisionOutcome(Verdict.BELOW, ZeroRhoBelow(), 0)

    for m in _m_schedule(m_max):
        witness = below_witness(p, m)
        if witness is not None:
            return DecisionOutcome(Verdict.BELOW, KernelBelow(m, witness), m)
        if weight_b(p, m) < _QUARTER and km_good(p, m):
            return DecisionOutcome(Verdict.ABOVE, KernelAbove(m), m)
    return DecisionOutcome(Verdict.UNDECIDED, None, m_max)


def verify_certificate(p: ModelParams, outcome: DecisionOutcome) -> bool:
    """Independently re-check the certificate attached to an outcome.

    Below witnesses are re-evaluated on the tail slice they name; above
    certificates re-run the b_m < 1/4 check and the good sweep;
    short-circuit certificates re-derive the window position.  Undecided
    outcomes carry no certificate and verify vacuously.
    """
    cert = outcome.certificate
    if outcome.verdict is Verdict.UNDECIDED:
        return cert is None
    if isinstance(cert, KernelBelow):
        if not (0 <= cert.level <= cert.m):
            return False
        ev = eval_finite([weight_b(p, j) for j in range(cert.level, cert.m + 1)])
        return ev.is_pole or (ev.value is not None and ev.value > 1)
    if isinstance(cert, KernelAbove):
        return weight_b(p, cert.m) < _QUARTER and km_good(p, cert.m)
    if isinstance(cert, OutsideWindowAbove):
        pos = window_position(p.d, p.lam)
        expected = (
            WindowPosition.OUTSIDE_LEFT if cert.side == "left" else WindowPosition.OUTSIDE_RIGHT
        )
        return pos is expected and p.rho > 0
    if isinstance(cert, ZeroRhoBelow):
        return p.rho == 0 and window_position(p.d, p.lam) is WindowPosition.INSIDE
    return False


@dataclass(frozen=True)
class CriticalBracket:
    """Interval [lo, hi] proven to contain the critical death rate.

    decide(lo) certified Below and decide(hi) certified Above; both
    outcomes are attached.  `unresolved_midpoint` is set when a bisection
    midpoint came back Undecided and the bracket is the best achieved.
    """

    lam: Fraction
    lo: Fraction
    hi: Fraction
    lo_outcome: DecisionOutcome
    hi_outcome: DecisionOutcome
    unresolved_midpoint: Optional[Fraction] = None

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _snap_down(x: Fraction) -> Fraction:
    return Fraction(math.floor(x * _DYADIC_GRID), _DYADIC_GRID)


def _snap_up(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * _DYADIC_GRID), _DYADIC_GRID)


def critical_rho(
    d: int,
    lam: Fraction | int,
    tol: Fraction,
    m_max: int = DEFAULT_M_MAX,
) -> CriticalBracket:
    """Bracket the critical death rate to width <= tol by certified bisection.

    The initial bracket comes from the closed-form growth bounds: the
    clamped lower bound rounded down to the dyadic grid (still at or below
    the threshold) and the upper bound's enclosure rounded up (still
    strictly above).  Every midpoint is resolved by `decide`; an Undecided
    midpoint stops the loop and is flagged on the returned bracket.
    """
    lam = Fraction(lam)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    pos = window_position(d, lam)
    if pos is not WindowPosition.INSIDE:
        raise OutsideWindowError(
            f"lambda = {lam} is not certified inside the coexistence window for d = {d}; "
            "the critical death rate is 0 outside it"
        )

    bound_lo, bound_hi = growth_bounds(d, lam)
    lo = max(_ZERO, _snap_down(bound_lo.lo))
    hi = _snap_up(bound_hi.hi)

    lo_out = decide(ModelParams(d, lam, lo), m_max)
    if lo_out.verdict is Verdict.UNDECIDED and lo > 0:
        # The closed-form lower bound can hug the threshold; rho = 0 cannot.
        lo = _ZERO
        lo_out = decide(ModelParams(d, lam, lo), m_max)
    if lo_out.verdict is not Verdict.BELOW:
        raise BracketError(f"lower endpoint {lo} did not certify Below: {lo_out.verdict}")

    hi_out = decide(ModelParams(d, lam, hi), m_max)
    if hi_out.verdict is not Verdict.ABOVE:
        raise BracketError(
            f"upper endpoint {hi} did not certify Above: {hi_out.verdict}; "
            "increase m_max or widen the tolerance"
        )

    unresolved = None
    while hi - lo > tol:
        mid = (lo + hi) / 2
        out = decide(ModelParams(d, lam, mid), m_max)
        if out.verdict is Verdict.BELOW:
            lo, lo_out = mid, out
        elif out.verdict is Verdict.ABOVE:
            hi, hi_out = mid, out
        else:
            unresolved = mid
            break
    return CriticalBracket(lam, lo, hi, lo_out, hi_out, unresolved)


def classify_phase(p: ModelParams, m_max: int = DEFAULT_M_MAX) -> Phase:
    """Coexistence, escape, or extinction for one parameter triple.

    Extinction whenever rho >= lambda (d-1): red alone is not supercritical.
    With rho = 0 nothing dies, and blue coexists exactly when lambda clears
    the lower window edge (the upper edge only matters for rho > 0, where
    a large gap behind a mortal front kills coexistence).  Otherwise the
    decision kernel settles which side of the threshold rho is on.
    Anything unresolved at the stated depth is reported, not guessed.
    """
    if p.rho >= rho_extinction(p.d, p.lam):
        return Phase.EXTINCTION
    pos = window_position(p.d, p.lam)
    if pos is WindowPosition.BOUNDARY:
        return Phase.BOUNDARY_UNRESOLVED
    if p.rho == 0:
        if pos in (WindowPosition.INSIDE, WindowPosition.OUTSIDE_RIGHT):
            return Phase.COEXISTENCE
        return Phase.ESCAPE
    if pos.is_outside:
        return Phase.ESCAPE  # zero threshold, 0 < rho < extinction rate
    out = decide(p, m_max)
    if out.verdict is Verdict.BELOW:
        return Phase.COEXISTENCE
    if out.verdict is Verdict.ABOVE:
        return Phase.ESCAPE
    return Phase.BOUNDARY_UNRESOLVED


@dataclass(frozen=True)
class CurvePoint:
    """One row of the critical-rate curve: lambda and its certified bracket.

    status is "bracket" for a full-width-certified row, "outside" for
    lambda certified outside the window (threshold exactly 0),
    "boundary" for lambda unresolvably close to a window endpoint, and
    "unresolved" when bisection stopped early on an Undecided midpoint.
    """

    lam: Fraction
    lo: Fraction
    hi: Fraction
    status: str
    bracket: Optional[CriticalBracket] = None


def _curve_point(args: tuple[int, Fraction, Fraction, int]) -> CurvePoint:
    d, lam, tol, m_max = args
    pos = window_position(d, lam)
    if pos.is_outside:
        return CurvePoint(lam, _ZERO, _ZERO, "outside")
    if pos is WindowPosition.BOUNDARY:
        return CurvePoint(lam, _ZERO, _ZERO, "boundary")
    bracket = critical_rho(d, lam, tol, m_max)
    status = "unresolved" if bracket.unresolved_midpoint is not None else "bracket"
    return CurvePoint(lam, bracket.lo, bracket.hi, status, bracket)


def rho_c_curve(
    d: int,
    lambdas: Sequence[Fraction | int],
    tol: Fraction,
    m_max: int = DEFAULT_M_MAX,
    threads: int = 1,
) -> list[CurvePoint]:
    """Certified bracket rows of the critical death rate over a lambda grid.

    Grid points outside the window produce (lambda, 0, 0) rows.  Rows come
    back in grid order and are deterministic given the inputs; grid points
    are independent, so threads > 1 fans them out across processes.
    """
    jobs = [(d, Fraction(lam), Fraction(tol), m_max) for lam in lambdas]
    if threads > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_curve_point, jobs))
    return [_curve_point(job) for job in jobs]
