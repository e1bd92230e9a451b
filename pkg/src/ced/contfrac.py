"""Finite continued fractions, the "good" test, and the two decision kernels.

Notation: K[c_0, ..., c_n] = c_0 / (1 - c_1 / (1 - ... / (1 - c_n))).
Evaluation runs bottom up through tail values t_i = K[c_i, ..., c_n].
A tail value of exactly 1 makes the level above infinite; past 1 the
fraction is still algebraically defined but no longer tracks a convergent
series, so both cases stop evaluation and are reported as a pole.

The two kernels consumed by the decision module:

* `below_witness` scans one bottom-up sweep of K[b_i, ..., b_m] for a
  partial exceeding 1 (or blowing up), which certifies that the weighted
  Catalan generating function already has a singularity at or before d,
  i.e. the death rate is below critical.

* `km_good` checks the flattened upper-bound fraction
  K[1, b_0, ..., b_{m-2}, b_{m-1} psi(b_m)] for goodness, where
  psi(x) = (1 - sqrt(1 - 4x)) / (2x) is the generating function of the
  plain Catalan numbers, closing off the flattened tail in one stroke.
  A good sweep certifies convergence strictly beyond d, i.e. the death
  rate is above critical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from ced.params import ModelParams, sqrt_enclosure, weight_b

#: psi enclosures this tight are far below the margins at which the good
#: test flips for any m >= 1 seen in practice, and cheap to produce.
DEFAULT_PSI_WIDTH = Fraction(1, 10**20)

_ZERO = Fraction(0)
_ONE = Fraction(1)
_QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class CFEval:
    """Outcome of a bottom-up finite continued fraction evaluation.

    value       top value t_0, or None if a pole interrupted the sweep
    pole_level  level i whose denominator 1 - t_{i+1} was <= 0, else None
    partials    t_i for every level actually computed (None above a pole)
    """

    value: Optional[Fraction]
    pole_level: Optional[int]
    partials: tuple[Optional[Fraction], ...]

    @property
    def is_pole(self) -> bool:
        return self.pole_level is not None


class GoodCheck(NamedTuple):
    good: bool
    bad_level: Optional[int]  # deepest level whose partial reached 1


@dataclass(frozen=True)
class PsiBound:
    """Rational bounds on the plain-Catalan generating function at x."""

    x: Fraction
    lower: Fraction
    upper: Fraction


def eval_finite(entries: Sequence[Fraction | int]) -> CFEval:
    """Evaluate K[c_0, ..., c_n] bottom up with exact rationals.

    Entries must be nonnegative.  Stops with a pole the first time a
    denominator 1 - t_{i+1} is <= 0; a pole is an outcome, not an error.
    """
    cs = [Fraction(c) for c in entries]
    if not cs:
        raise ValueError("continued fraction needs at least one entry")
    if any(c < 0 for c in cs):
        raise ValueError("entries must be nonnegative")
    n = len(cs) - 1
    partials: list[Optional[Fraction]] = [None] * (n + 1)
    t = cs[n]
    partials[n] = t
    for i in range(n - 1, -1, -1):
        den = 1 - t
        if den <= 0:
            return CFEval(value=None, pole_level=i, partials=tuple(partials))
        t = cs[i] / den
        partials[i] = t
    return CFEval(value=t, pole_level=None, partials=tuple(partials))


def is_good(entries: Sequence[Fraction | int]) -> GoodCheck:
    """Are all partial values K[c_i, ..., c_n] strictly below 1?

    Applies to the entries after the leading 1 of K[1, c_0, ..., c_n].
    Equality counts as not good, so callers relying on goodness never
    fire spuriously.  The reported bad level is the deepest violation.
    """
    ev = eval_finite(entries)
    if ev.is_pole:
        return GoodCheck(False, ev.pole_level + 1)
    assert ev.value is not None
    if ev.value >= 1:
        return GoodCheck(False, 0)
    return GoodCheck(True, None)


def psi_bounds(x: Fraction | int, width: Fraction = DEFAULT_PSI_WIDTH) -> PsiBound:
    """Rational bounds on psi(x) = (1 - sqrt(1 - 4x)) / (2x), 0 <= x <= 1/4.

    Computed through the cancellation-free form psi(x) = 2 / (1 + sqrt(1 - 4x))
    with a directed square-root enclosure, so lower <= psi(x) <= upper with
    upper - lower <= width.  psi(0) = 1 and psi(1/4) = 2 exactly; all
    values lie in [1, 2].
    """
    x = Fraction(x)
    if x < 0 or x > _QUARTER:
        raise ValueError(f"psi is defined on [0, 1/4], got {x}")
    if width <= 0:
        raise ValueError("width must be positive")
    if x == 0:
        return PsiBound(x, _ONE, _ONE)
    root = sqrt_enclosure(1 - 4 * x, Fraction(width, 2))
    lower = max(_ONE, 2 / (1 + root.hi))
    upper = min(Fraction(2), 2 / (1 + root.lo))
    return PsiBound(x, lower, upper)


def below_witness(p: ModelParams, m: int) -> Optional[int]:
    """Largest i with K[b_i, ..., b_m] > 1 (or infinite), else None.

    One bottom-up sweep produces every tail value simultaneously.  A tail
    value of exactly 1 makes the level above it +infinity, which counts as
    a witness at that level: the singularity it creates sits at or before
    d, and the caller treats the boundary case as below critical.
    """
    if m < 1:
        raise ValueError("truncation depth m must be >= 1")
    ev = eval_finite([weight_b(p, j) for j in range(m + 1)])
    if ev.is_pole:
        blocked = ev.partials[ev.pole_level + 1]
        assert blocked is not None
        return ev.pole_level + 1 if blocked > 1 else ev.pole_level
    assert ev.value is not None
    return 0 if ev.value > 1 else None


def km_good(p: ModelParams, m: int, psi_width: Fraction = DEFAULT_PSI_WIDTH) -> bool:
    """Goodness of the flattened upper-bound fraction at depth m.

    Requires b_m < 1/4 (checked; returns False immediately otherwise).
    The tail is closed off by psi evaluated at b_m, taken at its upper
    bound: goodness is monotone decreasing in every entry, so good with
    the inflated last entry implies good with the true value.
    """
    if m < 1:
        raise ValueError("truncation depth m must be >= 1")
    b_m = weight_b(p, m)
    if not b_m < _QUARTER:
        return False
    tail = psi_bounds(b_m, psi_width).upper
    entries = [weight_b(p, j) for j in range(m - 1)]
    entries.append(weight_b(p, m - 1) * tail)
    return is_good(entries).good
