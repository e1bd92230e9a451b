"""Weighted Catalan numbers via height-indexed dynamic programming.

A Dyck path of half-length k earns weight u(j) per rise from height j and
v(j) per fall ending at height j; C_k sums these products over all C(2k,k)/(k+1)
paths.  Besides the exact weights, two modified tables sandwich C_k:
zeroing weights above a cutoff height m gives a lower bound, freezing them
at their height-m values gives an upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from ced.params import ModelParams, weight_u, weight_v

MODE_EXACT = "exact"
MODE_CAPPED = "capped"
MODE_FLATTENED = "flattened"
_MODES = (MODE_EXACT, MODE_CAPPED, MODE_FLATTENED)

#: Plain enumeration is capped here; Catalan growth makes larger k explode.
BRUTE_FORCE_MAX_K = 12

_ZERO = Fraction(0)
_ONE = Fraction(1)


class CatalanValue(NamedTuple):
    k: int
    value: Fraction


@dataclass(frozen=True)
class WeightTable:
    """Step weights u(0..height), v(0..height) under one of three modes.

    exact:         u(j), v(j) as defined by the model parameters.
    capped(m):     weights vanish for j > m (lower bound on every C_k,
                   with equality for k <= m since those paths never
                   climb past their half-length).
    flattened(m):  weights freeze at u(m), v(m) for j >= m (upper bound;
                   u, v are nonincreasing in j).
    """

    u: tuple[Fraction, ...]
    v: tuple[Fraction, ...]
    mode: str
    m: int | None

    @classmethod
    def build(
        cls,
        p: ModelParams,
        height: int,
        mode: str = MODE_EXACT,
        m: int | None = None,
    ) -> "WeightTable":
        if mode not in _MODES:
            raise ValueError(f"unknown weight mode {mode!r}")
        if mode == MODE_EXACT:
            if m is not None:
                raise ValueError("exact mode takes no cutoff height")
        else:
            if m is None or m < 1:
                raise ValueError(f"{mode} mode needs a cutoff height m >= 1")
        if height < 0:
            raise ValueError("height must be nonnegative")

        u = []
        v = []
        for j in range(height + 1):
            if mode == MODE_CAPPED and j > m:
                u.append(_ZERO)
                v.append(_ZERO)
            elif mode == MODE_FLATTENED and j >= m:
                u.append(weight_u(p, m))
                v.append(weight_v(p, m))
            else:
                u.append(weight_u(p, j))
                v.append(weight_v(p, j))
        return cls(u=tuple(u), v=tuple(v), mode=mode, m=m)


def weighted_catalan_sequence(
    p: ModelParams,
    k_max: int,
    mode: str = MODE_EXACT,
    m: int | None = None,
) -> list[Fraction]:
    """Exact values C_0, ..., C_{k_max} in one DP sweep.

    State is (step, height); a path of half-length k never exceeds height
    k, so the table of weights up to k_max covers everything and no
    artificial truncation error exists.  O(k_max^2) rational operations.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    table = WeightTable.build(p, k_max, mode, m)
    u, v = table.u, table.v

    state = [_ONE]  # state[h] = total weight of length-t prefixes ending at height h
    out = [_ONE]
    for t in range(1, 2 * k_max + 1):
        cap = min(t, 2 * k_max - t)  # higher prefixes cannot return to zero in time
        new = [_ZERO] * min(len(state) + 1, cap + 1)
        top = len(new)
        for h, w in enumerate(state):
            if not w:
                continue
            if h + 1 < top:
                new[h + 1] += w * u[h]
            if 0 <= h - 1 < top:
                new[h - 1] += w * v[h - 1]
        state = new
        if t % 2 == 0:
            out.append(state[0])
    return out


def weighted_catalan(
    p: ModelParams,
    k: int,
    mode: str = MODE_EXACT,
    m: int | None = None,
) -> CatalanValue:
    """Exact weighted Catalan number C_k under the requested weight mode."""
    seq = weighted_catalan_sequence(p, k, mode, m)
    return CatalanValue(k, seq[k])


@lru_cache(maxsize=None)
def _dyck_step_indices(k: int) -> tuple[tuple[int, ...], ...]:
    """Every Dyck path of half-length k, encoded as step-weight indices.

    Index 2j   = rise from height j    -> weight u(j)
    Index 2j+1 = fall ending at height j -> weight v(j)
    """
    paths: list[tuple[int, ...]] = []
    path: list[int] = []

    def rec(h: int, rises: int, falls: int) -> None:
        if rises == k and falls == k:
            paths.append(tuple(path))
            return
        if rises < k:
            path.append(2 * h)
            rec(h + 1, rises + 1, falls)
            path.pop()
        if h > 0:
            path.append(2 * (h - 1) + 1)
            rec(h - 1, rises, falls + 1)
            path.pop()

    rec(0, 0, 0)
    return tuple(paths)


def weighted_catalan_bruteforce(
    p: ModelParams,
    k: int,
    mode: str = MODE_EXACT,
    m: int | None = None,
) -> CatalanValue:
    """Oracle: enumerate every Dyck path explicitly and sum step-weight products.

    Independent of the DP; used to cross-check it.  Refuses k > 12
    (208012 paths) to prevent accidental exponential blowups.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > BRUTE_FORCE_MAX_K:
        raise ValueError(
            f"brute force is capped at k <= {BRUTE_FORCE_MAX_K}; use weighted_catalan"
        )
    table = WeightTable.build(p, max(k - 1, 0), mode, m)
    weights: list[Fraction] = []
    for j in range(k):
        weights.append(table.u[j])
        weights.append(table.v[j])
    nums = [w.numerator for w in weights]
    dens = [w.denominator for w in weights]

    total = _ZERO
    for path in _dyck_step_indices(k):
        total += Fraction(
            math.prod(map(nums.__getitem__, path)),
            math.prod(map(dens.__getitem__, path)),
        )
    return CatalanValue(k, total)


def partial_series(
    p: ModelParams,
    z: Fraction | int,
    K: int,
    mode: str = MODE_EXACT,
    m: int | None = None,
) -> Fraction:
    """Exact partial sum of the generating function: sum_{k<=K} C_k z^k.

    Monotone nondecreasing in K for z >= 0.
    """
    z = Fraction(z)
    if z < 0:
        raise ValueError("z must be nonnegative")
    if K < 0:
        raise ValueError("K must be nonnegative")
    seq = weighted_catalan_sequence(p, K, mode, m)
    total = _ZERO
    power = _ONE
    for c in seq:
        total += c * power
        power *= z
    return total
