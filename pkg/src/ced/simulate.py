"""Monte Carlo engines for the line process and the depth-capped tree.

Line: the gap between the front red and front blue is a birth-death chain
with death absorption.  From gap j > 0 the embedded jump chain moves

    j -> j+1   with probability lambda / (1 + lambda + j rho)
    j -> j-1   with probability      1 / (1 + lambda + j rho)
    j -> 0     with probability  j rho / (1 + lambda + j rho)

and the renewal events (gap back to 1, everything beyond the front red
white) are jump-chain measurable, so simulating the discrete chain
reproduces their law with no discretization error.  A renewal with blue
at position k has probability exactly the weighted Catalan number C_k,
which is what `compare_renewals` checks.

Tree: event-driven continuous time.  Each red vertex carries an
exponential death clock (rate rho) and one exponential spread clock per
child (rate lambda); each blue vertex arms an exponential overtake clock
(rate 1) per red child.  Clocks are scheduled once, when their
enabling pair forms, and checked for staleness when popped; by
memorylessness this reproduces the continuous-time law exactly.  Vertices
materialize lazily, so memory tracks activity rather than d^depth.

Reproducibility: every trial owns a counter-based Philox stream keyed by
(seed, trial index), so results are independent of how trials are
scheduled across processes.  Aggregates are integer tallies reduced in
trial order; identical seeds give bit-identical summaries.
"""

from __future__ import annotations

import concurrent.futures
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from ced.catalan import weighted_catalan_sequence
from ced.params import ModelParams

_MASK64 = (1 << 64) - 1

#: Lazy materialization keeps the explored frontier small, but a hostile
#: depth cap could still exhaust memory; trials stop with an error first.
DEFAULT_MAX_VERTICES = 2_000_000

ABSORB_DEATH = "death"
ABSORB_CAUGHT = "caught"
ABSORB_TRUNCATED = "truncated"

_WHITE, _RED, _BLUE, _DEAD = 0, 1, 2, 3


class ResourceBudgetError(RuntimeError):
    """A tree trial materialized more vertices than the configured budget."""


class LineTrialRecord(NamedTuple):
    renewals_hit: tuple[int, ...]  # positions k with a renewal; always starts with 0
    y_value: int                   # furthest blue position reached
    absorption: str                # death | caught | truncated


class TreeTrialRecord(NamedTuple):
    blue_reached_depth: int        # deepest level any tree vertex turned blue; -1 if none
    red_reached_depth: int         # deepest level any vertex turned red
    renewal_vertices_per_level: tuple[int, ...]
    blue_count: int                # tree vertices ever blue (the seed blue is not a tree vertex)


@dataclass(frozen=True)
class SimSummary:
    """Aggregated tallies from one simulation run.

    Only integer tallies are stored; frequencies and standard errors are
    derived on demand.  Equal summaries compare equal field-for-field,
    which is the reproducibility contract for a fixed seed.
    """

    kind: str                      # "line" | "tree"
    d: int
    lam: Fraction
    rho: Fraction
    n_trials: int
    seed: int
    k_max: Optional[int] = None
    depth_cap: Optional[int] = None
    renewal_counts: Optional[tuple[int, ...]] = None      # line: trials renewing at k
    y_counts: Optional[tuple[int, ...]] = None            # line: histogram of Y
    absorption_counts: Optional[tuple[tuple[str, int], ...]] = None
    level_renewal_sum: Optional[tuple[int, ...]] = None   # tree: sum of per-level counts
    level_renewal_sumsq: Optional[tuple[int, ...]] = None
    blue_depth_counts: Optional[tuple[int, ...]] = None   # tree: histogram over -1..cap
    red_depth_counts: Optional[tuple[int, ...]] = None    # tree: histogram over 0..cap
    blue_count_sum: Optional[int] = None

    def renewal_frequency(self, k: int) -> float:
        assert self.renewal_counts is not None
        return self.renewal_counts[k] / self.n_trials

    def renewal_stderr(self, k: int) -> float:
        phat = self.renewal_frequency(k)
        return math.sqrt(phat * (1.0 - phat) / self.n_trials)

    def y_at_least(self, k: int) -> int:
        """Number of trials whose furthest blue position reached k."""
        assert self.y_counts is not None
        return sum(self.y_counts[k:])

    def level_renewal_mean(self, level: int) -> float:
        assert self.level_renewal_sum is not None
        return self.level_renewal_sum[level] / self.n_trials

    def level_renewal_stderr(self, level: int) -> float:
        assert self.level_renewal_sum is not None and self.level_renewal_sumsq is not None
        n = self.n_trials
        mean = self.level_renewal_sum[level] / n
        var = self.level_renewal_sumsq[level] / n - mean * mean
        return math.sqrt(max(var, 0.0) / n)

    def blue_reach_cap_frequency(self) -> float:
        assert self.blue_depth_counts is not None and self.depth_cap is not None
        return self.blue_depth_counts[self.depth_cap + 1] / self.n_trials

    def red_reach_cap_frequency(self) -> float:
        assert self.red_depth_counts is not None and self.depth_cap is not None
        return self.red_depth_counts[self.depth_cap] / self.n_trials


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by (seed, trial)."""
    key = ((seed & _MASK64) << 64) | (index & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def jump_probabilities(p: ModelParams, j: int) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (advance, retreat, die) probabilities of the gap chain at state j."""
    if j < 1:
        raise ValueError("gap state must be >= 1")
    total = 1 + p.lam + j * p.rho
    return p.lam / total, Fraction(1) / total, j * p.rho / total


def line_trial(p: ModelParams, k_max: int, rng: np.random.Generator) -> LineTrialRecord:
    """One embedded-jump-chain trial from gap 1, blue at 0.

    The initial state is already a renewal at position 0.  Stops at death
    absorption, at blue consuming the last red, or at blue position k_max.
    """
    lam = float(p.lam)
    rho = float(p.rho)
    adv: list[float] = [0.0]       # adv[j] = P(advance from j)
    adv_ret: list[float] = [0.0]   # adv[j] + P(retreat from j)
    j = 1
    b = 0
    renewals = [0]
    while True:
        while j >= len(adv):
            total = 1.0 + lam + len(adv) * rho
            adv.append(lam / total)
            adv_ret.append((lam + 1.0) / total)
        x = rng.random()
        if x < adv[j]:
            j += 1
        elif x < adv_ret[j]:
            b += 1
            j -= 1
            if j == 0:
                return LineTrialRecord(tuple(renewals), b, ABSORB_CAUGHT)
            if j == 1:
                renewals.append(b)
            if b >= k_max:
                return LineTrialRecord(tuple(renewals), b, ABSORB_TRUNCATED)
        else:
            return LineTrialRecord(tuple(renewals), b, ABSORB_DEATH)


def _line_chunk(args) -> tuple[list[int], list[int], dict[str, int]]:
    p, k_max, seed, start, stop = args
    renewal_counts = [0] * (k_max + 1)
    y_counts = [0] * (k_max + 1)
    absorb = {ABSORB_DEATH: 0, ABSORB_CAUGHT: 0, ABSORB_TRUNCATED: 0}
    for idx in range(start, stop):
        rec = line_trial(p, k_max, trial_rng(seed, idx))
        for k in rec.renewals_hit:
            renewal_counts[k] += 1
        y_counts[min(rec.y_value, k_max)] += 1
        absorb[rec.absorption] += 1
    return renewal_counts, y_counts, absorb


def simulate_line(
    p: ModelParams,
    n_trials: int,
    k_max: int,
    seed: int,
    threads: int = 1,
) -> SimSummary:
    """Estimate renewal probabilities on the line by n_trials jump chains.

    The branching factor of `p` is irrelevant here and ignored.
    Deterministic given (seed, n_trials, k_max), regardless of threads.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    chunks = _chunk_ranges(n_trials, threads)
    jobs = [(p, k_max, seed, start, stop) for start, stop in chunks]
    if threads > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_line_chunk, jobs))
    else:
        parts = [_line_chunk(job) for job in jobs]

    renewal_counts = [0] * (k_max + 1)
    y_counts = [0] * (k_max + 1)
    absorb = {ABSORB_DEATH: 0, ABSORB_CAUGHT: 0, ABSORB_TRUNCATED: 0}
    for rc, yc, ac in parts:
        for k in range(k_max + 1):
            renewal_counts[k] += rc[k]
            y_counts[k] += yc[k]
        for key, val in ac.items():
            absorb[key] += val
    return SimSummary(
        kind="line",
        d=p.d,
        lam=p.lam,
        rho=p.rho,
        n_trials=n_trials,
        seed=seed,
        k_max=k_max,
        renewal_counts=tuple(renewal_counts),
        y_counts=tuple(y_counts),
        absorption_counts=tuple(sorted(absorb.items())),
    )


def _exp_delay(rng: np.random.Generator, rate: float) -> float:
    # inverse CDF on an open-interval uniform
    u = rng.random()
    while u <= 0.0:
        u = rng.random()
    return -math.log(u) / rate


def tree_trial(
    p: ModelParams,
    depth_cap: int,
    rng: np.random.Generator,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> TreeTrialRecord:
    """One continuous-time trial on the depth-capped d-ary tree.

    Starts with the root red and a blue seed attached above it.

    Renewal convention: every vertex designates one child slot as its
    tracked descent line.  A vertex is counted as a renewal vertex if, at
    the instant its parent turns blue, it is still red and its tracked
    continuation is still white.  Restricted to the branch through the
    tracked slots, the process is exactly the line process, so the
    per-vertex renewal probability at level k equals the weighted Catalan
    number C_k.  (Demanding that *all* d continuations be unspread would
    deflate the probability: the final wait then races against spread
    rate d*lambda instead of lambda, and the line identity breaks.)
    The root renews by construction.  Cap-level vertices never spread, so
    renewal counts at the cap itself are biased up by truncation; levels
    strictly below are exact.
    """
    d = p.d
    lam = float(p.lam)
    rho = float(p.rho)

    state = [_RED]
    depth = [0]
    children: list[list[int]] = [[]]
    tracked_fired = [False]  # tracked-slot spread has happened

    renewals = [0] * (depth_cap + 1)
    renewals[0] = 1  # root: red, parent blue, everything below white at time zero
    red_max = 0
    blue_max = -1
    blue_n = 0

    heap: list[tuple[float, int, int, int, bool]] = []
    seq = 0

    def push(time: float, kind: int, vertex: int, tracked: bool = False) -> None:
        nonlocal seq
        heapq.heappush(heap, (time, seq, kind, vertex, tracked))
        seq += 1

    SPREAD, DEATH, OVERTAKE = 0, 1, 2

    def arm_red(vertex: int, now: float) -> None:
        if rho > 0.0:
            push(now + _exp_delay(rng, rho), DEATH, vertex)
        if depth[vertex] < depth_cap:
            for slot in range(d):
                push(now + _exp_delay(rng, lam), SPREAD, vertex, tracked=(slot == 0))

    arm_red(0, 0.0)
    push(_exp_delay(rng, 1.0), OVERTAKE, 0)  # blue seed chases the root

    while heap:
        now, _, kind, vertex, tracked = heapq.heappop(heap)
        if state[vertex] != _RED:
            continue  # stale clock
        if kind == SPREAD:
            child = len(state)
            if child >= max_vertices:
                raise ResourceBudgetError(
                    f"tree trial exceeded the vertex budget ({max_vertices}); "
                    "lower depth_cap or raise max_vertices"
                )
            state.append(_RED)
            depth.append(depth[vertex] + 1)
            children.append([])
            tracked_fired.append(False)
            children[vertex].append(child)
            if tracked:
                tracked_fired[vertex] = True
            if depth[child] > red_max:
                red_max = depth[child]
            arm_red(child, now)
        elif kind == DEATH:
            state[vertex] = _DEAD
        else:  # OVERTAKE: parent is blue and this vertex is still red
            state[vertex] = _BLUE
            blue_n += 1
            if depth[vertex] > blue_max:
                blue_max = depth[vertex]
            for child in children[vertex]:
                if state[child] == _RED:
                    if not tracked_fired[child]:
                        renewals[depth[child]] += 1
                    push(now + _exp_delay(rng, 1.0), OVERTAKE, child)

    return TreeTrialRecord(blue_max, red_max, tuple(renewals), blue_n)


def _tree_chunk(args):
    p, depth_cap, seed, start, stop, max_vertices = args
    levels = depth_cap + 1
    ren_sum = [0] * levels
    ren_sumsq = [0] * levels
    blue_depth = [0] * (depth_cap + 2)  # index depth+1, so -1 lands at 0
    red_depth = [0] * levels
    blue_total = 0
    for idx in range(start, stop):
        rec = tree_trial(p, depth_cap, trial_rng(seed, idx), max_vertices)
        for lvl, c in enumerate(rec.renewal_vertices_per_level):
            ren_sum[lvl] += c
            ren_sumsq[lvl] += c * c
        blue_depth[rec.blue_reached_depth + 1] += 1
        red_depth[rec.red_reached_depth] += 1
        blue_total += rec.blue_count
    return ren_sum, ren_sumsq, blue_depth, red_depth, blue_total


def simulate_tree(
    p: ModelParams,
    depth_cap: int,
    n_trials: int,
    seed: int,
    threads: int = 1,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SimSummary:
    """Aggregate n_trials depth-capped tree trials.

    Deterministic given (seed, n_trials, depth_cap), regardless of threads.
    Blue reaching the cap is a truncated proxy for blue escaping; it is
    reported as a frequency at the cap, never as an infinite-tree estimate.
    """
    if depth_cap < 1:
        raise ValueError("depth_cap must be >= 1")
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    chunks = _chunk_ranges(n_trials, threads)
    jobs = [(p, depth_cap, seed, start, stop, max_vertices) for start, stop in chunks]
    if threads > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_tree_chunk, jobs))
    else:
        parts = [_tree_chunk(job) for job in jobs]

    levels = depth_cap + 1
    ren_sum = [0] * levels
    ren_sumsq = [0] * levels
    blue_depth = [0] * (depth_cap + 2)
    red_depth = [0] * levels
    blue_total = 0
    for rs, rq, bd, rd, bt in parts:
        for i in range(levels):
            ren_sum[i] += rs[i]
            ren_sumsq[i] += rq[i]
            red_depth[i] += rd[i]
        for i in range(depth_cap + 2):
            blue_depth[i] += bd[i]
        blue_total += bt
    return SimSummary(
        kind="tree",
        d=p.d,
        lam=p.lam,
        rho=p.rho,
        n_trials=n_trials,
        seed=seed,
        depth_cap=depth_cap,
        level_renewal_sum=tuple(ren_sum),
        level_renewal_sumsq=tuple(ren_sumsq),
        blue_depth_counts=tuple(blue_depth),
        red_depth_counts=tuple(red_depth),
        blue_count_sum=blue_total,
    )


class RenewalZ(NamedTuple):
    k: int
    observed: float
    expected: float
    stderr: float
    z: Optional[float]  # None for the k = 0 row, which matches exactly


def compare_renewals(p: ModelParams, summary: SimSummary, k_max: Optional[int] = None) -> list[RenewalZ]:
    """Per-k z-scores of observed renewal frequencies against exact values.

    z_k = (phat_k - C_k) / sqrt(phat_k (1 - phat_k) / n).  The k = 0 row is
    a renewal by construction and is reported as an exact match.
    """
    if summary.kind != "line" or summary.renewal_counts is None or summary.k_max is None:
        raise ValueError("summary must come from simulate_line")
    if (summary.lam, summary.rho) != (p.lam, p.rho):
        raise ValueError(
            f"parameter mismatch: summary has (lambda, rho) = ({summary.lam}, {summary.rho}), "
            f"got ({p.lam}, {p.rho})"
        )
    if k_max is None:
        k_max = summary.k_max
    if k_max > summary.k_max:
        raise ValueError(f"summary only tracked renewals up to k = {summary.k_max}")

    exact = weighted_catalan_sequence(p, k_max)
    n = summary.n_trials
    rows: list[RenewalZ] = []
    for k in range(k_max + 1):
        phat = summary.renewal_counts[k] / n
        expected = float(exact[k])
        if k == 0:
            rows.append(RenewalZ(0, phat, expected, 0.0, None))
            continue
        se = math.sqrt(phat * (1.0 - phat) / n)
        if se == 0.0:
            z = 0.0 if phat == expected else math.inf
        else:
            z = (phat - expected) / se
        rows.append(RenewalZ(k, phat, expected, se, z))
    return rows


def max_abs_z(rows: list[RenewalZ]) -> float:
    return max((abs(r.z) for r in rows if r.z is not None), default=0.0)


def _chunk_ranges(n: int, threads: int) -> list[tuple[int, int]]:
    workers = max(1, threads)
    if workers == 1:
        return [(0, n)]
    per = math.ceil(n / (workers * 4))  # a few chunks per worker smooths stragglers
    return [(i, min(i + per, n)) for i in range(0, n, per)]
