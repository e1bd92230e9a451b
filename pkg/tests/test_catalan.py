import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ced.catalan import (
    MODE_CAPPED,
    MODE_EXACT,
    MODE_FLATTENED,
    WeightTable,
    partial_series,
    weighted_catalan,
    weighted_catalan_bruteforce,
    weighted_catalan_sequence,
)
from ced.params import ModelParams, sqrt_enclosure, weight_a, weight_u, weight_v

P211 = ModelParams(2, F(1), F(1))

small_rationals = st.fractions(min_value=F(1, 16), max_value=8, max_denominator=16)


def plain_catalan(k):
    return math.comb(2 * k, k) // (k + 1)


class TestWeightTable:
    def test_exact_uv_product(self):
        t = WeightTable.build(P211, 5)
        for j in range(6):
            assert t.u[j] * t.v[j] == weight_a(P211, j)

    def test_capped_zeroes_above_m(self):
        t = WeightTable.build(P211, 6, MODE_CAPPED, m=2)
        assert t.u[2] == weight_u(P211, 2) and t.v[2] == weight_v(P211, 2)
        assert t.u[3] == 0 and t.v[3] == 0 and t.u[6] == 0

    def test_flattened_freezes_at_m(self):
        t = WeightTable.build(P211, 6, MODE_FLATTENED, m=2)
        assert t.u[1] == weight_u(P211, 1)
        assert t.u[2] == t.u[5] == weight_u(P211, 2)
        assert t.v[3] == weight_v(P211, 2)

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            WeightTable.build(P211, 4, "nope")
        with pytest.raises(ValueError):
            WeightTable.build(P211, 4, MODE_CAPPED)  # missing m
        with pytest.raises(ValueError):
            WeightTable.build(P211, 4, MODE_CAPPED, m=0)
        with pytest.raises(ValueError):
            WeightTable.build(P211, 4, MODE_EXACT, m=3)


class TestWeightedCatalan:
    def test_k0_is_one(self):
        for p in (P211, ModelParams(3, F(5, 2), F(0))):
            assert weighted_catalan(p, 0).value == 1

    def test_single_path(self):
        assert weighted_catalan(P211, 1).value == F(1, 12)

    def test_two_paths_hand_sum(self):
        # UDUD contributes a0^2, UUDD contributes a0*a1
        a0, a1 = weight_a(P211, 0), weight_a(P211, 1)
        assert weighted_catalan(P211, 2).value == a0 * a0 + a0 * a1 == F(1, 90)

    @pytest.mark.parametrize("lam", [F(1, 2), F(1), F(3)])
    def test_no_death_closed_form(self, lam):
        p = ModelParams(2, lam, F(0))
        base = lam / (1 + lam) ** 2
        seq = weighted_catalan_sequence(p, 12)
        for k in range(13):
            assert seq[k] == plain_catalan(k) * base**k

    def test_alternating_path_lower_bound(self):
        a0 = weight_a(P211, 0)
        for k in range(1, 14):
            assert weighted_catalan(P211, k).value >= a0**k

    def test_upper_bound_by_plain_catalan(self):
        a0 = weight_a(P211, 0)
        for k in range(1, 14):
            assert weighted_catalan(P211, k).value <= plain_catalan(k) * a0**k

    @given(lam=small_rationals, rho=small_rationals, rho2=small_rationals, k=st.integers(1, 8))
    @settings(max_examples=40, deadline=None)
    def test_strictly_decreasing_in_rho(self, lam, rho, rho2, k):
        lo, hi = sorted([rho, rho2])
        if lo == hi:
            return
        c_lo = weighted_catalan(ModelParams(2, lam, lo), k).value
        c_hi = weighted_catalan(ModelParams(2, lam, hi), k).value
        assert c_hi < c_lo

    def test_small_rho_growth_direction(self):
        # near rho = 0 the per-step base stays close to the no-death value
        # 4 lam/(1+lam)^2; at k = 50 the root already clears 3.5/4 * 0.99
        p = ModelParams(2, F(1), F(1, 10000))
        k = 50
        c = weighted_catalan(p, k).value
        assert float(c) ** (1.0 / k) > (4 - 0.5) * 0.25 * (1 - 1e-2)


class TestSandwich:
    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_capped_below_exact_below_flattened(self, m):
        for k in range(0, 9):
            exact = weighted_catalan(P211, k).value
            capped = weighted_catalan(P211, k, MODE_CAPPED, m).value
            flat = weighted_catalan(P211, k, MODE_FLATTENED, m).value
            assert capped <= exact <= flat
            if k <= m:
                assert capped == exact


class TestBruteForce:
    def test_matches_dp_small_grid(self):
        rng = random.Random(42)
        for _ in range(6):
            lam = F(rng.randint(1, 12), rng.randint(1, 12))
            rho = F(rng.randint(0, 12), rng.randint(1, 12))
            p = ModelParams(2, lam, rho)
            for k in range(0, 8):
                assert weighted_catalan_bruteforce(p, k).value == weighted_catalan(p, k).value

    def test_no_death_k4(self):
        p = ModelParams(2, F(1), F(0))
        assert weighted_catalan_bruteforce(p, 4).value == F(14, 256)

    def test_step_convention_on_height_three_path(self):
        # rises taken at heights 0,0,1,2,2 and falls ending at 0,2,2,1,0
        # multiply to u0^2 v0^2 u1 v1 u2^2 v2^2
        heights = [0, 1, 0, 1, 2, 3, 2, 3, 2, 1, 0]
        w = F(1)
        for a, b in zip(heights, heights[1:]):
            w *= weight_u(P211, a) if b > a else weight_v(P211, b)
        u = [weight_u(P211, j) for j in range(3)]
        v = [weight_v(P211, j) for j in range(3)]
        assert w == u[0] ** 2 * v[0] ** 2 * u[1] * v[1] * u[2] ** 2 * v[2] ** 2
        # and the full k=5 sum dominates this single path
        assert weighted_catalan_bruteforce(P211, 5).value > w

    def test_cap_enforced(self):
        with pytest.raises(ValueError):
            weighted_catalan_bruteforce(P211, 13)


class TestPartialSeries:
    def test_k0(self):
        assert partial_series(P211, F(7, 3), 0) == 1

    def test_monotone_in_truncation(self):
        vals = [partial_series(P211, F(2), K) for K in range(8)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_no_death_limit_from_below(self):
        # at lam=1, rho=0 the series at z=1/8 is sum C_k (1/32)^k, i.e. the
        # plain Catalan generating function at 1/32: 16 (1 - sqrt(7/8))
        p = ModelParams(2, F(1), F(0))
        root = sqrt_enclosure(F(14), F(1, 10**25))
        limit_below, limit_above = 16 - 4 * root.hi, 16 - 4 * root.lo
        s40 = partial_series(p, F(1, 8), 40)
        s60 = partial_series(p, F(1, 8), 60)
        assert s40 < s60
        assert limit_below < s60 < limit_above
        assert limit_above - s60 < F(1, 10**20)

    def test_mode_ordering_termwise(self):
        z = F(3, 2)
        for K in range(6):
            capped = partial_series(P211, z, K, MODE_CAPPED, 2)
            exact = partial_series(P211, z, K)
            flat = partial_series(P211, z, K, MODE_FLATTENED, 2)
            assert capped <= exact <= flat

    def test_negative_z_rejected(self):
        with pytest.raises(ValueError):
            partial_series(P211, F(-1), 3)
