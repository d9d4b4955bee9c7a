import math

import numpy as np
import pytest

from switchtrack import bounds as B
from switchtrack.simplex import binary_entropy

from golden_bounds import GOLDEN

CURVE = dict(n=500000, k=40, T=4000, c=1.0)
ALL = [B.fixed_share_bound, B.fixed_share_bound_simplified, B.ideal_bound,
       B.ideal_bound_upper, B.mpp_decay_bound, B.mpp_decay_bound_simplified,
       B.mpp_uniform_bound, B.specialists_bound, B.specialists_bound_simplified,
       B.pods_bound, B.pods_bound_simplified]


def inp(**kw):
    return B.BoundInputs(**{**CURVE, "m": 2, **kw})


def sample_inputs(rng, count=500):
    out = []
    while len(out) < count:
        T = int(rng.integers(3, 5000))
        k = int(rng.integers(1, min(T - 1, 200) + 1))
        n = int(rng.integers(2, 10 ** 6))
        m = int(rng.integers(2, min(n, k + 1) + 1))
        out.append(B.BoundInputs(n=n, T=T, k=k, m=m, c=1.0))
    return out


class TestInputs:
    @pytest.mark.parametrize("kw", [
        dict(n=1), dict(T=1), dict(k=4000), dict(m=42), dict(m=0), dict(c=0.0),
        dict(k=3, m=1),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            inp(**kw)


class TestFixedShare:
    def test_golden(self):
        assert B.fixed_share_bound(inp()) == pytest.approx(762.013006210327, rel=1e-6)

    def test_static(self):
        assert B.fixed_share_bound(inp(k=0, m=1)) == pytest.approx(math.log(500000))

    def test_tiny(self):
        b = B.fixed_share_bound(B.BoundInputs(n=2, T=3, k=1, m=2))
        assert b == pytest.approx(4 * math.log(2), abs=1e-14)

    def test_simplified_is_looser(self, rng):
        for x in sample_inputs(rng, 200):
            assert B.fixed_share_bound(x) <= B.fixed_share_bound_simplified(x) + 1e-9


class TestIdeal:
    def test_tiny(self):
        b = B.ideal_bound(B.BoundInputs(n=2, T=3, k=1, m=2))
        assert b == pytest.approx(math.log(4), abs=1e-14)

    def test_static(self):
        assert B.ideal_bound(inp(k=0, m=1)) == pytest.approx(math.log(500000))

    def test_large_against_big_integers(self):
        exact = math.log(math.comb(500000, 10) * math.comb(3999, 40) * 10 * 9 ** 40)
        assert B.ideal_bound(inp(m=10)) == pytest.approx(exact, rel=1e-11)
        assert exact == pytest.approx(427.54634987766553, rel=1e-12)

    def test_small_against_big_integers(self):
        for n in range(2, 31, 4):
            for T in range(2, 31, 3):
                for k in range(0, T):
                    for m in range(1 if k == 0 else 2, min(n, k + 1) + 1):
                        x = B.BoundInputs(n=n, T=T, k=k, m=m)
                        exact = math.log(math.comb(n, m) * math.comb(T - 1, k) * m * (m - 1) ** k)
                        assert B.ideal_bound(x) == pytest.approx(exact, rel=1e-11, abs=1e-11)

    def test_upper_form_dominates(self, rng):
        for x in sample_inputs(rng, 200):
            assert B.ideal_bound(x) <= B.ideal_bound_upper(x) + 1e-9


class TestMppDecay:
    @pytest.mark.parametrize("m, value", [(2, 523.612594604492), (41, 1182.93991088867)])
    def test_golden(self, m, value):
        assert B.mpp_decay_bound(inp(m=m)) == pytest.approx(value, rel=1e-6)

    def test_static(self):
        assert B.mpp_decay_bound(inp(k=0, m=1)) == pytest.approx(math.log(500000))

    def test_simplified_adds_at_most_log_slack(self):
        # the simplified display replaces (T-1-k) ln((T-1)/(T-1-k)) by k
        x = inp(m=5)
        gap = B.mpp_decay_bound_simplified(x) - B.mpp_decay_bound(x)
        assert gap == pytest.approx(40 - 3959 * math.log(3999 / 3959), rel=1e-9)


class TestSpecialists:
    @pytest.mark.parametrize("m, value", [(2, 474.236917495728), (41, 986.204814910889)])
    def test_golden(self, m, value):
        assert B.specialists_bound(inp(m=m)) == pytest.approx(value, rel=1e-6)

    def test_static(self):
        assert B.specialists_bound(inp(k=0, m=1)) == pytest.approx(math.log(500000))


class TestPods:
    @pytest.mark.parametrize("m, value", [(2, 469.619512557983), (41, 762.013006210327)])
    def test_golden(self, m, value):
        assert B.pods_bound(inp(m=m)) == pytest.approx(value, rel=1e-6)

    def test_full_pool_matches_fixed_share_shape(self, rng):
        for x in sample_inputs(rng, 200):
            full = B.BoundInputs(n=x.n, T=x.T, k=x.k, m=min(x.n, x.k + 1))
            expected = full.m * math.log(full.n) + (full.T - 1) * binary_entropy(full.k / (full.T - 1))
            if full.m == full.k + 1:
                assert B.pods_bound(full) == expected

    def test_beats_specialists(self, rng):
        for x in sample_inputs(rng):
            assert B.pods_bound(x) <= B.specialists_bound(x) + 1e-9

    def test_improvement_over_specialists(self, rng):
        for x in sample_inputs(rng):
            n, T, k, m = x.n, x.T, x.k, x.m
            r = k - m + 1
            gain = (m - 1) * math.log((T - 1) / k) - (r * math.log(k / r) if r else 0.0)
            assert B.specialists_bound(x) - B.pods_bound(x) >= gain - 1e-6

    def test_simplified_is_looser(self, rng):
        for x in sample_inputs(rng, 200):
            if x.T > 2:
                assert B.pods_bound(x) <= B.pods_bound_simplified(x) + 1e-9


class TestTuning:
    def test_example(self):
        assert B.optimal_tuning(inp(m=2)) == (40 / 3999, 39 / 3998)

    def test_full_pool(self):
        assert B.optimal_tuning(inp(m=41))[1] == 0.0

    def test_static(self):
        assert B.optimal_tuning(inp(k=0, m=1)) == (0.0, 0.0)


@pytest.mark.parametrize("fn", ALL)
def test_linear_in_c(fn, rng):
    for x in sample_inputs(rng, 50):
        x2 = B.BoundInputs(n=x.n, T=x.T, k=x.k, m=x.m, c=2.0)
        assert fn(x2) == pytest.approx(2 * fn(x), rel=1e-12)


class TestTable:
    def test_every_published_point(self):
        rows = {r["m"]: r for r in B.figure1_table(**CURVE)}
        assert sorted(rows) == list(range(2, 42))
        for column, curve in GOLDEN.items():
            for m, value in curve.items():
                assert rows[m][column] == pytest.approx(100 * value, rel=1e-6), (column, m)

    def test_pods_monotone_in_pool(self):
        pods = [r["pods"] for r in B.figure1_table(**CURVE)]
        assert np.all(np.diff(pods) >= 0)

    def test_pods_never_worse_than_fixed_share(self):
        for r in B.figure1_table(**CURVE):
            assert r["pods"] <= r["fixed_share"] + 1e-9
