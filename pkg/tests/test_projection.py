import itertools
import math

import numpy as np
import pytest

from switchtrack.projection import (Counter, candidate_from_bound_set, project,
                                    project_oracle, verify_kkt_form)
from switchtrack.simplex import SimplexError, kl_divergence

from conftest import random_instance

CASES = [
    # (w, beta, p, bound_set, lambda)
    ((0.5, 0.5), (0.1, 0.2), (0.5, 0.5), set(), 1.0),
    ((0.5, 0.5), (0.6, 0.1), (0.6, 0.4), {0}, 0.8),
    ((0.05, 0.2, 0.75), (0.1, 0.25, 0.05), (0.1, 0.25, 0.65), {0, 1}, 0.65 / 0.75),
]


def brute_force_projection(w, beta):
    """Minimize D(u||w) over all 2^n clamp sets (independent of the module)."""
    n = len(w)
    best, best_d = None, math.inf
    for r in range(n + 1):
        for clamp in itertools.combinations(range(n), r):
            mask = np.zeros(n, dtype=bool)
            mask[list(clamp)] = True
            if mask.all():
                continue
            lam = (1 - beta[mask].sum()) / (1 - w[mask].sum())
            u = np.where(mask, beta, lam * w)
            if lam <= 0 or np.any(u < beta - 1e-12):
                continue
            d = float(np.sum(u * np.log(u / w)))
            if d < best_d:
                best, best_d = u, d
    return best


@pytest.mark.parametrize("proj", [project, project_oracle])
@pytest.mark.parametrize("w, beta, p, bound, lam", CASES)
def test_examples(proj, w, beta, p, bound, lam):
    res = proj(w, beta)
    np.testing.assert_allclose(res.p, p, atol=1e-12)
    assert set(res.bound_set) == bound
    assert res.lam == pytest.approx(lam, abs=1e-12)
    assert verify_kkt_form(w, beta, res.p)


def test_examples_match_brute_force():
    for w, beta, p, _, _ in CASES:
        np.testing.assert_allclose(brute_force_projection(np.array(w), np.array(beta)), p, atol=1e-12)


class TestKKTVerifier:
    def test_accepts_projection(self):
        assert verify_kkt_form((0.05, 0.2, 0.75), (0.1, 0.25, 0.05), (0.1, 0.25, 0.65))
        assert verify_kkt_form((0.5, 0.5), (0.6, 0.1), (0.6, 0.4))

    def test_rejects_wrong_point(self):
        assert not verify_kkt_form((0.5, 0.5), (0.6, 0.1), (0.7, 0.3))

    @pytest.mark.parametrize("p", [(0.5,), ("a", "b"), (0.3, 0.3), (0.05, 0.95)])
    def test_malformed_is_false(self, p):
        assert not verify_kkt_form((0.5, 0.5), (0.1, 0.1), p)


class TestErrors:
    def test_infeasible(self):
        with pytest.raises(SimplexError, match="infeasible"):
            project((0.5, 0.5), (0.7, 0.7))

    def test_mismatch(self):
        with pytest.raises(SimplexError):
            project((0.5, 0.5), (0.1, 0.1, 0.1))

    def test_boundary_w(self):
        with pytest.raises(SimplexError):
            project((1.0, 0.0), (0.1, 0.1))

    def test_single_expert(self):
        with pytest.raises(SimplexError):
            project((1.0,), (0.5,))


def test_degenerate_sum_one():
    res = project((0.9, 0.1), (0.4, 0.6))
    np.testing.assert_array_equal(res.p, (0.4, 0.6))


def test_near_degenerate_stays_feasible(rng):
    for _ in range(500):
        n = int(rng.integers(2, 10))
        w = rng.dirichlet(np.ones(n))
        beta = rng.dirichlet(np.ones(n)) * (1 - 10 ** rng.uniform(-11, -6))
        p = project(w, beta).p
        assert np.all(p >= beta - 1e-12)
        assert abs(p.sum() - 1) < 1e-9


def test_ties_in_ratios():
    # all ratios equal and below one: every index clamps to a tie
    w = np.full(6, 1 / 6)
    beta = np.full(6, 0.9 / 6)
    np.testing.assert_allclose(project(w, beta).p, w, atol=1e-15)
    beta = np.array([0.3, 0.3, 0.1, 0.1, 0.05, 0.05])
    w = np.array([0.15, 0.15, 0.2, 0.2, 0.15, 0.15])
    np.testing.assert_allclose(project(w, beta).p, project_oracle(w, beta).p, atol=1e-14)


def test_oracle_equivalence_random(rng):
    for _ in range(2000):
        w, beta = random_instance(rng, int(rng.integers(2, 65)))
        a, b = project(w, beta), project_oracle(w, beta)
        assert np.max(np.abs(a.p - b.p)) < 1e-10


def test_result_invariants(rng):
    for _ in range(1000):
        w, beta = random_instance(rng, int(rng.integers(2, 40)))
        res = project(w, beta)
        p = res.p
        assert np.all(p >= beta - 1e-12) and abs(p.sum() - 1) < 1e-9
        bound = np.array(sorted(res.bound_set), dtype=int)
        free = np.setdiff1d(np.arange(w.size), bound)
        np.testing.assert_array_equal(p[bound], beta[bound])
        np.testing.assert_allclose(p[free], res.lam * w[free], rtol=1e-15)
        assert res.lam <= 1 + 1e-15
        r = w / beta
        assert set(np.flatnonzero(r < res.threshold)) == set(res.bound_set)
        if bound.size and free.size:
            assert r[bound].max() <= r[free].min() + 1e-12
        assert verify_kkt_form(w, beta, p)


def test_minimal_over_all_clamp_sets(rng):
    for _ in range(200):
        w, beta = random_instance(rng, int(rng.integers(2, 9)))
        np.testing.assert_allclose(project(w, beta).p, brute_force_projection(w, beta), atol=1e-10)


def test_candidate_helper():
    w, beta = np.array([0.05, 0.2, 0.75]), np.array([0.1, 0.25, 0.05])
    np.testing.assert_allclose(candidate_from_bound_set(w, beta, {0, 1}), [0.1, 0.25, 0.65])
    assert candidate_from_bound_set(w, beta, {0, 1, 2}) is None


def test_no_switch_progress(rng):
    for _ in range(2000):
        n = int(rng.integers(2, 20))
        alpha = rng.uniform(0.01, 0.99)
        w, beta = random_instance(rng, n, alpha)
        u = rng.dirichlet(np.full(n, 0.3))
        p = project(w, beta).p
        assert kl_divergence(u, w) - kl_divergence(u, p) >= math.log(1 - alpha) - 1e-9


def test_comparison_count_grows_linearly(rng):
    ratios = []
    for n in (2 ** 10, 2 ** 16):
        total = 0
        for _ in range(5):
            c = Counter()
            project(*random_instance(rng, n), counter=c)
            total += c.comparisons
        ratios.append(total / (5 * n))
    assert ratios[1] <= 1.2 * ratios[0]
