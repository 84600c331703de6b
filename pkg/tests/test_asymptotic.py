"""Tests for the large-population engine.

Reference values are frozen from independent oracles: bisection root
finding and closed-form evaluation on top of ``math.erf``, plus a seeded
Monte Carlo cross-check for the utility closed form.  The golden-section
maximizer used here touches only Q evaluations, never the derivative or
the Bayesian rate it is checking.
"""

import math

import numpy as np
import pytest

from fairsel import asymptotic as asy
from fairsel.errors import BoundaryError, ConstraintError, DegenerateModelError, DomainError
from fairsel.model import GroupParams, PopulationModel


def ref_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def make_pop(mu_a=1.0, mu_b=1.0, eta_a=1.0, eta_b=1.0, beta_a=0.0, beta_b=0.0,
             sigma_a=3.0, sigma_b=0.2, p_a=0.4) -> PopulationModel:
    return PopulationModel(
        group_a=GroupParams(mu=mu_a, eta=eta_a, beta=beta_a, sigma=sigma_a),
        group_b=GroupParams(mu=mu_b, eta=eta_b, beta=beta_b, sigma=sigma_b),
        p_a=p_a,
    )


def identical_pop(p_a=0.5) -> PopulationModel:
    g = GroupParams(mu=0.0, eta=1.0, beta=0.0, sigma=0.0)
    return PopulationModel(group_a=g, group_b=g, p_a=p_a)


def golden_max(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Golden-section maximization on [lo, hi]; only calls f."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def random_models(count: int, seed: int) -> list[PopulationModel]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        out.append(
            make_pop(
                mu_a=rng.uniform(-2, 3),
                mu_b=rng.uniform(-2, 3),
                eta_a=rng.uniform(0.2, 3),
                eta_b=rng.uniform(0.2, 3),
                beta_a=rng.uniform(-2, 2),
                beta_b=rng.uniform(-2, 2),
                sigma_a=rng.uniform(0.0, 5),
                sigma_b=rng.uniform(0.0, 5),
                p_a=rng.uniform(0.1, 0.9),
            )
        )
    return out


class TestSolveCommonThreshold:
    def test_identical_groups_symmetric(self):
        assert asy.solve_common_threshold(identical_pop(), 0.5) == pytest.approx(0.0, abs=1e-10)

    def test_identical_groups_single_group_reduction(self):
        theta = asy.solve_common_threshold(identical_pop(), 0.2)
        # single-group case: theta is the 0.8-quantile of N(0, 1)
        assert theta == pytest.approx(0.8416212335729143, abs=1e-9)

    def test_two_group_root(self):
        # frozen from bisection on the math.erf reference CDF
        theta = asy.solve_common_threshold(make_pop(), 0.3, space="estimate")
        assert theta == pytest.approx(1.7549472011812983, abs=1e-9)
        sh_a, sh_b = math.sqrt(10.0), math.sqrt(1.04)
        resid = (
            0.4 * (1 - ref_cdf((theta - 1) / sh_a))
            + 0.6 * (1 - ref_cdf((theta - 1) / sh_b))
            - 0.3
        )
        assert abs(resid) <= 1e-10

    def test_posterior_space(self):
        pop = make_pop()
        theta = asy.solve_common_threshold(pop, 0.3, space="posterior")
        st_a, st_b = pop.stats_a.sigma_tilde, pop.stats_b.sigma_tilde
        resid = 0.4 * (1 - ref_cdf((theta - 1) / st_a)) + 0.6 * (1 - ref_cdf((theta - 1) / st_b)) - 0.3
        assert abs(resid) <= 1e-10

    def test_alpha_domain(self):
        for bad in [0.0, 1.0, -0.2, 1.3]:
            with pytest.raises(DomainError):
                asy.solve_common_threshold(identical_pop(), bad)

    def test_bad_space(self):
        with pytest.raises(DomainError):
            asy.solve_common_threshold(identical_pop(), 0.5, space="nope")


class TestSelectionRatesOblivious:
    def test_identical_groups(self):
        oc = asy.selection_rates_oblivious(identical_pop(0.3), 0.37)
        assert oc.x_a == pytest.approx(0.37, abs=1e-9)
        assert oc.x_b == pytest.approx(0.37, abs=1e-9)

    def test_high_variance_group_overrepresented_below_half(self):
        oc = asy.selection_rates_oblivious(make_pop(), 0.3)
        assert oc.x_a > oc.x_b

    def test_reversed_above_half(self):
        oc = asy.selection_rates_oblivious(make_pop(), 0.7)
        assert oc.x_a < oc.x_b

    def test_budget_identity(self):
        pop = make_pop(mu_b=0.3, beta_a=0.5, p_a=0.25)
        for alpha in [0.05, 0.3, 0.6, 0.95]:
            oc = asy.selection_rates_oblivious(pop, alpha)
            assert pop.p_a * oc.x_a + pop.p_b * oc.x_b == pytest.approx(alpha, abs=1e-9)


class TestSelectionRatesBayesian:
    def test_identical_groups(self):
        oc = asy.selection_rates_bayesian(identical_pop(), 0.42)
        assert oc.x_a == pytest.approx(0.42, abs=1e-9)

    def test_high_variance_group_underrepresented_below_half(self):
        oc = asy.selection_rates_bayesian(make_pop(), 0.3)
        assert oc.x_a < oc.x_b

    def test_reversed_above_half(self):
        oc = asy.selection_rates_bayesian(make_pop(), 0.7)
        assert oc.x_a > oc.x_b

    def test_thresholds_reported_in_estimate_space(self):
        pop = make_pop(beta_a=0.8, beta_b=-0.3, mu_b=0.5)
        oc = asy.selection_rates_bayesian(pop, 0.3)
        # selecting estimate >= theta_G must reproduce the same rates
        x_a = 1 - ref_cdf((oc.theta_a - pop.group_a.mu + pop.group_a.beta) / pop.stats_a.sigma_hat)
        x_b = 1 - ref_cdf((oc.theta_b - pop.group_b.mu + pop.group_b.beta) / pop.stats_b.sigma_hat)
        assert x_a == pytest.approx(oc.x_a, abs=1e-12)
        assert x_b == pytest.approx(oc.x_b, abs=1e-12)

    def test_degenerate_posterior_rejected(self):
        pop = PopulationModel(
            group_a=GroupParams(mu=0.0, eta=0.0, sigma=1.0, allow_degenerate=True),
            group_b=GroupParams(mu=0.0, eta=1.0, sigma=1.0),
            p_a=0.5,
        )
        with pytest.raises(DegenerateModelError):
            asy.selection_rates_bayesian(pop, 0.3)


class TestApplyGammaRule:
    def test_parity_forces_equal_rates(self):
        x_a, x_b = asy.apply_gamma_rule(0.9, alpha=0.5, p_a=0.4, gamma=1.0)
        assert x_a == 0.5 and x_b == 0.5

    def test_gamma_zero_keeps_baseline(self):
        x_a, x_b = asy.apply_gamma_rule(0.9, alpha=0.5, p_a=0.4, gamma=0.0)
        assert x_a == 0.9
        assert x_b == pytest.approx((0.5 - 0.4 * 0.9) / 0.6, abs=1e-15)

    def test_clamp_to_upper_quota(self):
        x_a, x_b = asy.apply_gamma_rule(0.9, alpha=0.5, p_a=0.4, gamma=0.8)
        assert x_a == pytest.approx(0.5 / 0.88, abs=1e-12)
        assert x_b == pytest.approx((0.5 - 0.4 * x_a) / 0.6, abs=1e-12)
        assert x_a >= 0.8 * x_b - 1e-12
        assert x_b >= 0.8 * x_a - 1e-12

    def test_interval_endpoints(self):
        lo, hi = asy.gamma_rate_interval(0.5, 0.4, 0.8)
        assert lo == pytest.approx(0.4 / 0.92, abs=1e-12)
        assert hi == pytest.approx(0.5 / 0.88, abs=1e-12)

    def test_constraints_hold_across_random_inputs(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            alpha = rng.uniform(0.01, 0.99)
            p_a = rng.uniform(0.05, 0.95)
            gamma = rng.uniform(0.0, 1.0)
            lo_f = max(0.0, (alpha - (1 - p_a)) / p_a)
            hi_f = min(1.0, alpha / p_a)
            baseline = rng.uniform(lo_f, hi_f)
            x_a, x_b = asy.apply_gamma_rule(baseline, alpha, p_a, gamma)
            assert x_a >= gamma * x_b - 1e-9
            assert x_b >= gamma * x_a - 1e-9
            assert p_a * x_a + (1 - p_a) * x_b == pytest.approx(alpha, abs=1e-9)
            assert -1e-12 <= x_a <= 1 + 1e-12 and -1e-12 <= x_b <= 1 + 1e-12


class TestUtility:
    def test_frozen_worked_value(self):
        # frozen from the closed form evaluated on the math.erf reference
        assert asy.utility(make_pop(), 0.5, 0.5) == pytest.approx(1.5703594099340625, abs=1e-12)

    def test_monte_carlo_cross_check(self):
        # independent check of the closed form by simulation at the same point
        pop = make_pop()
        n = 1_000_000
        rng = np.random.default_rng(20240817)
        n_a = int(0.4 * n)
        w_a = pop.group_a.mu + pop.group_a.eta * rng.standard_normal(n_a)
        w_b = pop.group_b.mu + pop.group_b.eta * rng.standard_normal(n - n_a)
        wh_a = w_a + pop.group_a.sigma * rng.standard_normal(n_a)
        wh_b = w_b + pop.group_b.sigma * rng.standard_normal(n - n_a)
        # rate 0.5 in each group: threshold at each group's sample median
        sel_a = w_a[wh_a >= np.median(wh_a)]
        sel_b = w_b[wh_b >= np.median(wh_b)]
        est = (sel_a.sum() + sel_b.sum()) / (len(sel_a) + len(sel_b))
        se = np.std(np.concatenate([sel_a, sel_b])) / math.sqrt(len(sel_a) + len(sel_b))
        assert abs(est - asy.utility(pop, 0.5, 0.5)) <= 3 * se

    def test_select_everyone_is_population_mean(self):
        pop = make_pop(mu_a=2.0, mu_b=-1.0)
        assert asy.utility(pop, 1.0, 1.0) == pytest.approx(0.4 * 2.0 + 0.6 * (-1.0), abs=1e-12)

    def test_matches_parity_closed_form(self):
        pop = make_pop(mu_b=0.5, beta_a=1.0)
        for alpha in [0.02, 0.25, 0.5, 0.8, 0.99]:
            assert asy.utility(pop, alpha, alpha) == pytest.approx(
                asy.utility_parity(pop, alpha), abs=1e-12
            )

    def test_infeasible_rate_rejected(self):
        with pytest.raises(DomainError):
            asy.utility(make_pop(), 0.9, 0.3)  # x_b would go negative
        with pytest.raises(DomainError):
            asy.utility(make_pop(), 0.1, 0.8)  # x_b would exceed 1


class TestUtilityDerivative:
    def test_zero_at_bayesian_rate(self):
        pop = make_pop(mu_b=0.7, beta_a=0.5)
        for alpha in [0.1, 0.4, 0.6]:
            x_opt = asy.optimal_rate(pop, alpha)
            assert asy.utility_derivative(pop, x_opt, alpha) == pytest.approx(0.0, abs=1e-8)

    def test_zero_at_symmetric_point(self):
        pop = identical_pop(0.35)
        assert asy.utility_derivative(pop, 0.4, 0.4) == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_differences(self):
        h = 1e-5
        for pop in random_models(8, seed=11):
            alpha = 0.35
            lo, hi = asy.feasible_rate_interval(pop, alpha)
            for x in np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 7):
                fd = (asy.utility(pop, x + h, alpha) - asy.utility(pop, x - h, alpha)) / (2 * h)
                qd = asy.utility_derivative(pop, x, alpha)
                assert abs(fd - qd) <= 1e-5 * max(1.0, abs(qd))

    def test_boundary_rejected(self):
        with pytest.raises(BoundaryError):
            asy.utility_derivative(make_pop(), 0.0, 0.3)


class TestConcavity:
    def test_second_differences_nonpositive(self):
        for pop in random_models(6, seed=3):
            alpha = 0.4
            lo, hi = asy.feasible_rate_interval(pop, alpha)
            grid = np.linspace(lo + 1e-4 * (hi - lo), hi - 1e-4 * (hi - lo), 60)
            q = np.array([asy.utility(pop, float(x), alpha) for x in grid])
            assert np.all(np.diff(q, 2) <= 1e-8)


class TestCrossoverBudgets:
    def test_group_independent_unbiased_is_half(self):
        pop = make_pop()
        assert asy.crossover_budget_oblivious(pop) == pytest.approx(0.5, abs=1e-15)
        assert asy.crossover_budget_bayesian(pop) == pytest.approx(0.5, abs=1e-15)

    def test_biased_crossover_frozen_value(self):
        pop = make_pop(beta_a=1.0, beta_b=0.0)
        assert asy.crossover_budget_oblivious(pop) == pytest.approx(0.32033931378977537, abs=1e-12)

    def test_zero_mean_gap_gives_half_for_bayesian(self):
        pop = make_pop(beta_a=5.0)  # bias does not enter the posterior spread
        assert asy.crossover_budget_bayesian(pop) == pytest.approx(0.5, abs=1e-15)

    def test_tie_returns_none(self):
        pop = identical_pop()
        assert asy.crossover_budget_oblivious(pop) is None
        assert asy.crossover_budget_bayesian(pop) is None

    def test_label_invariance(self):
        pop = make_pop(mu_b=0.4, beta_a=0.7)
        assert asy.crossover_budget_oblivious(pop) == pytest.approx(
            asy.crossover_budget_oblivious(pop.swapped()), abs=1e-15
        )
        assert asy.crossover_budget_bayesian(pop) == pytest.approx(
            asy.crossover_budget_bayesian(pop.swapped()), abs=1e-15
        )

    def test_sign_flip_happens_at_crossover(self):
        pop = make_pop(beta_a=1.0)
        c = asy.crossover_budget_oblivious(pop)
        for alpha in np.linspace(0.02, 0.98, 49):
            oc = asy.selection_rates_oblivious(pop, float(alpha))
            if abs(alpha - c) < 5e-3:
                continue
            assert (oc.x_a > oc.x_b) == (alpha < c)


class TestImprovementRegion:
    def test_degenerate_at_half(self):
        region = asy.improvement_region(make_pop())
        assert region.alpha_min == pytest.approx(0.5, abs=1e-15)
        assert region.alpha_max == pytest.approx(0.5, abs=1e-15)
        assert region.hypothesis_met

    def test_favored_bias_pins_alpha_min_at_half(self):
        region = asy.improvement_region(make_pop(beta_a=0.0, beta_b=1.0))
        assert region.alpha_min == 0.5
        assert region.alpha_max > 0.5

    def test_biased_configuration(self):
        region = asy.improvement_region(make_pop(beta_a=1.0, beta_b=0.0))
        assert region.alpha_min == pytest.approx(0.32033931378977537, abs=1e-12)
        assert region.alpha_max == pytest.approx(0.5, abs=1e-15)

    def test_harm_interval_detected_inside_region(self):
        pop = make_pop(beta_a=1.0, beta_b=0.0)
        harm = asy.scan_harm_interval(pop)
        region = asy.improvement_region(pop)
        assert harm is not None
        lo, hi = harm
        assert region.alpha_min < lo <= hi < region.alpha_max

    def test_parity_beats_oblivious_outside_region(self):
        pop = make_pop(beta_a=1.0, beta_b=0.0)
        region = asy.improvement_region(pop)
        for alpha in [0.05, 0.2, region.alpha_min - 0.02, region.alpha_max + 0.02, 0.7, 0.95]:
            q_obl = asy.selection_rates_oblivious(pop, alpha).utility
            assert asy.utility_parity(pop, alpha) > q_obl

    def test_hypothesis_violation_flagged(self):
        # larger estimate spread AND larger posterior spread for A in
        # either labeling is impossible here, so the guarantee fails
        pop = make_pop(eta_a=2.0, eta_b=0.5, sigma_a=1.0, sigma_b=1.2)
        assert pop.stats_a.sigma_hat > pop.stats_b.sigma_hat
        assert pop.stats_a.sigma_tilde > pop.stats_b.sigma_tilde
        region = asy.improvement_region(pop)
        assert not region.hypothesis_met


class TestFairnessCostBound:
    def test_cor6_frozen_value(self):
        bound = asy.fairness_cost_bound(make_pop(), alpha=0.25, gamma=1.0)
        assert bound.cor6_upper == pytest.approx(1.1972621532774745, abs=1e-12)

    def test_upper_tends_to_one_as_spreads_equalize(self):
        pop = make_pop(sigma_a=0.2001, sigma_b=0.2)
        bound = asy.fairness_cost_bound(pop, alpha=0.25, gamma=1.0)
        assert 1.0 <= bound.upper < 1.001

    def test_parity_upper_limit_for_huge_spread_ratio(self):
        nu = 1e6
        pop = make_pop(sigma_a=math.sqrt(nu**2 - 1.0), sigma_b=0.0)
        bound = asy.fairness_cost_bound(pop, alpha=0.25, gamma=1.0)
        assert bound.parity_upper == pytest.approx(1.0 / 0.6, abs=1e-3)

    def test_gamma_zero_is_free(self):
        bound = asy.fairness_cost_bound(make_pop(), alpha=0.3, gamma=0.0)
        assert bound.upper == 1.0

    def test_bound_contains_true_ratio(self):
        for alpha in [0.05, 0.2, 0.4]:
            for gamma in [0.5, 0.8, 1.0]:
                pop = make_pop()
                q_opt = asy.selection_rates_bayesian(pop, alpha).utility
                q_fair = asy.selection_rates_gamma_fair(pop, alpha, gamma, base="bayesian").utility
                ratio = q_opt / q_fair
                bound = asy.fairness_cost_bound(pop, alpha, gamma)
                assert 1.0 - 1e-12 <= ratio <= bound.upper + 1e-12
                if bound.cor6_upper is not None:
                    assert ratio <= bound.cor6_upper + 1e-12
                    assert bound.upper <= bound.cor6_upper + 1e-12

    def test_negative_mean_flagged(self):
        bound = asy.fairness_cost_bound(make_pop(mu_a=-1.0, mu_b=-1.0), 0.3, 1.0)
        assert not bound.hypothesis_met

    def test_canonical_ordering_is_label_invariant(self):
        pop = make_pop()
        b1 = asy.fairness_cost_bound(pop, 0.3, 0.8)
        b2 = asy.fairness_cost_bound(pop.swapped(), 0.3, 0.8)
        assert b1.upper == pytest.approx(b2.upper, abs=1e-12)
        assert b1.swapped != b2.swapped


class TestSmallBudgetLimit:
    def test_tie_gives_one(self):
        assert asy.small_budget_limit(identical_pop()) == 1.0

    def test_frozen_value(self):
        assert asy.small_budget_limit(make_pop()) == pytest.approx(1.3717494059506734, abs=1e-12)

    def test_vanishing_group_gives_one(self):
        pop = make_pop(p_a=1e-9)
        assert asy.small_budget_limit(pop) == pytest.approx(1.0, abs=1e-8)

    def test_bound_approaches_limit_at_tiny_budget(self):
        # convergence is logarithmic in alpha (the Mills-ratio factor
        # approaches 1 like 1/log(1/alpha)), so check a shrinking gap and
        # closeness only deep in the tail, on a zero-mean model where the
        # limit isn't polluted by the mean term
        pop = make_pop(mu_a=0.0, mu_b=0.0)
        limit = asy.small_budget_limit(pop)
        gaps = [
            abs(asy.fairness_cost_bound(pop, alpha=a, gamma=1.0).upper - limit)
            for a in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
        ]
        assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
        assert gaps[-1] <= 1e-2

    def test_limit_is_label_invariant(self):
        pop = make_pop(mu_b=0.3)
        assert asy.small_budget_limit(pop) == pytest.approx(
            asy.small_budget_limit(pop.swapped()), abs=1e-14
        )


class TestOptimalRate:
    def test_identical_groups(self):
        assert asy.optimal_rate(identical_pop(), 0.3) == pytest.approx(0.3, abs=1e-9)

    def test_below_budget_for_high_variance_group(self):
        assert asy.optimal_rate(make_pop(), 0.3) < 0.3

    def test_agrees_with_golden_section(self):
        for pop in random_models(5, seed=21):
            alpha = 0.45
            lo, hi = asy.feasible_rate_interval(pop, alpha)
            margin = 1e-9 * (hi - lo)
            argmax = golden_max(
                lambda x: asy.utility(pop, x, alpha), lo + margin, hi - margin, tol=1e-10
            )
            assert abs(argmax - asy.optimal_rate(pop, alpha)) <= 1e-6

    def test_no_feasible_rate_beats_it(self):
        pop = make_pop(mu_b=0.2, beta_a=0.4)
        alpha = 0.3
        q_best = asy.utility(pop, asy.optimal_rate(pop, alpha), alpha)
        lo, hi = asy.feasible_rate_interval(pop, alpha)
        for x in np.linspace(lo, hi, 101):
            assert asy.utility(pop, float(x), alpha) <= q_best + 1e-10


class TestSweep:
    def test_cardinality(self):
        grid = list(np.linspace(0.01, 0.99, 99))
        records = asy.sweep(make_pop(), grid, algorithms=("oblivious", "bayesian", "parity"))
        assert len(records) == 297

    def test_parity_equals_oblivious_at_half(self):
        records = asy.sweep(make_pop(), [0.5], algorithms=("oblivious", "parity"))
        by_alg = {r.algorithm: r for r in records}
        assert by_alg["parity"].utility == pytest.approx(by_alg["oblivious"].utility, abs=1e-9)

    def test_budget_identity_on_every_record(self):
        pop = make_pop(mu_b=0.6, beta_b=0.4, p_a=0.3)
        records = asy.sweep(
            pop, list(np.linspace(0.05, 0.95, 19)),
            algorithms=("oblivious", "bayesian", "parity", "gamma_fair_oblivious"),
            gamma=0.8,
        )
        for r in records:
            assert pop.p_a * r.x_a + pop.p_b * r.x_b == pytest.approx(r.alpha, abs=1e-9)

    def test_ratio_columns_present(self):
        records = asy.sweep(make_pop(), [0.2])
        assert {"ratio_dp_obl", "ratio_opt_dp"} <= records[0].extras.keys()

    def test_deterministic(self):
        grid = list(np.linspace(0.1, 0.9, 9))
        a = asy.sweep(make_pop(), grid)
        b = asy.sweep(make_pop(), grid)
        assert a == b

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(DomainError):
            asy.sweep(make_pop(), [0.5], algorithms=("nope",))

    def test_gamma_ordering_between_baseline_and_parity(self):
        # quota rule interpolates: oblivious <= gamma-fair <= parity off-crossover
        pop = make_pop()
        for alpha in [0.1, 0.3]:
            q_obl = asy.selection_rates_oblivious(pop, alpha).utility
            q_fair = asy.selection_rates_gamma_fair(pop, alpha, 0.8, base="oblivious").utility
            q_dp = asy.utility_parity(pop, alpha)
            assert q_obl <= q_fair + 1e-12 <= q_dp + 1e-12
