"""Large-population selection analysis.

Everything here treats the candidate pool as infinite: selection rules
become per-group thresholds, selection rates become normal tail
probabilities, and the expected quality of the selected set has a
truncated-normal closed form.  The central object is the utility

    Q(x_a) = (1/alpha) * sum_G p_G * [ x_G * mu_G
             + sigma_tilde_G * pdf(quantile(1 - x_G)) ]

for a rule that selects A-candidates at rate ``x_a`` (and B-candidates at
the rate the budget then forces).  Q is strictly concave with its maximum
at the Bayesian-optimal rate, which is what powers the crossover, the
improvement-region and the fairness-cost results below.

All functions are pure; everything can run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import stdnorm
from .errors import BoundaryError, ConstraintError, DegenerateModelError, DomainError, NumericError
from .model import PopulationModel, posterior_mean
from .records import CurveRecord

__all__ = [
    "SelectionOutcome",
    "ImprovementRegion",
    "CostBound",
    "solve_common_threshold",
    "selection_rates_oblivious",
    "selection_rates_bayesian",
    "selection_rates_gamma_fair",
    "selection_rates_parity",
    "apply_gamma_rule",
    "gamma_rate_interval",
    "feasible_rate_interval",
    "utility",
    "utility_parity",
    "utility_derivative",
    "crossover_budget_oblivious",
    "crossover_budget_bayesian",
    "improvement_region",
    "scan_harm_interval",
    "fairness_cost_bound",
    "small_budget_limit",
    "optimal_rate",
    "sweep",
]

_ALGORITHMS = ("oblivious", "bayesian", "parity", "gamma_fair_oblivious", "gamma_fair_bayesian")


@dataclass(frozen=True)
class SelectionOutcome:
    """Per-group selection rates, estimate-space thresholds and utility."""

    x_a: float
    x_b: float
    theta_a: float
    theta_b: float
    utility: float


@dataclass(frozen=True)
class ImprovementRegion:
    """Budget interval outside which the quota rule provably helps the
    group-oblivious baseline.

    ``hypothesis_met`` records whether the underlying ordering assumptions
    (estimate spread larger for one group, posterior spread smaller for
    the same group) hold; when they do not, the bounds are still the two
    crossover budgets but carry no guarantee.  ``swapped`` says the
    ordering only holds after exchanging the group labels.
    """

    alpha_min: float
    alpha_max: float
    hypothesis_met: bool
    swapped: bool


@dataclass(frozen=True)
class CostBound:
    """Bound on Q_bayesian / Q_gamma_fair_bayesian at one (alpha, gamma).

    ``upper`` is the general bound; ``cor6_upper`` the simplified bound for
    group-independent quality with unbiased estimates (None when that
    special case does not apply); ``parity_upper`` the gamma = 1 variant
    that is also the small-budget limit.  ``clamped`` records that the raw
    formula dipped below 1 and was clamped up (can happen above the
    crossover when the budget exceeds the quota interval width).
    """

    upper: float
    regime: str  # "below_crossover" | "above_crossover"
    lower: float = 1.0
    hypothesis_met: bool = True
    swapped: bool = False
    clamped: bool = False
    cor6_upper: float | None = None
    parity_upper: float | None = None


def _q_upper(x: float) -> float:
    """quantile(1 - x) computed stably for x anywhere in (0, 1)."""
    return -stdnorm.quantile(x)


def _tail_term(x: float, sigma_tilde: float) -> float:
    """sigma_tilde * pdf(quantile(1 - x)), extended by continuity to {0, 1}."""
    m = min(x, 1.0 - x)
    if m <= 0.0:
        return 0.0
    return sigma_tilde * stdnorm.pdf(stdnorm.quantile(m))


def _check_budget(alpha: float, allow_one: bool = False) -> None:
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and 0.0 < alpha and hi_ok):
        raise DomainError(f"selection budget must lie in (0, 1{']' if allow_one else ')'}, got {alpha!r}")


def _check_gamma(gamma: float) -> None:
    if not (math.isfinite(gamma) and 0.0 <= gamma <= 1.0):
        raise DomainError(f"gamma must lie in [0, 1], got {gamma!r}")


def _group_locations(pop: PopulationModel, space: str) -> tuple[float, float, float, float]:
    """(m_a, s_a, m_b, s_b): location and scale of the scored quantity."""
    if space == "estimate":
        return (
            pop.group_a.mu - pop.group_a.beta,
            pop.stats_a.sigma_hat,
            pop.group_b.mu - pop.group_b.beta,
            pop.stats_b.sigma_hat,
        )
    if space == "posterior":
        return (pop.group_a.mu, pop.stats_a.sigma_tilde, pop.group_b.mu, pop.stats_b.sigma_tilde)
    raise DomainError(f"space must be 'estimate' or 'posterior', got {space!r}")


def solve_common_threshold(pop: PopulationModel, alpha: float, space: str = "estimate") -> float:
    """Threshold theta with  sum_G p_G * P(score_G >= theta) = alpha.

    The selected mass is continuous and strictly decreasing in theta, so
    the root is unique; bracketed bisection is unconditionally safe.
    Terminates at 1e-12 interval width or 1e-10 residual, whichever first.
    """
    _check_budget(alpha)
    m_a, s_a, m_b, s_b = _group_locations(pop, space)
    if s_a <= 0.0 or s_b <= 0.0:
        raise DegenerateModelError(f"{space}-space scale is zero for a group with positive mass")
    p_a, p_b = pop.p_a, pop.p_b

    def selected_mass(theta: float) -> float:
        return p_a * (1.0 - stdnorm.cdf((theta - m_a) / s_a)) + p_b * (
            1.0 - stdnorm.cdf((theta - m_b) / s_b)
        )

    lo = min(m_a - 10.0 * s_a, m_b - 10.0 * s_b)
    hi = max(m_a + 10.0 * s_a, m_b + 10.0 * s_b)
    width = hi - lo
    for _ in range(120):
        if selected_mass(lo) >= alpha:
            break
        lo -= width
        width *= 2.0
    else:
        raise NumericError("failed to bracket the selection threshold from below")
    width = hi - lo
    for _ in range(120):
        if selected_mass(hi) <= alpha:
            break
        hi += width
        width *= 2.0
    else:
        raise NumericError("failed to bracket the selection threshold from above")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12:
            break
        resid = selected_mass(mid) - alpha
        if abs(resid) <= 1e-10:
            return mid
        if resid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def feasible_rate_interval(pop: PopulationModel, alpha: float) -> tuple[float, float]:
    """Range of x_a for which the implied x_b stays within [0, 1]."""
    lo = max(0.0, (alpha - pop.p_b) / pop.p_a)
    hi = min(1.0, alpha / pop.p_a)
    return lo, hi


def gamma_rate_interval(alpha: float, p_a: float, gamma: float) -> tuple[float, float]:
    """x_a interval equivalent to the two quota constraints at level gamma."""
    p_b = 1.0 - p_a
    lo = alpha * gamma / (gamma * p_a + p_b) if gamma > 0.0 else 0.0
    hi = alpha / (p_a + gamma * p_b)
    return lo, hi


def apply_gamma_rule(
    x_a_baseline: float, alpha: float, p_a: float, gamma: float
) -> tuple[float, float]:
    """Project a baseline A-rate onto the quota-feasible interval.

    Returns (x_a, x_b) satisfying both  x_a >= gamma * x_b  and
    x_b >= gamma * x_a  while keeping the budget identity exact.
    """
    _check_budget(alpha)
    _check_gamma(gamma)
    if not 0.0 < p_a < 1.0:
        raise DomainError(f"p_a must lie in (0, 1), got {p_a!r}")
    p_b = 1.0 - p_a
    g_lo, g_hi = gamma_rate_interval(alpha, p_a, gamma)
    f_lo = max(0.0, (alpha - p_b) / p_a)
    f_hi = min(1.0, alpha / p_a)
    lo = max(g_lo, f_lo)
    hi = min(g_hi, f_hi)
    if lo > hi + 1e-12:
        if g_lo > f_hi:
            raise ConstraintError(
                f"quota lower bound x_a >= {g_lo:.6g} exceeds the feasible maximum {f_hi:.6g}"
            )
        raise ConstraintError(
            f"quota upper bound x_a <= {g_hi:.6g} is below the feasible minimum {f_lo:.6g}"
        )
    if gamma == 1.0:
        x_a = alpha  # equal rates; avoids round-off in the interval endpoints
    else:
        x_a = min(max(x_a_baseline, lo), hi)
    x_b = (alpha - p_a * x_a) / p_b
    return x_a, min(max(x_b, 0.0), 1.0)


def utility(pop: PopulationModel, x_a: float, alpha: float) -> float:
    """Expected quality per selected candidate at A-rate ``x_a``.

    Truncated-bivariate-normal closed form; extends continuously to rates
    at 0 or 1 (where the tail term vanishes).  Accepts alpha = 1, where
    every rule selects everyone.
    """
    _check_budget(alpha, allow_one=True)
    if not -1e-12 <= x_a <= 1.0 + 1e-12:
        raise DomainError(f"x_a must lie in [0, 1], got {x_a!r}")
    x_a = min(max(x_a, 0.0), 1.0)
    x_b = (alpha - pop.p_a * x_a) / pop.p_b
    if not -1e-9 <= x_b <= 1.0 + 1e-9:
        raise DomainError(
            f"x_a = {x_a!r} forces the B-rate to {x_b!r}, outside [0, 1], at budget {alpha!r}"
        )
    x_b = min(max(x_b, 0.0), 1.0)
    total = pop.p_a * (x_a * pop.group_a.mu + _tail_term(x_a, pop.stats_a.sigma_tilde))
    total += pop.p_b * (x_b * pop.group_b.mu + _tail_term(x_b, pop.stats_b.sigma_tilde))
    return total / alpha


def utility_parity(pop: PopulationModel, alpha: float) -> float:
    """Utility when both groups are selected at rate alpha (closed form)."""
    _check_budget(alpha, allow_one=True)
    if alpha == 1.0:
        return pop.p_a * pop.group_a.mu + pop.p_b * pop.group_b.mu
    imr = stdnorm.pdf(stdnorm.quantile(1.0 - alpha)) / alpha
    return (
        pop.p_a * pop.group_a.mu
        + pop.p_b * pop.group_b.mu
        + imr * (pop.p_a * pop.stats_a.sigma_tilde + pop.p_b * pop.stats_b.sigma_tilde)
    )


def _threshold_at_rate(pop: PopulationModel, x: float, group: str) -> float:
    g = pop.group_a if group == "a" else pop.group_b
    s = pop.stats_a if group == "a" else pop.stats_b
    if x <= 0.0:
        return math.inf
    if x >= 1.0:
        return -math.inf
    return g.mu - g.beta + s.sigma_hat * _q_upper(x)


def utility_derivative(pop: PopulationModel, x_a: float, alpha: float) -> float:
    """dQ/dx_a: gap between the groups' posterior means at their thresholds.

    Linear and decreasing in the thresholds, which is exactly why Q is
    strictly concave.  Requires both rates strictly inside (0, 1).
    """
    _check_budget(alpha)
    x_b = (alpha - pop.p_a * x_a) / pop.p_b
    if not (0.0 < x_a < 1.0 and 0.0 < x_b < 1.0):
        raise BoundaryError(
            f"derivative needs interior rates; got x_a = {x_a!r}, x_b = {x_b!r}"
        )
    theta_a = _threshold_at_rate(pop, x_a, "a")
    theta_b = _threshold_at_rate(pop, x_b, "b")
    gap = posterior_mean(theta_a, pop.group_a) - posterior_mean(theta_b, pop.group_b)
    return pop.p_a / alpha * gap


def selection_rates_oblivious(pop: PopulationModel, alpha: float) -> SelectionOutcome:
    """Rates under a single estimate-space threshold (group labels unused)."""
    theta = solve_common_threshold(pop, alpha, space="estimate")
    x_a = 1.0 - stdnorm.cdf((theta - pop.group_a.mu + pop.group_a.beta) / pop.stats_a.sigma_hat)
    x_b = 1.0 - stdnorm.cdf((theta - pop.group_b.mu + pop.group_b.beta) / pop.stats_b.sigma_hat)
    return SelectionOutcome(
        x_a=x_a, x_b=x_b, theta_a=theta, theta_b=theta, utility=utility(pop, x_a, alpha)
    )


def selection_rates_bayesian(pop: PopulationModel, alpha: float) -> SelectionOutcome:
    """Rates under a single posterior-space threshold.

    Thresholds are reported back in estimate space (the affine inverse of
    the posterior map) so all selectors share one threshold vocabulary.
    """
    st_a, st_b = pop.stats_a, pop.stats_b
    if st_a.sigma_tilde <= 0.0 or st_b.sigma_tilde <= 0.0:
        raise DegenerateModelError(
            "posterior-mean spread is zero for a group with positive mass; "
            "the Bayesian rule is ill-defined"
        )
    theta = solve_common_threshold(pop, alpha, space="posterior")
    x_a = 1.0 - stdnorm.cdf((theta - pop.group_a.mu) / st_a.sigma_tilde)
    x_b = 1.0 - stdnorm.cdf((theta - pop.group_b.mu) / st_b.sigma_tilde)

    def estimate_space(theta_post: float, g, s) -> float:
        weight = g.eta * g.eta / (g.sigma * g.sigma + g.eta * g.eta)
        return (theta_post - (1.0 - weight) * g.mu) / weight - g.beta

    return SelectionOutcome(
        x_a=x_a,
        x_b=x_b,
        theta_a=estimate_space(theta, pop.group_a, st_a),
        theta_b=estimate_space(theta, pop.group_b, st_b),
        utility=utility(pop, x_a, alpha),
    )


def selection_rates_gamma_fair(
    pop: PopulationModel, alpha: float, gamma: float, base: str = "oblivious"
) -> SelectionOutcome:
    """Quota-projected version of a baseline rule."""
    if base == "oblivious":
        baseline = selection_rates_oblivious(pop, alpha)
    elif base == "bayesian":
        baseline = selection_rates_bayesian(pop, alpha)
    else:
        raise DomainError(f"base must be 'oblivious' or 'bayesian', got {base!r}")
    x_a, x_b = apply_gamma_rule(baseline.x_a, alpha, pop.p_a, gamma)
    return SelectionOutcome(
        x_a=x_a,
        x_b=x_b,
        theta_a=_threshold_at_rate(pop, x_a, "a"),
        theta_b=_threshold_at_rate(pop, x_b, "b"),
        utility=utility(pop, x_a, alpha),
    )


def selection_rates_parity(pop: PopulationModel, alpha: float) -> SelectionOutcome:
    """Equal selection rates for both groups (quota rule at gamma = 1)."""
    return selection_rates_gamma_fair(pop, alpha, gamma=1.0, base="oblivious")


def crossover_budget_oblivious(pop: PopulationModel) -> float | None:
    """Budget where the oblivious rule's over/underrepresentation flips.

    None when both groups share the same estimate spread (no crossover).
    The value is label-invariant: swapping groups negates both the mean
    gap and the spread gap.
    """
    d_hat = pop.stats_a.sigma_hat - pop.stats_b.sigma_hat
    if d_hat == 0.0:
        return None
    d_mu = pop.group_a.mu - pop.group_b.mu
    d_beta = pop.group_a.beta - pop.group_b.beta
    return stdnorm.cdf((d_mu - d_beta) / d_hat)


def crossover_budget_bayesian(pop: PopulationModel) -> float | None:
    """Budget where the Bayesian rule's representation flips; None on ties."""
    d_tilde = pop.stats_a.sigma_tilde - pop.stats_b.sigma_tilde
    if d_tilde == 0.0:
        return None
    d_mu = pop.group_a.mu - pop.group_b.mu
    return stdnorm.cdf(d_mu / d_tilde)


def improvement_region(pop: PopulationModel) -> ImprovementRegion:
    """The interval [alpha_min, alpha_max] spanned by the two crossovers.

    Outside it, forcing equal rates provably improves the group-oblivious
    baseline (and the quota rule weakly improves it).  The guarantee needs
    one group to have both the larger estimate spread and the smaller
    posterior spread; when no labeling achieves that, ``hypothesis_met``
    is False and the bounds carry no guarantee.
    """
    swapped = pop.stats_a.sigma_hat < pop.stats_b.sigma_hat
    work = pop.swapped() if swapped else pop
    hypothesis = (
        work.stats_a.sigma_hat > work.stats_b.sigma_hat
        and work.stats_a.sigma_tilde < work.stats_b.sigma_tilde
    )
    c_obl = crossover_budget_oblivious(pop)
    c_bay = crossover_budget_bayesian(pop)
    if c_obl is None or c_bay is None:
        return ImprovementRegion(
            alpha_min=math.nan, alpha_max=math.nan, hypothesis_met=False, swapped=swapped
        )
    return ImprovementRegion(
        alpha_min=min(c_obl, c_bay),
        alpha_max=max(c_obl, c_bay),
        hypothesis_met=hypothesis,
        swapped=swapped,
    )


def scan_harm_interval(
    pop: PopulationModel, grid_size: int = 401, lo: float | None = None, hi: float | None = None
) -> tuple[float, float] | None:
    """Empirical sub-interval where forcing parity hurts the oblivious rule.

    No closed form exists for its endpoints; this scans a budget grid for
    sign changes of Q_parity - Q_oblivious and returns the first
    contiguous negative run, or None if the difference never goes
    negative on the grid.
    """
    if lo is None or hi is None:
        region = improvement_region(pop)
        if not math.isfinite(region.alpha_min):
            return None
        lo = region.alpha_min if lo is None else lo
        hi = region.alpha_max if hi is None else hi
    if not lo < hi:
        return None
    step = (hi - lo) / (grid_size + 1)
    start = None
    last_neg = None
    for i in range(1, grid_size + 1):
        a = lo + i * step
        diff = utility_parity(pop, a) - selection_rates_oblivious(pop, a).utility
        if diff < 0.0:
            if start is None:
                start = a
            last_neg = a
        elif start is not None:
            break
    if start is None:
        return None
    return start, last_neg


def small_budget_limit(pop: PopulationModel) -> float:
    """Limit of the parity cost bound as the budget shrinks to zero.

    Mean gaps stop mattering; only the posterior spreads do.  Computed
    under the canonical labeling (smaller posterior spread first).
    """
    work = pop if pop.stats_a.sigma_tilde < pop.stats_b.sigma_tilde else pop.swapped()
    d_tilde = work.stats_a.sigma_tilde - work.stats_b.sigma_tilde
    mix = work.p_a * work.stats_a.sigma_tilde + work.p_b * work.stats_b.sigma_tilde
    return 1.0 - work.p_a * d_tilde / mix


def fairness_cost_bound(pop: PopulationModel, alpha: float, gamma: float) -> CostBound:
    """Upper bound on Q_bayesian / Q_gamma_fair_bayesian.

    Valid when one group has strictly smaller posterior spread (canonical
    ordering applied internally) and both group means are nonnegative;
    otherwise the numbers are still reported with ``hypothesis_met`` False.
    The raw formula can dip below 1 above the crossover when the factor
    (1 - alpha / (p_a + p_b * gamma)) goes negative; the bound is then
    clamped at 1 and flagged.
    """
    _check_budget(alpha)
    _check_gamma(gamma)
    swapped = pop.stats_a.sigma_tilde >= pop.stats_b.sigma_tilde
    work = pop.swapped() if swapped else pop
    st_a, st_b = work.stats_a, work.stats_b
    d_tilde = st_a.sigma_tilde - st_b.sigma_tilde
    d_mu = work.group_a.mu - work.group_b.mu
    hypothesis = d_tilde < 0.0 and work.group_a.mu >= 0.0 and work.group_b.mu >= 0.0

    q = _q_upper(alpha)
    q_dp = utility_parity(work, alpha)
    if d_tilde != 0.0:
        crossover = stdnorm.cdf(d_mu / d_tilde)
    else:
        crossover = 0.5  # ordering tie: regime split is arbitrary, bound unreliable
    below = alpha <= crossover
    regime = "below_crossover" if below else "above_crossover"

    if gamma == 0.0:
        upper = 1.0
        clamped = False
    else:
        g_val = (work.p_a / alpha) * (d_mu + q * d_tilde) / q_dp
        if below:
            upper = 1.0 - alpha / (work.p_a + work.p_b / gamma) * g_val
        else:
            upper = 1.0 + (1.0 - alpha / (work.p_a + work.p_b * gamma)) * g_val
        clamped = upper < 1.0
        if clamped:
            upper = 1.0

    cor6 = None
    parity = None
    group_independent = (
        work.group_a.mu == work.group_b.mu and work.group_a.eta == work.group_b.eta
    )
    if group_independent and hypothesis and work.stats_a.sigma_hat > work.stats_b.sigma_hat:
        nu = work.stats_a.sigma_hat / work.stats_b.sigma_hat
        share = work.p_a * (nu - 1.0) / (work.p_a + work.p_b * nu)
        parity = 1.0 + share
        if gamma > 0.0 and alpha <= 0.5:
            g_alpha = alpha * q / stdnorm.pdf(q)
            cor6 = 1.0 + g_alpha / (work.p_a + work.p_b / gamma) * share

    return CostBound(
        upper=upper,
        regime=regime,
        hypothesis_met=hypothesis,
        swapped=swapped,
        clamped=clamped,
        cor6_upper=cor6,
        parity_upper=parity,
    )


def optimal_rate(pop: PopulationModel, alpha: float) -> float:
    """The A-rate maximizing Q at this budget (the Bayesian rule's rate)."""
    return selection_rates_bayesian(pop, alpha).x_a


def _outcome_for(pop: PopulationModel, alpha: float, algorithm: str, gamma: float) -> SelectionOutcome:
    if algorithm == "oblivious":
        return selection_rates_oblivious(pop, alpha)
    if algorithm == "bayesian":
        return selection_rates_bayesian(pop, alpha)
    if algorithm == "parity":
        return selection_rates_parity(pop, alpha)
    if algorithm == "gamma_fair_oblivious":
        return selection_rates_gamma_fair(pop, alpha, gamma, base="oblivious")
    if algorithm == "gamma_fair_bayesian":
        return selection_rates_gamma_fair(pop, alpha, gamma, base="bayesian")
    raise DomainError(f"unknown algorithm {algorithm!r}; expected one of {_ALGORITHMS}")


def _record_gamma(algorithm: str, gamma: float) -> float:
    if algorithm in ("oblivious", "bayesian"):
        return 0.0  # gamma = 0 is exactly the unconstrained rule
    if algorithm == "parity":
        return 1.0
    return gamma


def sweep(
    pop: PopulationModel,
    alpha_grid: list[float],
    algorithms: tuple[str, ...] = ("oblivious", "bayesian", "parity"),
    gamma: float = 1.0,
) -> list[CurveRecord]:
    """One CurveRecord per (alpha, algorithm), in grid-major order.

    Every record carries the utility ratios parity/oblivious and
    bayesian/parity for its budget.  Errors at a grid point are recorded
    inline (extras["error"]) and never abort the sweep.
    """
    for name in algorithms:
        if name not in _ALGORITHMS:
            raise DomainError(f"unknown algorithm {name!r}; expected one of {_ALGORITHMS}")
    _check_gamma(gamma)
    out: list[CurveRecord] = []
    for alpha in alpha_grid:
        ratios: dict[str, float] = {}
        try:
            q_obl = selection_rates_oblivious(pop, alpha).utility
            q_dp = utility_parity(pop, alpha)
            q_opt = selection_rates_bayesian(pop, alpha).utility
            ratios["ratio_dp_obl"] = q_dp / q_obl
            ratios["ratio_opt_dp"] = q_opt / q_dp
        except (DomainError, DegenerateModelError, NumericError):
            ratios["ratio_dp_obl"] = math.nan
            ratios["ratio_opt_dp"] = math.nan
        for algorithm in algorithms:
            try:
                oc = _outcome_for(pop, alpha, algorithm, gamma)
                out.append(
                    CurveRecord(
                        alpha=alpha,
                        algorithm=algorithm,
                        gamma=_record_gamma(algorithm, gamma),
                        x_a=oc.x_a,
                        x_b=oc.x_b,
                        theta_a=oc.theta_a,
                        theta_b=oc.theta_b,
                        utility=oc.utility,
                        extras=dict(ratios),
                    )
                )
            except (DomainError, DegenerateModelError, NumericError, ConstraintError) as exc:
                extras = dict(ratios)
                extras["error"] = str(exc)
                out.append(
                    CurveRecord(
                        alpha=alpha,
                        algorithm=algorithm,
                        gamma=_record_gamma(algorithm, gamma),
                        x_a=math.nan,
                        x_b=math.nan,
                        theta_a=math.nan,
                        theta_b=math.nan,
                        utility=math.nan,
                        extras=extras,
                    )
                )
    return out
