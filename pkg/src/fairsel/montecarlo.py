"""Finite-population cohorts, selection rules on samples, and replication.

Randomness contract: every draw comes from a counter-based Philox stream
keyed by the user seed, with replication r reading stream r (counter word
3), and every candidate's uniform indexed by its position in the cohort.
Latent qualities and noise deviates are produced by inverse-CDF transform
of those uniforms, so results are bit-reproducible regardless of how many
workers execute the replications.

Priors beyond the normal are supported for cohort generation and scored
either by numeric posterior expectation (adaptive quadrature) or by a
moment-matched normal plug-in (explicitly flagged mode).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import quad
from scipy.special import betaincinv, betaln

from . import stdnorm
from .errors import ConfigurationError, DomainError, NumericError, ScoringError
from .model import GroupParams, PopulationModel, posterior_mean

__all__ = [
    "NormalPrior",
    "UniformPrior",
    "BetaPrior",
    "ParetoPrior",
    "QualityPrior",
    "CohortSpec",
    "Candidate",
    "Cohort",
    "SelectionResult",
    "AlgorithmStats",
    "RatioStats",
    "ReplicationSummary",
    "generate_cohort",
    "select_oblivious",
    "select_bayesian",
    "select_gamma_fair",
    "select_parity",
    "quota_pair",
    "sample_utility",
    "selection_fractions",
    "replicate",
    "select_by_name",
    "posterior_mean_numeric",
]

_U_FLOOR = 1e-300  # rng.random() can return exactly 0.0


@dataclass(frozen=True)
class NormalPrior:
    mu: float
    eta: float

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError(f"normal prior needs eta > 0, got {self.eta}")

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.mu + self.eta * stdnorm.quantile(u)

    def pdf(self, w):
        return stdnorm.pdf((np.asarray(w) - self.mu) / self.eta) / self.eta

    def mean(self) -> float:
        return self.mu

    def std(self) -> float:
        return self.eta

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)


@dataclass(frozen=True)
class UniformPrior:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"uniform prior needs lo < hi, got [{self.lo}, {self.hi}]")

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * u

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        inside = (w >= self.lo) & (w <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def std(self) -> float:
        return (self.hi - self.lo) / math.sqrt(12.0)

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class BetaPrior:
    shape_a: float
    shape_b: float

    def __post_init__(self):
        if self.shape_a <= 0 or self.shape_b <= 0:
            raise DomainError("beta prior needs both shapes > 0")

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return betaincinv(self.shape_a, self.shape_b, u)

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        inside = (w > 0.0) & (w < 1.0)
        wc = np.where(inside, w, 0.5)
        log_density = (
            (self.shape_a - 1.0) * np.log(wc)
            + (self.shape_b - 1.0) * np.log1p(-wc)
            - betaln(self.shape_a, self.shape_b)
        )
        return np.where(inside, np.exp(log_density), 0.0)

    def mean(self) -> float:
        return self.shape_a / (self.shape_a + self.shape_b)

    def std(self) -> float:
        a, b = self.shape_a, self.shape_b
        return math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))

    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)


@dataclass(frozen=True)
class ParetoPrior:
    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise DomainError("pareto prior needs scale > 0 and shape > 0")

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.scale * np.power(1.0 - u, -1.0 / self.shape)

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        inside = w >= self.scale
        wc = np.where(inside, w, self.scale)
        return np.where(inside, self.shape * self.scale**self.shape / wc ** (self.shape + 1.0), 0.0)

    def mean(self) -> float:
        if self.shape <= 1.0:
            raise DomainError(f"pareto mean is infinite for shape {self.shape} <= 1")
        return self.shape * self.scale / (self.shape - 1.0)

    def std(self) -> float:
        if self.shape <= 2.0:
            raise DomainError(f"pareto std is infinite for shape {self.shape} <= 2")
        return self.scale * math.sqrt(self.shape) / ((self.shape - 1.0) * math.sqrt(self.shape - 2.0))

    def support(self) -> tuple[float, float]:
        return (self.scale, math.inf)


QualityPrior = Union[NormalPrior, UniformPrior, BetaPrior, ParetoPrior]


@dataclass(frozen=True)
class CohortSpec:
    """Generation recipe: per-group quality prior, noise std and bias."""

    prior_a: QualityPrior
    prior_b: QualityPrior
    sigma_a: float
    sigma_b: float
    p_a: float
    beta_a: float = 0.0
    beta_b: float = 0.0

    def __post_init__(self):
        if self.sigma_a < 0 or self.sigma_b < 0:
            raise DomainError("noise std must be >= 0")
        if not 0.0 < self.p_a < 1.0:
            raise DomainError(f"p_a must lie in (0, 1), got {self.p_a}")

    @classmethod
    def from_population(cls, pop: PopulationModel) -> "CohortSpec":
        return cls(
            prior_a=NormalPrior(pop.group_a.mu, pop.group_a.eta),
            prior_b=NormalPrior(pop.group_b.mu, pop.group_b.eta),
            sigma_a=pop.group_a.sigma,
            sigma_b=pop.group_b.sigma,
            beta_a=pop.group_a.beta,
            beta_b=pop.group_b.beta,
            p_a=pop.p_a,
        )

    def has_normal_priors(self) -> bool:
        return isinstance(self.prior_a, NormalPrior) and isinstance(self.prior_b, NormalPrior)

    def plug_in_model(self) -> PopulationModel:
        """Moment-matched normal-prior population (exact for normal priors)."""
        return PopulationModel(
            group_a=GroupParams(
                mu=self.prior_a.mean(), eta=self.prior_a.std(), beta=self.beta_a, sigma=self.sigma_a
            ),
            group_b=GroupParams(
                mu=self.prior_b.mean(), eta=self.prior_b.std(), beta=self.beta_b, sigma=self.sigma_b
            ),
            p_a=self.p_a,
        )


@dataclass(frozen=True)
class Candidate:
    index: int
    group: str  # "A" | "B"
    w: float
    w_hat: float


@dataclass(eq=False)
class Cohort:
    """A finite sample; candidates 0..n_a-1 are group A, the rest group B."""

    w: np.ndarray
    w_hat: np.ndarray
    n_a: int
    n_b: int
    spec: CohortSpec
    seed: int
    stream: int = 0

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    @property
    def is_a(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[: self.n_a] = True
        return mask

    def candidates(self) -> list[Candidate]:
        return [
            Candidate(i, "A" if i < self.n_a else "B", float(self.w[i]), float(self.w_hat[i]))
            for i in range(self.n)
        ]


@dataclass(eq=False)
class SelectionResult:
    indices: np.ndarray  # ascending candidate indices, length m
    algorithm: str
    n: int
    count_a: int
    count_b: int

    @property
    def m(self) -> int:
        return int(self.indices.size)


def _rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, stream]))


def generate_cohort(spec: CohortSpec, n: int, seed: int, stream: int = 0) -> Cohort:
    """Draw a cohort of ``n`` candidates; deterministic in (spec, n, seed, stream)."""
    if n < 2:
        raise ConfigurationError(f"need at least 2 candidates, got {n}")
    n_a = math.floor(spec.p_a * n)
    n_b = n - n_a
    if n_a < 1 or n_b < 1:
        raise ConfigurationError(
            f"p_a = {spec.p_a} leaves an empty group at n = {n} (n_a = {n_a}, n_b = {n_b})"
        )
    rng = _rng_for(seed, stream)
    u_w = np.maximum(rng.random(n), _U_FLOOR)
    u_e = np.maximum(rng.random(n), _U_FLOOR)
    w = np.empty(n)
    w[:n_a] = spec.prior_a.ppf(u_w[:n_a])
    w[n_a:] = spec.prior_b.ppf(u_w[n_a:])
    eps = stdnorm.quantile(u_e)
    w_hat = np.empty(n)
    w_hat[:n_a] = w[:n_a] - spec.beta_a + spec.sigma_a * eps[:n_a]
    w_hat[n_a:] = w[n_a:] - spec.beta_b + spec.sigma_b * eps[n_a:]
    return Cohort(w=w, w_hat=w_hat, n_a=n_a, n_b=n_b, spec=spec, seed=seed, stream=stream)


def _check_m(cohort: Cohort, m: int) -> None:
    if not 1 <= m <= cohort.n:
        raise DomainError(f"m must lie in [1, {cohort.n}], got {m}")


def _top_by_score(scores: np.ndarray, m: int) -> np.ndarray:
    """Indices of the m largest scores, ties broken by lowest index."""
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:m]


def _result(cohort: Cohort, chosen: np.ndarray, algorithm: str) -> SelectionResult:
    chosen = np.sort(chosen)
    count_a = int(np.count_nonzero(chosen < cohort.n_a))
    return SelectionResult(
        indices=chosen,
        algorithm=algorithm,
        n=cohort.n,
        count_a=count_a,
        count_b=int(chosen.size - count_a),
    )


def select_oblivious(cohort: Cohort, m: int) -> SelectionResult:
    """Top-m by raw estimate, group labels unused."""
    _check_m(cohort, m)
    return _result(cohort, _top_by_score(cohort.w_hat, m), "oblivious")


def bayesian_scores(cohort: Cohort, scoring: str = "auto") -> np.ndarray:
    """Posterior-mean score per candidate.

    ``closed_form_normal`` requires normal priors; ``quadrature`` works for
    any prior via numeric posterior expectation; ``plug_in_normal`` applies
    the normal closed form to a moment-matched prior (an approximation,
    available behind this explicit name only).  ``auto`` picks the closed
    form when priors are normal and quadrature otherwise.
    """
    spec = cohort.spec
    if scoring == "auto":
        scoring = "closed_form_normal" if spec.has_normal_priors() else "quadrature"
    if scoring in ("closed_form_normal", "plug_in_normal"):
        if scoring == "closed_form_normal" and not spec.has_normal_priors():
            raise ScoringError("closed_form_normal scoring requires normal priors in both groups")
        pop = spec.plug_in_model()
        scores = np.empty(cohort.n)
        scores[: cohort.n_a] = posterior_mean(cohort.w_hat[: cohort.n_a], pop.group_a)
        scores[cohort.n_a :] = posterior_mean(cohort.w_hat[cohort.n_a :], pop.group_b)
        return scores
    if scoring == "quadrature":
        scores = np.empty(cohort.n)
        for i in range(cohort.n):
            if i < cohort.n_a:
                prior, sigma, beta = spec.prior_a, spec.sigma_a, spec.beta_a
            else:
                prior, sigma, beta = spec.prior_b, spec.sigma_b, spec.beta_b
            scores[i] = posterior_mean_numeric(float(cohort.w_hat[i]), prior, sigma, beta)
        return scores
    raise ScoringError(f"unknown scoring {scoring!r}")


def select_bayesian(cohort: Cohort, m: int, scoring: str = "auto") -> SelectionResult:
    """Top-m by posterior-mean score."""
    _check_m(cohort, m)
    return _result(cohort, _top_by_score(bayesian_scores(cohort, scoring), m), "bayesian")


def quota_pair(m: int, n_a: int, n_b: int, gamma: float) -> tuple[int, int]:
    """Minimum per-group counts enforcing the two-sided quota rule.

    Ceiling quotas; if they jointly exceed m (possible by at most one
    seat), the larger quota gives the seat back, B first on ties.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    if gamma == 0.0:
        return 0, 0
    q_a = min(math.ceil(m * gamma * n_a / (n_b + gamma * n_a)), n_a)
    q_b = min(math.ceil(m * gamma * n_b / (n_a + gamma * n_b)), n_b)
    while q_a + q_b > m:
        if q_b >= q_a:
            q_b -= 1
        else:
            q_a -= 1
    return q_a, q_b


def select_gamma_fair(
    cohort: Cohort, m: int, gamma: float, base: str = "oblivious", scoring: str = "auto"
) -> SelectionResult:
    """Quota-constrained version of a baseline: fill per-group minimums with
    each group's best-scored candidates, then the remaining seats by score
    irrespective of group."""
    _check_m(cohort, m)
    if base == "oblivious":
        scores = cohort.w_hat
    elif base == "bayesian":
        scores = bayesian_scores(cohort, scoring)
    else:
        raise DomainError(f"base must be 'oblivious' or 'bayesian', got {base!r}")
    q_a, q_b = quota_pair(m, cohort.n_a, cohort.n_b, gamma)

    idx = np.arange(cohort.n)
    order = np.lexsort((idx, -scores))
    in_a = order < cohort.n_a
    picked = np.concatenate([order[in_a][:q_a], order[~in_a][:q_b]])
    if picked.size < m:
        mask = np.ones(cohort.n, dtype=bool)
        mask[picked] = False
        rest = order[mask[order]]
        picked = np.concatenate([picked, rest[: m - picked.size]])
    tag = "parity" if gamma == 1.0 else f"gamma_fair_{base}"
    return _result(cohort, picked, tag)


def select_parity(cohort: Cohort, m: int, base: str = "oblivious", scoring: str = "auto") -> SelectionResult:
    """Equal selection rates up to one candidate (quota rule at gamma = 1)."""
    return select_gamma_fair(cohort, m, gamma=1.0, base=base, scoring=scoring)


def sample_utility(cohort: Cohort, result: SelectionResult) -> float:
    """Mean true quality of the selected candidates."""
    if result.n != cohort.n:
        raise DomainError("selection does not refer to this cohort")
    if result.indices.size and (result.indices.min() < 0 or result.indices.max() >= cohort.n):
        raise DomainError("selection indices out of range for this cohort")
    return float(cohort.w[result.indices].mean())


def selection_fractions(cohort: Cohort, result: SelectionResult) -> tuple[float, float]:
    """Per-group selected fractions (counts over group sizes)."""
    if result.n != cohort.n:
        raise DomainError("selection does not refer to this cohort")
    return result.count_a / cohort.n_a, result.count_b / cohort.n_b


@dataclass(frozen=True)
class AlgorithmStats:
    algorithm: str
    mean_utility: float
    std_utility: float
    ci_halfwidth: float
    mean_x_a: float
    mean_x_b: float
    degenerate_std: bool = False


@dataclass(frozen=True)
class RatioStats:
    name: str
    mean: float
    std: float
    ci_halfwidth: float


@dataclass(frozen=True)
class ReplicationSummary:
    n: int
    m: int
    K: int
    seed: int
    gamma: float
    per_algorithm: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)


def select_by_name(cohort: Cohort, m: int, algorithm: str, gamma: float = 1.0, scoring: str = "auto") -> SelectionResult:
    """Dispatch a selection rule by its curve-record name."""
    if algorithm == "oblivious":
        return select_oblivious(cohort, m)
    if algorithm == "bayesian":
        return select_bayesian(cohort, m, scoring)
    if algorithm == "parity":
        return select_parity(cohort, m)
    if algorithm == "gamma_fair_oblivious":
        return select_gamma_fair(cohort, m, gamma, base="oblivious")
    if algorithm == "gamma_fair_bayesian":
        return select_gamma_fair(cohort, m, gamma, base="bayesian", scoring=scoring)
    raise DomainError(f"unknown algorithm {algorithm!r}")


def replicate(
    spec: CohortSpec,
    n: int,
    m: int,
    K: int,
    seed: int,
    algorithms: tuple[str, ...] = ("oblivious", "bayesian", "parity"),
    gamma: float = 1.0,
    scoring: str = "auto",
    threads: int = 0,
) -> ReplicationSummary:
    """Run K independent cohorts and summarize utilities and fractions.

    Replication r draws from stream r of the master seed, so the summary is
    bitwise identical for any ``threads`` setting (results are reduced in
    replication order).  CI halfwidths are one standard deviation of the
    estimated mean (std / sqrt(K)).
    """
    if K < 1:
        raise ConfigurationError(f"K must be >= 1, got {K}")

    def one(r: int) -> dict:
        cohort = generate_cohort(spec, n, seed, stream=r)
        row: dict = {}
        for alg in algorithms:
            res = select_by_name(cohort, m, alg, gamma, scoring)
            x_a, x_b = selection_fractions(cohort, res)
            row[alg] = (sample_utility(cohort, res), x_a, x_b)
        return row

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(K)))
    else:
        rows = [one(r) for r in range(K)]

    degenerate = K == 1
    per_algorithm = {}
    for alg in algorithms:
        q = np.array([row[alg][0] for row in rows])
        xa = np.array([row[alg][1] for row in rows])
        xb = np.array([row[alg][2] for row in rows])
        std = float(q.std(ddof=1)) if K > 1 else 0.0
        per_algorithm[alg] = AlgorithmStats(
            algorithm=alg,
            mean_utility=float(q.mean()),
            std_utility=std,
            ci_halfwidth=std / math.sqrt(K),
            mean_x_a=float(xa.mean()),
            mean_x_b=float(xb.mean()),
            degenerate_std=degenerate,
        )

    ratios = {}
    pairs = [("parity_over_oblivious", "parity", "oblivious"), ("bayesian_over_parity", "bayesian", "parity")]
    for name, num, den in pairs:
        if num in algorithms and den in algorithms:
            vals = np.array([row[num][0] / row[den][0] for row in rows])
            std = float(vals.std(ddof=1)) if K > 1 else 0.0
            ratios[name] = RatioStats(
                name=name, mean=float(vals.mean()), std=std, ci_halfwidth=std / math.sqrt(K)
            )

    return ReplicationSummary(
        n=n, m=m, K=K, seed=seed, gamma=gamma, per_algorithm=per_algorithm, ratios=ratios
    )


def posterior_mean_numeric(w_hat: float, prior: QualityPrior, sigma: float, beta: float = 0.0) -> float:
    """E[W | observed estimate] by adaptive quadrature over the prior support.

    Infinite support ends are truncated ten combined standard deviations
    beyond the prior mean and the likelihood center.  sigma = 0 means the
    estimate is exact up to bias.
    """
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return w_hat + beta
    center = w_hat + beta
    lo, hi = prior.support()
    try:
        spread = math.hypot(prior.std(), sigma)
        anchor_lo, anchor_hi = prior.mean(), prior.mean()
    except DomainError:
        spread = 10.0 * sigma  # heavy-tailed prior: fall back to a wide window
        anchor_lo = anchor_hi = center
    a = max(lo, min(anchor_lo, center) - 10.0 * spread)
    b = min(hi, max(anchor_hi, center) + 10.0 * spread)
    if not a < b:
        raise NumericError("empty integration window for the posterior expectation")

    def unnormalized(w: float) -> float:
        return float(prior.pdf(w)) * stdnorm.pdf((center - w) / sigma)

    den, _ = quad(unnormalized, a, b, epsabs=1e-300, epsrel=1e-10, limit=200)
    if not math.isfinite(den) or den <= 1e-290:
        raise NumericError(
            f"posterior normalizer vanished for estimate {w_hat!r} (support [{lo}, {hi}])"
        )
    num, _ = quad(lambda w: w * unnormalized(w), a, b, epsabs=1e-300, epsrel=1e-10, limit=200)
    return num / den
