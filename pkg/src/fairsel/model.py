"""Population model: per-group parameters and the posterior-mean map.

A candidate in group G has latent quality W ~ N(mu, eta^2) and the decision
maker sees the estimate  w_hat = W - beta + sigma * eps  with standard-normal
noise eps.  Two derived scales drive everything downstream:

* ``sigma_hat``  — std of the estimate,  sqrt(sigma^2 + eta^2)
* ``sigma_tilde`` — std of the posterior mean E[W | w_hat],  eta^2 / sigma_hat

Parameters are validated at construction; instances are immutable and safe
to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

from .errors import DegenerateModelError, DomainError

__all__ = ["GroupParams", "DerivedStats", "PopulationModel", "posterior_mean", "derived_stats"]


@dataclass(frozen=True)
class GroupParams:
    """Latent-quality and estimator parameters for one group.

    ``allow_degenerate=True`` permits eta == 0 (all candidates in the group
    identical); the posterior then collapses to ``mu``.  Without the flag,
    eta == 0 raises, since it silently disables the Bayesian machinery.
    """

    mu: float
    eta: float
    beta: float = 0.0
    sigma: float = 0.0
    allow_degenerate: bool = False

    def __post_init__(self):
        for name in ("mu", "eta", "beta", "sigma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"GroupParams.{name} must be finite, got {v!r}")
        if self.eta < 0:
            raise DomainError(f"eta must be >= 0, got {self.eta}")
        if self.sigma < 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if self.eta == 0 and self.sigma == 0:
            raise DegenerateModelError("eta and sigma cannot both be 0")
        if self.eta == 0 and not self.allow_degenerate:
            raise DegenerateModelError(
                "eta == 0 collapses the group to a point mass; "
                "pass allow_degenerate=True if that is intentional"
            )


@dataclass(frozen=True)
class DerivedStats:
    """Scales of the estimate and of the posterior mean for one group."""

    sigma_hat: float
    sigma_tilde: float


def derived_stats(g: GroupParams) -> DerivedStats:
    """Compute (sigma_hat, sigma_tilde) for a group."""
    sigma_hat = math.hypot(g.sigma, g.eta)
    return DerivedStats(sigma_hat=sigma_hat, sigma_tilde=g.eta * g.eta / sigma_hat)


def posterior_mean(w_hat, g: GroupParams):
    """E[W | w_hat] for a group-G candidate (scalar or array w_hat).

    Shrinks the bias-corrected estimate toward the group mean with weight
    eta^2 / (sigma^2 + eta^2); affine and strictly increasing in w_hat
    whenever eta > 0.
    """
    var_hat = g.sigma * g.sigma + g.eta * g.eta
    weight = g.eta * g.eta / var_hat
    return weight * (w_hat + g.beta) + (1.0 - weight) * g.mu


@dataclass(frozen=True)
class PopulationModel:
    """Two groups plus the fraction ``p_a`` of A-candidates."""

    group_a: GroupParams
    group_b: GroupParams
    p_a: float

    def __post_init__(self):
        if not (math.isfinite(self.p_a) and 0.0 < self.p_a < 1.0):
            raise DomainError(f"p_a must lie in (0, 1), got {self.p_a!r}")

    @property
    def p_b(self) -> float:
        return 1.0 - self.p_a

    @cached_property
    def stats_a(self) -> DerivedStats:
        return derived_stats(self.group_a)

    @cached_property
    def stats_b(self) -> DerivedStats:
        return derived_stats(self.group_b)

    def swapped(self) -> "PopulationModel":
        """The same population with the group labels exchanged."""
        return PopulationModel(group_a=self.group_b, group_b=self.group_a, p_a=self.p_b)

    def to_dict(self) -> dict:
        return {
            "mu_a": self.group_a.mu,
            "eta_a": self.group_a.eta,
            "beta_a": self.group_a.beta,
            "sigma_a": self.group_a.sigma,
            "mu_b": self.group_b.mu,
            "eta_b": self.group_b.eta,
            "beta_b": self.group_b.beta,
            "sigma_b": self.group_b.sigma,
            "p_a": self.p_a,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, allow_degenerate: bool = False) -> "PopulationModel":
        required = {"mu_a", "eta_a", "beta_a", "sigma_a", "mu_b", "eta_b", "beta_b", "sigma_b", "p_a"}
        missing = required - d.keys()
        if missing:
            raise DomainError(f"model dict is missing keys: {sorted(missing)}")
        return cls(
            group_a=GroupParams(
                mu=float(d["mu_a"]), eta=float(d["eta_a"]), beta=float(d["beta_a"]),
                sigma=float(d["sigma_a"]), allow_degenerate=allow_degenerate,
            ),
            group_b=GroupParams(
                mu=float(d["mu_b"]), eta=float(d["eta_b"]), beta=float(d["beta_b"]),
                sigma=float(d["sigma_b"]), allow_degenerate=allow_degenerate,
            ),
            p_a=float(d["p_a"]),
        )

    @classmethod
    def from_json(cls, text: str, allow_degenerate: bool = False) -> "PopulationModel":
        return cls.from_dict(json.loads(text), allow_degenerate=allow_degenerate)
