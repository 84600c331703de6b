"""CSV ingestion and dataset-driven selection experiments.

The scenario: treat a real score column as the true latent quality, inject
synthetic group-dependent noise (optionally sweeping a noise multiplier k
for one group), then compare selection rules on the resulting cohorts.
Bayesian scoring on data uses each group's empirical (mean, std) as a
plug-in normal prior; the same plug-in model furnishes the analytic
overlay columns (improvement region, cost bound).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotic as asy
from . import montecarlo as mc
from .errors import ConfigurationError, DomainError, SchemaError
from .model import PopulationModel
from .records import CurveRecord

__all__ = [
    "Record",
    "GroupStats",
    "ColumnSchema",
    "LoadResult",
    "DatasetScenario",
    "load_records",
    "write_records",
    "group_stats",
    "synthesize_cohort",
    "run_dataset_experiment",
    "bundled_csv_path",
]


@dataclass(frozen=True)
class Record:
    id: str
    group: str  # "A" | "B"
    quality: float


@dataclass(frozen=True)
class GroupStats:
    mean: float
    std: float  # population convention (ddof=0)
    count: int


@dataclass(frozen=True)
class ColumnSchema:
    id_col: str = "id"
    group_col: str = "group"
    quality_col: str = "quality"


@dataclass(frozen=True)
class LoadResult:
    records: tuple
    dropped: int


def bundled_csv_path() -> Path:
    """The synthetic scores file shipped with the package."""
    return Path(__file__).parent / "data" / "synthetic_scores.csv"


def load_records(
    path, schema: ColumnSchema = ColumnSchema(), group_map: dict | None = None
) -> LoadResult:
    """Read records from a CSV file, mapping raw group labels to A/B.

    Rows whose quality cell is blank or non-numeric are dropped and
    counted.  ``group_map`` maps raw labels to "A"/"B"; with None, the file
    must contain exactly two labels, assigned alphabetically.  Unknown
    labels are a schema error that names the offenders.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (schema.id_col, schema.group_col, schema.quality_col):
            if col not in header:
                raise SchemaError(f"column {col!r} not found in header {header}")
        rows = list(reader)

    if group_map is None:
        labels = sorted({row[schema.group_col] for row in rows})
        if len(labels) != 2:
            raise SchemaError(
                f"cannot infer a two-group mapping from labels {labels}; pass group_map"
            )
        group_map = {labels[0]: "A", labels[1]: "B"}
    bad = {v for v in group_map.values()} - {"A", "B"}
    if bad:
        raise SchemaError(f"group_map must map onto 'A'/'B', got values {sorted(bad)}")

    unknown: set[str] = set()
    records: list[Record] = []
    dropped = 0
    for row in rows:
        label = row[schema.group_col]
        if label not in group_map:
            unknown.add(label)
            continue
        try:
            quality = float(row[schema.quality_col])
        except (TypeError, ValueError):
            dropped += 1
            continue
        if not math.isfinite(quality):
            dropped += 1
            continue
        records.append(Record(id=row[schema.id_col], group=group_map[label], quality=quality))
    if unknown:
        raise SchemaError(f"unknown group labels (not in group_map): {sorted(unknown)}")
    present = {r.group for r in records}
    for group in ("A", "B"):
        if group not in present:
            raise ConfigurationError(f"group {group} is empty after mapping/drops")
    return LoadResult(records=tuple(records), dropped=dropped)


def write_records(records, path) -> None:
    """Serialize records with the canonical id/group/quality header."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "group", "quality"])
        for r in records:
            writer.writerow([r.id, r.group, repr(r.quality)])


def group_stats(records) -> dict[str, GroupStats]:
    """Per-group sample mean and population-convention std."""
    out = {}
    for group in ("A", "B"):
        vals = np.array([r.quality for r in records if r.group == group])
        if vals.size == 0:
            raise ConfigurationError(f"group {group} has no records")
        out[group] = GroupStats(mean=float(vals.mean()), std=float(vals.std(ddof=0)), count=int(vals.size))
    return out


def _spec_from_records(records, sigma_a, sigma_b, beta_a, beta_b) -> mc.CohortSpec:
    stats = group_stats(records)
    n = stats["A"].count + stats["B"].count
    return mc.CohortSpec(
        prior_a=mc.NormalPrior(stats["A"].mean, max(stats["A"].std, 1e-12)),
        prior_b=mc.NormalPrior(stats["B"].mean, max(stats["B"].std, 1e-12)),
        sigma_a=sigma_a,
        sigma_b=sigma_b,
        beta_a=beta_a,
        beta_b=beta_b,
        p_a=stats["A"].count / n,
    )


def synthesize_cohort(
    records,
    sigma_by_group: dict,
    beta_by_group: dict | None = None,
    seed: int = 0,
    stream: int = 0,
) -> mc.Cohort:
    """Cohort whose true qualities are the data and whose estimates add
    seeded group-dependent noise.

    A-records come first (file order preserved within each group); group
    sizes come from the data, not from a target fraction.  The attached
    spec records provenance as the plug-in normal model.
    """
    beta_by_group = beta_by_group or {"A": 0.0, "B": 0.0}
    sigma_a, sigma_b = float(sigma_by_group["A"]), float(sigma_by_group["B"])
    beta_a, beta_b = float(beta_by_group["A"]), float(beta_by_group["B"])
    if sigma_a < 0 or sigma_b < 0:
        raise DomainError("noise std must be >= 0")
    w_a = [r.quality for r in records if r.group == "A"]
    w_b = [r.quality for r in records if r.group == "B"]
    if not w_a or not w_b:
        raise ConfigurationError("both groups must be nonempty")
    n_a, n_b = len(w_a), len(w_b)
    w = np.array(w_a + w_b)
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, stream]))
    from .stdnorm import quantile

    eps = quantile(np.maximum(rng.random(n_a + n_b), 1e-300))
    w_hat = np.empty_like(w)
    w_hat[:n_a] = w[:n_a] - beta_a + sigma_a * eps[:n_a]
    w_hat[n_a:] = w[n_a:] - beta_b + sigma_b * eps[n_a:]
    spec = _spec_from_records(records, sigma_a, sigma_b, beta_a, beta_b)
    return mc.Cohort(w=w, w_hat=w_hat, n_a=n_a, n_b=n_b, spec=spec, seed=seed, stream=stream)


@dataclass(frozen=True)
class DatasetScenario:
    """Records plus the synthetic-noise recipe, including the k sweep.

    ``k_target`` names the group ("A" or "B") whose noise std is scaled by
    each k value; the other group keeps its base sigma.
    """

    records: tuple
    sigma_a: float
    sigma_b: float
    beta_a: float = 0.0
    beta_b: float = 0.0
    k_target: str = "A"
    seed: int = 0

    def __post_init__(self):
        if self.k_target not in ("A", "B"):
            raise DomainError(f"k_target must be 'A' or 'B', got {self.k_target!r}")

    def sigmas_for(self, k: float) -> dict:
        if k < 0:
            raise DomainError(f"k must be >= 0, got {k}")
        return {
            "A": self.sigma_a * (k if self.k_target == "A" else 1.0),
            "B": self.sigma_b * (k if self.k_target == "B" else 1.0),
        }


def _empirical_threshold(cohort: mc.Cohort, result: mc.SelectionResult, group: str) -> float:
    mask = result.indices < cohort.n_a if group == "A" else result.indices >= cohort.n_a
    chosen = result.indices[mask]
    if chosen.size == 0:
        return math.inf
    return float(cohort.w_hat[chosen].min())


def run_dataset_experiment(
    scenario: DatasetScenario,
    alpha_grid,
    algorithms: tuple[str, ...] = ("oblivious", "bayesian", "parity"),
    gamma: float = 1.0,
    k_values: tuple[float, ...] = (1.0,),
) -> list[CurveRecord]:
    """One CurveRecord per (k, alpha, algorithm) on synthesized cohorts.

    alpha = 1 is allowed (select everyone).  Points where m = floor(alpha*n)
    would be zero are skipped with an inline note.  Each record carries the
    sample ratios plus analytic overlays (improvement region, cost bound)
    computed from the plug-in normal model.
    """
    out: list[CurveRecord] = []
    for k_index, k in enumerate(k_values):
        sigmas = scenario.sigmas_for(k)
        cohort = synthesize_cohort(
            scenario.records,
            sigma_by_group=sigmas,
            beta_by_group={"A": scenario.beta_a, "B": scenario.beta_b},
            seed=scenario.seed,
            stream=k_index,
        )
        pop: PopulationModel = cohort.spec.plug_in_model()
        region = asy.improvement_region(pop)
        n = cohort.n
        for alpha in alpha_grid:
            if not 0.0 < alpha <= 1.0:
                raise DomainError(f"dataset budgets must lie in (0, 1], got {alpha!r}")
            base_extras = {
                "k": float(k),
                "source": "dataset",
                "alpha_min": region.alpha_min,
                "alpha_max": region.alpha_max,
            }
            if alpha < 1.0:
                base_extras["bound_upper"] = asy.fairness_cost_bound(pop, alpha, gamma).upper
            m = math.floor(alpha * n)
            if m < 1:
                for algorithm in algorithms:
                    out.append(
                        CurveRecord(
                            alpha=alpha, algorithm=algorithm, gamma=gamma,
                            x_a=math.nan, x_b=math.nan, theta_a=math.nan, theta_b=math.nan,
                            utility=math.nan,
                            extras={**base_extras, "error": f"skipped: m = floor({alpha} * {n}) < 1"},
                        )
                    )
                continue
            selections = {}
            for algorithm in algorithms:
                selections[algorithm] = mc.select_by_name(cohort, m, algorithm, gamma, "plug_in_normal")
            utilities = {a: mc.sample_utility(cohort, s) for a, s in selections.items()}
            ratio_extras = {}
            q_obl = utilities.get("oblivious")
            q_dp = utilities.get("parity")
            q_opt = utilities.get("bayesian")
            if q_obl is not None and q_dp is not None:
                ratio_extras["ratio_dp_obl"] = q_dp / q_obl
            if q_opt is not None and q_dp is not None:
                ratio_extras["ratio_opt_dp"] = q_opt / q_dp
            for algorithm in algorithms:
                res = selections[algorithm]
                x_a, x_b = mc.selection_fractions(cohort, res)
                out.append(
                    CurveRecord(
                        alpha=alpha,
                        algorithm=algorithm,
                        gamma=gamma if algorithm.startswith("gamma_fair") else (1.0 if algorithm == "parity" else 0.0),
                        x_a=x_a,
                        x_b=x_b,
                        theta_a=_empirical_threshold(cohort, res, "A"),
                        theta_b=_empirical_threshold(cohort, res, "B"),
                        utility=utilities[algorithm],
                        extras={**base_extras, **ratio_extras},
                    )
                )
    return out
