"""Command-line interface.

Four subcommands: ``analyze`` (asymptotic curves), ``simulate``
(finite-population replications), ``dataset`` (CSV-driven experiments)
and ``bounds`` (report of crossovers, improvement region and cost
bounds).  Inline model flags override values from a ``--model`` JSON
file; shared flags (e.g. ``--mu``) set both groups and are overridden by
the group-specific ones (``--mu-a``).

Exit codes: 0 success, 1 runtime/numeric failure, 2 configuration error.
Diagnostics go to stderr; data goes to the output path or stdout.
Output embeds the resolved config and tool version, never a timestamp,
so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotic as asy
from . import dataset as dsmod
from . import montecarlo as mc
from .errors import ConfigurationError, DomainError, FairselError, SchemaError
from .model import PopulationModel
from .records import CurveRecord, meta_comment, records_to_csv, records_to_json

_MODEL_KEYS = ("mu", "eta", "beta", "sigma")
_ALL_ALGORITHMS = ("oblivious", "bayesian", "parity", "gamma_fair_oblivious", "gamma_fair_bayesian")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model", "population model (file and/or inline flags)")
    group.add_argument("--model", type=Path, help="JSON file with keys mu_a..sigma_b, p_a")
    for key in _MODEL_KEYS:
        group.add_argument(f"--{key}", type=float, help=f"{key} for both groups")
        group.add_argument(f"--{key}-a", type=float, help=f"{key} for group A")
        group.add_argument(f"--{key}-b", type=float, help=f"{key} for group B")
    group.add_argument("--p-a", type=float, help="fraction of A-candidates, in (0, 1)")


def resolve_model(args: argparse.Namespace) -> PopulationModel:
    values: dict = {}
    if args.model is not None:
        try:
            values.update(json.loads(Path(args.model).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read model file {args.model}: {exc}") from exc
    for key in _MODEL_KEYS:
        shared = getattr(args, key)
        if shared is not None:
            values[f"{key}_a"] = shared
            values[f"{key}_b"] = shared
        for side in ("a", "b"):
            specific = getattr(args, f"{key}_{side}")
            if specific is not None:
                values[f"{key}_{side}"] = specific
    if args.p_a is not None:
        values["p_a"] = args.p_a
    for side in ("a", "b"):
        values.setdefault(f"beta_{side}", 0.0)
        values.setdefault(f"sigma_{side}", 0.0)
    missing = [k for k in ("mu_a", "mu_b", "eta_a", "eta_b", "p_a") if k not in values]
    if missing:
        raise ConfigurationError(f"model is incomplete; missing {missing} (use flags or --model)")
    try:
        return PopulationModel.from_dict(values)
    except FairselError as exc:
        raise ConfigurationError(f"invalid model: {exc}") from exc


def parse_grid(text: str, name: str, lo_open=0.0, hi_closed=1.0, allow_hi=False) -> list[float]:
    """Parse '0.3' or 'lo:hi:steps' into a list of values in (lo_open, hi]."""
    try:
        if ":" in text:
            lo_s, hi_s, steps_s = text.split(":")
            lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
            if steps < 1 or not lo <= hi:
                raise ValueError("need lo <= hi and steps >= 1")
            values = [lo] if steps == 1 else [float(v) for v in np.linspace(lo, hi, steps)]
        else:
            values = [float(text)]
    except ValueError as exc:
        raise ConfigurationError(f"malformed {name} spec {text!r}: {exc}") from exc
    for v in values:
        upper_ok = v <= hi_closed if allow_hi else v < hi_closed
        if not (lo_open < v and upper_ok):
            raise ConfigurationError(
                f"{name} value {v} outside ({lo_open}, {hi_closed}{']' if allow_hi else ')'}"
            )
    return values


def parse_int_grid(text: str, name: str) -> list[int]:
    try:
        if ":" in text:
            lo_s, hi_s, step_s = text.split(":")
            lo, hi, step = int(lo_s), int(hi_s), int(step_s)
            if step < 1 or lo > hi:
                raise ValueError("need lo <= hi and step >= 1")
            return list(range(lo, hi + 1, step))
        return [int(text)]
    except ValueError as exc:
        raise ConfigurationError(f"malformed {name} spec {text!r}: {exc}") from exc


def parse_algorithms(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    for n in names:
        if n not in _ALL_ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {n!r}; choose from {_ALL_ALGORITHMS}")
    if not names:
        raise ConfigurationError("empty algorithm list")
    return names


def thread_budget() -> int:
    raw = os.environ.get("FAIRSEL_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"FAIRSEL_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigurationError(f"FAIRSEL_THREADS must be >= 0, got {value}")
    if value == 0:
        return min(8, os.cpu_count() or 1)
    return value


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _meta(command: str, config: dict) -> dict:
    return {"tool": "fairsel", "version": __version__, "command": command, "config": config}


def _write_records(records: list[CurveRecord], meta: dict, args: argparse.Namespace) -> None:
    if args.format == "csv":
        _emit(records_to_csv(records, meta), args.output)
    else:
        _emit(records_to_json(records, meta) + "\n", args.output)


# ---------------------------------------------------------------- analyze

def cmd_analyze(args: argparse.Namespace) -> int:
    pop = resolve_model(args)
    grid = parse_grid(args.alpha, "alpha")
    algorithms = parse_algorithms(args.algorithms)
    records = asy.sweep(pop, grid, algorithms=algorithms, gamma=args.gamma)

    c_obl = asy.crossover_budget_oblivious(pop)
    c_bay = asy.crossover_budget_bayesian(pop)
    region = asy.improvement_region(pop)
    for rec in records:
        rec.extras["crossover_oblivious"] = math.nan if c_obl is None else c_obl
        rec.extras["crossover_bayesian"] = math.nan if c_bay is None else c_bay
        rec.extras["alpha_min"] = region.alpha_min
        rec.extras["alpha_max"] = region.alpha_max
        bound = asy.fairness_cost_bound(pop, rec.alpha, args.gamma)
        rec.extras["bound_upper"] = bound.upper
        rec.extras["bound_cor6"] = math.nan if bound.cor6_upper is None else bound.cor6_upper

    config = {
        "model": pop.to_dict(),
        "alpha": args.alpha,
        "gamma": args.gamma,
        "algorithms": list(algorithms),
        "format": args.format,
    }
    _write_records(records, _meta("analyze", config), args)
    return 0


# ---------------------------------------------------------------- simulate

def _asymptotic_reference(pop: PopulationModel, alpha: float, algorithm: str, gamma: float) -> float:
    if alpha >= 1.0:
        return pop.p_a * pop.group_a.mu + pop.p_b * pop.group_b.mu
    if algorithm == "oblivious":
        return asy.selection_rates_oblivious(pop, alpha).utility
    if algorithm == "bayesian":
        return asy.selection_rates_bayesian(pop, alpha).utility
    if algorithm == "parity":
        return asy.utility_parity(pop, alpha)
    base = "oblivious" if algorithm.endswith("oblivious") else "bayesian"
    return asy.selection_rates_gamma_fair(pop, alpha, gamma, base=base).utility


def cmd_simulate(args: argparse.Namespace) -> int:
    pop = resolve_model(args)
    spec = mc.CohortSpec.from_population(pop)
    m_values = parse_int_grid(args.m, "m")
    algorithms = parse_algorithms(args.algorithms)
    threads = thread_budget()
    rows: list[CurveRecord] = []
    for m in m_values:
        if not 1 <= m <= args.n:
            raise ConfigurationError(f"m = {m} outside [1, n = {args.n}]")
        summary = mc.replicate(
            spec, n=args.n, m=m, K=args.K, seed=args.seed,
            algorithms=algorithms, gamma=args.gamma, threads=threads,
        )
        alpha = m / args.n
        for alg in algorithms:
            st = summary.per_algorithm[alg]
            rows.append(
                CurveRecord(
                    alpha=alpha, algorithm=alg,
                    gamma=args.gamma if alg.startswith("gamma_fair") else (1.0 if alg == "parity" else 0.0),
                    x_a=st.mean_x_a, x_b=st.mean_x_b,
                    theta_a=math.nan, theta_b=math.nan,
                    utility=st.mean_utility,
                    extras={
                        "n": args.n, "m": m, "K": args.K,
                        "mean_utility": st.mean_utility,
                        "std_utility": st.std_utility,
                        "ci_halfwidth": st.ci_halfwidth,
                        "mean_x_a": st.mean_x_a,
                        "mean_x_b": st.mean_x_b,
                        "degenerate_std": st.degenerate_std,
                        "asymptotic_utility": _asymptotic_reference(pop, alpha, alg, args.gamma),
                    },
                )
            )
        for name, rs in summary.ratios.items():
            num_alg, den_alg = name.split("_over_")
            ref_num = _asymptotic_reference(pop, alpha, num_alg, args.gamma)
            ref_den = _asymptotic_reference(pop, alpha, den_alg, args.gamma)
            rows.append(
                CurveRecord(
                    alpha=alpha, algorithm=name, gamma=args.gamma,
                    x_a=math.nan, x_b=math.nan, theta_a=math.nan, theta_b=math.nan,
                    utility=rs.mean,
                    extras={
                        "n": args.n, "m": m, "K": args.K,
                        "mean_utility": rs.mean,
                        "std_utility": rs.std,
                        "ci_halfwidth": rs.ci_halfwidth,
                        "asymptotic_utility": ref_num / ref_den,
                    },
                )
            )
    config = {
        "model": pop.to_dict(),
        "n": args.n, "m": args.m, "K": args.K, "seed": args.seed,
        "gamma": args.gamma, "algorithms": list(algorithms), "format": args.format,
    }
    _write_records(rows, _meta("simulate", config), args)
    return 0


# ---------------------------------------------------------------- dataset

def _parse_group_map(pairs: list[str]) -> dict | None:
    if not pairs:
        return None
    mapping = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"group mapping must look like label=A, got {pair!r}")
        label, side = pair.rsplit("=", 1)
        if side not in ("A", "B"):
            raise ConfigurationError(f"group mapping target must be A or B, got {pair!r}")
        mapping[label] = side
    return mapping


def cmd_dataset(args: argparse.Namespace) -> int:
    schema = dsmod.ColumnSchema(id_col=args.id_col, group_col=args.group_col, quality_col=args.quality_col)
    loaded = dsmod.load_records(args.csv, schema, _parse_group_map(args.map))
    if loaded.dropped:
        print(f"note: dropped {loaded.dropped} rows with missing/non-numeric quality", file=sys.stderr)
    scenario = dsmod.DatasetScenario(
        records=loaded.records,
        sigma_a=args.sigma_a if args.sigma_a is not None else 0.0,
        sigma_b=args.sigma_b if args.sigma_b is not None else 0.0,
        beta_a=args.beta_a or 0.0,
        beta_b=args.beta_b or 0.0,
        k_target=args.k_target,
        seed=args.seed,
    )
    grid = parse_grid(args.alpha, "alpha", allow_hi=True)
    k_values = tuple(float(s) for s in args.k_values.split(","))
    algorithms = parse_algorithms(args.algorithms)
    records = dsmod.run_dataset_experiment(
        scenario, grid, algorithms=algorithms, gamma=args.gamma, k_values=k_values
    )
    stats = dsmod.group_stats(loaded.records)
    config = {
        "csv": str(args.csv),
        "columns": {"id": args.id_col, "group": args.group_col, "quality": args.quality_col},
        "group_stats": {g: {"mean": s.mean, "std": s.std, "count": s.count} for g, s in stats.items()},
        "sigma_a": scenario.sigma_a, "sigma_b": scenario.sigma_b,
        "beta_a": scenario.beta_a, "beta_b": scenario.beta_b,
        "k_values": list(k_values), "k_target": args.k_target,
        "alpha": args.alpha, "gamma": args.gamma, "seed": args.seed,
        "algorithms": list(algorithms), "format": args.format,
    }
    _write_records(records, _meta("dataset", config), args)
    return 0


# ---------------------------------------------------------------- bounds

def cmd_bounds(args: argparse.Namespace) -> int:
    pop = resolve_model(args)
    try:
        alpha = float(args.alpha)
    except ValueError as exc:
        raise ConfigurationError(f"--alpha must be a single value, got {args.alpha!r}") from exc
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"--alpha must be a single value in (0, 1), got {args.alpha}")
    c_obl = asy.crossover_budget_oblivious(pop)
    c_bay = asy.crossover_budget_bayesian(pop)
    region = asy.improvement_region(pop)
    bound = asy.fairness_cost_bound(pop, alpha, args.gamma)
    limit = asy.small_budget_limit(pop)

    if not region.hypothesis_met:
        print("warning: spread-ordering hypothesis violated; the improvement region carries no guarantee", file=sys.stderr)
    if not bound.hypothesis_met:
        print("warning: cost-bound hypothesis violated (needs nonnegative means and strict posterior-spread ordering)", file=sys.stderr)

    payload = {
        "crossover_oblivious": c_obl,
        "crossover_bayesian": c_bay,
        "alpha_min": region.alpha_min,
        "alpha_max": region.alpha_max,
        "region_hypothesis_met": region.hypothesis_met,
        "alpha": alpha,
        "gamma": args.gamma,
        "bound_upper": bound.upper,
        "bound_regime": bound.regime,
        "bound_clamped": bound.clamped,
        "bound_hypothesis_met": bound.hypothesis_met,
        "bound_cor6": bound.cor6_upper,
        "bound_parity_simplified": bound.parity_upper,
        "small_budget_limit": limit,
    }
    if args.format == "json":
        doc = {"meta": _meta("bounds", {"model": pop.to_dict(), "alpha": alpha, "gamma": args.gamma}), **payload}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
        return 0
    lines = [
        meta_comment(_meta("bounds", {"model": pop.to_dict(), "alpha": alpha, "gamma": args.gamma})),
        f"crossover budget (oblivious rule):  {_fmt_opt(c_obl)}",
        f"crossover budget (bayesian rule):   {_fmt_opt(c_bay)}",
        f"improvement region:                 [{_fmt_opt(region.alpha_min)}, {_fmt_opt(region.alpha_max)}]"
        + ("" if region.hypothesis_met else "  (hypothesis violated)"),
        f"cost bound at alpha={alpha!r}, gamma={args.gamma!r}:",
        f"  upper ({bound.regime}{', clamped' if bound.clamped else ''}): {bound.upper!r}",
        f"  simplified (group-independent):   {_fmt_opt(bound.cor6_upper)}",
        f"  parity simplified:                {_fmt_opt(bound.parity_upper)}",
        f"small-budget limit (gamma=1):       {limit!r}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _fmt_opt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "none"
    return repr(value)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsel",
        description="Selection under group-dependent estimation noise: "
        "analytic curves, bounds, simulations and dataset experiments.",
    )
    parser.add_argument("--version", action="version", version=f"fairsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = dict(formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    p_an = sub.add_parser("analyze", help="asymptotic curves over a budget grid", **common)
    _add_model_flags(p_an)
    p_an.add_argument("--alpha", required=True, help="budget: single value or lo:hi:steps")
    p_an.add_argument("--gamma", type=float, default=1.0, help="quota level in [0, 1]")
    p_an.add_argument("--algorithms", default=",".join(_ALL_ALGORITHMS), help="comma list")
    p_an.add_argument("--format", choices=("csv", "json"), default="csv")
    p_an.add_argument("--output", "-o", type=Path, help="output path (stdout if omitted)")
    p_an.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="finite-population replications", **common)
    _add_model_flags(p_sim)
    p_sim.add_argument("--n", type=int, required=True, help="candidates per cohort")
    p_sim.add_argument("--m", required=True, help="selection size: single or lo:hi:step")
    p_sim.add_argument("--K", type=int, required=True, help="replications")
    p_sim.add_argument("--seed", type=int, required=True, help="master seed")
    p_sim.add_argument("--gamma", type=float, default=1.0)
    p_sim.add_argument("--algorithms", default="oblivious,bayesian,parity", help="comma list")
    p_sim.add_argument("--format", choices=("csv", "json"), default="json")
    p_sim.add_argument("--output", "-o", type=Path)
    p_sim.set_defaults(func=cmd_simulate)

    p_ds = sub.add_parser("dataset", help="experiments on a scored CSV", **common)
    p_ds.add_argument("--csv", type=Path, required=True, help="input CSV path")
    p_ds.add_argument("--id-col", default="id")
    p_ds.add_argument("--group-col", default="group")
    p_ds.add_argument("--quality-col", default="quality")
    p_ds.add_argument(
        "--map", action="append", default=[], metavar="LABEL=A|B",
        help="raw label mapping; repeat per label (omit to infer alphabetically)",
    )
    p_ds.add_argument("--sigma-a", type=float, help="noise std for group A (default 0)")
    p_ds.add_argument("--sigma-b", type=float, help="noise std for group B (default 0)")
    p_ds.add_argument("--beta-a", type=float, help="bias for group A (default 0)")
    p_ds.add_argument("--beta-b", type=float, help="bias for group B (default 0)")
    p_ds.add_argument("--k-values", default="1", help="comma list of noise multipliers")
    p_ds.add_argument("--k-target", choices=("A", "B"), default="A", help="group scaled by k")
    p_ds.add_argument("--alpha", required=True, help="budget grid; 1.0 allowed (select all)")
    p_ds.add_argument("--gamma", type=float, default=1.0)
    p_ds.add_argument("--algorithms", default="oblivious,bayesian,parity")
    p_ds.add_argument("--seed", type=int, required=True)
    p_ds.add_argument("--format", choices=("csv", "json"), default="csv")
    p_ds.add_argument("--output", "-o", type=Path)
    p_ds.set_defaults(func=cmd_dataset)

    p_b = sub.add_parser("bounds", help="crossovers, improvement region, cost bounds", **common)
    _add_model_flags(p_b)
    p_b.add_argument("--alpha", required=True, help="single budget in (0, 1)")
    p_b.add_argument("--gamma", type=float, default=1.0)
    p_b.add_argument("--format", choices=("text", "json"), default="text")
    p_b.add_argument("--output", "-o", type=Path)
    p_b.set_defaults(func=cmd_bounds)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, SchemaError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FairselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
