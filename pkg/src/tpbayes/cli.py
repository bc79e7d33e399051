"""Command-line interface.

Subcommands: kl-table, prior-table, sample, fit, forecast, coverage-study,
demo.  Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
failure.  Every seeded subcommand writes byte-identical outputs across
runs: numeric formatting is shortest-round-trip and sidecars carry no
timestamps.  Option resolution for config-file commands is CLI flag over
config file over built-in default, with each resolution logged to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .dataio import (
    DataError,
    format_value,
    read_design_csv,
    read_series_csv,
    write_chain_csv,
    write_meta,
    write_table,
)
from .distributions import Family, TwoPieceParams
from .divergence import QuadratureError
from .experiments import CoverageConfig, emit_kl_tables, run_coverage_study, run_inference_demo
from .forecasting import (
    ForecastConfig,
    ModelKind,
    comparison_table,
    rolling_forecast,
    standardize_first_differences,
)
from .mcmc import ArNormalModel, ArSepdModel, McmcConfig, RegSgldModel, run_mwg, summarize
from .priors import build_tail_prior
from .sampling import RngStream, derive_seed, sample_family

__all__ = ["UsageError", "CliCommand", "parse_args", "main"]

logger = logging.getLogger("tpbayes")

_FAMILIES = {"sepd": Family.SEPD, "sgld": Family.SGLD}


class UsageError(Exception):
    """Bad invocation: unknown flags, missing arguments, unreadable paths."""


@dataclass(frozen=True)
class CliCommand:
    subcommand: str
    options: argparse.Namespace


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tpbayes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    kl = sub.add_parser("kl-table", parents=[], help="closed-form divergence table")
    kl.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    kl.add_argument("--p-max", type=int, default=30, help="rows run p = 2..p_max")
    kl.add_argument("--extended", action="store_true", help="append rows 60,90,...,180")
    kl.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")

    pt = sub.add_parser("prior-table", help="loss-based tail prior table")
    pt.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    pt.add_argument("--p-max", type=int, default=100)
    pt.add_argument("--out", type=Path, default=None)

    sp = sub.add_parser("sample", help="draw from a two-piece distribution")
    sp.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", type=Path, default=None)

    fit = sub.add_parser("fit", help="MCMC fit; writes chain, summary, metadata")
    fit.add_argument("--model", required=True, choices=["ar-sepd", "reg-sgld", "ar-normal"])
    fit.add_argument("--data", type=Path, required=True)
    fit.add_argument("--header", action="store_true", help="skip the first CSV row")
    fit.add_argument("--transform", choices=["none", "std-diff"], default="none")
    fit.add_argument("--seed", type=int, required=True)
    fit.add_argument("--n-iter", type=int, default=20000)
    fit.add_argument("--n-burn", type=int, default=5000)
    fit.add_argument("--p-max", type=int, default=100)
    fit.add_argument("--out-prefix", type=Path, required=True)

    fc = sub.add_parser("forecast", help="rolling one-step forecasts and scores")
    fc.add_argument("--data", type=Path, required=True)
    fc.add_argument("--header", action="store_true")
    fc.add_argument("--transform", choices=["none", "std-diff"], default="none")
    fc.add_argument("--window", type=int, default=None)
    fc.add_argument("--models", type=str, default=None, help="comma list of model kinds")
    fc.add_argument("--seed", type=int, required=True)
    fc.add_argument("--n-iter", type=int, default=None)
    fc.add_argument("--n-burn", type=int, default=None)
    fc.add_argument("--p-max", type=int, default=None)
    fc.add_argument("--predictive-draws", type=int, default=None)
    fc.add_argument("--refit-every", type=int, default=None)
    fc.add_argument("--config", type=Path, default=None, help="YAML settings file")
    fc.add_argument("--out-prefix", type=Path, required=True)

    cs = sub.add_parser("coverage-study", help="config-driven coverage grid")
    cs.add_argument("--config", type=Path, required=True)
    cs.add_argument("--replicates", type=int, default=None)
    cs.add_argument("--master-seed", type=int, default=None)
    cs.add_argument("--threads", type=int, default=None)
    cs.add_argument("--out", type=Path, required=True)

    dm = sub.add_parser("demo", help="simulate a reference scenario and fit it")
    dm.add_argument("--kind", required=True, choices=["ar-sepd", "reg-sgld"])
    dm.add_argument("--seed", type=int, default=0)
    dm.add_argument("--n", type=int, default=None)
    dm.add_argument("--n-iter", type=int, default=None)
    dm.add_argument("--n-burn", type=int, default=None)
    dm.add_argument("--out-prefix", type=Path, required=True)
    return parser


def parse_args(argv) -> CliCommand:
    """Parse and validate an argument vector into a CliCommand."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError("a subcommand is required (see --help)")
    for attr in ("data", "config"):
        path = getattr(ns, attr, None)
        if path is not None and not Path(path).is_file():
            raise UsageError(f"cannot read {path}")
    return CliCommand(subcommand=ns.command, options=ns)


def _emit(path, header, rows) -> None:
    if path is None:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(format_value(v) for v in row) + "\n")
    else:
        write_table(path, header, rows)


def _cmd_kl_table(opts) -> None:
    p_values = list(range(2, opts.p_max + 1))
    if opts.extended:
        p_values += [p for p in (60, 90, 120, 150, 180) if p > opts.p_max]
    rows = emit_kl_tables(_FAMILIES[opts.family], p_values)
    _emit(opts.out, ["p", "kl_vs_p_minus_1", "kl_vs_p_plus_1"], rows)


def _cmd_prior_table(opts) -> None:
    prior = build_tail_prior(_FAMILIES[opts.family], opts.p_max)
    rows = [
        (p, int(prior.argmin_table[p - 1]), prior.kl_min[p - 1],
         float(np.expm1(prior.kl_min[p - 1])), prior.masses[p - 1])
        for p in range(1, prior.p_max + 1)
    ]
    _emit(opts.out, ["p", "argmin_pprime", "kl_min", "unnormalized_mass", "normalized_mass"], rows)


def _cmd_sample(opts) -> None:
    if opts.n < 1:
        raise UsageError(f"--n must be >= 1, got {opts.n}")
    try:
        params = TwoPieceParams(alpha=opts.alpha, p=opts.p, mu=opts.mu, sigma=opts.sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    draws = sample_family(RngStream(opts.seed), _FAMILIES[opts.family], params, size=opts.n)
    lines = "\n".join(format_value(v) for v in draws) + "\n"
    if opts.out is None:
        sys.stdout.write(lines)
    else:
        Path(opts.out).write_text(lines)


def _load_series(opts) -> np.ndarray:
    values, _dates = read_series_csv(opts.data, header=opts.header)
    if opts.transform == "std-diff":
        try:
            values = standardize_first_differences(values)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
    return values


def _summary_rows(summary, true_values=None):
    rows = []
    for name, s in summary.params.items():
        row = [name, s.mean, s.sd, s.median, s.ci_low, s.ci_high]
        if true_values is not None:
            row.append(true_values.get(name, ""))
        rows.append(row)
    return rows


def _cmd_fit(opts) -> None:
    seed = int(opts.seed)
    if opts.model == "reg-sgld":
        y, X = read_design_csv(opts.data, header=opts.header)
        data_size = y.size
        try:
            model = RegSgldModel(y, X)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
    else:
        values = _load_series(opts)
        data_size = values.size
        cls = ArSepdModel if opts.model == "ar-sepd" else ArNormalModel
        try:
            model = cls(values)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
    config = McmcConfig(n_iter=opts.n_iter, n_burn=opts.n_burn, p_max=opts.p_max)
    if opts.model == "ar-sepd":
        prior = build_tail_prior(Family.SEPD, opts.p_max)
    elif opts.model == "reg-sgld":
        prior = build_tail_prior(Family.SGLD, opts.p_max)
    else:
        prior = None
    chain = run_mwg(model, prior, config, RngStream(seed))
    prefix = str(opts.out_prefix)
    write_chain_csv(prefix + "_chain.csv", chain)
    write_table(
        prefix + "_summary.csv",
        ["param", "mean", "sd", "median", "ci_low", "ci_high"],
        _summary_rows(summarize(chain)),
    )
    meta = {
        "subcommand": "fit",
        "model": opts.model,
        "data": str(opts.data),
        "n_obs": data_size,
        "transform": opts.transform if opts.model != "reg-sgld" else "none",
        "seed": seed,
        "n_iter": config.n_iter,
        "n_burn": config.n_burn,
        "p_max": config.p_max,
    }
    for block, rate in chain.acceptance.items():
        meta[f"acceptance_{block}"] = rate
    write_meta(prefix + ".meta", meta)


def _resolve(name: str, cli_value, file_config: dict, default):
    if cli_value is not None:
        logger.info("forecast option %s = %r (command line)", name, cli_value)
        return cli_value
    if name in file_config:
        value = file_config[name]
        logger.info("forecast option %s = %r (config file)", name, value)
        return value
    logger.info("forecast option %s = %r (default)", name, default)
    return default


def _read_yaml(path) -> dict:
    try:
        loaded = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise DataError(f"{path} must contain a mapping at top level")
    return loaded


def _cmd_forecast(opts) -> None:
    file_config = _read_yaml(opts.config) if opts.config is not None else {}
    known = {
        "window", "models", "n_iter", "n_burn", "p_max",
        "predictive_draws", "refit_every",
    }
    unknown = set(file_config) - known
    if unknown:
        raise UsageError(f"unknown forecast config keys: {sorted(unknown)}")
    window = _resolve("window", opts.window, file_config, None)
    if window is None:
        raise UsageError("--window is required (flag or config file)")
    models_raw = _resolve(
        "models", opts.models, file_config, "ols-ar,bayes-normal-ar,sepd-ar"
    )
    if isinstance(models_raw, str):
        model_names = [m.strip() for m in models_raw.split(",") if m.strip()]
    else:
        model_names = [str(m) for m in models_raw]
    try:
        kinds = [ModelKind(name) for name in model_names]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not kinds:
        raise UsageError("at least one forecast model is required")
    mcmc = McmcConfig(
        n_iter=int(_resolve("n_iter", opts.n_iter, file_config, 20000)),
        n_burn=int(_resolve("n_burn", opts.n_burn, file_config, 5000)),
        p_max=int(_resolve("p_max", opts.p_max, file_config, 100)),
    )
    fcfg = ForecastConfig(
        mcmc=mcmc,
        predictive_draws=int(
            _resolve("predictive_draws", opts.predictive_draws, file_config, 2000)
        ),
        refit_every=int(_resolve("refit_every", opts.refit_every, file_config, 1)),
    )
    series = _load_series(opts)
    if series.size <= int(window):
        raise DataError(f"series length {series.size} must exceed window {window}")
    prefix = str(opts.out_prefix)
    records_by_model = {}
    for kind in kinds:
        stream = RngStream(derive_seed(int(opts.seed), "forecast", kind.value))
        records = rolling_forecast(series, int(window), kind, fcfg, stream)
        records_by_model[kind.value] = records
        write_table(
            f"{prefix}_records_{kind.value}.csv",
            ["t", "point_forecast", "realized", "log_score", "crps"],
            [(r.t, r.point_forecast, r.realized, r.log_score, r.crps) for r in records],
        )
    baseline = "ols-ar" if "ols-ar" in records_by_model else kinds[0].value
    rows = comparison_table(records_by_model, baseline)
    write_table(
        prefix + "_comparison.csv",
        ["model", "rmse", "avg_log_score", "avg_crps",
         "rmse_ratio", "log_score_diff", "crps_ratio"],
        [(r.model, r.rmse, r.avg_log_score, r.avg_crps,
          r.rmse_ratio, r.log_score_diff, r.crps_ratio) for r in rows],
    )
    meta = {
        "subcommand": "forecast",
        "data": str(opts.data),
        "transform": opts.transform,
        "window": int(window),
        "models": ",".join(k.value for k in kinds),
        "baseline": baseline,
        "seed": int(opts.seed),
        "n_iter": mcmc.n_iter,
        "n_burn": mcmc.n_burn,
        "p_max": mcmc.p_max,
        "predictive_draws": fcfg.predictive_draws,
        "refit_every": fcfg.refit_every,
        "n_records": len(next(iter(records_by_model.values()))),
    }
    write_meta(prefix + ".meta", meta)


def _cmd_coverage_study(opts) -> None:
    raw = _read_yaml(opts.config)
    known = {
        "kind", "p_values", "alpha_values", "sizes", "replicates", "master_seed",
        "mcmc", "true_phi1", "true_beta", "true_sigma", "ar_presample", "n_jobs",
    }
    unknown = set(raw) - known
    if unknown:
        raise UsageError(f"unknown coverage config keys: {sorted(unknown)}")
    for key in ("kind", "p_values", "alpha_values", "sizes", "replicates"):
        if key not in raw:
            raise UsageError(f"coverage config is missing required key {key!r}")
    mcmc_raw = raw.get("mcmc", {})
    if not isinstance(mcmc_raw, dict):
        raise UsageError("coverage config key 'mcmc' must be a mapping")
    try:
        mcmc = McmcConfig(**mcmc_raw)
    except TypeError as exc:
        raise UsageError(f"bad mcmc settings: {exc}") from exc
    config = CoverageConfig(
        kind=str(raw["kind"]),
        p_values=tuple(int(p) for p in raw["p_values"]),
        alpha_values=tuple(float(a) for a in raw["alpha_values"]),
        sizes=tuple(int(n) for n in raw["sizes"]),
        replicates=int(
            opts.replicates if opts.replicates is not None else raw["replicates"]
        ),
        mcmc=mcmc,
        master_seed=int(
            opts.master_seed
            if opts.master_seed is not None
            else raw.get("master_seed", 0)
        ),
        true_phi1=float(raw.get("true_phi1", -0.5)),
        true_beta=tuple(float(b) for b in raw.get("true_beta", (-2.5, 3.0))),
        true_sigma=float(raw.get("true_sigma", 1.0)),
        ar_presample=int(raw.get("ar_presample", 50)),
        n_jobs=int(opts.threads if opts.threads is not None else raw.get("n_jobs", 1)),
    )
    try:
        config.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cells = run_coverage_study(config)
    write_table(
        opts.out,
        ["p", "alpha", "n", "coverage", "rel_rmse"],
        [(c.p, c.alpha, c.n, c.coverage, c.rel_rmse) for c in cells],
    )
    meta_path = str(opts.out)
    meta_path = meta_path[:-4] + ".meta" if meta_path.endswith(".csv") else meta_path + ".meta"
    write_meta(
        meta_path,
        {
            "subcommand": "coverage-study",
            "kind": config.kind,
            "replicates": config.replicates,
            "master_seed": config.master_seed,
            "n_iter": config.mcmc.n_iter,
            "n_burn": config.mcmc.n_burn,
            "p_max": config.mcmc.p_max,
            "cells": len(cells),
        },
    )


def _cmd_demo(opts) -> None:
    overrides = {}
    if opts.n_iter is not None or opts.n_burn is not None:
        default_iter = 20000 if opts.kind == "ar-sepd" else 30000
        overrides["mcmc"] = McmcConfig(
            n_iter=opts.n_iter if opts.n_iter is not None else default_iter,
            n_burn=opts.n_burn if opts.n_burn is not None else 5000,
            # the regression demo conditions on the known unit error scale
            fix_sigma=None if opts.kind == "ar-sepd" else 1.0,
        )
    if opts.n is not None:
        overrides["n"] = opts.n
    result = run_inference_demo(opts.kind, seed=opts.seed, **overrides)
    prefix = str(opts.out_prefix)
    write_chain_csv(prefix + "_chain.csv", result.chain)
    write_table(
        prefix + "_summary.csv",
        ["param", "mean", "sd", "median", "ci_low", "ci_high", "true_value"],
        _summary_rows(result.summary, result.true_values),
    )
    meta = {
        "subcommand": "demo",
        "kind": opts.kind,
        "seed": int(opts.seed),
        "n_obs": result.y.size,
        "n_iter": result.chain.config.n_iter,
        "n_burn": result.chain.config.n_burn,
        "p_max": result.chain.config.p_max,
    }
    for name, value in result.true_values.items():
        meta[f"true_{name}"] = value
    for block, rate in result.chain.acceptance.items():
        meta[f"acceptance_{block}"] = rate
    write_meta(prefix + ".meta", meta)


_HANDLERS = {
    "kl-table": _cmd_kl_table,
    "prior-table": _cmd_prior_table,
    "sample": _cmd_sample,
    "fit": _cmd_fit,
    "forecast": _cmd_forecast,
    "coverage-study": _cmd_coverage_study,
    "demo": _cmd_demo,
}


def main(argv=None) -> int:
    if not logging.getLogger().handlers:
        logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        command = parse_args(argv if argv is not None else sys.argv[1:])
        _HANDLERS[command.subcommand](command.options)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
