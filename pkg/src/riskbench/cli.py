"""Command-line interface: simulate scenario paths, run rolling backtests,
and export daily risk-estimate series.

Configuration comes from an INI-style file (``--config``) with flag
overrides; flags always win. Every command is deterministic given its
configuration and seed, including under ``--jobs`` greater than one: worker
results are collected and written in a canonical sort order. Exit codes:
0 success, 2 validation error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as dt
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .backtest import RollingConfig, estimate_series, run_backtest
from .conjugate import RiskMeasure
from .dataio import (
    ReturnHistory,
    fmt_number,
    ingest_returns,
    load_weights,
    weekday_dates,
    write_returns_csv,
)
from .errors import DataError, NumericalError, ValidationError
from .estimators import parse_methods
from .returns import PortfolioWeights
from .simulate import (
    DccParams,
    MvnParams,
    PmvnParams,
    SCENARIOS,
    SimRequest,
    replication_seed,
    simulate,
    simulate_pmvn_detail,
)

SEED_ENV_VAR = "RISKBENCH_SEED"
DEFAULT_SEED = 0
DEFAULT_T0 = 500
DEFAULT_K = 5
DEFAULT_WINDOW = 250
DEFAULT_LEVELS = "0.975,0.99"
DEFAULT_METHODS = ["vs(4,2,0)", "vs(4,0,0)", "eb", "sample"]
DEFAULT_START_DATE = "2020-01-01"

REPORT_HEADER = "replication,portfolio,method,alpha,exceedances,cum_prob,zone,runtime_ms"


# ---------------------------------------------------------------------------
# configuration handling


def _load_config(path: str | None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if path is not None:
        if not Path(path).is_file():
            raise ValidationError(f"config file not found: {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ValidationError(f"cannot parse config file {path}: {exc}") from None
    return parser


def _cfg_get(cfg: configparser.ConfigParser, section: str, key: str, flag_value, default):
    """Resolution order: explicit flag, config file value, default."""
    if flag_value is not None:
        return flag_value
    if cfg.has_option(section, key):
        return cfg.get(section, key)
    return default


def _resolve_seed(cfg: configparser.ConfigParser, section: str, flag_value) -> int:
    raw = _cfg_get(cfg, section, "seed", flag_value, None)
    if raw is None:
        raw = os.environ.get(SEED_ENV_VAR, DEFAULT_SEED)
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"seed must be an integer, got {raw!r}") from None


def _float_list(raw, what: str) -> tuple[float, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(float(v) for v in raw)
    try:
        return tuple(float(p) for p in str(raw).replace(",", " ").split())
    except ValueError:
        raise ValidationError(f"cannot parse {what} from {raw!r}") from None


def _vector(raw, k: int, what: str) -> np.ndarray:
    values = _float_list(raw, what)
    if len(values) == 1:
        return np.full(k, values[0])
    if len(values) != k:
        raise ValidationError(f"{what} needs 1 or {k} values, got {len(values)}")
    return np.array(values)


def _correlation_matrix(rho: float, k: int) -> np.ndarray:
    if not -1.0 / max(k - 1, 1) < rho < 1.0:
        raise ValidationError(f"constant correlation {rho} is not positive definite for k={k}")
    mat = np.full((k, k), rho)
    np.fill_diagonal(mat, 1.0)
    return mat


def _scenario_params(cfg: configparser.ConfigParser, scenario: str, k: int):
    """Build generator params for a scenario from its config section.

    Shipped defaults are synthetic illustrative values (round numbers), not
    fitted to any market data: 5 bp daily drift, 1% daily vol, constant 0.3
    correlation, and mildly persistent GARCH dynamics for the dcc scenario.
    """
    section = f"scenario.{scenario}"

    def get(key, default):
        return cfg.get(section, key) if cfg.has_option(section, key) else default

    mean = _vector(get("mean", "0.0005"), k, "mean")
    rho = float(get("correlation", "0.3"))
    corr = _correlation_matrix(rho, k)
    if scenario in ("mvn", "pmvn"):
        vol = _vector(get("vol", "0.01"), k, "vol")
        if (vol <= 0).any():
            raise ValidationError("vol entries must be positive")
        sigma = corr * np.outer(vol, vol)
        base = MvnParams(mu=mean, sigma=sigma)
        if scenario == "mvn":
            return base
        return PmvnParams(
            base=base,
            period_lengths=tuple(int(v) for v in _float_list(get("period_lengths", "3,4,5"), "period_lengths")),
            regime_probs=_float_list(get("regime_probs", "0.05,0.9,0.05"), "regime_probs"),
            low_scale_range=_float_list(get("low_scale", "0.5,0.7"), "low_scale"),
            high_scale_range=_float_list(get("high_scale", "1.5,3.0"), "high_scale"),
        )
    return DccParams(
        mu=mean,
        omega=_vector(get("omega", "5e-6"), k, "omega"),
        a=_vector(get("arch", "0.05"), k, "arch"),
        b=_vector(get("garch", "0.9"), k, "garch"),
        qbar=corr,
        theta1=float(get("theta1", "0.05")),
        theta2=float(get("theta2", "0.9")),
    )


def _params_to_dict(params) -> dict:
    if isinstance(params, MvnParams):
        return {"mu": params.mu.tolist(), "sigma": params.sigma.tolist()}
    if isinstance(params, PmvnParams):
        return {
            "base": _params_to_dict(params.base),
            "period_lengths": list(params.period_lengths),
            "regime_probs": list(params.regime_probs),
            "low_scale_range": list(params.low_scale_range),
            "high_scale_range": list(params.high_scale_range),
        }
    if isinstance(params, DccParams):
        return {
            "mu": params.mu.tolist(),
            "omega": params.omega.tolist(),
            "a": params.a.tolist(),
            "b": params.b.tolist(),
            "qbar": params.qbar.tolist(),
            "theta1": params.theta1,
            "theta2": params.theta2,
        }
    raise ValidationError(f"unknown params object {type(params).__name__}")


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    scenario = str(_cfg_get(cfg, "simulate", "scenario", args.scenario, "mvn")).lower()
    if scenario not in SCENARIOS:
        raise ValidationError(f"unknown scenario {scenario!r}; expected one of {list(SCENARIOS)}")
    k = int(_cfg_get(cfg, "simulate", "k", args.k, DEFAULT_K))
    t0 = int(_cfg_get(cfg, "simulate", "t", args.t, DEFAULT_T0))
    seed = _resolve_seed(cfg, "simulate", args.seed)
    start_raw = str(_cfg_get(cfg, "simulate", "start_date", args.start_date, DEFAULT_START_DATE))
    try:
        start = dt.date.fromisoformat(start_raw)
    except ValueError:
        raise ValidationError(f"start date must be ISO-8601, got {start_raw!r}") from None
    out = _cfg_get(cfg, "simulate", "out", args.out, None)
    if out is None:
        raise ValidationError("simulate needs an output path (--out)")

    params = _scenario_params(cfg, scenario, k)
    req = SimRequest(scenario=scenario, t0=t0, k=k, seed=seed, params=params)
    meta = {
        "command": "simulate",
        "scenario": scenario,
        "k": k,
        "t0": t0,
        "seed": seed,
        "start_date": start.isoformat(),
        "params": _params_to_dict(params),
        "version": __version__,
    }
    if scenario == "pmvn":
        data, periods = simulate_pmvn_detail(req)
        meta["periods"] = [
            {"start": p.start, "length": p.length, "regime": p.regime, "scales": list(p.scales)}
            for p in periods
        ]
    else:
        data = simulate(req)

    out_path = Path(out)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    asset_ids = tuple(f"A{i + 1}" for i in range(k))
    write_returns_csv(out_path, data, asset_ids, weekday_dates(start, t0))
    with open(f"{out_path}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {t0} x {k} {scenario} returns to {out_path} (seed {seed})")
    return 0


# ---------------------------------------------------------------------------
# backtest


@dataclass(frozen=True)
class _BacktestJob:
    """Everything one worker needs to backtest a single replication."""

    replication: int
    returns: np.ndarray | None
    request: SimRequest | None
    weights: PortfolioWeights
    rolling: RollingConfig
    methods: tuple
    timing: bool


def _run_replication(job: _BacktestJob):
    returns = job.returns if job.returns is not None else simulate(job.request)
    rows = []
    failures = []
    for method in job.methods:
        t_start = time.perf_counter()
        reports, fails = run_backtest(returns, job.weights, job.rolling, [method])
        elapsed_ms = int(round((time.perf_counter() - t_start) * 1000)) if job.timing else 0
        failures.extend((job.replication, label, str(exc)) for label, exc in fails)
        for report in reports:
            rows.append(
                {
                    "replication": job.replication,
                    "portfolio": 0,
                    "method": report.method,
                    "alpha": report.alpha,
                    "exceedances": report.exceedances,
                    "cum_prob": report.cum_prob,
                    "zone": report.zone.value,
                    "runtime_ms": elapsed_ms,
                }
            )
    return rows, failures


def _resolve_backtest_inputs(cfg, args, command: str):
    """Shared backtest/estimate input resolution; validates before computing."""
    section = command
    input_path = _cfg_get(cfg, section, "input", args.input, None)
    scenario = _cfg_get(cfg, section, "scenario", args.scenario, None)
    if input_path is not None and scenario is not None:
        raise ValidationError("give either an input CSV or a scenario, not both")
    if input_path is None and scenario is None:
        raise ValidationError("either an input CSV (--input) or a scenario (--scenario) is required")

    window = int(_cfg_get(cfg, section, "window", args.window, DEFAULT_WINDOW))
    levels = _float_list(_cfg_get(cfg, section, "levels", args.alpha, DEFAULT_LEVELS), "alpha levels")
    rolling = RollingConfig(window=window, levels=levels)

    method_specs = args.method or None
    if method_specs is None and cfg.has_option(section, "methods"):
        method_specs = cfg.get(section, "methods").split()
    if method_specs is None:
        method_specs = DEFAULT_METHODS
    nr = int(_cfg_get(cfg, section, "nr", args.nr, 4))
    h = float(_cfg_get(cfg, section, "h", args.h, 2.0))
    l = float(_cfg_get(cfg, section, "l", args.l, 0.0))
    r0_raw = _cfg_get(cfg, section, "r0", args.r0, None)
    r0 = None if r0_raw is None else float(r0_raw)
    methods = tuple(parse_methods(method_specs, nr=nr, h=h, l=l, r0=r0))

    seed = _resolve_seed(cfg, section, args.seed)
    mode = str(_cfg_get(cfg, section, "mode", args.mode, "returns"))
    weights_spec = str(_cfg_get(cfg, section, "weights", args.weights, "equal"))

    history: ReturnHistory | None = None
    if input_path is not None:
        history = ingest_returns(input_path, mode=mode)
        k = len(history.asset_ids)
        t0 = history.data.shape[0]
        asset_ids = history.asset_ids
        params = None
    else:
        scenario = str(scenario).lower()
        if scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {scenario!r}; expected one of {list(SCENARIOS)}")
        k = int(_cfg_get(cfg, section, "k", args.k, DEFAULT_K))
        t0 = int(_cfg_get(cfg, section, "t", args.t, DEFAULT_T0))
        asset_ids = tuple(f"A{i + 1}" for i in range(k))
        params = _scenario_params(cfg, scenario, k)

    if t0 <= window:
        raise ValidationError(f"history length {t0} must exceed the rolling window {window}")
    for method in methods:
        method.validate(window, k)
    weights = load_weights(weights_spec, asset_ids)

    return {
        "history": history,
        "scenario": scenario if input_path is None else None,
        "params": params,
        "k": k,
        "t0": t0,
        "seed": seed,
        "rolling": rolling,
        "methods": methods,
        "weights": weights,
        "asset_ids": asset_ids,
    }


def cmd_backtest(args) -> int:
    cfg = _load_config(args.config)
    inputs = _resolve_backtest_inputs(cfg, args, "backtest")
    out = _cfg_get(cfg, "backtest", "out", args.out, None)
    if out is None:
        raise ValidationError("backtest needs an output directory (--out)")
    jobs = max(1, int(_cfg_get(cfg, "backtest", "jobs", args.jobs, 1)))
    replications = int(_cfg_get(cfg, "backtest", "replications", args.replications, 1))
    if replications < 1:
        raise ValidationError(f"replications must be >= 1, got {replications}")
    timing = bool(args.timing)

    if inputs["history"] is not None:
        if replications != 1:
            raise ValidationError("replications > 1 requires a scenario input")
        job_list = [
            _BacktestJob(
                replication=0,
                returns=inputs["history"].data,
                request=None,
                weights=inputs["weights"],
                rolling=inputs["rolling"],
                methods=inputs["methods"],
                timing=timing,
            )
        ]
    else:
        job_list = [
            _BacktestJob(
                replication=rep,
                returns=None,
                request=SimRequest(
                    scenario=inputs["scenario"],
                    t0=inputs["t0"],
                    k=inputs["k"],
                    seed=replication_seed(inputs["seed"], rep),
                    params=inputs["params"],
                ),
                weights=inputs["weights"],
                rolling=inputs["rolling"],
                methods=inputs["methods"],
                timing=timing,
            )
            for rep in range(replications)
        ]

    if jobs > 1 and len(job_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_replication, job_list))
    else:
        results = [_run_replication(job) for job in job_list]

    rows = [row for reps_rows, _ in results for row in reps_rows]
    failures = [f for _, reps_fails in results for f in reps_fails]
    for rep, label, message in failures:
        print(f"warning: replication {rep}, method {label} skipped: {message}", file=sys.stderr)

    rows.sort(key=lambda r: (r["replication"], r["portfolio"], r["method"], r["alpha"]))

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.csv"
    with open(report_path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(REPORT_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(
                [
                    row["replication"],
                    row["portfolio"],
                    row["method"],
                    f"{row['alpha']:g}",
                    row["exceedances"],
                    fmt_number(row["cum_prob"]),
                    row["zone"],
                    row["runtime_ms"],
                ]
            )

    aggregate: dict[str, dict[str, dict[str, float]]] = {}
    for method in sorted({row["method"] for row in rows}):
        aggregate[method] = {}
        for alpha in inputs["rolling"].levels:
            matching = [r for r in rows if r["method"] == method and r["alpha"] == alpha]
            if not matching:
                continue
            total = len(matching)
            counts = {"green": 0, "amber": 0, "red": 0}
            for r in matching:
                counts[r["zone"]] += 1
            aggregate[method][f"{alpha:g}"] = {
                zone: float(fmt_number(count / total)) for zone, count in counts.items()
            }
    aggregate_path = out_dir / "aggregate.json"
    with open(aggregate_path, "w", encoding="utf-8") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"wrote {len(rows)} report rows to {report_path} and zone proportions to {aggregate_path}")
    return 0


# ---------------------------------------------------------------------------
# estimate


def cmd_estimate(args) -> int:
    cfg = _load_config(args.config)
    inputs = _resolve_backtest_inputs(cfg, args, "estimate")
    out = _cfg_get(cfg, "estimate", "out", args.out, None)
    if out is None:
        raise ValidationError("estimate needs an output path (--out)")

    if inputs["history"] is not None:
        returns = inputs["history"].data
        dates = inputs["history"].dates
    else:
        request = SimRequest(
            scenario=inputs["scenario"],
            t0=inputs["t0"],
            k=inputs["k"],
            seed=replication_seed(inputs["seed"], 0),
            params=inputs["params"],
        )
        returns = simulate(request)
        dates = weekday_dates(dt.date.fromisoformat(DEFAULT_START_DATE), inputs["t0"])

    series = estimate_series(returns, inputs["weights"], inputs["rolling"], inputs["methods"])

    columns = []
    for method in inputs["methods"]:
        for alpha in inputs["rolling"].levels:
            columns.append((method.label, alpha, RiskMeasure.VAR))
            columns.append((method.label, alpha, RiskMeasure.CVAR))

    out_path = Path(out)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["date", "return"] + [
            f"neg_{measure.value}:{label}:{alpha:g}" for label, alpha, measure in columns
        ]
        writer.writerow(header)
        for day, realized, estimates in series:
            row = [dates[day - 1].isoformat(), fmt_number(realized)]
            for label, alpha, measure in columns:
                row.append(fmt_number(-estimates[(label, alpha, measure)]))
            writer.writerow(row)
    print(f"wrote {len(series)} daily estimate rows to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override file values")
    p.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV_VAR}, then {DEFAULT_SEED})")
    p.add_argument("--out", help="output path")


def _add_estimation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="input return/price CSV (mutually exclusive with --scenario)")
    p.add_argument("--scenario", choices=SCENARIOS, help="simulate the input instead of reading a CSV")
    p.add_argument("--k", type=int, help="number of assets (scenario input)")
    p.add_argument("--t", type=int, help="path length in days (scenario input)")
    p.add_argument("--window", type=int, help=f"rolling window length (default {DEFAULT_WINDOW})")
    p.add_argument("--alpha", help=f"comma-separated VaR levels (default {DEFAULT_LEVELS})")
    p.add_argument(
        "--method",
        action="append",
        help="estimator spec: vs(n_r,h,l[,r0]), eb[(d0,r0)], or sample; repeatable",
    )
    p.add_argument("--nr", type=int, help="short window for bare 'vs' (default 4)")
    p.add_argument("--h", type=float, help="high-volatility exponent for bare 'vs' (default 2)")
    p.add_argument("--l", type=float, help="low-volatility exponent for bare 'vs' (default 0)")
    p.add_argument("--r0", type=float, help="prior mean precision override (default: window length)")
    p.add_argument("--mode", choices=("returns", "prices"), help="input CSV interpretation")
    p.add_argument("--weights", help="'equal' or a CSV of asset,weight rows (default equal)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskbench",
        description="Portfolio VaR/CVaR estimation, scenario simulation, and Basel backtesting.",
    )
    parser.add_argument("--version", action="version", version=f"riskbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic return CSV")
    _add_common_flags(p_sim)
    p_sim.add_argument("--scenario", choices=SCENARIOS, help="generator (default mvn)")
    p_sim.add_argument("--k", type=int, help=f"number of assets (default {DEFAULT_K})")
    p_sim.add_argument("--t", type=int, help=f"path length in days (default {DEFAULT_T0})")
    p_sim.add_argument("--start-date", help=f"first output date (default {DEFAULT_START_DATE})")

    p_back = sub.add_parser("backtest", help="rolling backtest with traffic-light reports")
    _add_common_flags(p_back)
    _add_estimation_flags(p_back)
    p_back.add_argument("--replications", type=int, help="number of simulated replications (default 1)")
    p_back.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p_back.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms per row")

    p_est = sub.add_parser("estimate", help="export daily -VaR/-CVaR series")
    _add_common_flags(p_est)
    _add_estimation_flags(p_est)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"simulate": cmd_simulate, "backtest": cmd_backtest, "estimate": cmd_estimate}
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
