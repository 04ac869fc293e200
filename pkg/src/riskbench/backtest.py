"""Rolling-window forecast evaluation, hit sequences, and the Basel
traffic-light classification.

The engine walks a return history one day at a time, refits the configured
estimator on the trailing window, and records the next-day VaR forecast; the
realized returns are never visible to the forecast for their own day. The
exceedance count is then scored against the binomial null and classified
Green / Amber / Red at the 95% and 99.99% cumulative-probability thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conjugate import RiskEstimate, RiskMeasure
from .errors import DimensionError, ParameterError, ValidationError
from .returns import PortfolioWeights, ReturnWindow

__all__ = [
    "Zone",
    "HitSequence",
    "BacktestReport",
    "RollingConfig",
    "rolling_forecasts",
    "hit_sequence",
    "binomial_cdf",
    "classify_zone",
    "traffic_light",
    "realized_portfolio_returns",
    "estimate_series",
    "run_backtest",
]

GREEN_THRESHOLD = 0.95
RED_THRESHOLD = 0.9999


class Zone(str, Enum):
    GREEN = "green"
    AMBER = "amber"
    RED = "red"


@dataclass(frozen=True)
class HitSequence:
    """Bit vector of daily VaR exceedances at a fixed level alpha."""

    hits: tuple[int, ...]
    alpha: float

    def __post_init__(self):
        if any(h not in (0, 1) for h in self.hits):
            raise ValidationError("hit sequence entries must be 0 or 1")

    @property
    def days(self) -> int:
        return len(self.hits)

    @property
    def exceedances(self) -> int:
        return sum(self.hits)


@dataclass(frozen=True)
class BacktestReport:
    """Exceedance count, its cumulative binomial probability, and the zone."""

    exceedances: int
    days: int
    alpha: float
    cum_prob: float
    zone: Zone
    method: str = ""


@dataclass(frozen=True)
class RollingConfig:
    """Rolling evaluation settings: window length, VaR levels, and measure."""

    window: int = 250
    levels: tuple[float, ...] = (0.975, 0.99)
    measure: RiskMeasure = RiskMeasure.VAR

    def __post_init__(self):
        if int(self.window) < 2:
            raise ParameterError(f"window must be at least 2 days, got {self.window!r}")
        levels = tuple(float(a) for a in self.levels)
        if not levels:
            raise ParameterError("at least one VaR level is required")
        for a in levels:
            if not 0.5 < a < 1.0:
                raise ParameterError(f"VaR level {a!r} outside (0.5, 1)")
        object.__setattr__(self, "window", int(self.window))
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "measure", RiskMeasure(self.measure))


def rolling_forecasts(returns, weights: PortfolioWeights, cfg: RollingConfig, method):
    """Day-ahead forecasts over a return history.

    For each day t in [window+1, T0] (1-based), the estimator is refit on rows
    [t-window, t-1] and the day-t estimates at every configured level are
    emitted as ``(t, RiskEstimate)`` pairs, day-major in level order.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.ndim == 1:
        returns = returns[:, None]
    t0 = returns.shape[0]
    if t0 <= cfg.window:
        raise ValidationError(
            f"history length {t0} must exceed the rolling window {cfg.window}"
        )
    method.validate(cfg.window, returns.shape[1])
    out: list[tuple[int, RiskEstimate]] = []
    asset_ids = tuple(f"a{i + 1}" for i in range(returns.shape[1]))
    for t in range(cfg.window, t0):
        window = ReturnWindow(data=returns[t - cfg.window:t], asset_ids=asset_ids)
        for est in method.day_estimates(window, weights, cfg.levels, (cfg.measure,)):
            out.append((t + 1, est))
    return out


def hit_sequence(forecasts, realized_portfolio_returns) -> HitSequence:
    """Exceedance indicators: 1 when the realized return falls strictly below
    the negated forecast, 0 otherwise (ties count as no exceedance)."""
    realized = np.asarray(realized_portfolio_returns, dtype=float).reshape(-1)
    estimates = [est for _, est in forecasts]
    if len(estimates) != realized.size:
        raise DimensionError(
            f"{len(estimates)} forecasts but {realized.size} realized returns"
        )
    if not estimates:
        raise DimensionError("empty forecast sequence")
    alphas = {est.alpha for est in estimates}
    if len(alphas) != 1:
        raise ValidationError("hit sequence requires forecasts at a single level")
    hits = tuple(int(r < -est.value) for est, r in zip(estimates, realized))
    return HitSequence(hits=hits, alpha=estimates[0].alpha)


def binomial_cdf(c: int, days: int, p: float) -> float:
    """P(X <= c) for X ~ Binomial(days, p), summed stably in log space."""
    if not 0 <= c <= days:
        raise ParameterError(f"count {c} outside [0, {days}]")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"success probability {p!r} outside (0, 1)")
    if c == days:
        return 1.0
    log_terms = []
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg_n = math.lgamma(days + 1)
    for j in range(c + 1):
        log_terms.append(
            lg_n - math.lgamma(j + 1) - math.lgamma(days - j + 1) + j * log_p + (days - j) * log_q
        )
    peak = max(log_terms)
    total = sum(math.exp(t - peak) for t in log_terms)
    return min(1.0, math.exp(peak) * total)


def classify_zone(cum_prob: float) -> Zone:
    if cum_prob < GREEN_THRESHOLD:
        return Zone.GREEN
    if cum_prob > RED_THRESHOLD:
        return Zone.RED
    return Zone.AMBER


def traffic_light(c: int, days: int, alpha: float, method: str = "") -> BacktestReport:
    """Basel traffic-light classification of ``c`` exceedances in ``days`` days.

    The cumulative probability of observing at most ``c`` exceedances under
    the binomial null with success probability ``1 - alpha`` is mapped to
    Green (< 95%), Amber (between 95% and 99.99%, boundaries inclusive), or
    Red (> 99.99%).
    """
    alpha = float(alpha)
    if not 0.5 < alpha < 1.0:
        raise ParameterError(f"VaR level {alpha!r} outside (0.5, 1)")
    cum_prob = binomial_cdf(c, days, 1.0 - alpha)
    return BacktestReport(
        exceedances=int(c),
        days=int(days),
        alpha=alpha,
        cum_prob=cum_prob,
        zone=classify_zone(cum_prob),
        method=method,
    )


def realized_portfolio_returns(returns, weights: PortfolioWeights, start_day: int) -> np.ndarray:
    """Realized portfolio returns for days start_day..T0 (1-based, inclusive)."""
    returns = np.asarray(returns, dtype=float)
    if returns.ndim == 1:
        returns = returns[:, None]
    return returns[start_day - 1:] @ weights.w


def estimate_series(returns, weights: PortfolioWeights, cfg: RollingConfig, methods):
    """Daily VaR and CVaR series for plotting or export.

    For each evaluation day (window+1 .. T0, 1-based) every method is fit
    once and priced at each configured level for both measures. Returns a
    list of ``(day, realized_return, estimates)`` with ``estimates`` a dict
    keyed by ``(method_label, alpha, measure)``.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.ndim == 1:
        returns = returns[:, None]
    t0, k = returns.shape
    if t0 <= cfg.window:
        raise ValidationError(
            f"history length {t0} must exceed the rolling window {cfg.window}"
        )
    for method in methods:
        method.validate(cfg.window, k)
    measures = (RiskMeasure.VAR, RiskMeasure.CVAR)
    asset_ids = tuple(f"a{i + 1}" for i in range(k))
    out = []
    for t in range(cfg.window, t0):
        window = ReturnWindow(data=returns[t - cfg.window:t], asset_ids=asset_ids)
        estimates: dict[tuple[str, float, RiskMeasure], float] = {}
        for method in methods:
            for est in method.day_estimates(window, weights, cfg.levels, measures):
                estimates[(est.method, est.alpha, est.measure)] = est.value
        realized = float(returns[t] @ weights.w)
        out.append((t + 1, realized, estimates))
    return out


def run_backtest(returns, weights: PortfolioWeights, cfg: RollingConfig, methods):
    """Rolling backtest of several estimators over one return history.

    Returns ``(reports, failures)``: one report per (method, level) for every
    method that ran, and a list of ``(label, error)`` pairs for methods whose
    preconditions failed. A failing method never aborts the others.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.ndim == 1:
        returns = returns[:, None]
    realized = realized_portfolio_returns(returns, weights, cfg.window + 1)
    reports: list[BacktestReport] = []
    failures: list[tuple[str, Exception]] = []
    for method in methods:
        try:
            forecasts = rolling_forecasts(returns, weights, cfg, method)
        except (ValidationError, ArithmeticError) as exc:
            failures.append((method.label, exc))
            continue
        for alpha in cfg.levels:
            per_level = [(day, est) for day, est in forecasts if est.alpha == alpha]
            hits = hit_sequence(per_level, realized)
            reports.append(
                traffic_light(hits.exceedances, hits.days, alpha, method=method.label)
            )
    return reports, failures
