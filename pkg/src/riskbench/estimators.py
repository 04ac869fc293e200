"""Estimator objects consumed by the rolling backtest engine and the CLI.

Each estimator is an immutable config with a stable ``label`` and a
``day_estimates`` method that fits once on a window and prices every
requested (level, measure) pair from that single fit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .conjugate import RiskEstimate, RiskMeasure, posterior_predictive, risk_estimate
from .errors import ParameterError
from .priors import VsConfig, eb_hyperparams, sample_method_estimate, vs_hyperparams
from .returns import PortfolioWeights, ReturnWindow

__all__ = [
    "VolatilitySensitive",
    "EmpiricalBayes",
    "SampleNormal",
    "parse_method",
    "parse_methods",
]


def _fmt(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class VolatilitySensitive:
    """Volatility-sensitive conjugate estimator with config (n_r, h, l)."""

    n_r: int = 4
    h: float = 2.0
    l: float = 0.0
    r0: float | None = None

    @property
    def label(self) -> str:
        base = f"vs({self.n_r},{_fmt(self.h)},{_fmt(self.l)}"
        return base + (f";r0={_fmt(self.r0)})" if self.r0 is not None else ")")

    def validate(self, window: int, k: int) -> None:
        cfg = VsConfig(n_r=self.n_r, h=self.h, l=self.l, r0=self.r0)
        if cfg.n_r > window:
            raise ParameterError(f"{self.label}: short window {cfg.n_r} exceeds window {window}")
        if window < k + 2:
            raise ParameterError(f"{self.label}: window {window} must be at least k+2 = {k + 2}")

    def day_estimates(self, window: ReturnWindow, weights: PortfolioWeights, alphas, measures):
        cfg = VsConfig(n_r=self.n_r, h=self.h, l=self.l, r0=self.r0)
        hp, _ = vs_hyperparams(window, weights, cfg)
        pred = posterior_predictive(window, weights, hp)
        return [
            risk_estimate(pred, alpha, measure, method=self.label)
            for alpha in alphas
            for measure in measures
        ]


@dataclass(frozen=True)
class EmpiricalBayes:
    """Empirical-Bayes conjugate estimator; d0 and r0 default to the window length."""

    d0: float | None = None
    r0: float | None = None

    @property
    def label(self) -> str:
        if self.d0 is None and self.r0 is None:
            return "eb"
        d0 = "n" if self.d0 is None else _fmt(self.d0)
        r0 = "n" if self.r0 is None else _fmt(self.r0)
        return f"eb({d0},{r0})"

    def validate(self, window: int, k: int) -> None:
        d0 = window if self.d0 is None else self.d0
        if d0 < k + 2:
            raise ParameterError(f"{self.label}: d0 = {d0} must be at least k+2 = {k + 2}")
        if self.r0 is not None and not self.r0 > 0:
            raise ParameterError(f"{self.label}: r0 must be positive")

    def day_estimates(self, window: ReturnWindow, weights: PortfolioWeights, alphas, measures):
        hp = eb_hyperparams(window, d0=self.d0, r0=self.r0)
        pred = posterior_predictive(window, weights, hp)
        return [
            risk_estimate(pred, alpha, measure, method=self.label)
            for alpha in alphas
            for measure in measures
        ]


@dataclass(frozen=True)
class SampleNormal:
    """Plug-in baseline from the sample mean/covariance and normal quantiles."""

    @property
    def label(self) -> str:
        return "sample"

    def validate(self, window: int, k: int) -> None:
        if window < 2:
            raise ParameterError("sample: window must be at least 2")

    def day_estimates(self, window: ReturnWindow, weights: PortfolioWeights, alphas, measures):
        return [
            sample_method_estimate(window, weights, alpha, measure, method=self.label)
            for alpha in alphas
            for measure in measures
        ]


_METHOD_RE = re.compile(r"^\s*([a-zA-Z_]+)\s*(?:\(([^)]*)\))?\s*$")


def parse_method(spec: str, nr: int = 4, h: float = 2.0, l: float = 0.0, r0: float | None = None):
    """Parse one method spec string like ``vs(4,2,0)``, ``eb`` or ``sample``.

    Bare ``vs`` picks up the supplied defaults (the CLI's --nr/--h/--l/--r0
    flags); ``vs(n_r,h,l)`` and ``vs(n_r,h,l,r0)`` override them. ``eb``
    accepts ``eb(d0,r0)`` where either value may be ``n`` for the window
    length.
    """
    m = _METHOD_RE.match(spec)
    if not m:
        raise ParameterError(f"cannot parse method spec {spec!r}")
    name = m.group(1).lower()
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    args = [a for a in args if a]

    def num(text: str, what: str) -> float:
        try:
            return float(text)
        except ValueError:
            raise ParameterError(f"invalid {what} {text!r} in method spec {spec!r}") from None

    if name == "vs":
        if args and len(args) not in (3, 4):
            raise ParameterError(f"vs takes 3 or 4 arguments (n_r,h,l[,r0]), got {spec!r}")
        if args:
            nr = int(num(args[0], "n_r"))
            h = num(args[1], "h")
            l = num(args[2], "l")
            if len(args) == 4:
                r0 = num(args[3], "r0")
        return VolatilitySensitive(n_r=nr, h=h, l=l, r0=r0)
    if name == "eb":
        if len(args) > 2:
            raise ParameterError(f"eb takes at most 2 arguments (d0,r0), got {spec!r}")
        d0v = None if (len(args) < 1 or args[0] == "n") else num(args[0], "d0")
        r0v = None if (len(args) < 2 or args[1] == "n") else num(args[1], "r0")
        return EmpiricalBayes(d0=d0v, r0=r0v)
    if name == "sample":
        if args:
            raise ParameterError(f"sample takes no arguments, got {spec!r}")
        return SampleNormal()
    raise ParameterError(f"unknown method {name!r}; expected vs, eb, or sample")


def parse_methods(specs, nr: int = 4, h: float = 2.0, l: float = 0.0, r0: float | None = None):
    methods = [parse_method(s, nr=nr, h=h, l=l, r0=r0) for s in specs]
    labels = [m.label for m in methods]
    if len(set(labels)) != len(labels):
        raise ParameterError(f"duplicate method labels in {labels}")
    return methods
