"""Monte Carlo summaries with distribution distances and scaling-law fits."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

CSV_COLUMNS = ("statistic", "estimate", "se", "n", "seed", "flags")


@dataclass
class EstimateReport:
    statistic: str
    estimate: float
    se: float
    n: int
    seed: int | None = None
    replicas: int = 1
    flags: tuple = ()
    reference: float | None = None

    def z(self, value: float | None = None) -> float:
        """Distance to ``value`` (default: the reference) in standard errors."""
        target = self.reference if value is None else value
        diff = self.estimate - target
        if abs(diff) <= 1e-12 * max(1.0, abs(target)):
            return 0.0  # agreement to rounding; deterministic statistics have se ~ 1e-17
        if self.se == 0:
            return math.copysign(math.inf, diff)
        return diff / self.se

    def within(self, value: float | None = None, k: float = 4.0) -> bool:
        return abs(self.z(value)) <= k

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d

    def csv_row(self) -> dict:
        return {
            "statistic": self.statistic,
            "estimate": repr(float(self.estimate)),
            "se": repr(float(self.se)),
            "n": self.n,
            "seed": "" if self.seed is None else self.seed,
            "flags": ";".join(self.flags),
        }


def mean_report(name, values, seed=None, flags=(), reference=None, replicas=1) -> EstimateReport:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise ValueError("need at least 2 samples")
    mean = float(np.sum(values) / n)  # numpy sums pairwise
    var = float(np.sum((values - mean) ** 2) / (n - 1))
    return EstimateReport(name, mean, math.sqrt(var / n), n, seed, replicas, tuple(flags), reference)


def mc_mean(sampler, n: int, rng, name: str = "mean", seed=None, reference=None) -> EstimateReport:
    """Mean of ``sampler(rng, n)``, which must return n values."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    return mean_report(name, sampler(rng, n), seed=seed, reference=reference)


def mc_tail(sampler, thresholds, n: int, rng, name: str = "tail", seed=None):
    """Estimates of P[X >= r] for every threshold, from one shared sample."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    x = np.asarray(sampler(rng, n))
    return [mean_report(f"{name}[>={r}]", (x >= r).astype(float), seed=seed) for r in thresholds]


def proportion_report(name, hits: int, n: int, seed=None, reference=None, flags=()) -> EstimateReport:
    p = hits / n
    return EstimateReport(name, p, math.sqrt(p * (1 - p) / n), n, seed, 1, tuple(flags), reference)


def two_sample_z(a: EstimateReport, b: EstimateReport) -> float:
    se = math.hypot(a.se, b.se)
    diff = a.estimate - b.estimate
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se


def ks_distance(samples, cdf) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 100:
        raise ValueError("need at least 100 samples")
    return float(stats.kstest(samples, cdf).statistic)


@dataclass
class Fit:
    model: str
    slope: float
    intercept: float
    r2: float
    residual: float  # sum of squared residuals in the fitted space
    residuals: list = field(default_factory=list)


def linear_fit(x, y, model: str = "linear") -> Fit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("degenerate abscissae")
    res = stats.linregress(x, y)
    resid = y - (res.intercept + res.slope * x)
    return Fit(model, float(res.slope), float(res.intercept), float(res.rvalue**2),
               float(np.sum(resid**2)), resid.tolist())


def scaling_fit(xs, ys, model: str) -> Fit:
    """Least squares in the transformed space.

    * ``log-linear``: log y = a + c x
    * ``power``: log y = a + c log x
    * ``power-log``: log y - log log x = a + c log x
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 4:
        raise ValueError("need at least 4 points")
    if np.any(ys <= 0):
        raise ValueError("scaling fits need positive ordinates")
    if model == "log-linear":
        return linear_fit(xs, np.log(ys), model)
    if model == "power":
        return linear_fit(np.log(xs), np.log(ys), model)
    if model in ("power-log", "power·log"):
        if np.any(xs <= 1):
            raise ValueError("power-log model needs x > 1")
        return linear_fit(np.log(xs), np.log(ys) - np.log(np.log(xs)), "power-log")
    raise ValueError(f"unknown model {model!r}")


def stretched_tail_models(ks, probs) -> dict:
    """Fit -log p against k, sqrt(k) and log(k); returns fits keyed by model."""
    ks = np.asarray(ks, dtype=float)
    y = -np.log(np.asarray(probs, dtype=float))
    return {
        "linear": linear_fit(ks, y, "linear"),
        "sqrt": linear_fit(np.sqrt(ks), y, "sqrt"),
        "log": linear_fit(np.log(ks), y, "log"),
    }


def reports_to_csv(reports, config: dict | None = None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def reports_to_json(reports, **extra) -> str:
    payload = dict(extra)
    payload["reports"] = [r.to_dict() for r in reports]
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)
