import json
import math

import numpy as np
import pytest
from scipy import stats

from usflab.estimators import (CSV_COLUMNS, EstimateReport, ks_distance, mc_mean, mc_tail, mean_report,
                               proportion_report, reports_to_csv, reports_to_json, scaling_fit,
                               stretched_tail_models, two_sample_z)


def test_constant_sampler(rng):
    rep = mc_mean(lambda r, n: np.full(n, 2.5), 1000, rng)
    assert rep.estimate == 2.5 and rep.se == 0


def test_bernoulli_sampler(rng):
    rep = mc_mean(lambda r, n: r.random(n) < 2 / 3, 100_000, rng, reference=2 / 3)
    assert rep.within()


def test_z_handles_zero_se():
    exact = EstimateReport("x", 1.0, 0.0, 10, reference=1.0 + 1e-15)
    assert exact.z() == 0
    assert EstimateReport("x", 1.0, 0.0, 10, reference=2.0).z() == -math.inf


def test_mc_tail(rng):
    reps = mc_tail(lambda r, n: r.integers(0, 10, n), [0, 5, 10], 20_000, rng)
    assert reps[0].estimate == 1 and reps[2].estimate == 0
    assert reps[1].within(0.5)


def test_proportion_and_two_sample():
    a = proportion_report("a", 30, 100)
    assert a.estimate == 0.3 and a.se == pytest.approx(math.sqrt(0.21 / 100))
    assert two_sample_z(a, a) == 0


def test_ks_calibration(rng):
    x = rng.normal(size=10_000)
    assert ks_distance(x, stats.norm.cdf) < 0.02
    assert ks_distance(np.zeros(1000), stats.norm.cdf) >= 0.5
    with pytest.raises(ValueError):
        ks_distance([1.0], stats.norm.cdf)


def test_power_fit_exact():
    xs = np.array([10, 100, 1000, 10_000], dtype=float)
    assert scaling_fit(xs, xs**-2.0, "power").slope == pytest.approx(-2, abs=1e-9)


def test_power_log_preferred_for_log_corrected_data():
    xs = np.geomspace(10, 1e4, 8)
    ys = xs**-2.0 * np.log(xs)
    assert scaling_fit(xs, ys, "power-log").residual < scaling_fit(xs, ys, "power").residual
    assert scaling_fit(xs, ys, "power-log").slope == pytest.approx(-2, abs=1e-9)


def test_stretched_models_pick_sqrt():
    ks = np.arange(4, 101)
    fits = stretched_tail_models(ks, np.exp(-1.0 - 0.8 * np.sqrt(ks)))
    assert min(fits, key=lambda m: fits[m].residual) == "sqrt"


def test_fit_errors():
    with pytest.raises(ValueError):
        scaling_fit([1, 2, 3, 4], [1, 0, 1, 1], "power")
    with pytest.raises(ValueError):
        scaling_fit([1, 2, 3, 4], [1, 1, 1, 1], "cubic")


def test_serialization():
    reps = [mean_report("m", [1.0, 2.0, 3.0], seed=7, flags=("unreliable",))]
    text = reports_to_csv(reps)
    header, row = text.strip().split("\n")
    assert header.split(",") == list(CSV_COLUMNS)
    assert row.startswith("m,2.0,") and row.endswith(",3,7,unreliable")
    assert json.loads(reports_to_json(reps, seed=7))["reports"][0]["flags"] == ["unreliable"]
