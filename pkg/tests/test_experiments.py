"""Monte Carlo harness: determinism, exact finite-sample oracles, rate fitting."""
import math

import numpy as np
import pytest

from riskrates import Bernoulli, Box, ParetoTail, avar_loss
from riskrates.errors import ParameterError
from riskrates.experiments import (
    ExperimentConfig,
    RateCurve,
    bias_report,
    deviation_curve,
    fit_rate,
    mean_error_curve,
    replication_errors,
    sharpness_curve,
    true_value,
)
from riskrates.oracle import sharpness_two_point
from riskrates.risk import RiskSpec

MEAN_RISK = RiskSpec(kind="avar", u=0.0)  # level zero reduces to the mean
OCE_2XPLUS = RiskSpec(kind="oce", loss=avar_loss(0.5))


def config(**kw):
    base = dict(
        dist=Bernoulli(0.3),
        risk=MEAN_RISK,
        n_grid=(64, 128),
        replications=400,
        seed=123,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_curves_are_deterministic():
    cfg = config()
    c1 = mean_error_curve(cfg)
    c2 = mean_error_curve(cfg)
    assert c1 == c2
    c3 = mean_error_curve(config(seed=124))
    assert c1 != c3


def test_replication_errors_independent_of_grid_shape():
    errs_a = replication_errors(config(n_grid=(64, 128)), 64)
    errs_b = replication_errors(config(n_grid=(64, 256, 512)), 64)
    assert np.array_equal(errs_a, errs_b)


def test_mean_error_matches_folded_normal_clt():
    # plug-in mean of Bernoulli(p): E|p_hat - p| -> sqrt(2 p (1-p) / (pi N))
    n = 4096
    cfg = config(n_grid=(n,), replications=3000)
    (n_out, mean_err, se) = mean_error_curve(cfg).points[0]
    predicted = math.sqrt(2 * 0.3 * 0.7 / (math.pi * n))
    assert n_out == n
    assert abs(mean_err - predicted) < 0.1 * predicted


def test_deviation_matches_exact_binomial_tail():
    n, eps = 64, 0.052  # off the k/n lattice, so no borderline rounding
    exact = sum(
        math.comb(n, k) * 0.3**k * 0.7 ** (n - k)
        for k in range(n + 1)
        if abs(k / n - 0.3) >= eps
    )
    cfg = config(n_grid=(n,), replications=3000, epsilons=(eps,))
    (_, _, p_hat, reps) = deviation_curve(cfg).points[0]
    se = math.sqrt(exact * (1 - exact) / reps)
    assert abs(p_hat - exact) <= 4 * se
    assert reps == 3000


def test_deviation_curve_shares_replication_streams():
    cfg = config(n_grid=(64,), replications=400, epsilons=(0.02, 0.05))
    errs = np.abs(replication_errors(cfg, 64))
    for (_, eps, p_hat, _) in deviation_curve(cfg).points:
        assert p_hat == float(np.mean(errs >= eps))


def test_bias_negative_for_convex_risk_at_small_n():
    cfg = config(risk=OCE_2XPLUS, replications=2000)
    rep = bias_report(cfg, 10)
    assert rep.mean_signed_error < 0  # plug-in underestimates on average
    assert rep.mean_signed_error <= 3 * rep.std_error
    with pytest.raises(ParameterError):
        bias_report(config(replications=50), 10)


def test_fit_rate_recovers_exact_power_law():
    pts = tuple((n, n**-0.5, 0.0) for n in (100, 400, 1600, 6400))
    fit = fit_rate(RateCurve(pts))
    assert abs(fit.slope + 0.5) < 1e-12
    assert fit.r_squared > 1 - 1e-12
    with pytest.raises(ParameterError):
        fit_rate(RateCurve(((10, 1.0, 0.0), (20, 0.5, 0.0))))
    with pytest.raises(ParameterError):
        fit_rate(RateCurve(((10, 1.0, 0.0), (20, 0.0, 0.0), (40, 0.1, 0.0))))


def test_true_value_exactness_flags():
    val, exact = true_value(config())
    assert exact is True and val == 0.3
    val, exact = true_value(config(dist=ParetoTail(2.0), risk=RiskSpec(kind="avar", u=0.5)))
    assert exact is True and abs(val - 2.0 * math.sqrt(2.0)) < 1e-14
    val, exact = true_value(
        config(dist=ParetoTail(2.0), risk=RiskSpec(kind="oce", loss=avar_loss(0.5)))
    )
    assert exact is False
    assert abs(val - 2.0 * math.sqrt(2.0)) < 0.02  # reference approximation is close


def test_sharpness_curve_matches_exact_binomial_expectation():
    n, eps, reps = 16, 0.5, 3000
    p = 1.0 / n
    target = sharpness_two_point(p, eps)
    exact = sum(
        math.comb(n, k) * p**k * (1 - p) ** (n - k) * abs(sharpness_two_point(k / n, eps) - target)
        for k in range(n + 1)
    )
    curve = sharpness_curve(eps, (n,), reps, seed=9)
    (_, mean_err, se) = curve.points[0]
    assert abs(mean_err - exact) <= 4 * se


def test_hedged_config_error_tracks_empirical_frequency():
    # with a self-financing centered option the plug-in equals the empirical
    # frequency, so the error is exactly |p_hat - p|
    cfg = config(
        risk=OCE_2XPLUS,
        n_grid=(128,),
        replications=50,
        strategies=Box((-1.0,), (1.0,)),
        option_transforms=("centered",),
    )
    errs = np.abs(replication_errors(cfg, 128))
    direct = np.abs(replication_errors(config(n_grid=(128,), replications=50), 128))
    assert np.allclose(np.sort(errs), np.sort(direct), atol=1e-6)


def test_config_validation():
    with pytest.raises(ParameterError):
        config(n_grid=(128, 64))
    with pytest.raises(ParameterError):
        config(replications=5)
    with pytest.raises(ParameterError):
        config(option_transforms=("mystery",))
    with pytest.raises(ParameterError):
        config(epsilons=(-0.1,))
    with pytest.raises(ParameterError):
        ExperimentConfig(dist=Bernoulli(0.3), risk=None, n_grid=(64,), replications=100)
