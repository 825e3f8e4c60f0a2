"""Hedging optimizer soundness against brute-force grids and convexity checks."""
import numpy as np
import pytest

from riskrates import (
    Box,
    ScenarioSet,
    Simplex,
    Singleton,
    evaluate_risk,
    exp_loss,
    hedged_risk,
    linear_above_loss,
    shortfall,
    unboundedness_probe,
    utility_max,
)
from riskrates.errors import ParameterError
from riskrates.hedge import strategy_from_json, strategy_to_json
from riskrates.risk import RiskSpec

from helpers import data_rng

AVAR_HALF = RiskSpec(kind="avar", u=0.5)
OCE_EXP = RiskSpec(kind="oce", loss=exp_loss())


def make_scenarios(rng, n=8, e=1):
    w = rng.random(n) + 0.1
    w = w / w.sum()
    f = rng.normal(size=n)
    g = rng.normal(size=(n, e))
    return ScenarioSet(tuple(w.tolist()), tuple(f.tolist()), g)


def objective(scen, risk, g):
    return evaluate_risk(risk, scen.distribution(np.atleast_1d(g)), 1e-10)


def test_perfect_hedge_reaches_zero():
    rng = data_rng(30)
    w = np.full(6, 1.0 / 6.0)
    f = rng.normal(size=6)
    scen = ScenarioSet(tuple(w), tuple(f.tolist()), -f[:, None])
    res = hedged_risk(scen, AVAR_HALF, Box((0.0,), (2.0,)), tol=1e-9)
    assert abs(res.value) < 1e-7
    assert abs(res.g_star[0] - 1.0) < 1e-6


def test_box_matches_fine_grid_oracle_1d():
    rng = data_rng(31)
    for risk in (AVAR_HALF, OCE_EXP):
        for _ in range(5):
            scen = make_scenarios(rng)
            res = hedged_risk(scen, risk, Box((-1.0,), (1.0,)), tol=1e-9)
            grid = np.arange(-1.0, 1.0 + 1e-9, 1e-4)
            brute = min(objective(scen, risk, g) for g in grid)
            assert res.value <= brute + 1e-7
            assert res.value >= brute - 1e-4  # grid can only overshoot by its step


def test_box_matches_grid_oracle_2d():
    rng = data_rng(32)
    scen = make_scenarios(rng, n=6, e=2)
    res = hedged_risk(scen, AVAR_HALF, Box((-1.0, -1.0), (1.0, 1.0)), tol=1e-9)
    axis = np.linspace(-1.0, 1.0, 161)
    brute = min(objective(scen, AVAR_HALF, (a, b)) for a in axis for b in axis)
    assert res.value <= brute + 1e-7


def test_upper_bound_soundness_random_probes():
    rng = data_rng(33)
    scen = make_scenarios(rng, e=2)
    box = Box((-1.0, -1.0), (1.0, 1.0))
    res = hedged_risk(scen, AVAR_HALF, box, tol=1e-9)
    for _ in range(50):
        g = rng.uniform(-1.0, 1.0, size=2)
        assert res.value <= objective(scen, AVAR_HALF, g) + 1e-8


def test_convexity_certificate_along_segments():
    rng = data_rng(34)
    scen = make_scenarios(rng, e=2)
    for _ in range(20):
        g1 = rng.uniform(-1.0, 1.0, size=2)
        g2 = rng.uniform(-1.0, 1.0, size=2)
        mid = objective(scen, AVAR_HALF, 0.5 * (g1 + g2))
        ends = 0.5 * (objective(scen, AVAR_HALF, g1) + objective(scen, AVAR_HALF, g2))
        assert mid <= ends + 1e-9


def test_simplex_feasibility_and_grid_oracle():
    rng = data_rng(35)
    scen = make_scenarios(rng, e=2)
    res = hedged_risk(scen, AVAR_HALF, Simplex(2), tol=1e-9)
    assert all(x >= -1e-9 for x in res.g_star)
    assert abs(sum(res.g_star) - 1.0) < 1e-9
    lam = np.arange(0.0, 1.0 + 1e-9, 1e-4)
    brute = min(objective(scen, AVAR_HALF, (x, 1.0 - x)) for x in lam)
    assert res.value <= brute + 1e-7


def test_shortfall_nesting_with_trivial_strategy():
    rng = data_rng(36)
    scen = make_scenarios(rng)
    spec = RiskSpec(kind="sf", loss=exp_loss())
    res = hedged_risk(scen, spec, Singleton((0.0,)), tol=1e-9)
    direct = shortfall(scen.distribution((0.0,)), exp_loss(), tol=1e-10)
    assert abs(res.value - direct) < 1e-7


def test_hedged_shortfall_matches_grid_oracle():
    rng = data_rng(37)
    scen = make_scenarios(rng)
    spec = RiskSpec(kind="sf", loss=linear_above_loss(2.0, 0.5))
    res = hedged_risk(scen, spec, Box((-1.0,), (1.0,)), tol=1e-8)
    grid = np.arange(-1.0, 1.0 + 1e-9, 2e-4)
    brute = min(
        shortfall(scen.distribution((g,)), linear_above_loss(2.0, 0.5), 1e-10) for g in grid
    )
    assert res.value <= brute + 1e-6
    assert res.value >= brute - 1e-3


def test_empty_option_set_short_circuits():
    scen = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.empty((2, 0)))
    res = hedged_risk(scen, AVAR_HALF, Singleton(()), tol=1e-9)
    assert res.value == evaluate_risk(AVAR_HALF, scen.distribution(()), 1e-10)
    assert res.g_star == ()


def test_utility_max_linear_picks_best_vertex():
    # linear utility makes the payoff mean affine in g: the optimum is a vertex
    scen = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[1.0], [2.0]]))
    res = utility_max(scen, lambda x: np.asarray(x, dtype=float), Box((0.0,), (1.0,)), tol=1e-9)
    assert abs(res.g_star[0] - 1.0) < 1e-6
    assert abs(res.value - 2.0) < 1e-6


def test_probe_diverging_on_all_negative_option():
    # an always-negative option lets t G push the position to -infinity
    scen = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[-1.0], [-1.0]]))
    report = unboundedness_probe(scen, AVAR_HALF, (1.0,), t_max=1e4, steps=41)
    assert report.diverging is True
    assert report.values[0][0] == 1.0 and report.values[-1][0] == pytest.approx(1e4)


def test_probe_bounded_on_symmetric_option():
    scen = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[-1.0], [1.0]]))
    report = unboundedness_probe(scen, AVAR_HALF, (1.0,), t_max=1e4, steps=41)
    assert report.diverging is False


def test_scenario_csv_round_trip():
    rng = data_rng(38)
    scen = make_scenarios(rng, n=5, e=2)
    back = ScenarioSet.from_csv(scen.to_csv())
    assert np.allclose(back.weights, scen.weights)
    assert np.allclose(back.f, scen.f)
    assert np.allclose(back.g_matrix, scen.g_matrix)


def test_strategy_json_round_trip_and_validation():
    for strat in (Singleton((0.5,)), Box((-1.0,), (1.0,)), Simplex(3)):
        assert strategy_from_json(strategy_to_json(strat)) == strat
    with pytest.raises(ParameterError):
        Box((1.0,), (0.0,))
    with pytest.raises(ParameterError):
        Box((0.0,), (np.inf,))
    with pytest.raises(ParameterError):
        Simplex(0)


def test_probe_direction_dimension_checked():
    scen = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[-1.0], [1.0]]))
    with pytest.raises(ParameterError):
        unboundedness_probe(scen, AVAR_HALF, (1.0, 2.0))
