"""Hedged risk on a finite scenario set, including an unboundedness probe.

Run with: python3 demos/hedging.py
"""
import numpy as np

from riskrates import (
    Box,
    ScenarioSet,
    Simplex,
    hedged_risk,
    make_rng,
    unboundedness_probe,
    utility_max,
)
from riskrates.risk import RiskSpec

rng = make_rng(7)

# Ten equally likely scenarios: a position f and two hedging instruments.
n = 10
f = rng.normal(1.0, 1.0, n)
g = np.column_stack([rng.normal(0.0, 1.0, n), rng.normal(0.0, 0.5, n)])
scen = ScenarioSet(tuple([1.0 / n] * n), tuple(f.tolist()), g)

risk = RiskSpec(kind="avar", u=0.9)
unhedged = hedged_risk(scen, risk, Box((0.0, 0.0), (0.0, 0.0)))
print(f"unhedged AVaR_0.9: {unhedged.value:.4f}")

# Positions in each instrument bounded to [-2, 2].
res = hedged_risk(scen, risk, Box((-2.0, -2.0), (2.0, 2.0)))
print(f"hedged  AVaR_0.9: {res.value:.4f} at g* = {tuple(round(x, 4) for x in res.g_star)}")

# Long-only unit-budget portfolios of the two instruments.
res = hedged_risk(scen, risk, Simplex(2))
print(f"simplex AVaR_0.9: {res.value:.4f} at g* = {tuple(round(x, 4) for x in res.g_star)}")

# Expected-utility counterpart: maximize E[U(f + g.G)].
res = utility_max(scen, lambda x: -np.exp(-np.asarray(x)), Box((-2.0, -2.0), (2.0, 2.0)))
print(f"best exp-utility: {res.value:.4f} at g* = {tuple(round(x, 4) for x in res.g_star)}")

# Why the strategy set must be bounded: along a direction whose payoff is
# negative in every scenario, scaling the position sends the risk to -infinity.
sinking = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[-1.0], [-0.5]]))
probe = unboundedness_probe(sinking, risk, (1.0,))
print(f"all-negative option: diverging = {probe.diverging}")
balanced = ScenarioSet((0.5, 0.5), (0.0, 1.0), np.array([[-1.0], [1.0]]))
probe = unboundedness_probe(balanced, risk, (1.0,))
print(f"symmetric option:    diverging = {probe.diverging}")
