"""Tour of the risk measures on a small empirical data set.

Run with: python3 demos/risk_measures.py
"""
from riskrates import (
    ParetoTail,
    SpectralComponent,
    SpectralFamily,
    avar,
    avar_loss,
    empirical,
    exp_loss,
    oce,
    power_loss,
    sample,
    sharpness_risk,
    shortfall,
    spectral_risk,
)

# Pretend these are observed losses: a heavy-tailed book of 50k positions.
draws = sample(ParetoTail(2.0), 50_000, seed=2024)
emp = empirical(draws)
print(f"data: {len(draws)} draws, mean {emp.mean():.4f}, max {max(emp.atoms):.2f}")

# Average value at risk: the mean of the worst (1-u) fraction of outcomes.
for u in (0.9, 0.95, 0.99):
    print(f"AVaR_{u}: {avar(emp, u):.4f}")

# The same AVaR through its scalar-minimization form; the minimizer is the
# value-at-risk threshold.
res = oce(emp, avar_loss(0.95))
print(f"AVaR_0.95 via minimization: {res.value:.4f} (threshold m* = {res.minimizer_m:.4f})")

# Optimized certainty equivalents with other loss shapes.
print(f"OCE, quadratic-above loss: {oce(emp, power_loss(2.0)).value:.4f}")

# Shortfall risk: the smallest capital injection that brings the expected
# loss-weighted exposure down to the unit threshold.
small = empirical(sample(ParetoTail(4.0), 50_000, seed=2024).values * 0.2)
print(f"shortfall, exponential loss: {shortfall(small, exp_loss()):.4f}")

# A two-component spectral (AVaR-mixture) measure.
fam = SpectralFamily(
    (
        SpectralComponent(levels=(0.5, 0.95), masses=(0.5, 0.5)),
        SpectralComponent(levels=(0.99,), masses=(1.0,), beta=0.25),
    )
)
print(f"spectral: {spectral_risk(emp, fam):.4f}")

# The tail-weighting sup family interpolating between the mean and the max.
for eps in (0.25, 0.5, 1.0):
    print(f"sharpness family, eps={eps}: {sharpness_risk(emp, eps):.4f}")
