"""Law-invariant risk measures on empirical data, hedging, and rate experiments."""

from .dist import (
    Bernoulli,
    FiniteDiscrete,
    ParetoTail,
    SampleVector,
    empirical,
    load_samples,
    make_rng,
    quantile,
    sample,
)
from .hedge import (
    Box,
    HedgeResult,
    ProbeReport,
    ScenarioSet,
    Simplex,
    Singleton,
    hedged_risk,
    unboundedness_probe,
    utility_max,
)
from .risk import (
    LossFunction,
    OceResult,
    RiskSpec,
    SpectralComponent,
    SpectralFamily,
    avar,
    avar_loss,
    evaluate_risk,
    exp_loss,
    linear_above_loss,
    oce,
    power_loss,
    sharpness_risk,
    shortfall,
    spectral_risk,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
