"""Monte Carlo harness measuring plug-in estimation error against ground truth.

Each replication draws its own counter-based RNG stream keyed by
(seed, sample size, replication index), so curves are reproducible and
independent of execution order.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .dist import Bernoulli, FiniteDiscrete, ParetoTail, empirical, make_rng, sample
from .errors import NumericError, ParameterError
from .hedge import ScenarioSet, Singleton, StrategySet, hedged_risk, utility_max
from .risk import RiskSpec, evaluate_risk

DEFAULT_SEED = 0x5EED
N_REF = 10**6
_REF_STREAM = 1 << 62


def exp_utility(a: float = 1.0):
    """U(x) = -exp(-a x); concave increasing for a > 0."""
    if not a > 0:
        raise ParameterError(f"exp-utility coefficient must be positive, got {a}")

    def u(x):
        return -np.exp(-a * np.asarray(x, dtype=float))

    u.name = f"exp-utility({a})"
    return u


def linear_utility():
    def u(x):
        return np.asarray(x, dtype=float)

    u.name = "linear-utility"
    return u


KNOWN_TRANSFORMS = ("identity", "centered")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: distribution, target functional, sampling grid."""

    dist: object
    risk: RiskSpec | None
    n_grid: tuple
    replications: int
    strategies: StrategySet = Singleton(())
    option_transforms: tuple = ()
    seed: int = DEFAULT_SEED
    epsilons: tuple = ()
    utility: object = None  # callable; replaces `risk` when present
    solver_tol: float = 1e-7

    def __post_init__(self):
        n_grid = tuple(int(n) for n in self.n_grid)
        if len(n_grid) == 0 or any(n < 2 for n in n_grid):
            raise ParameterError("n_grid entries must all be >= 2")
        if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
            raise ParameterError("n_grid must be strictly increasing")
        if self.replications < 10:
            raise ParameterError("need at least 10 replications")
        if any(e <= 0 for e in self.epsilons):
            raise ParameterError("epsilons must be positive")
        for t in self.option_transforms:
            if t not in KNOWN_TRANSFORMS:
                raise ParameterError(f"unknown option transform {t!r}")
        if self.risk is None and self.utility is None:
            raise ParameterError("config needs a risk spec or a utility")
        object.__setattr__(self, "n_grid", n_grid)
        object.__setattr__(self, "option_transforms", tuple(self.option_transforms))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))


@dataclass(frozen=True)
class RateCurve:
    points: tuple  # of (N, mean_error, std_error)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class DeviationCurve:
    points: tuple  # of (N, epsilon, p_hat, replications)


@dataclass(frozen=True)
class BiasReport:
    n: int
    mean_signed_error: float
    std_error: float


def _scenarios_from(disc: FiniteDiscrete, transforms) -> ScenarioSet:
    """Apply the scenario template to a law (true or empirical).

    The "centered" transform nets the option at the mean of the measure it is
    applied to, so the plug-in problem prices the option from the same sample
    it hedges with.
    """
    atoms = disc.atom_array
    cols = []
    for t in transforms:
        if t == "identity":
            cols.append(atoms)
        else:  # centered
            cols.append(atoms - disc.mean())
    g = np.column_stack(cols) if cols else np.empty((atoms.size, 0))
    return ScenarioSet(tuple(disc.weights), tuple(disc.atoms), g)


def _target_value(config: ExperimentConfig, disc: FiniteDiscrete) -> float:
    """Value of the configured functional on a finite discrete law."""
    trivial = isinstance(config.strategies, Singleton) and (
        len(config.strategies.g) == 0 or not any(config.strategies.g)
    )
    if config.utility is not None:
        scen = _scenarios_from(disc, config.option_transforms)
        return utility_max(scen, config.utility, config.strategies, config.solver_tol).value
    if not config.option_transforms or trivial:
        return evaluate_risk(config.risk, disc, config.solver_tol / 10.0)
    scen = _scenarios_from(disc, config.option_transforms)
    return hedged_risk(scen, config.risk, config.strategies, config.solver_tol).value


def true_value(config: ExperimentConfig):
    """Target value of the experiment; returns (value, exact_flag).

    Exact for Bernoulli/finite-discrete inputs and for the Pareto/AVaR closed
    form; otherwise a 10^6-sample empirical reference flagged approximate.
    """
    dist = config.dist
    if isinstance(dist, (Bernoulli, FiniteDiscrete)):
        return _target_value(config, dist.as_discrete()), True
    if isinstance(dist, ParetoTail):
        plain = isinstance(config.strategies, Singleton) and (
            len(config.strategies.g) == 0 or not any(config.strategies.g)
        )
        if config.utility is None and config.risk.kind == "avar" and plain:
            return oracle.avar_pareto(dist.q, config.risk.u), True
    ref = empirical(sample(dist, N_REF, config.seed, stream=_REF_STREAM).values)
    return _target_value(config, ref), False


def replication_errors(config: ExperimentConfig, n: int) -> np.ndarray:
    """Signed errors (plug-in minus true) for all replications at sample size n."""
    target, _ = true_value(config)
    errors = np.empty(config.replications)
    for r in range(config.replications):
        stream = (n << 32) + r
        draws = sample(config.dist, n, config.seed, stream=stream)
        emp = empirical(draws.values)
        try:
            plugin = _target_value(config, emp)
        except NumericError as exc:
            raise NumericError(f"replication (N={n}, r={r}) failed: {exc}") from exc
        errors[r] = plugin - target
    return errors


def mean_error_curve(config: ExperimentConfig) -> RateCurve:
    points = []
    for n in config.n_grid:
        errs = np.abs(replication_errors(config, n))
        points.append((n, float(errs.mean()), float(errs.std(ddof=1) / math.sqrt(errs.size))))
    return RateCurve(tuple(points))


def deviation_curve(config: ExperimentConfig) -> DeviationCurve:
    if not config.epsilons:
        raise ParameterError("deviation_curve needs a nonempty epsilon list")
    points = []
    for n in config.n_grid:
        errs = np.abs(replication_errors(config, n))
        for eps in config.epsilons:
            p_hat = float(np.mean(errs >= eps))
            points.append((n, eps, p_hat, config.replications))
    return DeviationCurve(tuple(points))


def bias_report(config: ExperimentConfig, n: int) -> BiasReport:
    if config.replications < 100:
        raise ParameterError("bias_report needs at least 100 replications")
    errs = replication_errors(config, n)
    return BiasReport(
        n=n,
        mean_signed_error=float(errs.mean()),
        std_error=float(errs.std(ddof=1) / math.sqrt(errs.size)),
    )


def fit_rate(curve: RateCurve) -> RateFit:
    """OLS slope of log mean_error against log N; the empirical rate exponent."""
    points = curve.points
    if len(points) < 3:
        raise ParameterError("rate fit needs at least 3 points")
    if any(p[1] <= 0 for p in points):
        raise ParameterError("rate fit is undefined when a mean error is zero")
    log_n = np.log([p[0] for p in points])
    log_e = np.log([p[1] for p in points])
    slope, intercept = np.polyfit(log_n, log_e, 1)
    resid = log_e - (slope * log_n + intercept)
    ss_tot = float(np.sum((log_e - log_e.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def sharpness_curve(eps: float, n_grid, replications: int, seed: int = DEFAULT_SEED) -> RateCurve:
    """Estimation error of the tail-weighting family under the drifting law Ber(1/N).

    Both the true value and the plug-in are evaluated through the exact
    two-point closed form, since the empirical measure of a Bernoulli law is
    again Bernoulli with the observed frequency.
    """
    if not 0.0 < eps <= 1.0:
        raise ParameterError(f"eps must be in (0, 1], got {eps}")
    n_grid = tuple(int(n) for n in n_grid)
    if min(n_grid) < 4:
        raise ParameterError("sharpness curve needs n_grid entries >= 4")
    points = []
    for n in n_grid:
        p = 1.0 / n
        target = oracle.sharpness_two_point(p, eps)
        errs = np.empty(replications)
        for r in range(replications):
            rng = make_rng(seed, (n << 32) + r)
            p_hat = rng.binomial(n, p) / n
            errs[r] = abs(target - oracle.sharpness_two_point(p_hat, eps))
        points.append((n, float(errs.mean()), float(errs.std(ddof=1) / math.sqrt(errs.size))))
    return RateCurve(tuple(points))


# ---------------------------------------------------------------------------
# CSV emission


def rate_curve_csv(curve: RateCurve) -> str:
    out = io.StringIO()
    out.write("N,mean_error,std_error\n")
    for n, m, s in curve.points:
        out.write(f"{n},{m:.12g},{s:.12g}\n")
    return out.getvalue()


def deviation_curve_csv(curve: DeviationCurve) -> str:
    out = io.StringIO()
    out.write("N,epsilon,p_hat,R\n")
    for n, eps, p_hat, r in curve.points:
        out.write(f"{n},{eps:.12g},{p_hat:.12g},{r}\n")
    return out.getvalue()


def bias_reports_csv(reports) -> str:
    out = io.StringIO()
    out.write("N,mean_signed_error,std_error\n")
    for rep in reports:
        out.write(f"{rep.n},{rep.mean_signed_error:.12g},{rep.std_error:.12g}\n")
    return out.getvalue()
