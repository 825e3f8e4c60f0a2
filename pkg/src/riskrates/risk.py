"""Exact evaluation of law-invariant risk measures on finite discrete laws.

Covers tail-average AVaR, optimized certainty equivalents (OCE), shortfall
risk (SF), finite spectral mixtures, and the power-decay tail-weighting family
used to exhibit estimation-rate lower bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import Bernoulli, FiniteDiscrete
from .errors import ContractError, InfeasibleError, NumericError, ParameterError, SchemaError

MAX_BISECT_ITER = 200
# slack on subgradient signs: weights sum to 1 only up to rounding, so psi
# sits a few ulps off zero on flat regions of piecewise-linear losses
PSI_SLACK = 1e-12


# ---------------------------------------------------------------------------
# loss functions


@dataclass(frozen=True)
class LossFunction:
    """Convex increasing loss l: R -> R+ with unit subgradient at 0.

    ``fn`` evaluates l, ``deriv`` its right derivative; both accept arrays.
    ``growth_degree`` is the p with l'(x) <= C (1 + |x|^(p-1)); math.inf marks
    losses usable only on bounded supports.  ``superlinear`` records whether
    liminf l(x)/x > 1, required when the input support is unbounded.
    """

    name: str
    fn: callable
    deriv: callable
    growth_degree: float
    strictly_increasing: bool = False
    superlinear: bool = True
    bracket_scale: float = 4.0

    def __call__(self, x):
        return self.fn(x)


def avar_loss(u: float) -> LossFunction:
    """l(x) = x+ / (1 - u); makes OCE coincide with AVaR_u."""
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"avar-loss level must be in [0, 1), got {u}")
    slope = 1.0 / (1.0 - u)
    return LossFunction(
        name=f"avar-loss({u})",
        fn=lambda x: slope * np.maximum(x, 0.0),
        deriv=lambda x: np.where(np.asarray(x, dtype=float) >= 0.0, slope, 0.0),
        growth_degree=1.0,
        strictly_increasing=False,
        superlinear=u > 0.0,
    )


def exp_loss() -> LossFunction:
    """l(x) = e^x; strictly increasing, growth degree infinity."""
    return LossFunction(
        name="exp",
        fn=np.exp,
        deriv=np.exp,
        growth_degree=math.inf,
        strictly_increasing=True,
        superlinear=True,
    )


def power_loss(p: float) -> LossFunction:
    """l(x) = x+ + (x+)^p / p for p > 1."""
    if not p > 1.0:
        raise ParameterError(f"power-loss degree must be > 1, got {p}")

    def fn(x):
        xp = np.maximum(x, 0.0)
        return xp + xp**p / p

    def deriv(x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        return np.where(x >= 0.0, 1.0 + xp ** (p - 1.0), 0.0)

    return LossFunction(
        name=f"power({p})",
        fn=fn,
        deriv=deriv,
        growth_degree=p,
        strictly_increasing=False,
        superlinear=True,
    )


def linear_above_loss(slope: float, slope_below: float = 0.5) -> LossFunction:
    """Piecewise-linear loss through l(0) = 1 with kink at zero.

    l(x) = max(0, 1 + slope * x) for x >= 0 and max(0, 1 + slope_below * x)
    below; needs slope_below <= 1 <= slope for the unit subgradient at 0.
    Strictly increasing wherever positive, which is what SF bisection uses.
    """
    if not slope >= 1.0:
        raise ParameterError(f"linear-above slope must be >= 1, got {slope}")
    if not 0.0 <= slope_below <= 1.0:
        raise ParameterError(f"slope_below must be in [0, 1], got {slope_below}")

    def fn(x):
        x = np.asarray(x, dtype=float)
        raw = 1.0 + np.where(x >= 0.0, slope * x, slope_below * x)
        return np.maximum(raw, 0.0)

    def deriv(x):
        x = np.asarray(x, dtype=float)
        raw = 1.0 + np.where(x >= 0.0, slope * x, slope_below * x)
        d = np.where(x >= 0.0, slope, slope_below)
        return np.where(raw > 0.0, d, 0.0)

    return LossFunction(
        name=f"linear-above({slope},{slope_below})",
        fn=fn,
        deriv=deriv,
        growth_degree=1.0,
        strictly_increasing=slope_below > 0.0,
        superlinear=slope > 1.0,
    )


def loss_from_json(obj: dict) -> LossFunction:
    if not isinstance(obj, dict) or "name" not in obj:
        raise SchemaError(f"loss descriptor must be an object with a 'name': {obj!r}")
    name = obj["name"]
    known = {
        "avar-loss": {"name", "u"},
        "exp": {"name"},
        "power": {"name", "p"},
        "linear-above": {"name", "slope", "slope_below"},
    }
    if name not in known:
        raise SchemaError(f"unknown loss {name!r} (custom tabulated losses are rejected)")
    extra = set(obj) - known[name]
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)} in loss {name!r}")
    if name == "avar-loss":
        return avar_loss(float(obj["u"]))
    if name == "exp":
        return exp_loss()
    if name == "power":
        return power_loss(float(obj["p"]))
    return linear_above_loss(float(obj["slope"]), float(obj.get("slope_below", 0.5)))


def loss_to_json(loss: LossFunction) -> dict:
    """Inverse of loss_from_json for the built-in loss families."""
    name = loss.name
    if name.startswith("avar-loss("):
        return {"name": "avar-loss", "u": float(name[10:-1])}
    if name == "exp":
        return {"name": "exp"}
    if name.startswith("power("):
        return {"name": "power", "p": float(name[6:-1])}
    if name.startswith("linear-above("):
        slope, slope_below = (float(x) for x in name[13:-1].split(","))
        return {"name": "linear-above", "slope": slope, "slope_below": slope_below}
    raise ParameterError(f"loss {name!r} has no JSON form")


# ---------------------------------------------------------------------------
# risk specifications


@dataclass(frozen=True)
class SpectralComponent:
    """One AVaR mixture: levels u_k in [0,1) with masses summing to 1, minus a penalty."""

    levels: tuple
    masses: tuple
    beta: float = 0.0

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if levels.size == 0 or levels.size != masses.size:
            raise ParameterError("levels and masses must be nonempty and of equal length")
        if np.any(levels < 0) or np.any(levels >= 1):
            raise ParameterError("spectral levels must lie in [0, 1)")
        if np.any(masses < 0) or abs(float(masses.sum()) - 1.0) > 1e-12:
            raise ParameterError("spectral masses must be nonnegative and sum to 1")
        if self.beta < 0:
            raise ParameterError("spectral penalty must be nonnegative")
        object.__setattr__(self, "levels", tuple(levels.tolist()))
        object.__setattr__(self, "masses", tuple(masses.tolist()))


@dataclass(frozen=True)
class SpectralFamily:
    components: tuple

    def __post_init__(self):
        if len(self.components) == 0:
            raise ParameterError("spectral family must contain at least one component")
        object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class RiskSpec:
    """Tagged union of the supported risk measures."""

    kind: str  # "avar" | "oce" | "sf" | "spectral" | "sharpness"
    u: float | None = None
    loss: LossFunction | None = None
    family: SpectralFamily | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind == "avar":
            if self.u is None or not 0.0 <= self.u < 1.0:
                raise ParameterError(f"avar level must be in [0, 1), got {self.u}")
        elif self.kind == "oce":
            if self.loss is None:
                raise ParameterError("oce requires a loss function")
        elif self.kind == "sf":
            if self.loss is None:
                raise ParameterError("sf requires a loss function")
        elif self.kind == "spectral":
            if self.family is None:
                raise ParameterError("spectral requires a family")
        elif self.kind == "sharpness":
            if self.eps is None or not 0.0 < self.eps <= 1.0:
                raise ParameterError(f"sharpness exponent must be in (0, 1], got {self.eps}")
        else:
            raise ParameterError(f"unknown risk kind {self.kind!r}")


def risk_spec_from_json(obj: dict) -> RiskSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"risk descriptor must be an object with a 'kind': {obj!r}")
    kind = obj["kind"]
    known = {
        "avar": {"kind", "u"},
        "oce": {"kind", "loss"},
        "sf": {"kind", "loss"},
        "spectral": {"kind", "components"},
        "sharpness": {"kind", "eps"},
    }
    if kind not in known:
        raise SchemaError(f"unknown risk kind {kind!r}")
    extra = set(obj) - known[kind]
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)} in risk {kind!r}")
    if kind == "avar":
        return RiskSpec(kind="avar", u=float(obj["u"]))
    if kind in ("oce", "sf"):
        return RiskSpec(kind=kind, loss=loss_from_json(obj["loss"]))
    if kind == "spectral":
        comps = []
        for c in obj["components"]:
            extra = set(c) - {"levels", "masses", "beta"}
            if extra:
                raise SchemaError(f"unknown fields {sorted(extra)} in spectral component")
            comps.append(
                SpectralComponent(tuple(c["levels"]), tuple(c["masses"]), float(c.get("beta", 0.0)))
            )
        return RiskSpec(kind="spectral", family=SpectralFamily(tuple(comps)))
    return RiskSpec(kind="sharpness", eps=float(obj["eps"]))


def risk_spec_to_json(spec: RiskSpec) -> dict:
    if spec.kind == "avar":
        return {"kind": "avar", "u": spec.u}
    if spec.kind in ("oce", "sf"):
        return {"kind": spec.kind, "loss": loss_to_json(spec.loss)}
    if spec.kind == "spectral":
        return {
            "kind": "spectral",
            "components": [
                {"levels": list(c.levels), "masses": list(c.masses), "beta": c.beta}
                for c in spec.family.components
            ],
        }
    return {"kind": "sharpness", "eps": spec.eps}


@dataclass(frozen=True)
class OceResult:
    value: float
    minimizer_m: float
    bracket: tuple
    iterations: int


# ---------------------------------------------------------------------------
# operations


def _as_discrete(dist) -> FiniteDiscrete:
    if isinstance(dist, Bernoulli):
        return dist.as_discrete()
    if isinstance(dist, FiniteDiscrete):
        return dist
    raise ParameterError(f"operation requires a finite discrete law, got {dist!r}")


def avar(dist, u: float) -> float:
    """Tail-average AVaR: mean of the largest outcomes carrying mass 1 - u.

    The atom straddling the u-quantile contributes fractionally so the tail
    mass is exactly 1 - u.
    """
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"avar level must be in [0, 1), got {u}")
    disc = _as_discrete(dist)
    t = 1.0 - u
    ra = disc.atom_array[::-1]
    rw = disc.weight_array[::-1]
    if ra.size == 1:
        return float(ra[0])
    cum = np.cumsum(rw)
    k = int(np.searchsorted(cum, t, side="left"))
    k = min(k, ra.size - 1)
    head = float(rw[:k] @ ra[:k])
    frac = t - (float(cum[k - 1]) if k > 0 else 0.0)
    return (head + frac * float(ra[k])) / t


def oce(dist, loss: LossFunction, tol: float = 1e-10) -> OceResult:
    """inf_m E[l(X - m)] + m by monotone bisection on the subgradient.

    The map psi(m) = 1 - E[l'(X - m)] is nondecreasing; the reported minimizer
    is the left endpoint of the (possibly flat) minimizer set.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    disc = _as_discrete(dist)
    atoms = disc.atom_array
    weights = disc.weight_array

    def psi(m):
        return 1.0 - float(weights @ loss.deriv(atoms - m))

    def value_at(m):
        return float(weights @ loss.fn(atoms - m)) + m

    lo, hi = _oce_bracket(disc, loss)
    if psi(lo) > PSI_SLACK or psi(hi) < -PSI_SLACK:
        lo, hi = _expand_bracket(psi, lo, hi)
    iterations = 0
    while hi - lo > tol and iterations < MAX_BISECT_ITER:
        mid = 0.5 * (lo + hi)
        if psi(mid) >= -PSI_SLACK:
            hi = mid
        else:
            lo = mid
        iterations += 1
    if hi - lo > tol:
        raise NumericError(
            f"OCE bisection did not converge within {MAX_BISECT_ITER} iterations",
            residual=hi - lo,
            best_value=value_at(hi),
        )
    m_star = hi  # smallest point found with psi >= 0
    return OceResult(value=value_at(m_star), minimizer_m=m_star, bracket=(lo, hi), iterations=iterations)


def _oce_bracket(disc: FiniteDiscrete, loss: LossFunction):
    """Bracket [-B, B] certain to contain the OCE minimizer.

    The constructive bound B = c_l (1 + max|atom|)^p; for p = inf the
    minimizer is anyway confined to the atom range, which the bracket always
    covers.
    """
    m = 1.0 + disc.max_abs_atom()
    p = loss.growth_degree
    if math.isfinite(p):
        b = loss.bracket_scale * m ** min(p, 50.0)
    else:
        b = loss.bracket_scale * m
    b = max(b, m)
    return -b, b


def _expand_bracket(psi, lo, hi, max_doublings: int = 60):
    width = hi - lo
    for _ in range(max_doublings):
        if psi(lo) <= PSI_SLACK and psi(hi) >= -PSI_SLACK:
            return lo, hi
        width *= 2.0
        lo -= width
        hi += width
    raise NumericError("could not bracket the OCE subgradient crossing", residual=None)


def shortfall(dist, loss: LossFunction, tol: float = 1e-10) -> float:
    """Smallest capital m with E[l(X - m)] <= 1.

    The map m -> E[l(X - m)] is strictly decreasing for strictly increasing
    losses, so the answer is the unique root of E[l(X - m)] = 1.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if not loss.strictly_increasing:
        raise ContractError(f"shortfall requires a strictly increasing loss, got {loss.name}")
    disc = _as_discrete(dist)
    atoms = disc.atom_array
    weights = disc.weight_array

    def h(m):
        return float(weights @ loss.fn(atoms - m))

    lo = float(atoms[0]) - 1.0
    hi = float(atoms[-1]) + 1.0
    width = hi - lo
    for _ in range(200):
        if h(lo) >= 1.0 >= h(hi):
            break
        width *= 2.0
        if h(lo) < 1.0:
            lo -= width
        if h(hi) > 1.0:
            hi += width
        if width > 1e30:
            raise InfeasibleError(f"loss {loss.name} never straddles the threshold 1")
    else:
        raise InfeasibleError(f"loss {loss.name} never straddles the threshold 1")
    for _ in range(MAX_BISECT_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def spectral_risk(dist, family: SpectralFamily) -> float:
    """max over components of (sum_k w_k AVaR_{u_k} - beta)."""
    disc = _as_discrete(dist)
    best = -math.inf
    for comp in family.components:
        val = sum(m * avar(disc, u) for u, m in zip(comp.levels, comp.masses)) - comp.beta
        best = max(best, val)
    return best


def sharpness_risk(dist, eps: float) -> float:
    """sup_{x>=1} ((1 - x^-eps) AVaR_0 + x^-eps AVaR_{1-1/x}), computed exactly.

    Between quantile breakpoints x -> AVaR_{1-1/x} is affine, so the supremum
    is attained at a breakpoint, at x = 1, or at a per-piece stationary point
    solving the closed-form first-order condition.
    """
    if not 0.0 < eps <= 1.0:
        raise ParameterError(f"sharpness exponent must be in (0, 1], got {eps}")
    disc = _as_discrete(dist)
    atoms = disc.atom_array
    weights = disc.weight_array
    mu = disc.mean()
    if atoms.size == 1:
        return float(atoms[0])

    def objective(x):
        w = x**-eps
        return (1.0 - w) * mu + w * avar(disc, 1.0 - 1.0 / x)

    # suffix tail masses / tail sums: suffix_w[k] = sum_{j>=k} w_j
    suffix_w = np.concatenate((np.cumsum(weights[::-1])[::-1], [0.0]))
    suffix_s = np.concatenate((np.cumsum((weights * atoms)[::-1])[::-1], [0.0]))
    candidates = [1.0]
    for k in range(atoms.size):
        t_lo = suffix_w[k + 1]  # right end of the piece in tail mass
        t_hi = suffix_w[k]
        if t_hi > 0:
            candidates.append(max(1.0, 1.0 / t_hi))
        if t_lo > 0:
            candidates.append(max(1.0, 1.0 / t_lo))
        # on the piece: AVaR_{1-1/x} = m_k + A_k x with
        a_k = float(suffix_s[k + 1] - suffix_w[k + 1] * atoms[k])
        m_k = float(atoms[k])
        if eps < 1.0 and a_k > 0.0:
            x_star = eps * (m_k - mu) / ((1.0 - eps) * a_k)
            x_left = max(1.0, 1.0 / t_hi) if t_hi > 0 else 1.0
            x_right = 1.0 / t_lo if t_lo > 0 else math.inf
            if x_left < x_star < x_right:
                candidates.append(x_star)
    return max(objective(x) for x in candidates)


def evaluate_risk(spec: RiskSpec, dist, tol: float = 1e-10) -> float:
    """Value of the risk measure described by ``spec`` on a finite discrete law."""
    if spec.kind == "avar":
        return avar(dist, spec.u)
    if spec.kind == "oce":
        return oce(dist, spec.loss, tol).value
    if spec.kind == "sf":
        return shortfall(dist, spec.loss, tol)
    if spec.kind == "spectral":
        return spectral_risk(dist, spec.family)
    return sharpness_risk(dist, spec.eps)
