"""Hedged-risk minimization inf_g rho(F + g.G) over compact strategy sets.

The objective is convex (convex risk measure composed with an affine map) but
generally nonsmooth, so the solver is derivative-free: a coarse lattice pick
followed by cyclic line searches (golden section) along coordinate and
pairwise-diagonal directions.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .dist import FiniteDiscrete
from .errors import InfeasibleError, ParameterError, SchemaError
from .risk import RiskSpec, evaluate_risk

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CONSTRAINT_TOL = 1e-9
LATTICE_POINTS_PER_AXIS = 7


@dataclass(frozen=True)
class ScenarioSet:
    """Finite weighted scenarios with position payoff f and netted option payoffs."""

    weights: tuple
    f: tuple
    g_matrix: tuple  # N x e, option payoffs minus prices

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        f = np.asarray(self.f, dtype=float)
        g = np.asarray(self.g_matrix, dtype=float)
        if g.size == 0:
            g = g.reshape(weights.size, 0)
        if g.ndim == 1:
            g = g.reshape(-1, 1)
        if weights.ndim != 1 or f.shape != weights.shape or g.shape[0] != weights.size:
            raise ParameterError("weights, f, and g_matrix must have consistent shapes")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ParameterError("scenario weights must be nonnegative and sum to 1")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g)) and np.all(np.isfinite(weights))):
            raise ParameterError("scenario entries must be finite")
        for name, arr in (("weights", weights), ("f", f), ("g_matrix", g)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_options(self) -> int:
        return int(self.g_matrix.shape[1])

    def payoff(self, g) -> np.ndarray:
        if self.n_options == 0:
            return self.f
        return self.f + self.g_matrix @ np.asarray(g, dtype=float)

    def distribution(self, g) -> FiniteDiscrete:
        values = self.payoff(g)
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.bincount(inverse, weights=self.weights, minlength=uniq.size)
        return FiniteDiscrete(tuple(uniq.tolist()), tuple(merged.tolist()))

    def shift(self, c: float) -> "ScenarioSet":
        return ScenarioSet(tuple(self.weights), tuple((self.f + c).tolist()), self.g_matrix)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["weight", "f"] + [f"g{i + 1}" for i in range(self.n_options)])
        for i in range(self.weights.size):
            row = [self.weights[i], self.f[i]] + list(self.g_matrix[i])
            writer.writerow([f"{x:.12g}" for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScenarioSet":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("scenario CSV is empty")
        expected = ["weight", "f"] + [f"g{i + 1}" for i in range(len(header) - 2)]
        if header != expected:
            raise SchemaError(f"scenario CSV header must be {expected}, got {header}")
        rows = [[float(cell) for cell in row] for row in reader if row]
        if not rows:
            raise SchemaError("scenario CSV has no data rows")
        arr = np.asarray(rows, dtype=float)
        return cls(tuple(arr[:, 0]), tuple(arr[:, 1]), arr[:, 2:])


@dataclass(frozen=True)
class Singleton:
    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(float(x) for x in np.atleast_1d(self.g)))


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ParameterError("box needs lo <= hi componentwise")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ParameterError("box bounds must be finite (compactness)")
        object.__setattr__(self, "lo", tuple(lo.tolist()))
        object.__setattr__(self, "hi", tuple(hi.tolist()))


@dataclass(frozen=True)
class Simplex:
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise ParameterError("simplex dimension must be >= 1")


StrategySet = Singleton | Box | Simplex


def strategy_from_json(obj: dict) -> StrategySet:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"strategy descriptor must be an object with a 'kind': {obj!r}")
    kind = obj["kind"]
    known = {"singleton": {"kind", "g"}, "box": {"kind", "lo", "hi"}, "simplex": {"kind", "e"}}
    if kind not in known:
        raise SchemaError(f"unknown strategy kind {kind!r}")
    extra = set(obj) - known[kind]
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)} in strategy {kind!r}")
    if kind == "singleton":
        return Singleton(tuple(obj["g"]))
    if kind == "box":
        return Box(tuple(obj["lo"]), tuple(obj["hi"]))
    return Simplex(int(obj["e"]))


def strategy_to_json(strat: StrategySet) -> dict:
    if isinstance(strat, Singleton):
        return {"kind": "singleton", "g": list(strat.g)}
    if isinstance(strat, Box):
        return {"kind": "box", "lo": list(strat.lo), "hi": list(strat.hi)}
    return {"kind": "simplex", "e": strat.e}


@dataclass(frozen=True)
class HedgeResult:
    value: float
    g_star: tuple
    restarts_used: int
    inner_iterations: int


@dataclass(frozen=True)
class ProbeReport:
    values: tuple  # of (t, rho) pairs
    diverging: bool


# ---------------------------------------------------------------------------
# derivative-free convex descent


def _golden_section(f, lo, hi, tol):
    """Minimize a convex 1-D function on [lo, hi]; deterministic."""
    evals = 0
    a, b = lo, hi
    if b - a <= tol:
        x = 0.5 * (a + b)
        return x, f(x), 1
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    evals += 2
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        evals += 1
    x = 0.5 * (a + b)
    return x, f(x), evals + 1


def _box_lattice(box: Box):
    axes = [np.linspace(lo, hi, LATTICE_POINTS_PER_AXIS) for lo, hi in zip(box.lo, box.hi)]
    return [np.array(pt) for pt in itertools.product(*axes)]


def _simplex_lattice(e: int, resolution: int = 6):
    pts = []
    for comp in itertools.combinations_with_replacement(range(e), resolution):
        counts = np.bincount(comp, minlength=e)
        pts.append(counts / resolution)
    return pts


def _line_range(g, direction, lo, hi):
    """Feasible t-range so that g + t * direction stays inside the box [lo, hi]."""
    t_lo, t_hi = -math.inf, math.inf
    for gi, di, li, hi_i in zip(g, direction, lo, hi):
        if di == 0.0:
            continue
        a = (li - gi) / di
        b = (hi_i - gi) / di
        if a > b:
            a, b = b, a
        t_lo = max(t_lo, a)
        t_hi = min(t_hi, b)
    return t_lo, t_hi


def _descend_box(obj, box: Box, g0, tol):
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    e = lo.size
    diam = float(np.linalg.norm(hi - lo))
    g = np.clip(np.asarray(g0, dtype=float), lo, hi)
    directions = [np.eye(e)[i] for i in range(e)]
    for i in range(e):
        for j in range(i + 1, e):
            d = np.zeros(e)
            d[i], d[j] = 1.0, 1.0
            directions.append(d.copy())
            d[j] = -1.0
            directions.append(d)
    total_evals = 0
    stop = tol * (1.0 + diam)
    for _ in range(200):
        moved = 0.0
        for d in directions:
            t_lo, t_hi = _line_range(g, d, lo, hi)
            if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or t_hi - t_lo <= 0:
                continue
            t, _, evals = _golden_section(lambda t: obj(g + t * d), t_lo, t_hi, stop * 0.5)
            total_evals += evals
            g = np.clip(g + t * d, lo, hi)
            moved = max(moved, abs(t) * float(np.linalg.norm(d)))
        if moved < stop:
            break
    return g, total_evals


def _descend_simplex(obj, e, g0, tol):
    """Pairwise exchange moves g_i <-> g_j preserving the unit sum."""
    g = np.asarray(g0, dtype=float)
    total_evals = 0
    stop = tol * (1.0 + math.sqrt(2.0))
    for _ in range(200):
        moved = 0.0
        for i in range(e):
            for j in range(i + 1, e):
                s = g[i] + g[j]
                if s <= 0:
                    continue

                def f(x, i=i, j=j, s=s):
                    trial = g.copy()
                    trial[i], trial[j] = x, s - x
                    return obj(trial)

                x, _, evals = _golden_section(f, 0.0, s, stop * 0.5)
                total_evals += evals
                moved = max(moved, abs(x - g[i]))
                g[i], g[j] = x, s - x
        if moved < stop:
            break
    g = np.clip(g, 0.0, 1.0)
    g = g / g.sum()
    return g, total_evals


def _minimize(obj, strategies: StrategySet, tol: float):
    """Lattice start (lexicographically smallest best point) + line-search descent."""
    if isinstance(strategies, Singleton):
        g = np.asarray(strategies.g, dtype=float)
        return g, obj(g), 0, 1
    if isinstance(strategies, Box):
        lattice = _box_lattice(strategies)
    else:
        lattice = _simplex_lattice(strategies.e)
    lattice.sort(key=lambda p: tuple(p))
    best_g, best_v = None, math.inf
    for pt in lattice:
        v = obj(pt)
        if v < best_v:
            best_g, best_v = pt, v
    if isinstance(strategies, Box):
        g, evals = _descend_box(obj, strategies, best_g, tol)
    else:
        g, evals = _descend_simplex(obj, strategies.e, best_g, tol)
    v = obj(g)
    if best_v < v:  # descent never worsens the lattice pick
        g, v = best_g, best_v
    return g, v, 1, evals + len(lattice)


def hedged_risk(scenarios: ScenarioSet, risk: RiskSpec, strategies: StrategySet, tol: float = 1e-8) -> HedgeResult:
    """inf over admissible g of rho(F + g.G); SF is handled by outer bisection."""
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if scenarios.n_options == 0:
        value = evaluate_risk(risk, scenarios.distribution(()), tol / 10.0)
        return HedgeResult(value=value, g_star=(), restarts_used=0, inner_iterations=1)
    if risk.kind == "sf" and not isinstance(strategies, Singleton):
        return _hedged_shortfall(scenarios, risk, strategies, tol)

    def obj(g):
        return evaluate_risk(risk, scenarios.distribution(g), tol / 10.0)

    g, v, restarts, evals = _minimize(obj, strategies, tol)
    return HedgeResult(value=float(v), g_star=tuple(np.atleast_1d(g).tolist()), restarts_used=restarts, inner_iterations=evals)


def _hedged_shortfall(scenarios, risk, strategies, tol):
    """Outer bisection on capital m of J(m) = inf_g E[l(F + g.G - m)] = 1."""
    loss = risk.loss
    if not loss.strictly_increasing:
        raise ParameterError(f"hedged shortfall requires a strictly increasing loss, got {loss.name}")
    weights = scenarios.weights

    def inner(m):
        def obj(g):
            return float(weights @ loss.fn(scenarios.payoff(g) - m))

        return _minimize(obj, strategies, tol / 10.0)

    span = float(np.max(np.abs(scenarios.f))) + float(np.sum(np.abs(scenarios.g_matrix), axis=1).max()) * 10.0
    lo, hi = -span - 1.0, span + 1.0
    width = hi - lo
    evals = 0
    for _ in range(200):
        _, j_lo, _, ev_lo = inner(lo)
        _, j_hi, _, ev_hi = inner(hi)
        evals += ev_lo + ev_hi
        if j_lo >= 1.0 >= j_hi:
            break
        width *= 2.0
        if j_lo < 1.0:
            lo -= width
        if j_hi > 1.0:
            hi += width
        if width > 1e30:
            raise InfeasibleError("inner hedged expected loss never crosses the threshold 1")
    else:
        raise InfeasibleError("inner hedged expected loss never crosses the threshold 1")
    best_g = None
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        g_mid, j_mid, _, ev = inner(mid)
        evals += ev
        if j_mid > 1.0:
            lo = mid
        else:
            hi = mid
            best_g = g_mid
    m_star = 0.5 * (lo + hi)
    if best_g is None:
        best_g = inner(m_star)[0]
    return HedgeResult(value=float(m_star), g_star=tuple(np.atleast_1d(best_g).tolist()), restarts_used=1, inner_iterations=evals)


def utility_max(scenarios: ScenarioSet, utility, strategies: StrategySet, tol: float = 1e-8) -> HedgeResult:
    """sup over admissible g of E[U(F + g.G)] for a concave increasing U."""
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    weights = scenarios.weights

    def obj(g):
        return -float(weights @ utility(scenarios.payoff(g)))

    if scenarios.n_options == 0:
        v = -obj(())
        return HedgeResult(value=v, g_star=(), restarts_used=0, inner_iterations=1)
    g, v, restarts, evals = _minimize(obj, strategies, tol)
    return HedgeResult(value=float(-v), g_star=tuple(np.atleast_1d(g).tolist()), restarts_used=restarts, inner_iterations=evals)


def unboundedness_probe(
    scenarios: ScenarioSet,
    risk: RiskSpec,
    direction,
    t_max: float = 1e4,
    steps: int = 41,
) -> ProbeReport:
    """Evaluate rho(F + t (direction.G)) along a geometric ray t in [1, t_max].

    ``diverging`` is set when the values fall by more than one unit per decade
    over the last two decades of the grid.
    """
    direction = np.atleast_1d(np.asarray(direction, dtype=float))
    if direction.size != scenarios.n_options:
        raise ParameterError("direction dimension must match the number of options")
    if not t_max > 1.0:
        raise ParameterError(f"t_max must exceed 1, got {t_max}")
    ts = np.geomspace(1.0, t_max, steps)
    values = []
    for t in ts:
        values.append((float(t), evaluate_risk(risk, scenarios.distribution(t * direction), 1e-9)))
    decades = math.log10(t_max)
    window = min(2.0, decades)
    t_ref = t_max / 10.0**window
    idx_ref = int(np.argmin(np.abs(ts - t_ref)))
    drop = values[idx_ref][1] - values[-1][1]
    span_decades = math.log10(values[-1][0] / values[idx_ref][0])
    diverging = span_decades > 0 and drop > span_decades
    return ProbeReport(values=tuple(values), diverging=diverging)
