"""Probability distributions, reproducible sampling, and empirical measures.

All distributions are immutable after construction.  Sampling uses a
counter-based (Philox) generator keyed by ``(seed, stream)`` so that parallel
replications draw from independent, order-insensitive streams.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, ParameterError, ParseError, SchemaError

_U64 = (1 << 64) - 1

WEIGHT_TOL = 1e-12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream) pair; bitwise reproducible."""
    key = np.array([seed & _U64, stream & _U64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Bernoulli:
    """Two-point law on {0, 1} with success probability ``p``."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"Bernoulli p must be in [0, 1], got {self.p}")

    def as_discrete(self) -> "FiniteDiscrete":
        if self.p == 0.0:
            return FiniteDiscrete((0.0,), (1.0,))
        if self.p == 1.0:
            return FiniteDiscrete((1.0,), (1.0,))
        return FiniteDiscrete((0.0, 1.0), (1.0 - self.p, self.p))

    def mean(self) -> float:
        return self.p

    def describe(self) -> str:
        return f"bernoulli(p={self.p})"


@dataclass(frozen=True)
class ParetoTail:
    """Law with density q * x^-(q+1) on [1, inf); P[X >= t] = t^-q for t >= 1."""

    q: float

    def __post_init__(self):
        if not self.q > 1.0:
            raise ParameterError(f"ParetoTail q must be > 1, got {self.q}")

    def mean(self) -> float:
        return self.q / (self.q - 1.0)

    def describe(self) -> str:
        return f"pareto(q={self.q})"


@dataclass(frozen=True)
class FiniteDiscrete:
    """Finite discrete law; atoms deduplicated and sorted ascending."""

    atoms: tuple
    weights: tuple
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 1 or weights.ndim != 1:
            raise ParameterError("atoms and weights must be one-dimensional")
        if atoms.size == 0:
            raise EmptyInputError("FiniteDiscrete needs at least one atom")
        if atoms.size != weights.size:
            raise ParameterError("atoms and weights must have equal length")
        if not np.all(np.isfinite(atoms)):
            raise ParameterError("atoms must be finite")
        if np.any(weights < 0):
            raise ParameterError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ParameterError(f"weights must sum to 1 within {WEIGHT_TOL}, got {total}")
        # canonical form: sorted unique atoms with merged weights, zero weights dropped
        uniq, inverse = np.unique(atoms, return_inverse=True)
        merged = np.bincount(inverse, weights=weights, minlength=uniq.size)
        keep = merged > 0
        if not keep.any():
            raise ParameterError("all weights are zero")
        uniq, merged = uniq[keep], merged[keep]
        uniq.setflags(write=False)
        merged.setflags(write=False)
        object.__setattr__(self, "atoms", tuple(uniq.tolist()))
        object.__setattr__(self, "weights", tuple(merged.tolist()))
        object.__setattr__(self, "_arrays", (uniq, merged))

    @property
    def atom_array(self) -> np.ndarray:
        return self._arrays[0]

    @property
    def weight_array(self) -> np.ndarray:
        return self._arrays[1]

    def mean(self) -> float:
        return float(self.atom_array @ self.weight_array)

    def max_abs_atom(self) -> float:
        return float(np.max(np.abs(self.atom_array)))

    def shift(self, c: float) -> "FiniteDiscrete":
        return FiniteDiscrete(tuple(a + c for a in self.atoms), self.weights)

    def scale(self, lam: float) -> "FiniteDiscrete":
        return FiniteDiscrete(tuple(lam * a for a in self.atoms), self.weights)

    def as_discrete(self) -> "FiniteDiscrete":
        return self

    def describe(self) -> str:
        return f"discrete({len(self.atoms)} atoms)"


Distribution = Bernoulli | ParetoTail | FiniteDiscrete


@dataclass(frozen=True)
class SampleVector:
    """I.i.d. draws together with their provenance."""

    values: tuple
    source_seed: int
    meta: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size < 1:
            raise EmptyInputError("SampleVector must contain at least one value")
        if not np.all(np.isfinite(values)):
            raise ParameterError("sample values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return int(self.values.size)


def sample(dist: Distribution, n: int, seed: int, stream: int = 0) -> SampleVector:
    """Draw ``n`` i.i.d. observations; deterministic in (dist, n, seed, stream)."""
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    rng = make_rng(seed, stream)
    if isinstance(dist, Bernoulli):
        values = (rng.random(n) < dist.p).astype(float)
    elif isinstance(dist, ParetoTail):
        u = rng.random(n)
        values = (1.0 - u) ** (-1.0 / dist.q)
    elif isinstance(dist, FiniteDiscrete):
        cum = np.cumsum(dist.weight_array)
        idx = np.searchsorted(cum, rng.random(n), side="right")
        idx = np.minimum(idx, len(dist.atoms) - 1)
        values = dist.atom_array[idx]
    else:
        raise ParameterError(f"unknown distribution {dist!r}")
    return SampleVector(values, source_seed=seed, meta=dist.describe())


def empirical(sample_vec: SampleVector | np.ndarray) -> FiniteDiscrete:
    """Empirical measure of a sample: distinct values with multiplicity/N weights."""
    values = sample_vec.values if isinstance(sample_vec, SampleVector) else np.asarray(sample_vec, dtype=float)
    if values.size == 0:
        raise EmptyInputError("cannot build an empirical measure from an empty sample")
    uniq, counts = np.unique(values, return_counts=True)
    weights = counts / values.size
    return FiniteDiscrete(tuple(uniq.tolist()), tuple(weights.tolist()))


def quantile(dist: Distribution, u: float) -> float:
    """Left-continuous generalized inverse CDF: inf{x : CDF(x) >= u}.

    quantile(0) is the essential infimum.
    """
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"quantile level must be in [0, 1), got {u}")
    if isinstance(dist, ParetoTail):
        if u == 0.0:
            return 1.0
        return float((1.0 - u) ** (-1.0 / dist.q))
    disc = dist.as_discrete() if isinstance(dist, Bernoulli) else dist
    if not isinstance(disc, FiniteDiscrete):
        raise ParameterError(f"unknown distribution {dist!r}")
    cum = np.cumsum(disc.weight_array)
    if u == 0.0:
        return float(disc.atom_array[0])
    k = int(np.searchsorted(cum, u, side="left"))
    k = min(k, len(disc.atoms) - 1)
    return float(disc.atom_array[k])


def load_samples(path, column) -> SampleVector:
    """Read one column of a headered CSV file as a sample vector.

    ``column`` is either a header name or a zero-based index.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot open sample file {path!r}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"sample file {path!r} is empty")
        if isinstance(column, int):
            if not 0 <= column < len(header):
                raise SchemaError(f"column index {column} out of range for {len(header)} columns")
            col = column
        else:
            if column not in header:
                raise SchemaError(f"column {column!r} not found in header {header}")
            col = header.index(column)
        values = []
        for row_no, row in enumerate(reader, start=2):
            if col >= len(row) or row[col].strip() == "":
                raise ParseError(f"row {row_no}: empty cell in selected column")
            try:
                x = float(row[col])
            except ValueError:
                raise ParseError(f"row {row_no}: cannot parse {row[col]!r} as a real number")
            if not math.isfinite(x):
                raise ParseError(f"row {row_no}: non-finite value {row[col]!r}")
            values.append(x)
    if not values:
        raise EmptyInputError(f"no data rows in {path!r}")
    return SampleVector(np.asarray(values), source_seed=0, meta=f"csv({path})")


def dist_from_json(obj: dict) -> Distribution:
    """Build a distribution from its JSON descriptor."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"distribution descriptor must be an object with a 'kind': {obj!r}")
    kind = obj["kind"]
    known = {
        "bernoulli": {"kind", "p"},
        "pareto": {"kind", "q"},
        "discrete": {"kind", "atoms", "weights"},
        "empirical": {"kind", "sample"},
    }
    if kind not in known:
        raise SchemaError(f"unknown distribution kind {kind!r}")
    extra = set(obj) - known[kind]
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)} in {kind!r} distribution")
    if kind == "bernoulli":
        return Bernoulli(float(obj["p"]))
    if kind == "pareto":
        return ParetoTail(float(obj["q"]))
    if kind == "discrete":
        return FiniteDiscrete(tuple(obj["atoms"]), tuple(obj["weights"]))
    values = np.asarray(obj["sample"], dtype=float)
    return empirical(values)


def dist_to_json(dist: Distribution) -> dict:
    if isinstance(dist, Bernoulli):
        return {"kind": "bernoulli", "p": dist.p}
    if isinstance(dist, ParetoTail):
        return {"kind": "pareto", "q": dist.q}
    if isinstance(dist, FiniteDiscrete):
        return {"kind": "discrete", "atoms": list(dist.atoms), "weights": list(dist.weights)}
    raise SchemaError(f"cannot serialize {dist!r}")
