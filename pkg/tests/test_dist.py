"""Distribution containers, sampling determinism, and quantile behaviour."""
import numpy as np
import pytest

from riskrates import (
    Bernoulli,
    FiniteDiscrete,
    ParetoTail,
    empirical,
    load_samples,
    make_rng,
    quantile,
    sample,
)
from riskrates.dist import dist_from_json, dist_to_json
from riskrates.errors import EmptyInputError, ParameterError, ParseError, SchemaError

from helpers import random_discrete, data_rng


def test_make_rng_streams_are_reproducible_and_distinct():
    a = make_rng(7, stream=1).random(8)
    b = make_rng(7, stream=1).random(8)
    c = make_rng(7, stream=2).random(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_determinism_across_calls():
    for dist in (Bernoulli(0.3), ParetoTail(2.0), FiniteDiscrete((0.0, 1.0, 3.0), (0.2, 0.5, 0.3))):
        s1 = sample(dist, 1000, seed=42, stream=5)
        s2 = sample(dist, 1000, seed=42, stream=5)
        assert np.array_equal(s1.values, s2.values)
        s3 = sample(dist, 1000, seed=43, stream=5)
        assert not np.array_equal(s1.values, s3.values)


def test_empirical_mean_matches_sample_mean():
    for stream in range(5):
        s = sample(ParetoTail(2.0), 2000, seed=11, stream=stream)
        emp = empirical(s)
        assert abs(emp.mean() - float(np.mean(s.values))) < 1e-12
        assert abs(sum(emp.weights) - 1.0) < 1e-12


def test_quantile_monotone_on_fine_grid():
    us = np.linspace(0.0, 0.999, 1000)
    for dist in (Bernoulli(0.3), ParetoTail(1.5), random_discrete(data_rng(1))):
        qs = [quantile(dist, u) for u in us]
        assert all(a <= b + 1e-15 for a, b in zip(qs, qs[1:]))


def test_quantile_endpoints():
    disc = FiniteDiscrete((-2.0, 0.0, 5.0), (0.25, 0.5, 0.25))
    assert quantile(disc, 0.0) == -2.0  # essential infimum
    assert quantile(disc, 0.9) == 5.0
    assert quantile(Bernoulli(0.3), 0.5) == 0.0
    assert quantile(ParetoTail(2.0), 0.75) == 2.0


def test_pareto_tail_fractions_match_power_law():
    n = 200_000
    s = sample(ParetoTail(2.0), n, seed=3, stream=0)
    for t in (1.0, 2.0, 4.0):
        p = t**-2.0
        se = np.sqrt(p * (1 - p) / n) if 0 < p < 1 else 1.0 / n
        frac = float(np.mean(s.values >= t))
        assert abs(frac - p) <= 5 * se + 1e-12


def test_finite_discrete_canonicalization():
    d = FiniteDiscrete((3.0, 1.0, 3.0, 2.0), (0.1, 0.4, 0.2, 0.3))
    assert d.atoms == (1.0, 2.0, 3.0)
    assert abs(d.weights[2] - 0.3) < 1e-15  # duplicates merged
    d0 = FiniteDiscrete((0.0, 1.0, 2.0), (0.5, 0.0, 0.5))
    assert d0.atoms == (0.0, 2.0)  # zero-weight atoms dropped


def test_finite_discrete_rejects_bad_weights():
    with pytest.raises(ParameterError):
        FiniteDiscrete((0.0, 1.0), (0.6, 0.6))
    with pytest.raises(ParameterError):
        FiniteDiscrete((0.0, 1.0), (-0.1, 1.1))
    with pytest.raises(EmptyInputError):
        FiniteDiscrete((), ())


def test_shift_and_scale():
    d = FiniteDiscrete((0.0, 1.0), (0.7, 0.3))
    assert d.shift(2.0).atoms == (2.0, 3.0)
    assert d.scale(-1.0).atoms == (-1.0, 0.0)
    assert abs(d.shift(2.0).mean() - (d.mean() + 2.0)) < 1e-15


def test_bernoulli_as_discrete():
    d = Bernoulli(0.3).as_discrete()
    assert d.atoms == (0.0, 1.0)
    assert d.weights == (0.7, 0.3)
    assert Bernoulli(0.0).as_discrete().atoms == (0.0,)


def test_dist_json_round_trip():
    for dist in (Bernoulli(0.25), ParetoTail(3.0), FiniteDiscrete((0.0, 2.0), (0.5, 0.5))):
        assert dist_from_json(dist_to_json(dist)) == dist
    with pytest.raises(SchemaError):
        dist_from_json({"kind": "bernoulli", "p": 0.5, "bogus": 1})
    with pytest.raises(SchemaError):
        dist_from_json({"kind": "mystery"})


def test_load_samples_round_trip_and_errors(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("value\n1.5\n2.5\n0.5\n", encoding="utf-8")
    s = load_samples(path, 0)
    assert np.array_equal(s.values, [1.5, 2.5, 0.5])
    bad = tmp_path / "bad.csv"
    bad.write_text("value\n1.5\nnot-a-number\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_samples(bad, 0)
    assert "row 3" in str(err.value)  # failing row is named
