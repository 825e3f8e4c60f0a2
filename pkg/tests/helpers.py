"""Shared builders for random test inputs."""
import numpy as np

from riskrates import FiniteDiscrete, make_rng


def random_discrete(rng: np.random.Generator, max_atoms: int = 12, spread: float = 5.0) -> FiniteDiscrete:
    """A random finite discrete law with distinct sorted atoms."""
    k = int(rng.integers(2, max_atoms + 1))
    atoms = np.sort(rng.uniform(-spread, spread, size=k))
    while np.any(np.diff(atoms) < 1e-9):
        atoms = np.sort(rng.uniform(-spread, spread, size=k))
    w = rng.random(k) + 0.05
    w = w / w.sum()
    return FiniteDiscrete(tuple(atoms.tolist()), tuple(w.tolist()))


def data_rng(tag: int = 0) -> np.random.Generator:
    """Deterministic generator for test data, independent of library streams."""
    return make_rng(0xBADC0FFEE, stream=tag)
