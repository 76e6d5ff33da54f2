"""Shared sampling helpers for the test suite."""

import numpy as np
import pytest

from definetti import LeggedOperator


def rand_psd(n, rng, floor=0.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return g @ g.conj().T + floor * np.eye(n)


def rand_hermitian(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def random_separable(rng, max_terms=5):
    """Convex combination of <= max_terms product PSD elements on 2 (x) 2,
    rescaled so the largest entry is 1."""
    nterms = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(nterms))
    mat = sum(
        w * np.kron(rand_psd(2, rng), rand_psd(2, rng)) for w, _ in zip(weights, range(nterms))
    )
    mat = mat / np.abs(mat).max()
    return LeggedOperator(mat, (2, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
