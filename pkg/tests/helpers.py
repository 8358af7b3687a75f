"""Shared construction helpers for the test suite."""

import numpy as np


def random_spd(rng, p, jitter=1.0):
    """Well-conditioned random SPD matrix."""
    a = rng.standard_normal((p, p))
    return a @ a.T / p + jitter * np.eye(p)


def precision_for_graph(p, edges, rng=None, low=0.3, high=0.6):
    """SPD precision matrix whose off-diagonal support is exactly ``edges``.

    Nonzero entries get random signed magnitudes in [low, high]; the
    diagonal is the absolute row sum plus one (strict diagonal dominance).
    """
    theta = np.zeros((p, p))
    for i, j in edges:
        if rng is None:
            value = 0.5
        else:
            value = rng.uniform(low, high) * (1 if rng.random() < 0.5 else -1)
        theta[i, j] = theta[j, i] = value
    np.fill_diagonal(theta, np.abs(theta).sum(axis=1) + 1.0)
    return theta


def chain_edges(p):
    return [(i, i + 1) for i in range(p - 1)]


def star_edges(p):
    return [(0, i) for i in range(1, p)]


def cycle_edges(p):
    return [(i, (i + 1) % p) for i in range(p)]
