"""Random ReLU features ``z(x) = max(U x, 0)`` with rows of ``U`` uniform on the sphere."""
from __future__ import annotations

import numpy as np


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sphere_directions(N: int, d: int, seed) -> np.ndarray:
    """``N`` directions drawn uniformly from the unit sphere in ``R^d``.

    Rows are drawn in order, so the first ``N`` rows for a given seed do not
    depend on how many more are requested.
    """
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    G = _rng(seed).standard_normal((N, d))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def relu_features(X: np.ndarray, U: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(X, dtype=np.float64) @ U.T, 0.0)


def random_relu_features(X, N: int, seed) -> np.ndarray:
    """Map ``X`` (n x d) to ``N`` random ReLU features."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return relu_features(X, sphere_directions(N, X.shape[1], seed))
