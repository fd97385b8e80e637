"""Multinomial logistic regression fitted by full-batch gradient descent.

Objective: mean softmax cross-entropy plus ``(l2 / 2) * ||W||_F^2``; biases
are not penalized. Each step uses Armijo backtracking, starting from twice
the previously accepted step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax

from ..errors import NonFiniteError

ARMIJO_C = 0.5
SHRINK = 0.5
MIN_STEP = 1e-20


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray  # (K, N)
    biases: np.ndarray  # (K,)
    n_iter: int = 0
    converged: bool = False
    final_loss: float = float("nan")

    def decision_function(self, Z: np.ndarray) -> np.ndarray:
        return Z @ self.weights.T + self.biases

    def predict(self, Z: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision_function(Z), axis=1)


def loss_and_grad(
    W: np.ndarray, b: np.ndarray, Z: np.ndarray, Y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Objective value and gradients w.r.t. ``W`` and ``b``; ``Y`` is one-hot (n, K)."""
    n = Z.shape[0]
    logits = Z @ W.T + b
    logp = log_softmax(logits, axis=1)
    loss = -np.sum(Y * logp) / n + 0.5 * l2 * np.sum(W * W)
    R = (np.exp(logp) - Y) / n
    return float(loss), R.T @ Z + l2 * W, R.sum(axis=0)


def _loss(W, b, Z, Y, l2) -> float:
    logp = log_softmax(Z @ W.T + b, axis=1)
    return float(-np.sum(Y * logp) / Z.shape[0] + 0.5 * l2 * np.sum(W * W))


def fit_multinomial_logistic(
    Z: np.ndarray,
    y: np.ndarray,
    l2_strength: float = 1e-6,
    max_iters: int = 2000,
    tol: float = 1e-6,
    num_classes: int | None = None,
    accelerated: bool = True,
) -> LinearModel:
    """Minimize the penalized cross-entropy from a zero start.

    Features are centred internally (an exact reparametrization, since the
    bias is not penalized). Each iteration takes a gradient step from an extrapolated point, with
    Nesterov momentum and Armijo backtracking. Momentum is reset whenever the
    objective goes up. ``accelerated=False`` gives plain gradient descent.
    Stops when the gradient's max-norm drops below ``tol`` or after
    ``max_iters`` steps. Raises :class:`NonFiniteError` if the loss stops
    being finite.
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if not np.all(np.isfinite(Z)):
        raise NonFiniteError("features contain non-finite values")
    if l2_strength < 0:
        raise ValueError("l2_strength must be non-negative")
    K = int(num_classes) if num_classes is not None else int(y.max()) + 1
    n, N = Z.shape
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0
    # unpenalized bias absorbs the column means, so centering leaves the
    # minimizer unchanged and removes the dominant Hessian direction
    offset = Z.mean(axis=0)
    Z = Z - offset
    W = np.zeros((K, N))
    b = np.zeros(K)
    W_prev, b_prev = W, b
    loss = _loss(W, b, Z, Y, l2_strength)
    step, momentum = 1.0, 1.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        # extrapolated point
        beta = (momentum - 1.0) / (momentum + 2.0) if accelerated else 0.0
        V, c = W + beta * (W - W_prev), b + beta * (b - b_prev)
        v_loss, gW, gb = loss_and_grad(V, c, Z, Y, l2_strength)
        if not np.isfinite(v_loss):
            raise NonFiniteError("loss diverged")
        if max(np.abs(gW).max(), np.abs(gb).max()) < tol:
            W, b = V, c
            loss = v_loss
            converged = True
            break
        sq = np.sum(gW * gW) + np.sum(gb * gb)
        step *= 2.0
        while True:
            W_new, b_new = V - step * gW, c - step * gb
            new_loss = _loss(W_new, b_new, Z, Y, l2_strength)
            if np.isfinite(new_loss) and new_loss <= v_loss - ARMIJO_C * step * sq:
                break
            step *= SHRINK
            if step < MIN_STEP:
                raise NonFiniteError("line search failed to find a finite descent step")
        if new_loss > loss:
            momentum = 1.0
        else:
            momentum += 1.0
        W_prev, b_prev = W, b
        W, b, loss = W_new, b_new, new_loss
    return LinearModel(W, b - W @ offset, n_iter=it, converged=converged, final_loss=loss)
