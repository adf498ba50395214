"""Numpy implementation of the feed-forward regressor kernels.

This is the fallback backend: always available, used when the compiled
extension is missing. Both backends implement the same recipe (full-batch
gradient descent on mean squared error, tanh hidden layer); they may differ
in the last few ulps because summation order differs.
"""

import numpy as np

BACKEND_NAME = "numpy"


def gd_train(X, y, w1, b1, w2, b2, lr, epochs):
    """Run full-batch gradient descent, returning trained parameters.

    X: (n, d) standardized inputs; y: (n,) standardized targets.
    Parameters are not modified in place. Returns (w1, b1, w2, b2, losses)
    where losses[k] is the MSE evaluated before the k-th update.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w1 = w1.copy()
    b1 = b1.copy()
    w2 = w2.copy()
    b2 = float(b2)
    n = X.shape[0]
    losses = np.empty(epochs, dtype=np.float64)

    for k in range(epochs):
        z = X @ w1 + b1
        h = np.tanh(z)
        pred = h @ w2 + b2
        err = pred - y
        losses[k] = float(err @ err) / n

        g = (2.0 / n) * err
        gw2 = h.T @ g
        gb2 = float(np.sum(g))
        dz = np.outer(g, w2) * (1.0 - h * h)
        gw1 = X.T @ dz
        gb1 = dz.sum(axis=0)

        w1 -= lr * gw1
        b1 -= lr * gb1
        w2 -= lr * gw2
        b2 -= lr * gb2

    return w1, b1, w2, b2, losses


def forward_batch(X, w1, b1, w2, b2):
    """Predictions for a batch of standardized inputs."""
    return np.tanh(X @ w1 + b1) @ w2 + b2


def forward_one(x, w1, b1, w2, b2):
    """Prediction for a single standardized input vector."""
    return float(np.tanh(x @ w1 + b1) @ w2 + b2)
