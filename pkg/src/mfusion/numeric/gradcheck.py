"""
Central finite-difference gradient checks.
"""

import numpy as np

DEFAULT_STEP = 1e-5


def numerical_gradient(f, x, step=DEFAULT_STEP):
    """Central differences of scalar f() with respect to array x.

    x is perturbed in place and restored element by element, so f must
    read x (or a view of it) each time it is called.
    """
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=['multi_index'])
    for _ in it:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + step
        fp = f()
        x[idx] = orig - step
        fm = f()
        x[idx] = orig
        grad[idx] = (fp - fm) / (2.0 * step)
    return grad


def max_relative_error(analytic, numeric):
    """max |a - n| scaled by the largest gradient magnitude of either."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(np.max(np.abs(analytic), initial=0.0),
                np.max(np.abs(numeric), initial=0.0), 1e-12)
    return float(np.max(np.abs(analytic - numeric), initial=0.0) / scale)


def check_store(loss, store, step=DEFAULT_STEP):
    """Compare the gradients in `store` with finite differences of loss().

    The caller fills store gradients for the current parameters before
    calling. Returns {path: max relative error}, every path scaled by the
    largest gradient magnitude over the whole store (slots whose true
    gradient is zero, such as key biases under softmax, would otherwise
    compare pure rounding noise against itself).
    """
    analytic = {p: store.grad(p).copy() for p in store.paths()}
    numeric = {p: numerical_gradient(loss, store[p], step)
               for p in store.paths()}
    scale = max([np.max(np.abs(a), initial=0.0) for a in analytic.values()] +
                [np.max(np.abs(n), initial=0.0) for n in numeric.values()] +
                [1e-12])
    return {p: float(np.max(np.abs(analytic[p] - numeric[p]), initial=0.0)
                     / scale)
            for p in store.paths()}
