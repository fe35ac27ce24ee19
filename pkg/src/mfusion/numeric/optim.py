import logging

import numpy as np

from ..exceptions import MissingGradientError

log = logging.getLogger(__name__)


def adam_step(params, moments, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
              t=1):
    """Apply one bias-corrected Adam update to every slot of `params`.

    `moments` maps path -> (m, v) and is updated in place; missing entries
    start at zero. Gradient slots are zeroed afterwards.
    """
    for path in params.paths():
        if not params.has_grad(path):
            raise MissingGradientError("no gradient slot for %r" % path)
    for path in params.paths():
        g = params.grad(path)
        m, v = moments.get(path, (None, None))
        if m is None:
            m = np.zeros_like(g)
            v = np.zeros_like(g)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        moments[path] = (m, v)
        mhat = m / (1.0 - beta1 ** t)
        vhat = v / (1.0 - beta2 ** t)
        params[path] = params[path] - lr * mhat / (np.sqrt(vhat) + eps)
    params.zero_grad()
    return params


class Adam:
    """Adam with its moment state and step counter."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.moments = {}

    def step(self, params):
        self.t += 1
        return adam_step(params, self.moments, self.lr, self.beta1,
                         self.beta2, self.eps, self.t)
