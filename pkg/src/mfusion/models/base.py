import numpy as np

from ..exceptions import LengthError
from ..features import FRAME_WIDTH
from ..numeric import cross_entropy, cross_entropy_backward


def as_batch(seq, seq_len):
    """(B, T, 32) block from a LabeledSequence, one (T, 32) array or a
    batch. Returns (block, single)."""
    X = np.asarray(getattr(seq, 'frames', seq), dtype=np.float64)
    single = X.ndim == 2
    if single:
        X = X[None]
    if X.ndim != 3 or X.shape[1:] != (seq_len, FRAME_WIDTH):
        raise LengthError("model input must be %d frames of %d features, "
                          "got %s" % (seq_len, FRAME_WIDTH, X.shape[-2:]))
    return X, single


class Model:
    """Forward/backward over one ModelParams instance.

    forward() returns (probs, cache); backward() takes dL/dprobs and adds
    parameter gradients into the store's gradient slots.
    """

    def __init__(self, params):
        self.params = params
        self.config = params.config
        self.store = params.store

    @property
    def arch(self):
        return self.params.arch

    def forward(self, X):
        raise NotImplementedError

    def backward(self, dprobs, cache):
        raise NotImplementedError

    def encode(self, X):
        raise NotImplementedError

    def probs(self, seq):
        X, single = as_batch(seq, self.config.seq_len)
        out = self.forward(X)[0]
        return out[0] if single else out

    def loss_and_grad(self, X, y):
        """Mean cross-entropy of a batch; gradients land in the store."""
        probs, cache = self.forward(X)
        loss, ce = cross_entropy(probs, y)
        self.backward(cross_entropy_backward(ce), cache)
        return loss

    def loss(self, X, y):
        return cross_entropy(self.forward(X)[0], y)[0]

    def _grad(self, path, g):
        self.store.accumulate(path, g)
