"""
F-LSTM: one LSTM per modality, hidden outputs of every frame concatenated
(gaze, lane, object), flattened, then FC-ReLU-FC-sigmoid.

Sigmoid outputs are divided by their sum so the result is a probability
vector that cross-entropy accepts. Rows whose sigmoids all underflow
to zero fall back to the uniform distribution.
"""

import numpy as np

from ..features import GAZE, LANES, OBJECTS
from ..numeric import linear, linear_backward, lstm_backward, lstm_forward, \
    relu, relu_backward, sigmoid, sigmoid_backward
from .base import Model, as_batch

STREAMS = (('gaze', GAZE), ('lane', LANES), ('object', OBJECTS))
# sigmoid sums below this are treated as all-zero rows
MIN_TOTAL = 1e-300


class FLstm(Model):

    def _hidden(self, X):
        p = self.store
        outs, caches = [], []
        for name, sl in STREAMS:
            H, cache = lstm_forward(X[:, :, sl], p['lstm_%s.W' % name],
                                    p['lstm_%s.b' % name])
            outs.append(H)
            caches.append(cache)
        return np.concatenate(outs, axis=-1), caches

    def encode(self, X):
        """Per-frame concatenated hidden outputs, (B, T, 25) by default."""
        X, single = as_batch(X, self.config.seq_len)
        H = self._hidden(X)[0]
        return H[0] if single else H

    def forward(self, X):
        X, _ = as_batch(X, self.config.seq_len)
        p = self.store
        H, lstm_caches = self._hidden(X)
        flat = H.reshape(len(X), -1)
        z1, c1 = linear(flat, p['mlp.fc1.W'], p['mlp.fc1.b'])
        a1, r1 = relu(z1)
        z2, c2 = linear(a1, p['mlp.fc2.W'], p['mlp.fc2.b'])
        s, cs = sigmoid(z2)
        total = s.sum(axis=-1, keepdims=True)
        dead = total < MIN_TOTAL
        total = np.maximum(total, MIN_TOTAL)
        probs = np.where(dead, 1.0 / s.shape[-1], s / total)
        return probs, (H.shape, lstm_caches, c1, r1, c2, cs, probs, total,
                       dead)

    def backward(self, dprobs, cache):
        shape, lstm_caches, c1, r1, c2, cs, probs, total, dead = cache
        ds = (dprobs - np.sum(dprobs * probs, axis=-1, keepdims=True)) / total
        ds = np.where(dead, 0.0, ds)
        dz2 = sigmoid_backward(ds, cs)
        da1, dW, db = linear_backward(dz2, c2)
        self._grad('mlp.fc2.W', dW)
        self._grad('mlp.fc2.b', db)
        dflat, dW, db = linear_backward(relu_backward(da1, r1), c1)
        self._grad('mlp.fc1.W', dW)
        self._grad('mlp.fc1.b', db)
        dH = dflat.reshape(shape)
        offset = 0
        for (name, _), cache_ in zip(STREAMS, lstm_caches):
            width = getattr(self.config, name + '_hidden')
            _, dW, db = lstm_backward(dH[:, :, offset:offset + width], cache_)
            self._grad('lstm_%s.W' % name, dW)
            self._grad('lstm_%s.b' % name, db)
            offset += width
