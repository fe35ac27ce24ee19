"""
F-TF: per-modality Linear-ReLU-Linear projections plus a sinusoidal
position table, concatenated into one token per frame (gaze, object, lane),
one post-norm encoder block, flatten, and an MLP head with softmax.

    x1 = LN1(x + attn(x))
    x2 = LN2(x1 + FF(x1))
"""

import numpy as np

from ..features import GAZE, LANES, OBJECTS
from ..numeric import layer_norm, layer_norm_backward, linear, \
    linear_backward, relu, relu_backward, self_attention, \
    self_attention_backward, sinusoidal_encoding, softmax, softmax_backward
from .base import Model, as_batch

TOKENS = (('gaze', GAZE), ('object', OBJECTS), ('lane', LANES))
ATTN = ('attn.Wq', 'attn.bq', 'attn.Wk', 'attn.bk', 'attn.Wv', 'attn.bv',
        'attn.Wo', 'attn.bo')


class FTf(Model):

    def __init__(self, params):
        Model.__init__(self, params)
        self.widths = [getattr(self.config, name + '_latent')
                       for name, _ in TOKENS]
        self.position = [sinusoidal_encoding(self.config.seq_len, w)
                         for w in self.widths]

    def _project(self, name, x):
        p = self.store
        pre = 'proj_%s.' % name
        h, c1 = linear(x, p[pre + 'fc1.W'], p[pre + 'fc1.b'])
        a, r = relu(h)
        out, c2 = linear(a, p[pre + 'fc2.W'], p[pre + 'fc2.b'])
        c3 = None
        if self.config.extra_projection:
            out, c3 = linear(out, p[pre + 'out.W'], p[pre + 'out.b'])
        return out, (c1, r, c2, c3)

    def _project_backward(self, name, dout, cache):
        c1, r, c2, c3 = cache
        pre = 'proj_%s.' % name
        if c3 is not None:
            dout, dW, db = linear_backward(dout, c3)
            self._grad(pre + 'out.W', dW)
            self._grad(pre + 'out.b', db)
        da, dW, db = linear_backward(dout, c2)
        self._grad(pre + 'fc2.W', dW)
        self._grad(pre + 'fc2.b', db)
        _, dW, db = linear_backward(relu_backward(da, r), c1)
        self._grad(pre + 'fc1.W', dW)
        self._grad(pre + 'fc1.b', db)

    def _encode(self, X):
        p = self.store
        parts, proj_caches = [], []
        for (name, sl), pe in zip(TOKENS, self.position):
            out, cache = self._project(name, X[:, :, sl])
            if self.config.positional_encoding:
                out = out + pe
            parts.append(out)
            proj_caches.append(cache)
        x = np.concatenate(parts, axis=-1)

        att, ca = self_attention(x, *[p[k] for k in ATTN],
                                 n_heads=self.config.n_heads)
        x1, cln1 = layer_norm(x + att, p['ln1.gamma'], p['ln1.beta'])
        f1, cf1 = linear(x1, p['ff.fc1.W'], p['ff.fc1.b'])
        fa, rf = relu(f1)
        f2, cf2 = linear(fa, p['ff.fc2.W'], p['ff.fc2.b'])
        x2, cln2 = layer_norm(x1 + f2, p['ln2.gamma'], p['ln2.beta'])
        return x2, (proj_caches, ca, cln1, cf1, rf, cf2, cln2)

    def encode(self, X):
        """Token sequence after the encoder block, (B, T, token_dim)."""
        X, single = as_batch(X, self.config.seq_len)
        tokens = self._encode(X)[0]
        return tokens[0] if single else tokens

    def attention(self, X):
        """Attention weights (B, n_heads, T, T) of the encoder block."""
        X, _ = as_batch(X, self.config.seq_len)
        return self._encode(X)[1][1][-1]

    def forward(self, X):
        X, _ = as_batch(X, self.config.seq_len)
        p = self.store
        tokens, enc_cache = self._encode(X)
        flat = tokens.reshape(len(X), -1)
        h, ch = linear(flat, p['head.fc1.W'], p['head.fc1.b'])
        a, rh = relu(h)
        logits, co = linear(a, p['head.fc2.W'], p['head.fc2.b'])
        probs, cs = softmax(logits)
        return probs, (tokens.shape, enc_cache, ch, rh, co, cs)

    def backward(self, dprobs, cache):
        shape, enc_cache, ch, rh, co, cs = cache
        proj_caches, ca, cln1, cf1, rf, cf2, cln2 = enc_cache

        da, dW, db = linear_backward(softmax_backward(dprobs, cs), co)
        self._grad('head.fc2.W', dW)
        self._grad('head.fc2.b', db)
        dflat, dW, db = linear_backward(relu_backward(da, rh), ch)
        self._grad('head.fc1.W', dW)
        self._grad('head.fc1.b', db)

        du2, dg, dbeta = layer_norm_backward(dflat.reshape(shape), cln2)
        self._grad('ln2.gamma', dg)
        self._grad('ln2.beta', dbeta)
        dfa, dW, db = linear_backward(du2, cf2)
        self._grad('ff.fc2.W', dW)
        self._grad('ff.fc2.b', db)
        dx1, dW, db = linear_backward(relu_backward(dfa, rf), cf1)
        self._grad('ff.fc1.W', dW)
        self._grad('ff.fc1.b', db)
        dx1 = dx1 + du2

        du1, dg, dbeta = layer_norm_backward(dx1, cln1)
        self._grad('ln1.gamma', dg)
        self._grad('ln1.beta', dbeta)
        grads = self_attention_backward(du1, ca)
        for path, g in zip(ATTN, grads[1:]):
            self._grad(path, g)
        dx = du1 + grads[0]

        offset = 0
        for (name, _), width, pcache in zip(TOKENS, self.widths,
                                            proj_caches):
            self._project_backward(name, dx[:, :, offset:offset + width],
                                   pcache)
            offset += width
