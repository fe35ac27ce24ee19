"""
Forward primitives and their hand-derived reverse passes.

Every forward returns ``(out, cache)``; the matching ``*_backward`` takes
the upstream gradient and the cache and returns gradients for each input
in argument order. Leading axes are treated as batch axes throughout, so
the same functions serve single vectors and (batch, time, feature) blocks.
"""

import numpy as np

from ..exceptions import DimensionError, NormalizationError, ValidationError
from .tensor import check_shape

PROB_FLOOR = 1e-12


def linear(x, W, b):
    """y = W x + b over the last axis of x."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if W.ndim != 2 or x.shape[-1:] != W.shape[1:] or b.shape != W.shape[:1]:
        raise DimensionError("linear(x, W, b) with W %s and b %s"
                             % (W.shape, b.shape), W.shape[1:], x.shape)
    return x @ W.T + b, (x, W)


def linear_backward(dy, cache):
    x, W = cache
    n_out, n_in = W.shape
    dx = dy @ W
    dW = dy.reshape(-1, n_out).T @ x.reshape(-1, n_in)
    db = dy.reshape(-1, n_out).sum(axis=0)
    return dx, dW, db


def relu(x):
    return np.maximum(x, 0.0), x


def relu_backward(dy, cache):
    return dy * (cache > 0)


def sigmoid(x):
    # exp(-|x|) never overflows
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out, out


def sigmoid_backward(dy, cache):
    return dy * cache * (1.0 - cache)


def tanh(x):
    out = np.tanh(x)
    return out, out


def tanh_backward(dy, cache):
    return dy * (1.0 - cache * cache)


def softmax(x):
    """Softmax over the last axis, stabilised by max subtraction."""
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(x - np.max(x, axis=-1, keepdims=True))
    out = e / np.sum(e, axis=-1, keepdims=True)
    return out, out


def softmax_backward(dy, cache):
    y = cache
    return y * (dy - np.sum(dy * y, axis=-1, keepdims=True))


def layer_norm(x, gamma, beta, eps=1e-5):
    mean = np.mean(x, axis=-1, keepdims=True)
    var = np.var(x, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean) * inv
    return gamma * xhat + beta, (xhat, inv, gamma)


def layer_norm_backward(dy, cache):
    xhat, inv, gamma = cache
    d = xhat.shape[-1]
    dgamma = np.sum((dy * xhat).reshape(-1, d), axis=0)
    dbeta = np.sum(dy.reshape(-1, d), axis=0)
    dxhat = dy * gamma
    dx = inv * (dxhat - np.mean(dxhat, axis=-1, keepdims=True)
                - xhat * np.mean(dxhat * xhat, axis=-1, keepdims=True))
    return dx, dgamma, dbeta


def lstm_cell(x, h, c, W, b):
    """One LSTM step.

    W stacks the input, forget, cell and output gate matrices (in that
    order) into shape (4*n_h, n_in + n_h); b has shape (4*n_h,).
    """
    n_h = h.shape[-1]
    if W.shape != (4 * n_h, x.shape[-1] + n_h) or b.shape != (4 * n_h,):
        raise DimensionError("lstm_cell weights",
                             (4 * n_h, x.shape[-1] + n_h), W.shape)
    check_shape(c, h.shape, "lstm_cell cell state")
    xh = np.concatenate([x, h], axis=-1)
    z = xh @ W.T + b
    i = sigmoid(z[..., :n_h])[0]
    f = sigmoid(z[..., n_h:2 * n_h])[0]
    g = np.tanh(z[..., 2 * n_h:3 * n_h])
    o = sigmoid(z[..., 3 * n_h:])[0]
    c_new = f * c + i * g
    tc = np.tanh(c_new)
    h_new = o * tc
    return (h_new, c_new), (xh, c, i, f, g, o, tc, W)


def lstm_cell_backward(dh, dc, cache):
    """Returns dx, dh_prev, dc_prev, dW, db."""
    xh, c_prev, i, f, g, o, tc, W = cache
    n_h = i.shape[-1]
    do = dh * tc
    dc = dc + dh * o * (1.0 - tc * tc)
    di = dc * g
    dg = dc * i
    df = dc * c_prev
    dz = np.concatenate([di * i * (1.0 - i),
                         df * f * (1.0 - f),
                         dg * (1.0 - g * g),
                         do * o * (1.0 - o)], axis=-1)
    dW = dz.reshape(-1, 4 * n_h).T @ xh.reshape(-1, xh.shape[-1])
    db = dz.reshape(-1, 4 * n_h).sum(axis=0)
    dxh = dz @ W
    n_in = xh.shape[-1] - n_h
    return dxh[..., :n_in], dxh[..., n_in:], dc * f, dW, db


def lstm_forward(X, W, b):
    """Run an LSTM from zero state over X of shape (batch, T, n_in).

    Returns the hidden output at every step, shape (batch, T, n_h).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise DimensionError("lstm input", (None, None, None), X.shape)
    B, T, _ = X.shape
    n_h = W.shape[0] // 4
    h = np.zeros((B, n_h))
    c = np.zeros((B, n_h))
    H = np.empty((B, T, n_h))
    caches = []
    for t in range(T):
        (h, c), cache = lstm_cell(X[:, t], h, c, W, b)
        H[:, t] = h
        caches.append(cache)
    return H, (caches, X.shape)


def lstm_backward(dH, cache):
    """Backpropagation through time; returns dX, dW, db."""
    caches, shape = cache
    B, T, n_in = shape
    n_h = dH.shape[-1]
    dX = np.empty(shape)
    dW = np.zeros((4 * n_h, n_in + n_h))
    db = np.zeros(4 * n_h)
    dh_next = np.zeros((B, n_h))
    dc_next = np.zeros((B, n_h))
    for t in reversed(range(T)):
        dx, dh_next, dc_next, dW_t, db_t = lstm_cell_backward(
            dH[:, t] + dh_next, dc_next, caches[t])
        dX[:, t] = dx
        dW += dW_t
        db += db_t
    return dX, dW, db


def self_attention(X, Wq, bq, Wk, bk, Wv, bv, Wo, bo, n_heads):
    """Multi-head scaled dot-product self-attention over X (..., T, d).

    Returns the output-projected concatenation of heads; the attention
    weights (..., n_heads, T, T) sit in cache[-1].
    """
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[-1]
    if n_heads < 1 or d % n_heads:
        raise ValidationError("model width %d is not divisible by %d heads"
                              % (d, n_heads))
    squeeze = X.ndim == 2
    if squeeze:
        X = X[None]
    B, T, _ = X.shape
    dk = d // n_heads
    scale = 1.0 / np.sqrt(dk)

    Q, cq = linear(X, Wq, bq)
    K, ck = linear(X, Wk, bk)
    V, cv = linear(X, Wv, bv)

    def heads(M):
        return M.reshape(B, T, n_heads, dk).transpose(0, 2, 1, 3)

    Qh, Kh, Vh = heads(Q), heads(K), heads(V)
    A = softmax(Qh @ Kh.transpose(0, 1, 3, 2) * scale)[0]
    Oh = A @ Vh
    O = Oh.transpose(0, 2, 1, 3).reshape(B, T, d)
    out, co = linear(O, Wo, bo)
    if squeeze:
        out = out[0]
    return out, (squeeze, n_heads, scale, cq, ck, cv, co, Qh, Kh, Vh, A)


def self_attention_backward(dout, cache):
    """Returns dX, dWq, dbq, dWk, dbk, dWv, dbv, dWo, dbo."""
    squeeze, n_heads, scale, cq, ck, cv, co, Qh, Kh, Vh, A = cache
    if squeeze:
        dout = dout[None]
    B, T, d = dout.shape
    dk = d // n_heads

    dO, dWo, dbo = linear_backward(dout, co)
    dOh = dO.reshape(B, T, n_heads, dk).transpose(0, 2, 1, 3)
    dA = dOh @ Vh.transpose(0, 1, 3, 2)
    dVh = A.transpose(0, 1, 3, 2) @ dOh
    dS = softmax_backward(dA, A) * scale
    dQh = dS @ Kh
    dKh = dS.transpose(0, 1, 3, 2) @ Qh

    def merge(Mh):
        return Mh.transpose(0, 2, 1, 3).reshape(B, T, d)

    dXq, dWq, dbq = linear_backward(merge(dQh), cq)
    dXk, dWk, dbk = linear_backward(merge(dKh), ck)
    dXv, dWv, dbv = linear_backward(merge(dVh), cv)
    dX = dXq + dXk + dXv
    if squeeze:
        dX = dX[0]
    return dX, dWq, dbq, dWk, dbk, dWv, dbv, dWo, dbo


def attention_weights(cache):
    return cache[-1]


def cross_entropy(probs, labels):
    """Mean of -log probs[label]; probs has shape (5,) or (batch, 5).

    Probabilities are clamped at 1e-12 before the log.
    """
    probs = np.asarray(probs, dtype=np.float64)
    single = probs.ndim == 1
    P = probs[None] if single else probs
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if P.ndim != 2 or y.shape != (P.shape[0],):
        raise DimensionError("cross_entropy labels", (P.shape[0],), y.shape)
    if np.any(y < 0) or np.any(y >= P.shape[1]):
        raise ValidationError("label out of range 0..%d" % (P.shape[1] - 1))
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-6):
        raise NormalizationError(
            "probabilities must be non-negative and sum to 1 +- 1e-6")
    rows = np.arange(P.shape[0])
    picked = np.maximum(P[rows, y], PROB_FLOOR)
    loss = float(np.mean(-np.log(picked)))
    return loss, (P.shape, rows, y, picked, single)


def cross_entropy_backward(cache, dloss=1.0):
    shape, rows, y, picked, single = cache
    dP = np.zeros(shape)
    dP[rows, y] = -dloss / (shape[0] * picked)
    return dP[0] if single else dP


def sinusoidal_encoding(length, width, base=10000.0):
    """Interleaved sin/cos table of shape (length, width)."""
    pe = np.zeros((length, width))
    position = np.arange(length)[:, None]
    div = np.exp(np.arange(0, width, 2) * -(np.log(base) / width))
    pe[:, 0::2] = np.sin(position * div)
    pe[:, 1::2] = np.cos(position * div[:width // 2])
    return pe
