"""Forward/backward kernels for the recurrent encoder-decoder.

All functions work on single (unbatched) vectors or on sequences stacked as
rows.  Backward functions take the cache returned by the matching forward
function and accumulate parameter gradients into the ``grads`` dict in place.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softmax(x):
    e = np.exp(x - x.max())
    return e / e.sum()


def log_softmax(x):
    z = x - x.max()
    return z - np.log(np.exp(z).sum())


def softmax_backward(p, dp):
    """Gradient wrt the logits of ``p = softmax(z)`` given ``dL/dp``."""
    return p * (dp - p @ dp)


# --- LSTM --------------------------------------------------------------------

def lstm_cell(Wx, Wh, b, x, h, c):
    z = Wx @ x + Wh @ h + b
    return _lstm_gates(z, x, h, c)


def _lstm_gates(z, x, h, c):
    H = h.shape[0]
    i = sigmoid(z[:H])
    f = sigmoid(z[H:2 * H])
    o = sigmoid(z[2 * H:3 * H])
    g = np.tanh(z[3 * H:])
    c2 = f * c + i * g
    tc = np.tanh(c2)
    h2 = o * tc
    return h2, c2, (x, h, c, i, f, o, g, tc)


def _lstm_dz(cache, dh2, dc2):
    x, h, c, i, f, o, g, tc = cache
    dc = dc2 + dh2 * o * (1.0 - tc * tc)
    dz = np.concatenate([
        dc * g * i * (1.0 - i),
        dc * c * f * (1.0 - f),
        dh2 * tc * o * (1.0 - o),
        dc * i * (1.0 - g * g),
    ])
    return dz, dc * f


def lstm_cell_backward(Wx, Wh, cache, dh2, dc2, grads, prefix):
    """Returns (dx, dh, dc) and adds into grads[prefix + '_Wx' | '_Wh' | '_b']."""
    x, h = cache[0], cache[1]
    dz, dc = _lstm_dz(cache, dh2, dc2)
    grads[prefix + "_Wx"] += np.outer(dz, x)
    grads[prefix + "_Wh"] += np.outer(dz, h)
    grads[prefix + "_b"] += dz
    return Wx.T @ dz, Wh.T @ dz, dc


def lstm_sequence(Wx, Wh, b, X):
    """Run an LSTM over the rows of X from zero state; returns (states, caches)."""
    n = X.shape[0]
    H = Wh.shape[1]
    XZ = X @ Wx.T + b
    h = np.zeros(H, dtype=X.dtype)
    c = np.zeros(H, dtype=X.dtype)
    out = np.empty((n, H), dtype=X.dtype)
    caches = []
    for t in range(n):
        h, c, cache = _lstm_gates(XZ[t] + Wh @ h, X[t], h, c)
        out[t] = h
        caches.append(cache)
    return out, caches


def lstm_sequence_backward(Wx, Wh, X, caches, dH, grads, prefix):
    """Backprop through :func:`lstm_sequence`; returns dX."""
    n, H = dH.shape
    dZ = np.empty((n, 4 * H), dtype=dH.dtype)
    dh = np.zeros(H, dtype=dH.dtype)
    dc = np.zeros(H, dtype=dH.dtype)
    gWh = grads[prefix + "_Wh"]
    for t in range(n - 1, -1, -1):
        cache = caches[t]
        dz, dc = _lstm_dz(cache, dh + dH[t], dc)
        dZ[t] = dz
        gWh += np.outer(dz, cache[1])
        dh = Wh.T @ dz
    grads[prefix + "_Wx"] += dZ.T @ X
    grads[prefix + "_b"] += dZ.sum(axis=0)
    return dZ @ Wx


def bilstm(params, prefix, X):
    """Bidirectional LSTM; returns (per-position states n x 2H, summary 2H, cache)."""
    fw, fcache = lstm_sequence(params[prefix + "_f_Wx"], params[prefix + "_f_Wh"], params[prefix + "_f_b"], X)
    Xr = X[::-1]
    bw, bcache = lstm_sequence(params[prefix + "_b_Wx"], params[prefix + "_b_Wh"], params[prefix + "_b_b"], Xr)
    bw = bw[::-1]
    states = np.concatenate([fw, bw], axis=1)
    summary = np.concatenate([fw[-1], bw[0]])
    return states, summary, (X, Xr, fcache, bcache)


def bilstm_backward(params, prefix, cache, dstates, dsummary, grads):
    X, Xr, fcache, bcache = cache
    H = dstates.shape[1] // 2
    dfw = dstates[:, :H].copy()
    dbw = dstates[:, H:].copy()
    dfw[-1] += dsummary[:H]
    dbw[0] += dsummary[H:]
    dX = lstm_sequence_backward(params[prefix + "_f_Wx"], params[prefix + "_f_Wh"], X, fcache, dfw, grads, prefix + "_f")
    dXr = lstm_sequence_backward(params[prefix + "_b_Wx"], params[prefix + "_b_Wh"], Xr, bcache, dbw[::-1], grads, prefix + "_b")
    return dX + dXr[::-1]
