"""Pure-numpy reference kernels for the hot layer operations.

These define the numerical contract; the compiled extension in ``_kernels``
implements the same signatures and is preferred at import time when present.
All arrays are float64, C-contiguous.
"""

import numpy as np


# --- 2-D convolution --------------------------------------------------------

def conv2d_forward(x, w, b, pad_h, pad_w):
    """x (B,C,H,W), w (F,C,kh,kw), b (F,) -> y (B,F,Ho,Wo)."""
    bsz, cin, h, wid = x.shape
    f, _, kh, kw = w.shape
    if pad_h or pad_w:
        x = np.pad(x, ((0, 0), (0, 0), (pad_h, pad_h), (pad_w, pad_w)))
    ho = h + 2 * pad_h - kh + 1
    wo = wid + 2 * pad_w - kw + 1
    y = np.empty((bsz, f, ho, wo))
    y[:] = b[None, :, None, None]
    for u in range(kh):
        for v in range(kw):
            patch = x[:, :, u:u + ho, v:v + wo]
            y += np.einsum("bcij,fc->bfij", patch, w[:, :, u, v], optimize=True)
    return y


def conv2d_backward(x, w, dy, pad_h, pad_w):
    """Gradients (dx, dw, db) of conv2d_forward."""
    bsz, cin, h, wid = x.shape
    f, _, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad_h, pad_h), (pad_w, pad_w))) if (pad_h or pad_w) else x
    ho, wo = dy.shape[2], dy.shape[3]
    db = dy.sum(axis=(0, 2, 3))
    dw = np.empty_like(w)
    dxp = np.zeros_like(xp)
    for u in range(kh):
        for v in range(kw):
            patch = xp[:, :, u:u + ho, v:v + wo]
            dw[:, :, u, v] = np.einsum("bfij,bcij->fc", dy, patch, optimize=True)
            dxp[:, :, u:u + ho, v:v + wo] += np.einsum(
                "bfij,fc->bcij", dy, w[:, :, u, v], optimize=True
            )
    dx = dxp[:, :, pad_h:pad_h + h, pad_w:pad_w + wid] if (pad_h or pad_w) else dxp
    return dx, dw, db


# --- max pooling ------------------------------------------------------------

def maxpool_forward(x, ph, pw):
    """Non-overlapping pool with floor semantics (remainder rows/cols dropped).

    Returns (y, idx) where idx is the argmax position inside each window,
    flattened row-major; ties resolve to the lowest index.
    """
    bsz, c, h, w = x.shape
    ho, wo = h // ph, w // pw
    v = x[:, :, :ho * ph, :wo * pw]
    v = v.reshape(bsz, c, ho, ph, wo, pw).transpose(0, 1, 2, 4, 3, 5)
    v = v.reshape(bsz, c, ho, wo, ph * pw)
    idx = v.argmax(axis=-1)
    y = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    return y, idx.astype(np.int64)


def maxpool_backward(dy, idx, ph, pw, h, w):
    """Route gradients back to the argmax positions."""
    bsz, c, ho, wo = dy.shape
    dv = np.zeros((bsz, c, ho, wo, ph * pw))
    np.put_along_axis(dv, idx[..., None], dy[..., None], axis=-1)
    dv = dv.reshape(bsz, c, ho, wo, ph, pw).transpose(0, 1, 2, 4, 3, 5)
    dx = np.zeros((bsz, c, h, w))
    dx[:, :, :ho * ph, :wo * pw] = dv.reshape(bsz, c, ho * ph, wo * pw)
    return dx


# --- LSTM -------------------------------------------------------------------

def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(x, wx, wh, b):
    """x (B,T,I), wx (I,4H), wh (H,4H), b (4H,).

    Gate layout along the 4H axis is [input, forget, cell, output].
    Returns (h_seq, c_seq, gates) with gates post-activation, all (B,T,*).
    """
    bsz, t_len, _ = x.shape
    hid = wh.shape[0]
    zx = x @ wx
    h_seq = np.empty((bsz, t_len, hid))
    c_seq = np.empty((bsz, t_len, hid))
    gates = np.empty((bsz, t_len, 4 * hid))
    h_prev = np.zeros((bsz, hid))
    c_prev = np.zeros((bsz, hid))
    for t in range(t_len):
        z = zx[:, t] + h_prev @ wh + b
        i = _sigmoid(z[:, :hid])
        f = _sigmoid(z[:, hid:2 * hid])
        g = np.tanh(z[:, 2 * hid:3 * hid])
        o = _sigmoid(z[:, 3 * hid:])
        c_prev = f * c_prev + i * g
        h_prev = o * np.tanh(c_prev)
        gates[:, t, :hid] = i
        gates[:, t, hid:2 * hid] = f
        gates[:, t, 2 * hid:3 * hid] = g
        gates[:, t, 3 * hid:] = o
        h_seq[:, t] = h_prev
        c_seq[:, t] = c_prev
    return h_seq, c_seq, gates


def lstm_backward(x, wx, wh, h_seq, c_seq, gates, dh_out):
    """Reverse-mode pass; dh_out is the gradient on every h_t (zeros where
    unused).  Returns (dx, dwx, dwh, db)."""
    bsz, t_len, _ = x.shape
    hid = wh.shape[0]
    dz_seq = np.empty((bsz, t_len, 4 * hid))
    dwh = np.zeros_like(wh)
    dh_next = np.zeros((bsz, hid))
    dc_next = np.zeros((bsz, hid))
    for t in range(t_len - 1, -1, -1):
        i = gates[:, t, :hid]
        f = gates[:, t, hid:2 * hid]
        g = gates[:, t, 2 * hid:3 * hid]
        o = gates[:, t, 3 * hid:]
        c = c_seq[:, t]
        c_prev = c_seq[:, t - 1] if t > 0 else np.zeros((bsz, hid))
        h_prev = h_seq[:, t - 1] if t > 0 else np.zeros((bsz, hid))
        tanh_c = np.tanh(c)
        dh = dh_out[:, t] + dh_next
        dc = dc_next + dh * o * (1.0 - tanh_c * tanh_c)
        dz = dz_seq[:, t]
        dz[:, :hid] = dc * g * i * (1.0 - i)
        dz[:, hid:2 * hid] = dc * c_prev * f * (1.0 - f)
        dz[:, 2 * hid:3 * hid] = dc * i * (1.0 - g * g)
        dz[:, 3 * hid:] = dh * tanh_c * o * (1.0 - o)
        dwh += h_prev.T @ dz
        dh_next = dz @ wh.T
        dc_next = dc * f
    flat_x = x.reshape(bsz * t_len, -1)
    flat_dz = dz_seq.reshape(bsz * t_len, -1)
    dwx = flat_x.T @ flat_dz
    db = flat_dz.sum(axis=0)
    dx = (flat_dz @ wx.T).reshape(x.shape)
    return dx, dwx, dwh, db
