"""Layer zoo: dense, conv2d, maxpool, LSTM, activations, linear compression,
plus parameter-free shape plumbing.  Reverse mode is hand-written per layer
and pinned by the finite-difference checker in ``model.grad_check``."""

import numpy as np

from . import backend


class Param:
    """One learnable tensor with its gradient slot."""

    __slots__ = ("value", "grad", "trainable")

    def __init__(self, value: np.ndarray, trainable: bool = True):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.trainable = trainable


def _glorot(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    kind = "base"

    def __init__(self):
        self.params: dict[str, Param] = {}

    def forward(self, x):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError

    def hyper(self) -> dict:
        return {}

    def branch_signature(self):
        """Hashable record of any non-differentiable branch taken during the
        last forward (pool argmax, relu sign); used by the gradient checker
        to skip coordinates whose perturbation flips a branch."""
        return ()

    def zero_grads(self):
        for p in self.params.values():
            p.grad[...] = 0.0


class Dense(Layer):
    kind = "dense"

    def __init__(self, n_in: int, n_out: int, rng=None):
        super().__init__()
        self.n_in, self.n_out = n_in, n_out
        rng = rng or np.random.default_rng(0)
        self.params["w"] = Param(_glorot(rng, (n_in, n_out), n_in, n_out))
        self.params["b"] = Param(np.zeros(n_out))

    def forward(self, x):
        b = x.shape[0]
        flat = x.reshape(b, -1)
        if flat.shape[1] != self.n_in:
            raise ValueError(f"dense expects {self.n_in} features, got {flat.shape[1]}")
        self._cache = (flat, x.shape)
        return flat @ self.params["w"].value + self.params["b"].value

    def backward(self, dy):
        flat, in_shape = self._cache
        self.params["w"].grad += flat.T @ dy
        self.params["b"].grad += dy.sum(axis=0)
        return (dy @ self.params["w"].value.T).reshape(in_shape)

    def hyper(self):
        return {"n_in": self.n_in, "n_out": self.n_out}


class Activation(Layer):
    kind = "activation"

    def __init__(self, fn: str):
        super().__init__()
        if fn not in ("relu", "sigmoid", "tanh"):
            raise ValueError(f"unknown activation {fn!r}")
        self.fn = fn

    def forward(self, x):
        if self.fn == "relu":
            mask = x > 0
            self._cache = mask
            return np.where(mask, x, 0.0)
        if self.fn == "sigmoid":
            out = np.empty_like(x)
            pos = x >= 0
            out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
            ez = np.exp(x[~pos])
            out[~pos] = ez / (1.0 + ez)
            self._cache = out
            return out
        out = np.tanh(x)
        self._cache = out
        return out

    def backward(self, dy):
        if self.fn == "relu":
            return dy * self._cache
        if self.fn == "sigmoid":
            s = self._cache
            return dy * s * (1.0 - s)
        t = self._cache
        return dy * (1.0 - t * t)

    def branch_signature(self):
        if self.fn == "relu":
            return (self._cache.tobytes(),)
        return ()

    def hyper(self):
        return {"fn": self.fn}


class Conv2D(Layer):
    kind = "conv2d"

    def __init__(self, c_in: int, c_out: int, kh: int, kw: int,
                 padding: str = "valid", rng=None):
        super().__init__()
        if padding not in ("valid", "same"):
            raise ValueError("padding must be 'valid' or 'same'")
        if padding == "same" and (kh % 2 == 0 or kw % 2 == 0):
            raise ValueError("'same' padding needs odd kernel sizes")
        self.c_in, self.c_out, self.kh, self.kw = c_in, c_out, kh, kw
        self.padding = padding
        rng = rng or np.random.default_rng(0)
        fan_in = c_in * kh * kw
        fan_out = c_out * kh * kw
        self.params["w"] = Param(_glorot(rng, (c_out, c_in, kh, kw), fan_in, fan_out))
        self.params["b"] = Param(np.zeros(c_out))

    def _pads(self):
        if self.padding == "same":
            return self.kh // 2, self.kw // 2
        return 0, 0

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.c_in:
            raise ValueError(f"conv2d expects (B,{self.c_in},H,W), got {x.shape}")
        ph, pw = self._pads()
        self._cache = x
        return backend.conv2d_forward(x, self.params["w"].value, self.params["b"].value, ph, pw)

    def backward(self, dy):
        ph, pw = self._pads()
        dx, dw, db = backend.conv2d_backward(self._cache, self.params["w"].value, dy, ph, pw)
        self.params["w"].grad += dw
        self.params["b"].grad += db
        return dx

    def hyper(self):
        return {"c_in": self.c_in, "c_out": self.c_out, "kh": self.kh,
                "kw": self.kw, "padding": self.padding}


class MaxPool2D(Layer):
    kind = "maxpool"

    def __init__(self, ph: int, pw: int):
        super().__init__()
        self.ph, self.pw = ph, pw

    def forward(self, x):
        if x.ndim != 4:
            raise ValueError(f"maxpool expects (B,C,H,W), got {x.shape}")
        y, idx = backend.maxpool_forward(x, self.ph, self.pw)
        self._cache = (idx, x.shape[2], x.shape[3])
        return y

    def backward(self, dy):
        idx, h, w = self._cache
        return backend.maxpool_backward(dy, idx, self.ph, self.pw, h, w)

    def branch_signature(self):
        idx, _, _ = self._cache
        return (idx.tobytes(),)

    def hyper(self):
        return {"ph": self.ph, "pw": self.pw}


class LSTM(Layer):
    kind = "lstm"

    def __init__(self, n_in: int, n_hidden: int, return_sequences: bool = True, rng=None):
        super().__init__()
        self.n_in, self.n_hidden = n_in, n_hidden
        self.return_sequences = return_sequences
        rng = rng or np.random.default_rng(0)
        h = n_hidden
        self.params["wx"] = Param(_glorot(rng, (n_in, 4 * h), n_in, 4 * h))
        self.params["wh"] = Param(_glorot(rng, (h, 4 * h), h, 4 * h))
        b = np.zeros(4 * h)
        b[h:2 * h] = 1.0      # forget-gate bias
        self.params["b"] = Param(b)

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.n_in:
            raise ValueError(f"lstm expects (B,T,{self.n_in}), got {x.shape}")
        h_seq, c_seq, gates = backend.lstm_forward(
            x, self.params["wx"].value, self.params["wh"].value, self.params["b"].value
        )
        self._cache = (x, h_seq, c_seq, gates)
        return h_seq if self.return_sequences else h_seq[:, -1]

    def backward(self, dy):
        x, h_seq, c_seq, gates = self._cache
        if self.return_sequences:
            dh_out = dy
        else:
            dh_out = np.zeros_like(h_seq)
            dh_out[:, -1] = dy
        dx, dwx, dwh, db = backend.lstm_backward(
            x, self.params["wx"].value, self.params["wh"].value,
            h_seq, c_seq, gates, dh_out,
        )
        self.params["wx"].grad += dwx
        self.params["wh"].grad += dwh
        self.params["b"].grad += db
        return dx

    def hyper(self):
        return {"n_in": self.n_in, "n_hidden": self.n_hidden,
                "return_sequences": self.return_sequences}


class LinearCompression(Layer):
    """Complex m x n measurement matrix as the first model layer.

    Input and output carry complex values as interleaved (re, im) feature
    pairs; the matrix itself is stored as separate real and imaginary parts
    and is trained jointly with the rest of the network when learnable.
    """

    kind = "linear_compression"

    def __init__(self, n_beams: int, m: int, w_re=None, w_im=None, learnable: bool = True):
        super().__init__()
        self.n_beams, self.m = n_beams, m
        if w_re is None:
            w_re = np.zeros((m, n_beams))
        if w_im is None:
            w_im = np.zeros((m, n_beams))
        self.params["w_re"] = Param(np.asarray(w_re, dtype=np.float64), trainable=learnable)
        self.params["w_im"] = Param(np.asarray(w_im, dtype=np.float64), trainable=learnable)

    @classmethod
    def from_matrix(cls, cm, learnable=None):
        """Build from a measurement.CompressionMatrix."""
        learn = cm.learnable if learnable is None else learnable
        return cls(cm.n_beams, cm.m, w_re=cm.w_re.copy(), w_im=cm.w_im.copy(), learnable=learn)

    def forward(self, x):
        if x.shape[-1] != 2 * self.n_beams:
            raise ValueError(
                f"compression expects {2 * self.n_beams} interleaved features, got {x.shape[-1]}"
            )
        xr, xi = x[..., 0::2], x[..., 1::2]
        wr, wi = self.params["w_re"].value, self.params["w_im"].value
        yr = xr @ wr.T - xi @ wi.T
        yi = xr @ wi.T + xi @ wr.T
        out = np.empty(x.shape[:-1] + (2 * self.m,))
        out[..., 0::2] = yr
        out[..., 1::2] = yi
        self._cache = (xr, xi)
        return out

    def backward(self, dy):
        xr, xi = self._cache
        wr, wi = self.params["w_re"].value, self.params["w_im"].value
        dyr, dyi = dy[..., 0::2], dy[..., 1::2]
        lead = (-1, self.m)
        fr = dyr.reshape(lead)
        fi = dyi.reshape(lead)
        gr = xr.reshape(-1, self.n_beams)
        gi = xi.reshape(-1, self.n_beams)
        self.params["w_re"].grad += fr.T @ gr + fi.T @ gi
        self.params["w_im"].grad += fi.T @ gr - fr.T @ gi
        dxr = dyr @ wr + dyi @ wi
        dxi = dyi @ wr - dyr @ wi
        dx = np.empty(dy.shape[:-1] + (2 * self.n_beams,))
        dx[..., 0::2] = dxr
        dx[..., 1::2] = dxi
        return dx

    def hyper(self):
        return {"n_beams": self.n_beams, "m": self.m,
                "learnable": self.params["w_re"].trainable}


class Reshape(Layer):
    """Per-sample reshape: (B, ...) -> (B, *shape)."""

    kind = "reshape"

    def __init__(self, shape):
        super().__init__()
        self.shape = tuple(int(s) for s in shape)

    def forward(self, x):
        self._cache = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, dy):
        return dy.reshape(self._cache)

    def hyper(self):
        return {"shape": list(self.shape)}


class ToSequence(Layer):
    """(B, C, H, W) feature maps -> (B, H, C*W) time sequence, where the
    image row axis is the time axis."""

    kind = "to_sequence"

    def forward(self, x):
        if x.ndim != 4:
            raise ValueError(f"to_sequence expects (B,C,H,W), got {x.shape}")
        b, c, h, w = x.shape
        self._cache = (b, c, h, w)
        return x.transpose(0, 2, 1, 3).reshape(b, h, c * w)

    def backward(self, dy):
        b, c, h, w = self._cache
        return dy.reshape(b, h, c, w).transpose(0, 2, 1, 3).copy()


LAYER_KINDS = {
    cls.kind: cls
    for cls in (Dense, Activation, Conv2D, MaxPool2D, LSTM, LinearCompression,
                Reshape, ToSequence)
}
