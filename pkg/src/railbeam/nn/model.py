"""Sequential model container, MSE loss, and the finite-difference gradient
checker that every layer's hand-written backward is validated against."""

import numpy as np

from .layers import LAYER_KINDS, Layer


class Sequential(Layer):
    kind = "sequential"

    def __init__(self, layers):
        super().__init__()
        self.layers = list(layers)

    def forward(self, x):
        for i, layer in enumerate(self.layers):
            try:
                x = layer.forward(x)
            except ValueError as e:
                raise ValueError(f"layer {i} ({layer.kind}): {e}") from e
        return x

    def backward(self, dy):
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def named_params(self, prefix=""):
        out = []
        for i, layer in enumerate(self.layers):
            if isinstance(layer, (Sequential, ParallelHeads)):
                out.extend(layer.named_params(prefix=f"{prefix}{i}."))
            else:
                for name, p in layer.params.items():
                    out.append((f"{prefix}{i}.{name}", p))
        return out

    def trainable_params(self):
        return [(k, p) for k, p in self.named_params() if p.trainable]

    def zero_grads(self):
        for _, p in self.named_params():
            p.grad[...] = 0.0

    def branch_signature(self):
        sig = ()
        for layer in self.layers:
            sig = sig + layer.branch_signature()
        return sig

    def state_arrays(self):
        """Parameter arrays in a stable order (for copy/restore)."""
        return [p.value for _, p in self.named_params()]

    def set_state(self, arrays):
        own = self.state_arrays()
        if len(own) != len(arrays):
            raise ValueError("parameter count mismatch")
        for dst, src in zip(own, arrays):
            if dst.shape != src.shape:
                raise ValueError("parameter shape mismatch")
            dst[...] = src

    def copy_state(self):
        return [a.copy() for a in self.state_arrays()]


class ParallelHeads(Layer):
    """Several sub-models over the same input, outputs stacked on axis 1.

    Realizes "one independent network per prediction horizon": forward gives
    (B, n_heads, ...) and the backward pass routes each slice to its head.
    """

    kind = "parallel_heads"

    def __init__(self, heads):
        super().__init__()
        self.heads = list(heads)

    def forward(self, x):
        outs = [h.forward(x) for h in self.heads]
        return np.stack(outs, axis=1)

    def backward(self, dy):
        dx = None
        for k, head in enumerate(self.heads):
            d = head.backward(dy[:, k])
            dx = d if dx is None else dx + d
        return dx

    def named_params(self, prefix=""):
        out = []
        for k, head in enumerate(self.heads):
            out.extend(head.named_params(prefix=f"{prefix}h{k}."))
        return out

    def branch_signature(self):
        sig = ()
        for head in self.heads:
            sig = sig + head.branch_signature()
        return sig


def mse_loss(pred, target):
    """Mean squared error over all elements; returns (loss, dpred)."""
    diff = pred - target
    n = diff.size
    return float((diff * diff).sum() / n), (2.0 / n) * diff


def model_loss(model, x, target):
    return mse_loss(model.forward(x), target)[0]


def grad_check(model, x, target, epsilon: float = 1e-5, loss_fn=mse_loss):
    """Central-difference check of every trainable parameter coordinate.

    Coordinates whose +/- epsilon perturbation flips a non-differentiable
    branch (maxpool argmax, relu sign) are skipped: the analytic value is a
    subgradient there and no finite-difference target exists.
    Returns (max_rel_err, n_checked, n_skipped).
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon out of the supported [1e-7, 1e-3] range")
    model.zero_grads()
    loss, dpred = loss_fn(model.forward(x), target)
    model.backward(dpred)
    params = model.trainable_params()
    analytic = {k: p.grad.copy() for k, p in params}

    max_err = 0.0
    checked = 0
    skipped = 0
    for key, p in params:
        flat = p.value.reshape(-1)
        a_flat = analytic[key].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + epsilon
            up, _ = loss_fn(model.forward(x), target)
            sig_up = model.branch_signature()
            flat[j] = orig - epsilon
            dn, _ = loss_fn(model.forward(x), target)
            sig_dn = model.branch_signature()
            flat[j] = orig
            if sig_up != sig_dn:
                skipped += 1
                continue
            numeric = (up - dn) / (2.0 * epsilon)
            a = a_flat[j]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-12)
            max_err = max(max_err, err)
            checked += 1
    return max_err, checked, skipped


def layers_from_descriptors(descs, rng=None):
    """Rebuild a Sequential from (kind, hyper) descriptors (checkpoint load)."""
    from .layers import (  # noqa: F401  (kinds resolved via LAYER_KINDS)
        Activation, Conv2D, Dense, LinearCompression, LSTM, MaxPool2D, Reshape,
        ToSequence,
    )
    layers = []
    for d in descs:
        kind = d["kind"]
        if kind == "sequential":
            layers.append(Sequential(layers_from_descriptors(d["layers"], rng)))
            continue
        if kind == "parallel_heads":
            heads = [Sequential(layers_from_descriptors(h["layers"], rng)) for h in d["heads"]]
            layers.append(ParallelHeads(heads))
            continue
        cls = LAYER_KINDS[kind]
        layers.append(cls(**d.get("hyper", {})))
    return layers


def descriptors_for(model) -> list:
    """Inverse of layers_from_descriptors."""
    out = []
    for layer in model.layers:
        if isinstance(layer, Sequential):
            out.append({"kind": "sequential", "layers": descriptors_for(layer)})
        elif isinstance(layer, ParallelHeads):
            out.append({
                "kind": "parallel_heads",
                "heads": [{"layers": descriptors_for(h)} for h in layer.heads],
            })
        else:
            out.append({"kind": layer.kind, "hyper": layer.hyper()})
    return out
