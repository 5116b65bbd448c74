"""Adaptive-moment optimizer with a reduce-on-plateau learning-rate schedule
spanning 1e-3 down to the 1e-8 floor."""

import numpy as np


class Adam:
    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = {}
        self._v = {}

    def step(self, named_params):
        """One update over [(key, Param)] pairs; moment slots keyed by name."""
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        scale = self.lr / bc1
        for key, p in named_params:
            g = p.grad
            if key not in self._m:
                self._m[key] = np.zeros_like(p.value)
                self._v[key] = np.zeros_like(p.value)
            m, v = self._m[key], self._v[key]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.value -= scale * m / (np.sqrt(v / bc2) + self.eps)


class ReduceOnPlateau:
    """Halve the learning rate after `patience` validation rounds without
    improvement; never drops below `floor`."""

    def __init__(self, optimizer: Adam, factor: float = 0.5, patience: int = 10,
                 floor: float = 1e-8, min_delta: float = 0.0):
        self.opt = optimizer
        self.factor = factor
        self.patience = patience
        self.floor = floor
        self.min_delta = min_delta
        self.best = np.inf
        self.stale = 0

    def observe(self, val_loss: float) -> float:
        """Feed one validation loss; returns the (possibly reduced) lr."""
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.stale = 0
        else:
            self.stale += 1
            if self.stale > self.patience:
                self.opt.lr = max(self.opt.lr * self.factor, self.floor)
                self.stale = 0
        return self.opt.lr
