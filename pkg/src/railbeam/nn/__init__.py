from .backend import BACKEND, available_backends
from .layers import (
    Activation,
    Conv2D,
    Dense,
    LinearCompression,
    LSTM,
    MaxPool2D,
    Param,
    Reshape,
    ToSequence,
)
from .model import (
    ParallelHeads,
    Sequential,
    descriptors_for,
    grad_check,
    layers_from_descriptors,
    mse_loss,
)
from .optim import Adam, ReduceOnPlateau

__all__ = [
    "BACKEND", "available_backends",
    "Activation", "Conv2D", "Dense", "LinearCompression", "LSTM",
    "MaxPool2D", "Param", "Reshape", "ToSequence",
    "ParallelHeads", "Sequential", "descriptors_for", "grad_check",
    "layers_from_descriptors", "mse_loss",
    "Adam", "ReduceOnPlateau",
]
