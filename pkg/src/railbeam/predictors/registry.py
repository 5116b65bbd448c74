"""Predictor zoo: the non-AI baseline, three beam predictors fed by
down-sampled measurements, the learned-compression beam predictor, and the
two cell-level L3 forecasters.

Beam predictors output normalized per-beam RSRP for the horizon slot; the
argmax is the predicted best beam.  Cell predictors output sigmoid-bounded
normalized L3-RSRP for every cell over the prediction horizon.
"""

import zlib
from dataclasses import dataclass, field

import numpy as np

from ..codebook import SetB
from ..measurement import CompressionMatrix
from ..nn import (
    Activation,
    Conv2D,
    Dense,
    LinearCompression,
    LSTM,
    MaxPool2D,
    ParallelHeads,
    Reshape,
    Sequential,
    ToSequence,
)

BEAM_PREDICTORS = ("nonai_best_measured", "lstm_downsampled", "cnn_fc_downsampled",
                   "convlstm_downsampled", "csai")
CELL_PREDICTORS = ("cell_lstm", "cell_cnn")

# input_kind per beam predictor: what slice of a BeamDataset feeds the model
BEAM_INPUT_KINDS = {
    "lstm_downsampled": "rsrp_subset",
    "cnn_fc_downsampled": "rsrp_subset",
    "convlstm_downsampled": "coeffs",
    "csai": "coeffs",
}


@dataclass
class PredictorSpec:
    predictor_id: str
    paper_scale: bool = False
    # csai only: "gaussian" (default) or "selection" compression init
    compression_init: str = "gaussian"
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.predictor_id not in BEAM_PREDICTORS + CELL_PREDICTORS:
            raise ValueError(f"unknown predictor {self.predictor_id!r}")

    @property
    def is_cell(self) -> bool:
        return self.predictor_id in CELL_PREDICTORS

    def hyper(self) -> dict:
        """Architecture sizes: desk-scale defaults, paper-scale on request."""
        if self.paper_scale:
            h = {"lstm_hidden": 168, "lstm_layers": 4, "cnn_kernels": (12, 24, 32),
                 "fc_width": 256, "beam_lstm_layers": 2}
        else:
            h = {"lstm_hidden": 64, "lstm_layers": 4, "cnn_kernels": (8, 16, 16),
                 "fc_width": 128, "beam_lstm_layers": 2}
        h.update(self.overrides)
        return h


def _probe(layers, x):
    """Run a dummy tensor through the layers to learn the live shape."""
    for layer in layers:
        x = layer.forward(x)
    return x


def build_beam_predictor(spec: PredictorSpec, set_a: int, set_b: SetB,
                         t_in: int, seed: int = 0) -> Sequential:
    rng = np.random.default_rng([seed, zlib.crc32(spec.predictor_id.encode())])
    h = spec.hyper()
    hid = h["lstm_hidden"]
    pid = spec.predictor_id

    if pid == "lstm_downsampled":
        n_in = set_b.measurement_count
        layers = [LSTM(n_in, hid, return_sequences=True, rng=rng)]
        for _ in range(h["beam_lstm_layers"] - 2):
            layers.append(LSTM(hid, hid, return_sequences=True, rng=rng))
        layers.append(LSTM(hid, hid, return_sequences=False, rng=rng))
        layers.append(Dense(hid, set_a, rng=rng))
        return Sequential(layers)

    if pid == "cnn_fc_downsampled":
        n_in = set_b.measurement_count
        k1, k2 = h["cnn_kernels"][0], h["cnn_kernels"][1]
        layers = [
            Reshape((1, t_in, n_in)),
            Conv2D(1, k1, 3, 3, padding="same", rng=rng),
            Activation("relu"),
            MaxPool2D(2, 2),
            Conv2D(k1, k2, 3, 3, padding="same", rng=rng),
            Activation("relu"),
        ]
        out = _probe(layers, np.zeros((1, t_in, n_in)))
        flat = int(np.prod(out.shape[1:]))
        layers += [Dense(flat, h["fc_width"], rng=rng), Activation("relu"),
                   Dense(h["fc_width"], set_a, rng=rng)]
        return Sequential(layers)

    if pid in ("convlstm_downsampled", "csai"):
        m = set_b.measurement_count
        if pid == "csai":
            if spec.compression_init == "selection":
                cm = CompressionMatrix.selection(set_b, learnable=True)
            else:
                cm = CompressionMatrix.gaussian(m, set_a, seed=seed)
            comp = LinearCompression.from_matrix(cm, learnable=True)
        else:
            comp = LinearCompression.from_matrix(CompressionMatrix.selection(set_b))
        k1 = h["cnn_kernels"][0]
        layers = [
            comp,
            Reshape((1, t_in, 2 * m)),
            Conv2D(1, k1, 3, 3, padding="same", rng=rng),
            Activation("relu"),
            ToSequence(),
            LSTM(k1 * 2 * m, hid, return_sequences=False, rng=rng),
            Dense(hid, set_a, rng=rng),
        ]
        return Sequential(layers)

    raise ValueError(f"{pid!r} is not a trainable beam predictor")


def build_cell_predictor(spec: PredictorSpec, t_in: int, n_meas_cells: int,
                         n_meas_beams: int, n_cells: int, horizon: int,
                         seed: int = 0) -> Sequential:
    rng = np.random.default_rng([seed, zlib.crc32(spec.predictor_id.encode())])
    h = spec.hyper()
    pid = spec.predictor_id

    if pid == "cell_lstm":
        # one network per future instance, identical structure
        feat = n_meas_cells * n_meas_beams
        hid = h["lstm_hidden"]
        heads = []
        for _ in range(horizon):
            layers = [Reshape((t_in, feat)), LSTM(feat, hid, return_sequences=True, rng=rng)]
            for _ in range(h["lstm_layers"] - 2):
                layers.append(LSTM(hid, hid, return_sequences=True, rng=rng))
            layers.append(LSTM(hid, hid, return_sequences=False, rng=rng))
            layers += [Dense(hid, n_cells, rng=rng), Activation("sigmoid")]
            heads.append(Sequential(layers))
        return Sequential([ParallelHeads(heads)])

    if pid == "cell_cnn":
        k1, k2, k3 = h["cnn_kernels"]
        layers = [
            Conv2D(t_in, k1, 3, 3, padding="same", rng=rng),
            Activation("relu"),
            MaxPool2D(2, 2),
            Conv2D(k1, k2, 3, 3, padding="same", rng=rng),
            Activation("relu"),
            MaxPool2D(2, 2),
            Conv2D(k2, k3, 3, 3, padding="same", rng=rng),
            Activation("relu"),
        ]
        out = _probe(layers, np.zeros((1, t_in, n_meas_cells, n_meas_beams)))
        flat = int(np.prod(out.shape[1:]))
        layers += [
            Dense(flat, h["fc_width"], rng=rng), Activation("relu"),
            Dense(h["fc_width"], horizon * n_cells, rng=rng), Activation("sigmoid"),
            Reshape((horizon, n_cells)),
        ]
        return Sequential(layers)

    raise ValueError(f"{pid!r} is not a cell predictor")
