"""What the UE actually observes: down-sampled per-beam RSRP, compressed
multi-beam linear measurements, and time-filtered per-cell L3-RSRP."""

from dataclasses import dataclass, field

import numpy as np

from .codebook import SetB


@dataclass
class CompressionMatrix:
    """Complex m x n measurement matrix applied to beam-domain coefficients.

    When built from a selection pattern each row has exactly one 1, so the
    compressed measurements coincide with the complex entries down-sampling
    would pick (the bridge the learned-compression comparison rests on).
    """
    w_re: np.ndarray
    w_im: np.ndarray
    learnable: bool = True

    def __post_init__(self):
        self.w_re = np.asarray(self.w_re, dtype=np.float64)
        self.w_im = np.asarray(self.w_im, dtype=np.float64)
        if self.w_re.shape != self.w_im.shape or self.w_re.ndim != 2:
            raise ValueError("w_re and w_im must be 2-D with identical shapes")
        if not (np.isfinite(self.w_re).all() and np.isfinite(self.w_im).all()):
            raise ValueError("compression matrix entries must be finite")

    @property
    def m(self) -> int:
        return self.w_re.shape[0]

    @property
    def n_beams(self) -> int:
        return self.w_re.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return self.w_re + 1j * self.w_im

    @classmethod
    def selection(cls, set_b: SetB, learnable: bool = False) -> "CompressionMatrix":
        if set_b.kind not in ("subset_of_A", "full"):
            raise ValueError("selection init needs a subset-style SetB")
        m = len(set_b.indices)
        w = np.zeros((m, set_b.set_a_size))
        w[np.arange(m), list(set_b.indices)] = 1.0
        return cls(w_re=w, w_im=np.zeros_like(w), learnable=learnable)

    @classmethod
    def gaussian(cls, m: int, n_beams: int, seed: int = 0) -> "CompressionMatrix":
        """Random complex init with unit-norm rows (standard sensing init)."""
        rng = np.random.default_rng(seed)
        w = rng.standard_normal((m, n_beams)) + 1j * rng.standard_normal((m, n_beams))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        return cls(w_re=w.real.copy(), w_im=w.imag.copy(), learnable=True)


def downsample_measure(l1_rsrp: np.ndarray, set_b: SetB) -> np.ndarray:
    """Gather the measured subset of a per-beam RSRP vector, order preserved."""
    if set_b.kind not in ("subset_of_A", "full"):
        raise ValueError(f"downsampling needs a subset SetB, got kind {set_b.kind!r}")
    l1_rsrp = np.asarray(l1_rsrp)
    idx = np.asarray(set_b.indices, dtype=np.intp)
    if idx.size and idx.max() >= l1_rsrp.shape[-1]:
        raise IndexError("SetB index out of range for this RSRP vector")
    return l1_rsrp[..., idx]


def cs_measure(beam_coeffs: np.ndarray, m: CompressionMatrix) -> np.ndarray:
    """y = M h: plain matrix-vector product on the beam-domain coefficients."""
    h = np.asarray(beam_coeffs)
    if h.shape[-1] != m.n_beams:
        raise ValueError(f"dimension mismatch: coeffs have {h.shape[-1]} beams, "
                         f"matrix expects {m.n_beams}")
    return h @ m.matrix.T


@dataclass
class L3State:
    """Per-UE cell-level filtered RSRP.  Owned and updated by one simulation
    loop; a fresh state starts cold (first update copies the aggregate)."""
    n_cells: int
    alpha: float = 0.5
    aggregation: str = "max"     # "max" | "mean" over beams, dB domain
    filter_kind: str = "ema"     # "ema" | "window_mean"
    window: int = 4
    filtered: np.ndarray = field(default=None)
    _history: list = field(default_factory=list)
    started: bool = False

    def __post_init__(self):
        if self.aggregation not in ("max", "mean"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if self.filter_kind not in ("ema", "window_mean"):
            raise ValueError(f"unknown filter {self.filter_kind!r}")
        if self.filtered is None:
            self.filtered = np.zeros(self.n_cells)


def _aggregate(per_cell_beams, n_cells: int, aggregation: str) -> np.ndarray:
    inst = np.empty(n_cells)
    for c in range(n_cells):
        beams = np.asarray(per_cell_beams[c], dtype=np.float64)
        if beams.size == 0:
            raise ValueError(f"empty beam vector for cell {c}")
        inst[c] = beams.max() if aggregation == "max" else beams.mean()
    return inst


def l3_update(state: L3State, per_cell_beams) -> L3State:
    """Advance the per-cell L3 filter by one measurement instance.

    per_cell_beams: sequence of per-cell measured beam RSRP vectors (dBm), or
    an (n_cells, n_beams) array.  Filtering runs in the dB domain.
    """
    inst = _aggregate(per_cell_beams, state.n_cells, state.aggregation)
    if state.filter_kind == "window_mean":
        state._history.append(inst)
        if len(state._history) > state.window:
            state._history.pop(0)
        state.filtered = np.mean(state._history, axis=0)
    elif not state.started:
        state.filtered = inst.copy()
    else:
        state.filtered = (1.0 - state.alpha) * state.filtered + state.alpha * inst
    state.started = True
    return state


def add_measurement_noise(rsrp_dbm: np.ndarray, sigma_db: float, rng) -> np.ndarray:
    """Measurement noise as dB-domain additive Gaussian (multiplicative on
    linear power, sigma expressed in its dB equivalent).  sigma 0 is exact."""
    if sigma_db <= 0:
        return np.asarray(rsrp_dbm, dtype=np.float64)
    return np.asarray(rsrp_dbm, dtype=np.float64) + sigma_db * rng.standard_normal(
        np.shape(rsrp_dbm)
    )
