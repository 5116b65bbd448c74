"""Dataset generation for beam- and cell-quality prediction.

Both dataset kinds are windows over simulated trajectories ("passes"); a
window never crosses a pass boundary.  Inputs carry the measured (possibly
noisy) quantities, targets are always clean.  Normalization constants are
frozen from the train split only and recorded in the metadata.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import generate_channel
from ..codebook import SetB, scenario_codebook, select_set_b
from ..container import load_container, write_container
from ..scenario import ScenarioConfig, build_scenario, with_speed
from ..utils import config_hash

_CHUNK_SLOTS = 3000
_NOISE_TAG = 7777
_SHUFFLE_TAG = 55
_PASS_STRIDE = 100003


@dataclass
class BeamDataset:
    """Serving-cell beam prediction samples.

    tensors per split ("train"/"val"/"test"):
        coeffs: (n, T_in, 2*set_a) interleaved complex beam coefficients,
                pre-scaled by meta["normalization"]["coeff_scale"]
        rsrp:   (n, T_in, set_a) measured per-beam RSRP, raw dBm
        target: (n, set_a) clean per-beam RSRP at the horizon slot, raw dBm
    """
    meta: dict
    tensors: dict = field(default_factory=dict)

    @property
    def set_a(self) -> int:
        return self.meta["set_a"]

    def split(self, name: str) -> dict:
        return self.tensors[name]

    def n_samples(self, name: str) -> int:
        return self.tensors[name]["target"].shape[0]

    def normalize_rsrp(self, values):
        norm = self.meta["normalization"]
        return (np.asarray(values) - norm["rsrp_min"]) / (norm["rsrp_max"] - norm["rsrp_min"])

    def denormalize_rsrp(self, values):
        norm = self.meta["normalization"]
        return np.asarray(values) * (norm["rsrp_max"] - norm["rsrp_min"]) + norm["rsrp_min"]

    def save(self, dirpath):
        flat = {f"{s}_{n}": a for s, t in self.tensors.items() for n, a in t.items()}
        write_container(dirpath, flat, self.meta)

    @classmethod
    def load(cls, dirpath) -> "BeamDataset":
        flat, meta = load_container(dirpath)
        if meta.get("kind") != "beam":
            raise ValueError(f"{dirpath} is not a beam dataset")
        tensors = {}
        for key, arr in flat.items():
            split, name = key.split("_", 1)
            tensors.setdefault(split, {})[name] = arr
        return cls(meta=meta, tensors=tensors)


@dataclass
class CellDataset:
    """Cell-level L3 forecasting samples.

    tensors per split:
        inputs: (n, t_in, n_meas_cells, n_meas_beams) measured L1-RSRP, raw dBm
        target: (n, horizon, n_cells) clean L3-RSRP, raw dBm
    """
    meta: dict
    tensors: dict = field(default_factory=dict)

    def split(self, name: str) -> dict:
        return self.tensors[name]

    def n_samples(self, name: str) -> int:
        return self.tensors[name]["target"].shape[0]

    def normalize(self, values):
        norm = self.meta["normalization"]
        return (np.asarray(values) - norm["vmin"]) / (norm["vmax"] - norm["vmin"])

    def denormalize(self, values):
        norm = self.meta["normalization"]
        return np.asarray(values) * (norm["vmax"] - norm["vmin"]) + norm["vmin"]

    def save(self, dirpath):
        flat = {f"{s}_{n}": a for s, t in self.tensors.items() for n, a in t.items()}
        write_container(dirpath, flat, self.meta)

    @classmethod
    def load(cls, dirpath) -> "CellDataset":
        flat, meta = load_container(dirpath)
        if meta.get("kind") != "cell":
            raise ValueError(f"{dirpath} is not a cell dataset")
        tensors = {}
        for key, arr in flat.items():
            split, name = key.split("_", 1)
            tensors.setdefault(split, {})[name] = arr
        return cls(meta=meta, tensors=tensors)


def _pass_plan(cfg: ScenarioConfig, speed: float, span: int, n_total: int):
    """How many windows to draw from how many passes, and at which starts."""
    scn = build_scenario(with_speed(cfg, speed))
    per_pass_slots = scn.n_slots
    available = per_pass_slots - span + 1
    if available < 1:
        raise ValueError(
            f"trajectory too short: {per_pass_slots} slots cannot host a "
            f"window of {span} slots"
        )
    n_passes = math.ceil(n_total / available)
    plan = []
    remaining = n_total
    for p in range(n_passes):
        take = min(available, math.ceil(remaining / (n_passes - p)))
        stride = max(1, available // take)
        starts = np.arange(take) * stride
        plan.append((p, starts))
        remaining -= take
    return scn, plan


def _noisy_copy(rsrp, sigma_db, rng):
    if sigma_db <= 0:
        return rsrp
    return rsrp + sigma_db * rng.standard_normal(rsrp.shape)


def _noisy_coeffs(coeffs, sigma_db, rng):
    """Complex jitter of the same dB-equivalent size as the RSRP noise."""
    if sigma_db <= 0:
        return coeffs
    s = math.log(10.0) / 20.0 * sigma_db
    n = rng.standard_normal(coeffs.shape) + 1j * rng.standard_normal(coeffs.shape)
    return coeffs * (1.0 + s * n / math.sqrt(2.0))


def _window_groups(starts, span, chunk_slots=_CHUNK_SLOTS):
    """Split window starts into groups whose union of needed slots stays
    bounded; returns (slots_array, starts) per group."""
    per_group = max(1, chunk_slots // span)
    groups = []
    for i in range(0, len(starts), per_group):
        part = starts[i:i + per_group]
        slots = np.unique(np.concatenate([np.arange(t0, t0 + span) for t0 in part]))
        groups.append((slots, part))
    return groups


def generate_beam_dataset(cfg: ScenarioConfig, speed: float, set_b: SetB,
                          t_in: int = 8, horizon: int = 1,
                          n_samples: int = 10000, seed: int = 0) -> BeamDataset:
    """Windows of serving-cell measurements with clean full-beam targets.

    The serving cell of a window is the strongest cell (clean, best beam) at
    the window's last input slot; inputs and target both refer to it.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if t_in < 1:
        raise ValueError("t_in must be >= 1")
    span = t_in + horizon
    base = with_speed(cfg, speed)
    _, plan = _pass_plan(base, speed, span, n_samples)
    cb = scenario_codebook(build_scenario(base))
    set_a = cb.beam_count

    coeffs_all = np.empty((n_samples, t_in, 2 * set_a))
    rsrp_all = np.empty((n_samples, t_in, set_a))
    target_all = np.empty((n_samples, set_a))

    row = 0
    for p, starts in plan:
        # same geometry/scatterers every pass, fresh shadowing realization
        pass_cfg = replace(base, shadow_seed=seed * _PASS_STRIDE + p + 1)
        scn = build_scenario(pass_cfg)
        noise_rng = np.random.default_rng([seed, _NOISE_TAG, p])
        for slots, group in _window_groups(starts, span):
            ch = generate_channel(scn, cb, slots=slots)
            noisy_rsrp = _noisy_copy(ch.rsrp, cfg.measurement_noise_db, noise_rng)
            noisy_coeff = _noisy_coeffs(ch.coeffs, cfg.measurement_noise_db, noise_rng)
            pos = {int(s): i for i, s in enumerate(slots)}
            for t0 in group:
                a = pos[int(t0)]
                last = a + t_in - 1
                serving = int(ch.rsrp[last].max(axis=1).argmax())
                win = noisy_coeff[a:a + t_in, serving, :]
                coeffs_all[row, :, 0::2] = win.real
                coeffs_all[row, :, 1::2] = win.imag
                rsrp_all[row] = noisy_rsrp[a:a + t_in, serving, :]
                target_all[row] = ch.rsrp[last + horizon, serving, :]
                row += 1
    assert row == n_samples

    perm = np.random.default_rng([seed, _SHUFFLE_TAG, int(speed)]).permutation(n_samples)
    coeffs_all, rsrp_all, target_all = coeffs_all[perm], rsrp_all[perm], target_all[perm]

    n_train = int(n_samples * 8 / 10)
    n_val = int(n_samples * 1 / 10)
    bounds = {"train": (0, n_train), "val": (n_train, n_train + n_val),
              "test": (n_train + n_val, n_samples)}

    tr_lo, tr_hi = bounds["train"]
    vmin = min(rsrp_all[tr_lo:tr_hi].min(), target_all[tr_lo:tr_hi].min())
    vmax = max(rsrp_all[tr_lo:tr_hi].max(), target_all[tr_lo:tr_hi].max())
    mod = np.hypot(coeffs_all[tr_lo:tr_hi, :, 0::2], coeffs_all[tr_lo:tr_hi, :, 1::2])
    coeff_scale = 1.0 / max(mod.max(), 1e-300)
    coeffs_all *= coeff_scale

    # compression-ratio bookkeeping, asserted at write time
    ratio = set_b.ratio
    assert ratio == type(ratio)(set_b.measurement_count, set_a), "ratio bookkeeping broken"

    meta = {
        "kind": "beam",
        "speed_kmh": speed,
        "seed": seed,
        "t_in": t_in,
        "horizon": horizon,
        "set_a": set_a,
        "scheme": {
            "kind": set_b.kind,
            "indices": list(set_b.indices),
            "m": set_b.measurement_count,
            "ratio": str(ratio),
        },
        "normalization": {"rsrp_min": float(vmin), "rsrp_max": float(vmax),
                          "coeff_scale": float(coeff_scale)},
        "scenario_hash": build_scenario(base).hash,
        "splits": {k: [int(a), int(b)] for k, (a, b) in bounds.items()},
    }
    tensors = {
        name: {
            "coeffs": coeffs_all[a:b],
            "rsrp": rsrp_all[a:b],
            "target": target_all[a:b],
        }
        for name, (a, b) in bounds.items()
    }
    return BeamDataset(meta=meta, tensors=tensors)


CELL_VARIANTS = ("all_beam_cell", "part_cell", "part_beam")


def cell_measurement_masks(n_cells: int, n_beams: int, variant: str):
    """Measured cell / beam indices for a cell-dataset variant."""
    if variant == "all_beam_cell":
        return tuple(range(n_cells)), tuple(range(n_beams))
    if variant == "part_cell":
        if n_cells % 2:
            raise ValueError(
                f"part_cell needs an even cell count for an exact 50% split, got {n_cells}"
            )
        return tuple(range(0, n_cells, 2)), tuple(range(n_beams))
    if variant == "part_beam":
        sb = select_set_b(n_beams, "equidistant", "1/2")
        return tuple(range(n_cells)), sb.indices
    raise ValueError(f"unknown cell variant {variant!r}")


def _l3_trace(rsrp, alpha: float) -> np.ndarray:
    """Clean L3-RSRP over a pass: per-cell max over beams, then dB-domain EMA."""
    inst = rsrp.max(axis=2)
    out = np.empty_like(inst)
    out[0] = inst[0]
    for k in range(1, inst.shape[0]):
        out[k] = (1.0 - alpha) * out[k - 1] + alpha * inst[k]
    return out


def generate_cell_dataset(cfg: ScenarioConfig, speed: float, variant: str,
                          t_in: int = 6, horizon: int = 4,
                          n_samples: int = 10000, seed: int = 0) -> CellDataset:
    """Partial L1-RSRP histories with clean future L3-RSRP targets.

    Input horizon is exactly `t_in` past instances, output exactly `horizon`
    future instances.  For the partial variants the writer asserts that the
    input measurement count is exactly half the full sweep.
    """
    span = t_in + horizon
    base = with_speed(cfg, speed)
    scn0 = build_scenario(base)
    cb = scenario_codebook(scn0)
    n_cells = scn0.n_cells
    n_beams = cb.beam_count
    meas_cells, meas_beams = cell_measurement_masks(n_cells, n_beams, variant)

    count = len(meas_cells) * len(meas_beams)
    full = n_cells * n_beams
    if variant != "all_beam_cell":
        assert count * 2 == full, (
            f"{variant}: measurement count {count} is not exactly 50% of {full}"
        )

    _, plan = _pass_plan(base, speed, span, n_samples)
    inputs_all = np.empty((n_samples, t_in, len(meas_cells), len(meas_beams)))
    target_all = np.empty((n_samples, horizon, n_cells))

    cell_sel = np.asarray(meas_cells, dtype=np.intp)
    beam_sel = np.asarray(meas_beams, dtype=np.intp)
    row = 0
    for p, starts in plan:
        pass_cfg = replace(base, shadow_seed=seed * _PASS_STRIDE + p + 1)
        scn = build_scenario(pass_cfg)
        noise_rng = np.random.default_rng([seed, _NOISE_TAG, p])
        # L3 filtering carries state across slots, so sweep the pass in order,
        # chunked to bound memory
        n_pass = scn.n_slots
        l3 = np.empty((n_pass, n_cells))
        measured = np.empty((n_pass, len(meas_cells), len(meas_beams)))
        carry = None
        for a in range(0, n_pass, _CHUNK_SLOTS):
            b = min(a + _CHUNK_SLOTS, n_pass)
            ch = generate_channel(scn, cb, slots=np.arange(a, b), with_coeffs=False)
            inst = ch.rsrp.max(axis=2)
            block = np.empty_like(inst)
            prev = inst[0] if carry is None else carry
            for k in range(b - a):
                prev = inst[k] if (a == 0 and k == 0) else (
                    (1.0 - cfg.l3_alpha) * prev + cfg.l3_alpha * inst[k]
                )
                block[k] = prev
            carry = prev
            l3[a:b] = block
            measured[a:b] = _noisy_copy(
                ch.rsrp[:, cell_sel][:, :, beam_sel], cfg.measurement_noise_db, noise_rng
            )
        for t0 in starts:
            inputs_all[row] = measured[t0:t0 + t_in]
            target_all[row] = l3[t0 + t_in:t0 + t_in + horizon]
            row += 1
    assert row == n_samples

    perm = np.random.default_rng([seed, _SHUFFLE_TAG, int(speed)]).permutation(n_samples)
    inputs_all, target_all = inputs_all[perm], target_all[perm]

    n_train = int(n_samples * 3 / 5)
    n_val = int(n_samples * 1 / 5)
    bounds = {"train": (0, n_train), "val": (n_train, n_train + n_val),
              "test": (n_train + n_val, n_samples)}
    tr_lo, tr_hi = bounds["train"]
    vmin = min(inputs_all[tr_lo:tr_hi].min(), target_all[tr_lo:tr_hi].min())
    vmax = max(inputs_all[tr_lo:tr_hi].max(), target_all[tr_lo:tr_hi].max())

    meta = {
        "kind": "cell",
        "variant": variant,
        "speed_kmh": speed,
        "seed": seed,
        "t_in": t_in,
        "horizon": horizon,
        "n_cells": n_cells,
        "n_beams": n_beams,
        "measured_cells": list(meas_cells),
        "measured_beams": list(meas_beams),
        "measurement_count": count,
        "full_measurement_count": full,
        "normalization": {"vmin": float(vmin), "vmax": float(vmax)},
        "scenario_hash": scn0.hash,
        "splits": {k: [int(a), int(b)] for k, (a, b) in bounds.items()},
    }
    tensors = {
        name: {"inputs": inputs_all[a:b], "target": target_all[a:b]}
        for name, (a, b) in bounds.items()
    }
    return CellDataset(meta=meta, tensors=tensors)
