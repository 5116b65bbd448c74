"""Geometric multipath channel: per-slot, per-cell beam-domain coefficients.

One deterministic line-of-sight path (angle and gain from geometry) plus a
few fixed scatterer paths per cell, 10-20 dB weaker, whose positions are
frozen per scenario seed so everything evolves smoothly with UE motion.
All quantities are reproducible bit-exactly from (config, seed).
"""

import math
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .scenario import CellId, Scenario, ue_positions
from .utils import db_to_linear, linear_to_db


@dataclass(frozen=True)
class PathSet:
    """Propagation paths BS->UE for one (cell, slot), angles in the sector
    frame (azimuth relative to boresight)."""
    gains: np.ndarray        # (n_paths,) complex amplitude incl. pattern+loss
    azimuth_deg: np.ndarray  # (n_paths,)
    elevation_deg: np.ndarray
    los: bool                # geometric LoS flag (always True on open track)


def array_response(rows: int, cols: int, spacing_wl: float,
                   azimuth_deg: float, elevation_deg: float) -> np.ndarray:
    """Unit-modulus UPA steering vector, element (0,0) = 1.

    Rows span the horizontal (azimuth) axis, cols the vertical axis;
    flattening is row-major to match the codebook construction.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    az = math.radians(azimuth_deg)
    el = math.radians(elevation_deg)
    r = np.arange(rows)[:, None]
    c = np.arange(cols)[None, :]
    phase = 2.0 * np.pi * spacing_wl * (r * math.sin(az) * math.cos(el) + c * math.sin(el))
    return np.exp(1j * phase).reshape(-1)


def _array_response_many(rows, cols, spacing_wl, az_deg, el_deg):
    """Steering vectors for many angles at once, shape (rows*cols, n)."""
    az = np.radians(np.asarray(az_deg, dtype=np.float64))
    el = np.radians(np.asarray(el_deg, dtype=np.float64))
    r = np.arange(rows)[:, None, None]
    c = np.arange(cols)[None, :, None]
    phase = 2.0 * np.pi * spacing_wl * (r * (np.sin(az) * np.cos(el))[None, None, :]
                                        + c * np.sin(el)[None, None, :])
    return np.exp(1j * phase).reshape(rows * cols, -1)


def path_loss_db(distance_m, freq_ghz: float):
    """Log-distance law PL = 28.0 + 22 log10(d) + 20 log10(f_GHz)."""
    d = np.asarray(distance_m, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    out = 28.0 + 22.0 * np.log10(d) + 20.0 * np.log10(freq_ghz)
    return float(out) if out.ndim == 0 else out


def element_gain_db(cfg, local_az_deg, el_deg):
    """Parabolic sector element pattern with a back-lobe floor."""
    az = np.asarray(local_az_deg, dtype=np.float64)
    el = np.asarray(el_deg, dtype=np.float64)
    a_h = np.minimum(12.0 * (_wrap_deg(az) / cfg.element_hpbw_deg) ** 2, cfg.element_backoff_db)
    a_v = np.minimum(12.0 * (el / cfg.element_hpbw_deg) ** 2, cfg.element_backoff_db)
    return cfg.element_gain_dbi - np.minimum(a_h + a_v, cfg.element_backoff_db)


def _wrap_deg(a):
    return (np.asarray(a, dtype=np.float64) + 180.0) % 360.0 - 180.0


def _cell_rng(scenario: Scenario, cell: CellId, tag: int):
    cfg = scenario.config
    # shadowing draws from shadow_seed so repeated passes over the same fixed
    # geometry (scatterers keyed on the main seed) can still differ
    base = cfg.seed if tag != _TAG_SHADOW or cfg.shadow_seed is None else cfg.shadow_seed
    return np.random.default_rng([base, cell.bs_index, cell.sector_index, tag])


_TAG_SCATTER = 101
_TAG_SHADOW = 202


def scatterer_layout(scenario: Scenario, cell: CellId):
    """Fixed per-scenario scatterer positions and excess losses for a cell."""
    cfg = scenario.config
    n = cfg.n_nlos_paths
    if n == 0:
        return np.zeros((0, 3)), np.zeros(0)
    rng = _cell_rng(scenario, cell, _TAG_SCATTER)
    bx = scenario.bs_position(cell)[0]
    pos = np.column_stack([
        rng.uniform(bx - 280.0, bx + 280.0, size=n),
        rng.uniform(-45.0, 45.0, size=n),
        rng.uniform(2.0, 12.0, size=n),
    ])
    lo, hi = cfg.nlos_excess_loss_db
    excess = rng.uniform(lo, hi, size=n)
    return pos, excess


def shadow_trace(scenario: Scenario, cell: CellId) -> np.ndarray:
    """Slow log-normal shadowing along the trajectory, AR(1) with the
    configured correlation distance.  All-zero when shadowing is off."""
    cfg = scenario.config
    n = scenario.n_slots
    if not cfg.shadowing_enabled or cfg.shadowing_sigma_db <= 0:
        return np.zeros(n)
    step = scenario.speed_mps * cfg.slot_duration_s
    rho = math.exp(-step / cfg.shadowing_corr_dist_m)
    rng = _cell_rng(scenario, cell, _TAG_SHADOW)
    z = rng.standard_normal(n)
    out = np.empty(n)
    out[0] = cfg.shadowing_sigma_db * z[0]
    innov = cfg.shadowing_sigma_db * math.sqrt(1.0 - rho * rho)
    for k in range(1, n):
        out[k] = rho * out[k - 1] + innov * z[k]
    return out


def _geometry(scenario: Scenario, cell: CellId, ue_xyz: np.ndarray):
    """Distance and sector-frame angles from the cell's array to points."""
    sec = scenario.sector(cell)
    bs = scenario.bs_position(cell)
    d = ue_xyz - bs[None, :]
    dist = np.linalg.norm(d, axis=1)
    az_global = np.degrees(np.arctan2(d[:, 1], d[:, 0]))
    horiz = np.hypot(d[:, 0], d[:, 1])
    el = np.degrees(np.arctan2(d[:, 2], horiz))
    az_local = _wrap_deg(az_global - sec.boresight_az_deg)
    return dist, az_local, el


def synthesize_paths(scenario: Scenario, cell: CellId, slot: int) -> PathSet:
    """Paths for a single (cell, slot); deterministic in the scenario seed."""
    gains, az, el, _ = _paths_over_slots(scenario, cell, np.array([slot]))
    return PathSet(gains=gains[:, 0], azimuth_deg=az[:, 0], elevation_deg=el[:, 0], los=True)


def _paths_over_slots(scenario: Scenario, cell: CellId, slots: np.ndarray):
    """Vectorized path synthesis: arrays shaped (n_paths, n_slots).

    Path gain is the complex amplitude referenced to 0 dBm transmit power:
    element pattern + path loss + shadowing, phase from the carrier
    wavelength and total path length.
    """
    cfg = scenario.config
    ue = ue_positions(scenario, slots)
    wavelength = 0.299792458 / cfg.carrier_freq_ghz
    shadow = shadow_trace(scenario, cell)[slots]

    dist, az_local, el = _geometry(scenario, cell, ue)
    gain_db = element_gain_db(cfg, az_local, el) - path_loss_db(dist, cfg.carrier_freq_ghz) + shadow
    phase = -2.0 * np.pi * dist / wavelength
    los_gain = db_to_linear(gain_db) ** 0.5 * np.exp(1j * phase)

    sc_pos, sc_excess = scatterer_layout(scenario, cell)
    n_nlos = len(sc_pos)
    n_paths = 1 + n_nlos
    gains = np.zeros((n_paths, len(slots)), dtype=np.complex128)
    az_all = np.zeros((n_paths, len(slots)))
    el_all = np.zeros((n_paths, len(slots)))
    gains[0] = los_gain
    az_all[0] = az_local
    el_all[0] = el

    bs = scenario.bs_position(cell)
    for k in range(n_nlos):
        d_bs_sc, sc_az, sc_el = _geometry(scenario, cell, sc_pos[k][None, :])
        d_sc_ue = np.linalg.norm(ue - sc_pos[k][None, :], axis=1)
        total = d_bs_sc[0] + d_sc_ue
        # Gain pinned relative to LoS via the configured excess loss; the
        # departure angle is the fixed BS->scatterer direction.
        nlos_db = gain_db - sc_excess[k]
        gains[k + 1] = db_to_linear(nlos_db) ** 0.5 * np.exp(-2j * np.pi * total / wavelength)
        az_all[k + 1] = sc_az[0]
        el_all[k + 1] = sc_el[0]
    return gains, az_all, el_all, dist


def beam_coefficients(paths: PathSet, codebook: Codebook, tx_power_dbm: float) -> np.ndarray:
    """Complex beam-domain coefficient vector; |g[b]|^2 is linear-power RSRP in mW."""
    if paths.gains.size == 0:
        return np.zeros(codebook.beam_count, dtype=np.complex128)
    steer = _array_response_many(codebook.rows, codebook.cols, codebook.spacing_wl,
                                 paths.azimuth_deg, paths.elevation_deg)
    amp = 10.0 ** (tx_power_dbm / 20.0)
    return amp * (codebook.beams.conj() @ (steer * paths.gains[None, :]).sum(axis=1))


def beam_rsrp(paths: PathSet, codebook: Codebook, tx_power_dbm: float,
              floor_dbm: float = -160.0) -> np.ndarray:
    """Per-beam L1-RSRP in dBm over the full codebook, clamped at the floor."""
    if codebook.beam_count == 0:
        raise ValueError("codebook is empty")
    if paths.gains.size == 0:
        return np.full(codebook.beam_count, floor_dbm)
    g = beam_coefficients(paths, codebook, tx_power_dbm)
    return np.maximum(linear_to_db(np.abs(g) ** 2, floor_db=floor_dbm), floor_dbm)


def sinr_db(serving_dbm: float, interferers_dbm, noise_floor_dbm: float) -> float:
    """Linear-domain ratio serving / (sum interferers + noise), in dB."""
    s = db_to_linear(serving_dbm)
    denom = float(db_to_linear(noise_floor_dbm))
    for i in interferers_dbm:
        denom += float(db_to_linear(i))
    return float(linear_to_db(s / denom))


class ChannelTensors:
    """Per-run channel products over a slot range for every cell.

    coeffs: (n_slots, n_cells, n_beams) complex beam-domain coefficients
    rsrp:   (n_slots, n_cells, n_beams) L1-RSRP dBm (floor-clamped)
    """

    def __init__(self, coeffs: np.ndarray, rsrp: np.ndarray, slots: np.ndarray):
        self.coeffs = coeffs
        self.rsrp = rsrp
        self.slots = slots

    @property
    def best_beam_rsrp(self) -> np.ndarray:
        """(n_slots, n_cells) strongest-beam RSRP per cell."""
        return self.rsrp.max(axis=2)


def generate_channel(scenario: Scenario, codebook: Codebook, slots=None,
                     with_coeffs: bool = True) -> ChannelTensors:
    """Synthesize the full (slot, cell, beam) channel for a trajectory.

    Per-cell work is a single batched product codebook^H @ path matrix, so
    generation is deterministic regardless of evaluation order.
    """
    cfg = scenario.config
    if slots is None:
        slots = np.arange(scenario.n_slots)
    else:
        slots = np.asarray(slots)
    n_s = len(slots)
    n_c = scenario.n_cells
    n_b = codebook.beam_count
    amp = 10.0 ** (cfg.tx_power_dbm / 20.0)
    coeffs = np.zeros((n_s, n_c, n_b), dtype=np.complex128) if with_coeffs else None
    rsrp = np.empty((n_s, n_c, n_b), dtype=np.float64)
    for ci, cell in enumerate(scenario.cells):
        gains, az, el, _ = _paths_over_slots(scenario, cell, slots)
        field = np.zeros((n_b, n_s), dtype=np.complex128)
        for p in range(gains.shape[0]):
            steer = _array_response_many(codebook.rows, codebook.cols, codebook.spacing_wl,
                                         az[p], el[p])
            field += codebook.beams.conj() @ (steer * gains[p][None, :])
        g = (amp * field).T
        if with_coeffs:
            coeffs[:, ci, :] = g
        rsrp[:, ci, :] = np.maximum(
            linear_to_db(np.abs(g) ** 2, floor_db=cfg.rsrp_floor_dbm), cfg.rsrp_floor_dbm
        )
    return ChannelTensors(coeffs=coeffs, rsrp=rsrp, slots=slots)
