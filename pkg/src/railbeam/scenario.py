"""Physical world definition: straight rail track, base stations, UE trajectory.

The track is the x-axis at a fixed UE antenna height.  Base stations are
placed evenly along the track, alternating between lateral offsets +y/-y,
each carrying three sector arrays.  The slot clock defined here is shared
by every other module.
"""

import math
from dataclasses import dataclass, asdict, replace

import numpy as np
import yaml

from .utils import canonical_json, config_hash


class ConfigError(ValueError):
    """Raised when a scenario/experiment config fails validation."""


# Sector boresights in the BS-local frame, degrees CCW from the +x (track)
# direction.  BSs on the -y side of the track use the y-mirrored set so that
# one sector always faces the track.
DEFAULT_SECTOR_AZIMUTHS = (30.0, 150.0, -90.0)


@dataclass
class ScenarioConfig:
    # Track / motion
    track_length_m: float = 3600.0
    ue_speed_kmh: float = 120.0
    ue_height_m: float = 1.5
    ue_start_m: float = 0.0
    slot_duration_s: float = 0.01
    n_slots: int | None = None          # None: as many slots as fit on the track

    # Base stations
    n_bs: int = 7
    bs_height_m: float = 25.0
    bs_lateral_offset_m: float = 30.0   # alternating +/- across BS index
    sector_azimuths_deg: tuple = DEFAULT_SECTOR_AZIMUTHS
    tx_power_dbm: float = 30.0

    # Per-sector uniform planar array + codebook
    upa_rows: int = 8                   # horizontal (azimuth) dimension
    upa_cols: int = 8                   # vertical (elevation) dimension
    element_spacing_wl: float = 0.5
    codebook_oversampling: int = 1

    # Radio
    carrier_freq_ghz: float = 30.0
    noise_floor_dbm: float = -94.0
    rsrp_floor_dbm: float = -160.0

    # Element pattern (3GPP-style parabolic sector pattern)
    element_gain_dbi: float = 8.0
    element_hpbw_deg: float = 65.0
    element_backoff_db: float = 30.0

    # Multipath synthesis
    n_nlos_paths: int = 3
    nlos_excess_loss_db: tuple = (10.0, 20.0)
    shadowing_enabled: bool = False
    shadowing_sigma_db: float = 4.0
    shadowing_corr_dist_m: float = 50.0
    shadow_seed: int | None = None      # decouples shadowing from the geometry seed
    measurement_noise_db: float = 0.0   # sigma of dB-domain RSRP noise; 0 = off

    # L3 filtering
    l3_alpha: float = 0.5
    l3_aggregation: str = "max"         # "max" | "mean"
    l3_filter: str = "ema"              # "ema" | "window_mean"
    l3_window: int = 4

    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sector_azimuths_deg"] = list(self.sector_azimuths_deg)
        d["nlos_excess_loss_db"] = list(self.nlos_excess_loss_db)
        return d


@dataclass(frozen=True)
class Sector:
    boresight_az_deg: float
    rows: int
    cols: int
    spacing_wl: float
    tx_power_dbm: float


@dataclass(frozen=True)
class BaseStation:
    position: tuple                     # (x, y, z) meters
    sectors: tuple                      # tuple of Sector


@dataclass(frozen=True)
class CellId:
    bs_index: int
    sector_index: int


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    bs_list: tuple
    cells: tuple                        # flat (bs, sector) enumeration
    n_slots: int

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def speed_mps(self) -> float:
        return self.config.ue_speed_kmh / 3.6

    @property
    def slot_duration(self) -> float:
        return self.config.slot_duration_s

    def sector(self, cell: CellId) -> Sector:
        return self.bs_list[cell.bs_index].sectors[cell.sector_index]

    def bs_position(self, cell: CellId) -> np.ndarray:
        return np.asarray(self.bs_list[cell.bs_index].position, dtype=np.float64)

    def resolved_dict(self) -> dict:
        """Fully resolved geometry, suitable for `scenario dump` and hashing."""
        return {
            "config": self.config.to_dict(),
            "n_slots": self.n_slots,
            "n_cells": self.n_cells,
            "base_stations": [
                {
                    "position": list(bs.position),
                    "sectors": [asdict(s) for s in bs.sectors],
                }
                for bs in self.bs_list
            ],
        }

    def serialize(self) -> str:
        return canonical_json(self.resolved_dict())

    @property
    def hash(self) -> str:
        return config_hash(self.resolved_dict())


def build_scenario(config: ScenarioConfig) -> Scenario:
    """Construct the immutable scenario from a validated config.

    Pure function of the config (including its seed): the same config always
    yields a byte-identical serialized scenario.
    """
    if config.slot_duration_s <= 0:
        raise ConfigError("slot_duration_s must be positive")
    if config.ue_speed_kmh <= 0:
        raise ConfigError("ue_speed_kmh must be positive")
    if config.n_bs < 1:
        raise ConfigError("need at least one base station")
    if len(config.sector_azimuths_deg) < 1:
        raise ConfigError("need at least one sector per base station")
    if config.upa_rows < 1 or config.upa_cols < 1:
        raise ConfigError("UPA dimensions must be >= 1")
    if config.track_length_m <= 0:
        raise ConfigError("track_length_m must be positive")

    speed_mps = config.ue_speed_kmh / 3.6
    max_slots = int(math.floor(
        (config.track_length_m - config.ue_start_m) / (speed_mps * config.slot_duration_s)
    ))
    n_slots = config.n_slots if config.n_slots is not None else max_slots
    if n_slots < 1:
        raise ConfigError("track too short for a single slot at this speed")
    if n_slots > max_slots:
        raise ConfigError(
            f"n_slots={n_slots} leaves the track: at {config.ue_speed_kmh} km/h "
            f"only {max_slots} slots fit in {config.track_length_m} m"
        )

    spacing = config.track_length_m / config.n_bs
    bs_list = []
    for i in range(config.n_bs):
        x = (i + 0.5) * spacing
        side = 1.0 if i % 2 == 0 else -1.0
        y = side * config.bs_lateral_offset_m
        # Mirror sector boresights for BSs on the -y side so one sector
        # still faces the track.
        sectors = tuple(
            Sector(
                boresight_az_deg=az if side > 0 else -az,
                rows=config.upa_rows,
                cols=config.upa_cols,
                spacing_wl=config.element_spacing_wl,
                tx_power_dbm=config.tx_power_dbm,
            )
            for az in config.sector_azimuths_deg
        )
        bs_list.append(BaseStation(position=(x, y, config.bs_height_m), sectors=sectors))

    cells = tuple(
        CellId(bs_index=b, sector_index=s)
        for b in range(config.n_bs)
        for s in range(len(config.sector_azimuths_deg))
    )
    return Scenario(config=config, bs_list=tuple(bs_list), cells=cells, n_slots=n_slots)


def ue_position(scenario: Scenario, slot: int) -> np.ndarray:
    """UE antenna position at a slot: start + track_direction * v * t."""
    if not 0 <= slot < scenario.n_slots:
        raise IndexError(f"slot {slot} out of range [0, {scenario.n_slots})")
    cfg = scenario.config
    x = cfg.ue_start_m + scenario.speed_mps * slot * cfg.slot_duration_s
    return np.array([x, 0.0, cfg.ue_height_m])


def ue_positions(scenario: Scenario, slots=None) -> np.ndarray:
    """Vectorized trajectory, shape (n_slots, 3)."""
    cfg = scenario.config
    if slots is None:
        slots = np.arange(scenario.n_slots)
    else:
        slots = np.asarray(slots)
        if slots.size and (slots.min() < 0 or slots.max() >= scenario.n_slots):
            raise IndexError("slot out of range")
    out = np.zeros((len(slots), 3))
    out[:, 0] = cfg.ue_start_m + scenario.speed_mps * slots * cfg.slot_duration_s
    out[:, 2] = cfg.ue_height_m
    return out


def load_config(path) -> ScenarioConfig:
    """Read a YAML key/value config file, applying defaults for absent keys."""
    with open(path) as f:
        raw = yaml.safe_load(f) or {}
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("scenario config must be a mapping")
    known = {f.name for f in ScenarioConfig.__dataclass_fields__.values()}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown scenario config keys: {sorted(unknown)}")
    kwargs = dict(raw)
    for key in ("sector_azimuths_deg", "nlos_excess_loss_db"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return ScenarioConfig(**kwargs)


def with_speed(config: ScenarioConfig, speed_kmh: float, seed=None) -> ScenarioConfig:
    """Copy of a config at a different speed (n_slots re-derived)."""
    return replace(
        config,
        ue_speed_kmh=float(speed_kmh),
        n_slots=None,
        seed=config.seed if seed is None else int(seed),
    )
