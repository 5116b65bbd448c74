"""DFT narrow-beam codebooks (the full beam set) and measured-subset patterns.

Beam vectors are Kronecker products of oversampled 1-D DFT vectors over the
horizontal (rows) and vertical (cols) array dimensions, unit-norm, each
labeled with the boresight (azimuth, elevation) it steers to.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class Codebook:
    beams: np.ndarray        # (beam_count, rows*cols) complex, unit-norm rows
    az_deg: np.ndarray       # (beam_count,) boresight azimuth label
    el_deg: np.ndarray       # (beam_count,) boresight elevation label
    rows: int
    cols: int
    oversampling: int
    spacing_wl: float = 0.5

    @property
    def beam_count(self) -> int:
        return self.beams.shape[0]

    @property
    def n_az(self) -> int:
        """Azimuth grid size (beams enumerate azimuth-major)."""
        return self.rows * self.oversampling if self.rows > 1 else 1

    @property
    def n_el(self) -> int:
        return self.cols * self.oversampling if self.cols > 1 else 1

    def labels(self) -> list:
        return [
            {"beam": int(b), "azimuth_deg": float(self.az_deg[b]), "elevation_deg": float(self.el_deg[b])}
            for b in range(self.beam_count)
        ]


def _dft_directions(n: int, oversampling: int, spacing_wl: float) -> np.ndarray:
    """Steering angles (deg) of the oversampled DFT grid, sorted ascending.

    Spatial frequency i/(n*O*spacing) must stay in [-1, 1]; true for
    half-wavelength spacing, which the defaults use.
    """
    total = n * oversampling
    signed = np.arange(total) - total // 2
    sin_theta = signed / (total * spacing_wl)
    if np.any(np.abs(sin_theta) > 1.0):
        sin_theta = np.clip(sin_theta, -1.0, 1.0)
    return np.degrees(np.arcsin(sin_theta))


def _dft_vector(n: int, spacing_wl: float, angle_deg: float) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * np.pi * spacing_wl * math.sin(math.radians(angle_deg)) * k)


def dft_codebook(rows: int, cols: int, oversampling: int = 1, spacing_wl: float = 0.5) -> Codebook:
    """All narrow beams of a rows x cols UPA, oversampled per dimension."""
    if rows < 1 or cols < 1 or oversampling < 1:
        raise ValueError("rows, cols and oversampling must be >= 1")
    # A singleton dimension is never oversampled: that would only clone beams.
    az = _dft_directions(rows, oversampling if rows > 1 else 1, spacing_wl)
    el = _dft_directions(cols, oversampling if cols > 1 else 1, spacing_wl)
    n_el = rows * cols
    beams = np.empty((len(az) * len(el), n_el), dtype=np.complex128)
    az_lab = np.empty(len(az) * len(el))
    el_lab = np.empty(len(az) * len(el))
    b = 0
    for a in az:
        d_r = _dft_vector(rows, spacing_wl, a)
        for e in el:
            d_c = _dft_vector(cols, spacing_wl, e)
            beams[b] = np.kron(d_r, d_c) / math.sqrt(n_el)
            az_lab[b] = a
            el_lab[b] = e
            b += 1
    return Codebook(beams=beams, az_deg=az_lab, el_deg=el_lab,
                    rows=rows, cols=cols, oversampling=oversampling, spacing_wl=spacing_wl)


def scenario_codebook(scenario) -> Codebook:
    """The per-sector codebook implied by a scenario's array config."""
    cfg = scenario.config
    return dft_codebook(cfg.upa_rows, cfg.upa_cols, cfg.codebook_oversampling,
                        cfg.element_spacing_wl)


def aggregate_codebook(cb: Codebook, factor: int = 2) -> Codebook:
    """Coarse wide-beam codebook: normalized sums of factor x factor groups
    of adjacent narrow beams on the (azimuth, elevation) beam grid."""
    n_az = cb.n_az
    n_el = cb.n_el
    if n_az % factor or n_el % factor:
        raise ValueError(f"beam grid {n_az}x{n_el} not divisible by {factor}")
    grid = cb.beams.reshape(n_az, n_el, -1)
    az = cb.az_deg.reshape(n_az, n_el)
    el = cb.el_deg.reshape(n_az, n_el)
    wide = []
    az_lab, el_lab = [], []
    for i in range(0, n_az, factor):
        for j in range(0, n_el, factor):
            v = grid[i:i + factor, j:j + factor].reshape(-1, grid.shape[-1]).sum(axis=0)
            wide.append(v / np.linalg.norm(v))
            az_lab.append(az[i:i + factor, j:j + factor].mean())
            el_lab.append(el[i:i + factor, j:j + factor].mean())
    return Codebook(beams=np.array(wide), az_deg=np.array(az_lab), el_deg=np.array(el_lab),
                    rows=cb.rows, cols=cb.cols, oversampling=cb.oversampling,
                    spacing_wl=cb.spacing_wl)


@dataclass(frozen=True)
class SetB:
    """How the measured beam set relates to the full codebook.

    kind "subset_of_A": measure the narrow beams at `indices`.
    kind "wide_beam":   measure an aggregated coarse codebook instead.
    kind "full":        measure everything (ratio 1).
    kind "compressed":  m linear combinations of all beam channels.
    """
    kind: str
    set_a_size: int
    indices: tuple = ()
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("subset_of_A", "wide_beam", "full", "compressed"):
            raise ValueError(f"unknown SetB kind {self.kind!r}")
        if self.kind in ("subset_of_A", "full"):
            idx = tuple(sorted(set(int(i) for i in self.indices)))
            if len(idx) != len(self.indices):
                raise ValueError("SetB indices must be unique")
            if idx and (idx[0] < 0 or idx[-1] >= self.set_a_size):
                raise ValueError("SetB index out of range")
            object.__setattr__(self, "indices", idx)

    @property
    def ratio(self) -> Fraction:
        if self.kind == "compressed":
            return Fraction(self.m, self.set_a_size)
        if self.kind == "wide_beam":
            return Fraction(self.m, self.set_a_size)
        return Fraction(len(self.indices), self.set_a_size)

    @property
    def measurement_count(self) -> int:
        return self.m if self.kind in ("compressed", "wide_beam") else len(self.indices)


def _as_fraction(ratio) -> Fraction:
    if isinstance(ratio, Fraction):
        return ratio
    if isinstance(ratio, str):
        return Fraction(ratio)
    return Fraction(ratio).limit_denominator(10**6)


def select_set_b(set_a_size: int, pattern: str, ratio, seed: int = 0) -> SetB:
    """Choose the measured subset of the full beam set.

    equidistant: indices {0, k, 2k, ...} with stride k = 1/ratio.
    random:      seeded uniform draw without replacement, sorted.
    """
    frac = _as_fraction(ratio)
    if not 0 < frac <= 1:
        raise ValueError(f"ratio must be in (0, 1], got {frac}")
    count = frac * set_a_size
    if count.denominator != 1:
        raise ValueError(f"ratio {frac} of {set_a_size} beams is not integral")
    count = int(count)
    if frac == 1:
        return SetB(kind="full", set_a_size=set_a_size, indices=tuple(range(set_a_size)))
    if pattern == "equidistant":
        stride = Fraction(1, 1) / frac
        if stride.denominator != 1:
            raise ValueError(f"equidistant sampling needs integral stride, got 1/{frac}")
        idx = tuple(range(0, set_a_size, int(stride)))
        assert len(idx) == count
        return SetB(kind="subset_of_A", set_a_size=set_a_size, indices=idx)
    if pattern == "random":
        rng = np.random.default_rng(seed)
        idx = tuple(sorted(rng.choice(set_a_size, size=count, replace=False).tolist()))
        return SetB(kind="subset_of_A", set_a_size=set_a_size, indices=idx)
    raise ValueError(f"unknown pattern {pattern!r}")
