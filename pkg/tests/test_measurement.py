import numpy as np
import pytest
from fractions import Fraction

from railbeam.channel import PathSet, beam_coefficients, beam_rsrp
from railbeam.codebook import SetB, dft_codebook, select_set_b
from railbeam.measurement import (
    CompressionMatrix,
    L3State,
    add_measurement_noise,
    cs_measure,
    downsample_measure,
    l3_update,
)


# --- down-sampling ----------------------------------------------------------

def test_downsample_identity_at_ratio_one():
    sb = select_set_b(4, "equidistant", 1)
    v = np.array([0.0, -1.0, -2.0, -3.0])
    assert np.array_equal(downsample_measure(v, sb), v)


def test_downsample_gather():
    sb = SetB(kind="subset_of_A", set_a_size=4, indices=(0, 2))
    v = np.array([0.0, -1.0, -2.0, -3.0])
    assert np.array_equal(downsample_measure(v, sb), [0.0, -2.0])


def test_downsample_equidistant_64():
    # oracle: plain python gather
    sb = select_set_b(64, "equidistant", Fraction(1, 16))
    v = np.arange(64, dtype=float) * -0.5
    got = downsample_measure(v, sb)
    assert list(got) == [v[i] for i in (0, 16, 32, 48)]


def test_downsample_requires_subset_kind():
    sb = SetB(kind="compressed", set_a_size=64, m=4)
    with pytest.raises(ValueError):
        downsample_measure(np.zeros(64), sb)


def test_downsample_index_out_of_range():
    sb = SetB(kind="subset_of_A", set_a_size=64, indices=(0, 63))
    with pytest.raises(IndexError):
        downsample_measure(np.zeros(32), sb)


# --- compressed measurements ------------------------------------------------

def test_selection_matrix_equals_downsampled_entries_bitwise():
    sb = select_set_b(64, "equidistant", Fraction(1, 16))
    m = CompressionMatrix.selection(sb)
    rng = np.random.default_rng(0)
    h = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    y = cs_measure(h, m)
    gathered = h[list(sb.indices)]
    assert np.array_equal(y, gathered)  # bitwise


def test_cs_zero_input():
    m = CompressionMatrix.gaussian(4, 64, seed=1)
    assert np.array_equal(cs_measure(np.zeros(64, dtype=complex), m), np.zeros(4))


def test_cs_matches_naive_double_loop():
    # oracle: naive O(m*n) accumulation
    rng = np.random.default_rng(3)
    m = CompressionMatrix.gaussian(5, 16, seed=4)
    h = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    got = cs_measure(h, m)
    mat = m.matrix
    want = np.zeros(5, dtype=complex)
    for i in range(5):
        acc = 0j
        for j in range(16):
            acc += mat[i, j] * h[j]
        want[i] = acc
    assert np.max(np.abs(got - want)) < 1e-12


def test_cs_linearity():
    rng = np.random.default_rng(9)
    m = CompressionMatrix.gaussian(6, 32, seed=2)
    h1 = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    h2 = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    a = 2.7 - 0.3j
    lhs = cs_measure(a * h1 + h2, m)
    rhs = a * cs_measure(h1, m) + cs_measure(h2, m)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_cs_dimension_mismatch():
    m = CompressionMatrix.gaussian(4, 64, seed=1)
    with pytest.raises(ValueError):
        cs_measure(np.zeros(32, dtype=complex), m)


def test_selection_rows_are_one_hot():
    sb = select_set_b(16, "equidistant", Fraction(1, 4))
    m = CompressionMatrix.selection(sb)
    assert np.array_equal(m.w_re.sum(axis=1), np.ones(4))
    assert np.all((m.w_re == 0) | (m.w_re == 1))
    assert np.all(m.w_im == 0)
    assert not m.learnable


def test_bridge_selection_pipeline_reproduces_downsampled_power():
    # the invariant the measurement comparison rests on: selection-compressed
    # |y|^2 equals the linear power that RSRP down-sampling sees
    cb = dft_codebook(8, 8, 1)
    ps = PathSet(gains=np.array([1e-5 + 3e-6j, 1e-6 - 2e-6j]),
                 azimuth_deg=np.array([12.0, -33.0]),
                 elevation_deg=np.array([-4.0, 3.0]), los=True)
    g = beam_coefficients(ps, cb, 30.0)
    rsrp = beam_rsrp(ps, cb, 30.0)
    sb = select_set_b(64, "equidistant", Fraction(1, 16))
    y = cs_measure(g, CompressionMatrix.selection(sb))
    assert np.array_equal(y, g[list(sb.indices)])  # bitwise on measurements
    lin_down = 10.0 ** (downsample_measure(rsrp, sb) / 10.0)
    assert np.allclose(np.abs(y) ** 2, lin_down, rtol=1e-12)


# --- L3 filtering -----------------------------------------------------------

def test_l3_cold_start_max():
    st = L3State(n_cells=1, aggregation="max")
    l3_update(st, [np.array([-80.0, -90.0])])
    assert st.filtered[0] == -80.0


def test_l3_alpha_one_tracks_instant():
    st = L3State(n_cells=1, alpha=1.0)
    for v in (-80.0, -70.0, -95.0):
        l3_update(st, [np.array([v])])
        assert st.filtered[0] == v


def test_l3_constant_input_fixed_point():
    # oracle: iterate the EMA recurrence explicitly
    st = L3State(n_cells=1, alpha=0.5)
    c = -73.0
    ref = None
    for _ in range(10):
        l3_update(st, [np.array([c])])
        ref = c if ref is None else 0.5 * ref + 0.5 * c
        assert abs(st.filtered[0] - ref) < 1e-12
        assert abs(st.filtered[0] - c) < 1e-12


def test_l3_mean_aggregation():
    st = L3State(n_cells=1, aggregation="mean")
    l3_update(st, [np.array([-80.0, -90.0])])
    assert st.filtered[0] == -85.0


def test_l3_window_mean_mode():
    st = L3State(n_cells=1, filter_kind="window_mean", window=2)
    l3_update(st, [np.array([-80.0])])
    l3_update(st, [np.array([-90.0])])
    l3_update(st, [np.array([-100.0])])
    assert st.filtered[0] == -95.0


def test_l3_empty_beam_vector_rejected():
    st = L3State(n_cells=1)
    with pytest.raises(ValueError):
        l3_update(st, [np.array([])])


def test_l3_output_bounded_by_history():
    rng = np.random.default_rng(11)
    st = L3State(n_cells=3, alpha=0.5, aggregation="max")
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    for _ in range(50):
        beams = rng.uniform(-120, -60, size=(3, 8))
        inst = beams.max(axis=1)
        lo = np.minimum(lo, inst)
        hi = np.maximum(hi, inst)
        l3_update(st, beams)
        assert np.all(st.filtered >= lo - 1e-12)
        assert np.all(st.filtered <= hi + 1e-12)


# --- measurement noise ------------------------------------------------------

def test_noise_off_is_exact():
    v = np.array([-80.0, -90.0])
    out = add_measurement_noise(v, 0.0, np.random.default_rng(0))
    assert np.array_equal(out, v)


def test_noise_deterministic_and_scaled():
    v = np.zeros(10000)
    a = add_measurement_noise(v, 1.0, np.random.default_rng(42))
    b = add_measurement_noise(v, 1.0, np.random.default_rng(42))
    assert np.array_equal(a, b)
    assert abs(a.std() - 1.0) < 0.05
