import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogarith.activation import (
    ActivationMatrix,
    LearningConfig,
    RTMatrix,
    TrialDraw,
    activation_to_rt,
    activation_variance,
    apply_trial,
    draw_trial,
    expected_activation,
    expected_matrix,
    heatmap_csv,
    make_rng,
    read_heatmap,
    rescale_rt,
    simulate_learning,
    write_heatmap,
)
from cogarith.errors import BadRange

CHI2_999_DF99 = 148.23035916510173  # scipy.stats.chi2.ppf(0.999, 99)


def oracle_increments(index, extent, lf):
    """Cell increments of one trial, written out from the cell lists."""
    inc = {}
    for j in range(extent + 1):
        inc[(index, j)] = inc.get((index, j), 0.0) + 1.0
    for i in range(extent + 1):
        inc[(i, index)] = inc.get((i, index), 0.0) + lf
    return inc


def oracle_moments(i, j, lf):
    """Exact per-trial mean and variance of cell (i, j) by enumerating all 100 draws."""
    xs = [oracle_increments(t, e, lf).get((i, j), 0.0)
          for t, e in itertools.product(range(10), range(10))]
    mean = sum(xs) / 100
    return mean, sum((x - mean) ** 2 for x in xs) / 100


# -- draws ------------------------------------------------------------------

def test_draw_range_and_determinism():
    a, b = make_rng(7), make_rng(7)
    seq_a = [draw_trial(a) for _ in range(1000)]
    seq_b = [draw_trial(b) for _ in range(1000)]
    assert seq_a == seq_b
    assert all(0 <= d.table_index <= 9 and 0 <= d.table_extent <= 9 for d in seq_a)


def test_draws_are_uniform_over_pairs():
    rng = make_rng(12345)
    n = 100_000
    counts = np.zeros((10, 10))
    for _ in range(n):
        d = draw_trial(rng)
        counts[d] += 1
    freq = counts / n
    assert np.all(np.abs(freq - 0.01) <= 0.003)
    chi2 = ((counts - n / 100) ** 2 / (n / 100)).sum()
    assert chi2 < CHI2_999_DF99


# -- single trials ------------------------------------------------------------

def test_trial_2_5():
    m = apply_trial(ActivationMatrix.zeros(), TrialDraw(2, 5), 0.5)
    expected = np.zeros((10, 10))
    expected[2, 0:6] = 1.0
    for i in (0, 1, 3, 4, 5):
        expected[i, 2] = 0.5
    expected[2, 2] = 1.5
    np.testing.assert_array_equal(m.cells, expected)


def test_trial_0_0_single_cell():
    m = apply_trial(ActivationMatrix.zeros(), TrialDraw(0, 0), 0.5)
    assert m.cells[0, 0] == 1.5
    assert m.cells.sum() == 1.5


def test_apply_does_not_mutate_input():
    zero = ActivationMatrix.zeros()
    apply_trial(zero, TrialDraw(3, 9), 0.5)
    assert not zero.cells.any()


@given(st.integers(0, 9), st.integers(0, 9), st.floats(0, 1))
def test_apply_matches_cell_list_oracle(index, extent, lf):
    m = apply_trial(ActivationMatrix.zeros(), TrialDraw(index, extent), lf)
    want = np.zeros((10, 10))
    for cell, v in oracle_increments(index, extent, lf).items():
        want[cell] = v
    np.testing.assert_allclose(m.cells, want, rtol=0, atol=1e-15)
    twice = apply_trial(m, TrialDraw(index, extent), lf)
    np.testing.assert_allclose(twice.cells, 2 * want, rtol=0, atol=1e-15)


# -- expectation ----------------------------------------------------------

@pytest.mark.parametrize("i, j, lf, want", [
    (0, 0, 0.5, 0.15),
    (9, 9, 0.5, 0.015),
    (2, 5, 0.5, 0.09),
])
def test_expected_activation_values(i, j, lf, want):
    assert expected_activation(i, j, lf) == pytest.approx(want, abs=1e-15)


def test_expected_activation_matches_enumeration():
    for lf in (0.0, 0.3, 0.5, 1.0):
        for i, j in itertools.product(range(10), range(10)):
            mean, _ = oracle_moments(i, j, lf)
            assert expected_activation(i, j, lf) == pytest.approx(mean, abs=1e-12)
            assert expected_matrix(lf)[i, j] == pytest.approx(mean, abs=1e-12)


def test_variance_matches_enumeration():
    for lf in (0.0, 0.5, 1.0):
        for i, j in itertools.product(range(10), range(10)):
            _, var = oracle_moments(i, j, lf)
            assert activation_variance(i, j, lf) == pytest.approx(var, abs=1e-12)


@pytest.mark.parametrize("i", range(10))
def test_no_conjugate_learning_ignores_row(i):
    for j in range(10):
        assert expected_activation(i, j, 0.0) == pytest.approx((10 - j) / 100)


def test_expected_activation_strictly_decreasing():
    e = expected_matrix(0.5)
    assert np.all(np.diff(e, axis=0) < 0)
    assert np.all(np.diff(e, axis=1) < 0)
    rt = activation_to_rt(e).cells
    assert np.all(np.diff(rt, axis=0) > 0)
    assert np.all(np.diff(rt, axis=1) > 0)


# -- simulation -------------------------------------------------------------

def test_zero_trials_gives_zero_matrix():
    assert not simulate_learning(LearningConfig(trials=0)).cells.any()


def test_simulation_is_deterministic():
    cfg = LearningConfig(2000, 0.5, 99)
    a, b = simulate_learning(cfg), simulate_learning(cfg)
    assert a.cells.tobytes() == b.cells.tobytes()
    assert simulate_learning(LearningConfig(2000, 0.5, 100)).cells.tobytes() != a.cells.tobytes()


def test_simulation_is_fold_of_apply_trial():
    cfg = LearningConfig(300, 0.5, 3)
    rng = make_rng(cfg.seed)
    m = ActivationMatrix.zeros(cfg)
    for _ in range(cfg.trials):
        m = apply_trial(m, draw_trial(rng), cfg.learning_factor)
    np.testing.assert_array_equal(simulate_learning(cfg).cells, m.cells)


def test_corner_cells_near_expectation():
    m = simulate_learning(LearningConfig(10_000, 0.5, 0)).cells
    assert m[0, 0] == pytest.approx(1500, rel=0.10)
    assert m[9, 9] == pytest.approx(150, rel=0.20)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 400), st.sampled_from([0.0, 0.25, 0.5, 1.0]), st.integers(0, 2**32))
def test_conservation(trials, lf, seed):
    rng = make_rng(seed)
    extents = [draw_trial(rng).table_extent for _ in range(trials)]
    m = simulate_learning(LearningConfig(trials, lf, seed))
    want = sum((e + 1) * (1 + lf) for e in extents)
    assert m.total() == pytest.approx(want, rel=1e-9, abs=1e-12)
    assert m.total() <= trials * 10 * (1 + lf) + 1e-9
    assert (m.cells >= 0).all()


def test_problem_size_in_simulated_means():
    m = simulate_learning(LearningConfig(10_000, 0.5, 5)).cells
    assert np.all(np.diff(m.mean(axis=1)) < 0)
    assert np.all(np.diff(m.mean(axis=0)) < 0)


# -- RT mapping -----------------------------------------------------------

def test_degenerate_matrix_flagged():
    rt = activation_to_rt(np.full((10, 10), 3.0))
    assert rt.degenerate
    assert not rt.cells.any()
    assert activation_to_rt(np.zeros((10, 10))).degenerate


def test_rt_example():
    cells = np.full((10, 10), 2.0)
    cells[0, 0], cells[9, 9] = 4.0, 1.0
    rt = activation_to_rt(cells)
    assert not rt.degenerate
    assert rt[0, 0] == 0.0
    assert rt[9, 9] == 1.0
    mask = np.ones((10, 10), bool)
    mask[0, 0] = mask[9, 9] = False
    np.testing.assert_allclose(rt.cells[mask], 1 / 3, rtol=1e-12)


def test_zero_activation_takes_max_rt():
    cells = np.full((10, 10), 2.0)
    cells[0, 0], cells[5, 5] = 4.0, 0.0
    rt = activation_to_rt(cells)
    assert rt[5, 5] == 1.0


@given(st.lists(st.floats(0.01, 1e4), min_size=100, max_size=100))
def test_rt_anti_monotone(values):
    cells = np.array(values).reshape(10, 10)
    rt = activation_to_rt(cells)
    if rt.degenerate:
        return
    assert rt.cells.min() == 0.0 and rt.cells.max() == 1.0
    flat_a, flat_r = cells.ravel(), rt.cells.ravel()
    for x in range(0, 100, 7):
        for y in range(100):
            if flat_a[x] > flat_a[y]:
                assert flat_r[x] <= flat_r[y]
                if 1 / flat_a[x] < 1 / flat_a[y]:
                    assert flat_r[x] < flat_r[y]


@pytest.mark.parametrize("cell, want", [(0.0, 700.0), (1.0, 1400.0), (0.5, 1050.0)])
def test_rescale(cell, want):
    rt = rescale_rt(RTMatrix(np.full((10, 10), cell)), 700, 1400)
    assert rt.scale == "ms"
    assert rt[3, 4] == want


@pytest.mark.parametrize("lo, hi", [(700, 700), (800, 700)])
def test_rescale_bad_range(lo, hi):
    with pytest.raises(BadRange):
        rescale_rt(RTMatrix(np.zeros((10, 10))), lo, hi)


def test_heatmap_csv_layout(tmp_path):
    cells = np.arange(100, dtype=float).reshape(10, 10) / 7
    text = heatmap_csv(cells)
    lines = text.split("\n")
    assert lines[0] == "i\\j,0,1,2,3,4,5,6,7,8,9"
    assert lines[1].startswith("0,0.000000,0.142857,")
    assert len(lines) == 12 and lines[-1] == ""
    path = write_heatmap(cells, tmp_path / "h.csv")
    np.testing.assert_allclose(read_heatmap(path), cells, atol=5e-7)
    assert b"\r" not in path.read_bytes()
