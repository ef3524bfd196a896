"""DTW distance: examples, metric-like properties, brute-force equality."""
import numpy as np
import pytest

from motionfi import InputError, dtw
from motionfi.segmenter import _dtw_dist, _segment_cost_table


def dtw_brute_force(a, b):
    """Minimum over all monotone alignment paths, summed in path order."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    n, m = len(a), len(b)
    best = [np.inf]

    def walk(i, j, cost):
        cost = cost + abs(a[i] - b[j])
        if i == n - 1 and j == m - 1:
            if cost < best[0]:
                best[0] = cost
            return
        if i + 1 < n:
            walk(i + 1, j, cost)
        if j + 1 < m:
            walk(i, j + 1, cost)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, cost)

    walk(0, 0, 0.0)
    return best[0]


def run_length_equal(a, b):
    """True when the two sequences are equal after collapsing repeats."""

    def collapse(x):
        out = []
        for v in x:
            if not out or out[-1] != v:
                out.append(v)
        return out

    return collapse(a) == collapse(b)


class TestDtwExamples:
    def test_identity(self, rng):
        for _ in range(10):
            a = rng.standard_normal(int(rng.integers(1, 12)))
            assert dtw(a, a) == 0.0

    def test_single_cell(self):
        assert dtw([0.0], [5.0]) == 5.0

    def test_small_alignment(self):
        assert dtw([1.0, 2.0, 3.0], [1.0, 3.0]) == 1.0
        assert dtw([1.0, 2.0, 3.0], [1.0, 3.0]) == dtw_brute_force([1, 2, 3], [1, 3])

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            dtw([], [1.0])

    def test_squared_cost_variant(self):
        assert dtw([0.0], [3.0], squared=True) == 9.0


class TestDtwProperties:
    def test_symmetry_and_nonnegativity(self, rng):
        for _ in range(100):
            a = rng.standard_normal(int(rng.integers(1, 8)))
            b = rng.standard_normal(int(rng.integers(1, 8)))
            d = dtw(a, b)
            assert d >= 0.0
            assert d == dtw(b, a)

    def test_zero_iff_equal_up_to_repetition(self, rng):
        values = [0.5, -1.25, 2.0]
        for _ in range(200):
            a = [values[int(k)] for k in rng.integers(0, 3, size=int(rng.integers(1, 6)))]
            b = [values[int(k)] for k in rng.integers(0, 3, size=int(rng.integers(1, 6)))]
            d = dtw(a, b)
            if run_length_equal(a, b):
                assert d == 0.0
            else:
                assert d > 0.0

    def test_matches_brute_force_on_short_pairs(self, rng):
        for _ in range(200):
            a = np.round(rng.standard_normal(int(rng.integers(1, 7))), 3)
            b = np.round(rng.standard_normal(int(rng.integers(1, 7))), 3)
            assert dtw(a, b) == dtw_brute_force(a, b)


class TestIncrementalCostTable:
    def test_bit_identical_to_fresh_dtw(self, rng):
        # the shared-prefix table must match a fresh DTW per segment exactly
        x = rng.standard_normal(40)
        template = rng.standard_normal(9)
        lo, hi = 3, 11
        table = _segment_cost_table(x, template, lo, hi, False)
        for start in range(x.shape[0] - lo + 1):
            for seg_len in range(lo, min(hi, x.shape[0] - start) + 1):
                fresh = _dtw_dist(np.ascontiguousarray(x[start : start + seg_len]), template, False)
                assert table[start, seg_len - lo] == fresh

    def test_unreachable_entries_are_inf(self, rng):
        x = rng.standard_normal(10)
        table = _segment_cost_table(x, rng.standard_normal(4), 3, 6, False)
        assert np.isinf(table[9, 0])  # start 9 leaves only 1 sample
        assert np.isinf(table[8, 3])  # start 8 cannot reach length 6
