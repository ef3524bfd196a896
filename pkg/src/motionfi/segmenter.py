"""Repetition counting via joint segmentation/template optimization.

The counter alternates two steps until the motion template stabilizes:

1. given the current template, find the globally cost-minimal partition of
   the envelope into segments whose lengths lie in a configured window
   (dynamic program over segment end positions, DTW segment costs);
2. given the partition, rebuild the template as the length-weighted mean
   of the segments spline-warped to a common length.

The template starts as a zero vector, so the first partition is driven by
signal amplitude alone. The repetition count is the number of segments of
the final partition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, floor

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator

from .dsp import warp_spline
from .errors import InfeasibleSegmentationError, InputError
from .validation import as_float_array


@njit(cache=True)
def _dtw_dist(a, b, squared):
    """DTW distance with pointwise cost |a_i - b_j| (or squared difference).

    Rolling two-row evaluation of the classic recurrence with steps
    (i-1, j), (i, j-1), (i-1, j-1).
    """
    n = a.shape[0]
    m = b.shape[0]
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    for j in range(m + 1):
        prev[j] = np.inf
    prev[0] = 0.0
    for i in range(n):
        cur[0] = np.inf
        ai = a[i]
        for j in range(m):
            d = ai - b[j]
            if squared:
                c = d * d
            else:
                c = abs(d)
            best = prev[j]
            if prev[j + 1] < best:
                best = prev[j + 1]
            if cur[j] < best:
                best = cur[j]
            cur[j + 1] = c + best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m]


@njit(cache=True)
def _segment_cost_table(x, template, min_len, max_len, squared):
    """table[s, k] = DTW cost of x[s : s+min_len+k] against the template.

    One DTW matrix per start position covers every admissible segment
    length at that start: row i of the matrix is exactly the full DTW
    evaluation of the prefix x[s : s+i], so each table entry is
    bit-identical to a fresh ``_dtw_dist`` call on that slice.
    """
    n = x.shape[0]
    m = template.shape[0]
    width = max_len - min_len + 1
    table = np.full((n, width), np.inf)
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    for s in range(n - min_len + 1):
        longest = max_len
        if n - s < longest:
            longest = n - s
        for j in range(m + 1):
            prev[j] = np.inf
        prev[0] = 0.0
        for i in range(longest):
            cur[0] = np.inf
            ai = x[s + i]
            for j in range(m):
                d = ai - template[j]
                if squared:
                    c = d * d
                else:
                    c = abs(d)
                best = prev[j]
                if prev[j + 1] < best:
                    best = prev[j + 1]
                if cur[j] < best:
                    best = cur[j]
                cur[j + 1] = c + best
            if i + 1 >= min_len:
                table[s, i + 1 - min_len] = cur[m]
            tmp = prev
            prev = cur
            cur = tmp
    return table


@njit(cache=True)
def _best_partition(table, n, min_len, max_len):
    """DP over segment end positions; returns accumulated costs and choices.

    best_cost[l] is the minimal cost of partitioning x[:l]; best_len[l] is
    the final segment length achieving it (-1 where infeasible). Ties keep
    the shortest length.
    """
    best_cost = np.full(n + 1, np.inf)
    best_len = np.full(n + 1, -1, dtype=np.int64)
    best_cost[0] = 0.0
    for l in range(min_len, n + 1):
        top = max_len
        if l < top:
            top = l
        bc = np.inf
        bl = -1
        for seg_len in range(min_len, top + 1):
            tau = l - seg_len
            prior = best_cost[tau]
            if prior == np.inf:
                continue
            v = prior + table[tau, seg_len - min_len]
            if v < bc:
                bc = v
                bl = seg_len
        best_cost[l] = bc
        best_len[l] = bl
    return best_cost, best_len


def dtw(a, b, squared: bool = False) -> float:
    """Dynamic time warping distance between two sequences.

    Both sequences are stretched onto a common warped length L with
    max(|a|,|b|) <= L <= |a|+|b| by repeating elements; the result is the
    minimal sum of pointwise costs over all monotone alignments. Symmetric,
    nonnegative, and zero exactly when the sequences are equal up to
    element repetition.
    """
    arr_a = as_float_array(a, "a", min_len=1)
    arr_b = as_float_array(b, "b", min_len=1)
    return float(_dtw_dist(arr_a, arr_b, squared))


@dataclass(frozen=True)
class SegmenterConfig:
    """Counter configuration.

    Attributes:
        t_min_s, t_max_s: admissible cycle duration window (seconds).
        sample_rate: envelope sample rate (Hz).
        template_len: template length in samples; default
            round(0.5 * (t_min_s + t_max_s) * sample_rate).
        convergence_threshold: stop once the DTW distance between
            successive templates falls below this; default
            0.01 * template_len * (max(x) - min(x)) per signal.
        max_iterations: hard cap on alternation rounds.
        squared_cost: use squared pointwise differences instead of
            absolute differences in the DTW.
    """

    t_min_s: float
    t_max_s: float
    sample_rate: float
    template_len: int | None = None
    convergence_threshold: float | None = None
    max_iterations: int = 50
    squared_cost: bool = False

    def __post_init__(self):
        if not 0 < self.t_min_s < self.t_max_s:
            raise InputError(
                f"need 0 < t_min_s < t_max_s, got {self.t_min_s!r}, {self.t_max_s!r}"
            )
        if self.sample_rate <= 0:
            raise InputError(f"sample_rate must be positive, got {self.sample_rate!r}")
        if self.min_len < 2:
            raise InputError(
                f"t_min_s * sample_rate must round up to at least 2 samples, "
                f"got {self.min_len}"
            )
        if self.min_len > self.max_len:
            raise InputError(
                f"no admissible segment length: ceil(t_min_s*C)={self.min_len} exceeds "
                f"floor(t_max_s*C)={self.max_len}"
            )
        if self.template_len is not None and self.template_len < 2:
            raise InputError(f"template_len must be >= 2, got {self.template_len!r}")
        if self.convergence_threshold is not None and self.convergence_threshold < 0:
            raise InputError(
                f"convergence_threshold must be nonnegative, got {self.convergence_threshold!r}"
            )
        if self.max_iterations < 1:
            raise InputError(f"max_iterations must be >= 1, got {self.max_iterations!r}")

    @property
    def min_len(self) -> int:
        return int(ceil(self.t_min_s * self.sample_rate))

    @property
    def max_len(self) -> int:
        return int(floor(self.t_max_s * self.sample_rate))

    def resolved_template_len(self) -> int:
        if self.template_len is not None:
            return self.template_len
        return int(round(0.5 * (self.t_min_s + self.t_max_s) * self.sample_rate))


@dataclass(frozen=True)
class Segmentation:
    """A contiguous, gap-free partition of a signal into segments.

    ``boundaries`` is the strictly increasing index fence [0, b_1, ..., n];
    segment k covers the half-open range [boundaries[k], boundaries[k+1]).
    """

    boundaries: np.ndarray
    total_cost: float

    def __post_init__(self):
        bounds = np.asarray(self.boundaries, dtype=np.int64)
        if bounds.ndim != 1 or bounds.shape[0] < 2:
            raise InputError("boundaries must hold at least [0, n]")
        if bounds[0] != 0 or np.any(np.diff(bounds) <= 0):
            raise InputError("boundaries must start at 0 and be strictly increasing")
        bounds.setflags(write=False)
        object.__setattr__(self, "boundaries", bounds)

    @property
    def n_segments(self) -> int:
        return self.boundaries.shape[0] - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(self.boundaries[:-1], self.boundaries[1:])]

    def segments(self, x: np.ndarray):
        for a, b in self.pairs():
            yield x[a:b]


@dataclass(frozen=True)
class SegmentationResult:
    """Converged output of the alternating optimization."""

    segmentation: Segmentation
    template: np.ndarray
    iterations: int
    converged: bool
    per_iteration_costs: tuple[float, ...]

    @property
    def count(self) -> int:
        return self.segmentation.n_segments


def dist_to_template(x, segmentation: Segmentation, template, squared: bool = False) -> float:
    """Sum of per-segment DTW distances to the template."""
    arr = as_float_array(x, "x", min_len=1)
    tmpl = as_float_array(template, "template", min_len=1)
    if segmentation.boundaries[-1] != arr.shape[0]:
        raise InputError(
            f"segmentation covers {segmentation.boundaries[-1]} samples "
            f"but x has {arr.shape[0]}"
        )
    total = 0.0
    for a, b in segmentation.pairs():
        total = total + float(_dtw_dist(arr[a:b], tmpl, squared))
    return total


def update_segmentation(x, template, config: SegmenterConfig) -> Segmentation:
    """Globally cost-minimal partition of ``x`` against a fixed template.

    Raises InfeasibleSegmentationError when no combination of segment
    lengths inside the window sums to len(x).
    """
    arr = as_float_array(x, "x", min_len=1)
    tmpl = as_float_array(template, "template", min_len=1)
    n = arr.shape[0]
    lo, hi = config.min_len, config.max_len
    if n < lo:
        raise InfeasibleSegmentationError(
            f"cannot partition {n} samples into segments of length {lo}..{hi}"
        )
    table = _segment_cost_table(arr, tmpl, lo, hi, config.squared_cost)
    best_cost, best_len = _best_partition(table, n, lo, hi)
    if not np.isfinite(best_cost[n]):
        raise InfeasibleSegmentationError(
            f"cannot partition {n} samples into segments of length {lo}..{hi}"
        )
    fence = [n]
    while fence[-1] > 0:
        fence.append(fence[-1] - int(best_len[fence[-1]]))
    fence.reverse()
    return Segmentation(boundaries=np.asarray(fence), total_cost=float(best_cost[n]))


def update_template(x, segmentation: Segmentation, m: int) -> np.ndarray:
    """Length-weighted mean of the segments warped to a common length."""
    arr = as_float_array(x, "x", min_len=1)
    if segmentation.boundaries[-1] != arr.shape[0]:
        raise InputError(
            f"segmentation covers {segmentation.boundaries[-1]} samples "
            f"but x has {arr.shape[0]}"
        )
    total = np.zeros(m)
    for segment in segmentation.segments(arr):
        total += segment.shape[0] * warp_spline(segment, m)
    return total / arr.shape[0]


def segment_motions(x, config: SegmenterConfig) -> SegmentationResult:
    """Count repetitions by alternating partition and template updates.

    Starts from a zero template, stops when the DTW distance between
    successive templates drops below the convergence threshold or after
    ``config.max_iterations`` rounds.
    """
    arr = as_float_array(x, "x", min_len=1)
    m = config.resolved_template_len()
    threshold = config.convergence_threshold
    if threshold is None:
        threshold = 0.01 * m * float(arr.max() - arr.min())
    template = np.zeros(m)
    costs: list[float] = []
    segmentation = None
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        segmentation = update_segmentation(arr, template, config)
        costs.append(segmentation.total_cost)
        new_template = update_template(arr, segmentation, m)
        delta = float(_dtw_dist(new_template, template, config.squared_cost))
        template = new_template
        if delta < threshold:
            converged = True
            break
    return SegmentationResult(
        segmentation=segmentation,
        template=template,
        iterations=iterations,
        converged=converged,
        per_iteration_costs=tuple(costs),
    )


def count_error_ratio(n_est: int, n_truth: int) -> float:
    """Signed percentage deviation of an estimated count from the truth."""
    if n_truth < 1:
        raise InputError(f"n_truth must be >= 1, got {n_truth!r}")
    return (n_est - n_truth) / n_truth * 100.0


class MotionSegmenter(BaseEstimator):
    """Estimator wrapper around :func:`segment_motions`.

    Parameters mirror :class:`SegmenterConfig`; after ``fit`` the partition
    is exposed through ``boundaries_``, ``template_``, ``count_``,
    ``converged_``, ``n_iterations_``, and ``per_iteration_costs_``.
    """

    def __init__(
        self,
        t_min_s: float = 0.5,
        t_max_s: float = 2.0,
        sample_rate: float = 100.0,
        template_len: int | None = None,
        convergence_threshold: float | None = None,
        max_iterations: int = 50,
        squared_cost: bool = False,
    ):
        self.t_min_s = t_min_s
        self.t_max_s = t_max_s
        self.sample_rate = sample_rate
        self.template_len = template_len
        self.convergence_threshold = convergence_threshold
        self.max_iterations = max_iterations
        self.squared_cost = squared_cost

    def _config(self) -> SegmenterConfig:
        return SegmenterConfig(
            t_min_s=self.t_min_s,
            t_max_s=self.t_max_s,
            sample_rate=self.sample_rate,
            template_len=self.template_len,
            convergence_threshold=self.convergence_threshold,
            max_iterations=self.max_iterations,
            squared_cost=self.squared_cost,
        )

    def fit(self, x, y=None):
        result = segment_motions(x, self._config())
        self.result_ = result
        self.boundaries_ = result.segmentation.boundaries
        self.template_ = result.template
        self.count_ = result.count
        self.converged_ = result.converged
        self.n_iterations_ = result.iterations
        self.per_iteration_costs_ = result.per_iteration_costs
        return self

    def fit_predict(self, x, y=None) -> int:
        """Fit and return the repetition count."""
        return self.fit(x).count_
