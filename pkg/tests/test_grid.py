import math

import numpy as np
import pytest

from underspec import (ClfComparison, ClfParams, GridSpec, MonotonicityError, SegParams, Task,
                       UsageError, clf_false_claim_underspec, compare_grids, extract_contour,
                       run_grid, seg_asymptotic_floor)
from underspec.grid import _cleanup_column, default_delta_values, default_n_values
from underspec.seg import seg_prob_from_difference

UNDER_SEG = SegParams(delta_a=0.01, delta_b=0.01)
NS = (10, 30, 100, 300, 1000, 3000, 10_000)


def small_clf(**kw):
    return ClfParams(delta_a=0.01, delta_b=0.01, outer_samples=2000, **kw)


@pytest.fixture(scope="module")
def seg_pair():
    return run_grid(GridSpec(Task.SEGMENTATION)), run_grid(GridSpec(Task.SEGMENTATION, model_params=UNDER_SEG))


def test_default_axes():
    ns, ds = default_n_values(), default_delta_values()
    assert len(ns) == 30 and ns[0] == 10 and ns[-1] == 10_000
    assert all(b > a for a, b in zip(ns, ns[1:]))
    assert len(ds) == 50 and ds[0] == 0.0 and ds[-1] == pytest.approx(0.1)


def test_zero_difference_row_is_half(seg_pair):
    base, _ = seg_pair
    assert np.all(base.probs[0] == 0.5)
    assert base.probs.shape == (50, 30)


def test_underspec_row_above_floor(seg_pair):
    _, under = seg_pair
    ds = np.array(under.spec.delta_values)
    floor = seg_asymptotic_floor(0.01, 0.01, 0.01)
    # no default row sits exactly on 0.01; check rows near it against their own floor
    for i, d in enumerate(ds):
        assert np.all(under.probs[i] > seg_asymptotic_floor(d, 0.01, 0.01) - 1e-15)
    spec = GridSpec(Task.SEGMENTATION, NS, (0.0, 0.01, 0.02), model_params=UNDER_SEG)
    assert np.all(run_grid(spec).probs[1] > floor)


def test_contour_shift_non_negative(seg_pair):
    for s in compare_grids(*seg_pair):
        assert s.baseline is not None and s.underspec is not None
        assert s.shift >= 0.0
        if s.n >= 100:
            assert s.shift > 0.0


def test_identical_grids_zero_shift(seg_pair):
    base, _ = seg_pair
    assert all(s.shift == 0.0 for s in compare_grids(base, base))


def test_compare_axis_mismatch(seg_pair):
    other = run_grid(GridSpec(Task.SEGMENTATION, NS))
    with pytest.raises(UsageError):
        compare_grids(seg_pair[0], other)


def bisect_threshold(f, lo, hi, threshold, iters=60):
    for _ in range(iters):
        mid = (lo + hi) / 2
        if f(mid) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi


@pytest.mark.parametrize("params", [SegParams(), UNDER_SEG])
def test_contour_matches_bisection_seg(params):
    res = run_grid(GridSpec(Task.SEGMENTATION, NS, model_params=params))
    step = res.spec.delta_values[1] - res.spec.delta_values[0]
    for n, c in zip(NS, res.contour):
        direct = bisect_threshold(lambda d: seg_prob_from_difference(d, n, params), 0.0, 0.1, 0.05)
        assert abs(c - direct) <= step


def test_contour_matches_bisection_clf():
    res = run_grid(GridSpec(Task.CLASSIFICATION, (100, 300, 1000)))
    step = res.spec.delta_values[1] - res.spec.delta_values[0]
    for n, c in zip(res.spec.n_values, res.contour):
        direct = bisect_threshold(
            lambda d: clf_false_claim_underspec(ClfComparison(0.737 + d, 0.737, n)), 0.0, 0.1, 0.05)
        assert abs(c - direct) <= step


class TestExtractContour:
    def test_interpolates(self):
        assert extract_contour([0.0, 0.1], [0.15, 0.0], 0.05) == pytest.approx(0.1 * 2 / 3)

    def test_first_row_qualifies(self):
        assert extract_contour([0.0, 0.1], [0.04, 0.01], 0.05) == 0.0

    def test_absent(self):
        assert extract_contour([0.0, 0.1], [0.5, 0.2], 0.05) is None

    def test_skips_invalid(self):
        assert extract_contour([0.0, 0.1, 0.2], [0.5, math.nan, 0.0], 0.05) == pytest.approx(0.2 * 0.9)


class TestCleanup:
    def test_jitter_is_flattened(self):
        p = np.array([0.5, 0.3, 0.3005, 0.1])
        assert _cleanup_column(p, np.full(4, 0.001)) == 1
        assert list(p) == [0.5, 0.3, 0.3, 0.1]

    def test_real_rise_raises(self):
        with pytest.raises(MonotonicityError):
            _cleanup_column(np.array([0.5, 0.3, 0.35]), np.full(3, 0.001))

    def test_exact_cells_get_rounding_slack_only(self):
        with pytest.raises(MonotonicityError):
            _cleanup_column(np.array([0.3, 0.3 + 1e-9]), np.zeros(2))


def test_clf_determinism_across_workers():
    spec = GridSpec(Task.CLASSIFICATION, (10, 100, 1000), tuple(np.linspace(0, 0.1, 7)), model_params=small_clf())
    a = run_grid(spec, workers=1)
    b = run_grid(spec, workers=4)
    assert a.probs.tobytes() == b.probs.tobytes() and a.contour == b.contour


def test_clf_cells_independent_of_subsetting():
    ds = tuple(np.linspace(0, 0.1, 11))
    full = run_grid(GridSpec(Task.CLASSIFICATION, (30, 300, 3000), ds, model_params=small_clf()))
    part = run_grid(GridSpec(Task.CLASSIFICATION, (300,), ds[3:8], model_params=small_clf()))
    assert part.probs[:, 0].tobytes() == full.probs[3:8, 1].tobytes()


@pytest.mark.parametrize("task", [Task.SEGMENTATION, Task.CLASSIFICATION])
def test_columns_non_increasing_in_n_without_seed_variance(task):
    res = run_grid(GridSpec(task))
    assert res.smoothed == 0
    body = res.probs[1:]
    assert np.all(np.diff(body, axis=1) <= 1e-15)


def test_floor_saturation_clf():
    spec = GridSpec(Task.CLASSIFICATION, NS, (0.0, 0.01, 0.03), model_params=small_clf())
    res = run_grid(spec)
    for i, d in enumerate(spec.delta_values):
        floor = seg_asymptotic_floor(d, 0.01, 0.01)
        se = res.stderr[i]
        assert np.all(res.probs[i] >= floor - 4 * se - 1e-12)


def test_invalid_cells():
    spec = GridSpec(Task.CLASSIFICATION, (100, 1000), tuple(np.linspace(0, 0.1, 11)), baseline=0.95)
    res = run_grid(spec)
    assert np.isnan(res.probs[6:]).all() and not np.isnan(res.probs[:6]).any()
    assert all(c is None or c <= 0.05 for c in res.contour)


class TestSpecValidation:
    @pytest.mark.parametrize("kw", [
        {"n_values": ()}, {"n_values": (10, 10)}, {"n_values": (1, 10)},
        {"delta_values": (0.1, 0.0)}, {"delta_values": (-0.1, 0.0)}, {"threshold": 1.5},
        {"task": "regression"}])
    def test_rejects(self, kw):
        with pytest.raises(UsageError):
            GridSpec(**kw)

    def test_default_params_by_task(self):
        assert GridSpec(Task.SEGMENTATION).model_params == SegParams()
        assert GridSpec("clf").model_params == ClfParams()
        assert GridSpec("clf").seed_delta == 0.0
