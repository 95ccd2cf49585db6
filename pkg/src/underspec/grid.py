"""Sweeps over (test-set size, observed difference) and the 0.05 contour."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .clf import ClfComparison, ClfParams, clf_false_claim_exact, clf_underspec_draws, model_table
from .errors import UnderspecError, UsageError
from .seg import SegParams, seg_prob_from_difference
from .tasks import Task

DEFAULT_BASELINE = 0.737
DEFAULT_THRESHOLD = 0.05
# rounding slack for monotonicity checks on closed-form cells
_EXACT_SLACK = 1e-12


class MonotonicityError(UnderspecError):
    """A grid column rose with the difference by more than sampling noise allows."""


def default_n_values():
    return tuple(int(v) for v in np.unique(np.round(np.logspace(1, 4, 30)).astype(int)))


def default_delta_values():
    return tuple(float(v) for v in np.linspace(0.0, 0.10, 50))


@dataclass(frozen=True)
class GridSpec:
    task: Task = Task.SEGMENTATION
    n_values: tuple = field(default_factory=default_n_values)
    delta_values: tuple = field(default_factory=default_delta_values)
    baseline: float = DEFAULT_BASELINE
    model_params: object = None
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "task", Task.parse(self.task))
        ns = tuple(int(n) for n in self.n_values)
        ds = tuple(float(d) for d in self.delta_values)
        object.__setattr__(self, "n_values", ns)
        object.__setattr__(self, "delta_values", ds)
        if not ns or not ds:
            raise UsageError("grid axes must be non-empty")
        if ns[0] < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError("n_values must be strictly increasing and >= 2")
        if ds[0] < 0.0 or any(b <= a for a, b in zip(ds, ds[1:])):
            raise UsageError("delta_values must be strictly increasing and >= 0")
        if not 0.0 <= self.threshold <= 1.0:
            raise UsageError("threshold must lie in [0, 1]")
        if self.model_params is None:
            default = SegParams() if self.task is Task.SEGMENTATION else ClfParams()
            object.__setattr__(self, "model_params", default)
        if self.task is Task.CLASSIFICATION and not 0.0 <= self.baseline <= 1.0:
            raise UsageError("baseline accuracy must lie in [0, 1]")

    @property
    def seed_delta(self):
        return self.model_params.delta_a

    def same_axes(self, other):
        return (self.task is other.task and self.n_values == other.n_values
                and self.delta_values == other.delta_values)


@dataclass
class GridResult:
    spec: GridSpec
    probs: np.ndarray       # [delta_index, n_index], nan where invalid
    stderr: np.ndarray      # Monte Carlo standard error per cell, 0 for closed forms
    contour: list           # per n: smallest delta with prob <= threshold, or None
    smoothed: int = 0       # cells adjusted by the monotone cleanup

    @property
    def valid(self):
        return ~np.isnan(self.probs)

    def rows(self):
        """Grid CSV rows, row-major by difference then test-set size."""
        task = self.spec.task.value
        for i, d in enumerate(self.spec.delta_values):
            for j, n in enumerate(self.spec.n_values):
                yield task, self.spec.seed_delta, n, d, float(self.probs[i, j])


def _cell(spec, d, n):
    """(probability, standard error) at one grid cell."""
    params = spec.model_params
    if spec.task is Task.SEGMENTATION:
        return float(seg_prob_from_difference(d, n, params)), 0.0
    p_a = spec.baseline + d
    if p_a > 1.0:
        return math.nan, 0.0
    cmp = ClfComparison(p_a, spec.baseline, n)
    if not params.underspecified:
        table = model_table(cmp.p_hat_a, cmp.p_hat_b, params, n)
        return float(clf_false_claim_exact(table, params.prior_alphas)), 0.0
    draws = clf_underspec_draws(cmp, params)
    se = float(np.std(draws, ddof=1) / math.sqrt(len(draws))) if len(draws) > 1 else 0.0
    return math.fsum(draws) / len(draws), se


def _cleanup_column(p, se):
    """Turn each column into a non-increasing sequence, tolerating MC jitter."""
    fixed = 0
    prev = None
    for k in range(len(p)):
        if math.isnan(p[k]):
            continue
        if prev is not None and p[k] > p[prev]:
            excess = p[k] - p[prev]
            if excess > 2.0 * max(se[k], se[prev]) + _EXACT_SLACK:
                raise MonotonicityError(
                    f"probability rises by {excess:.3g} between difference rows {prev} and {k}")
            p[k] = p[prev]
            fixed += 1
        prev = k
    return fixed


def extract_contour(deltas, column, threshold):
    """Smallest difference where the column falls to ``threshold``, interpolated."""
    prev = None
    for k, p in enumerate(column):
        if math.isnan(p):
            continue
        if p <= threshold:
            if prev is None:
                return float(deltas[k])
            p0 = column[prev]
            d0, d1 = deltas[prev], deltas[k]
            return float(d0 + (p0 - threshold) / (p0 - p) * (d1 - d0))
        prev = k
    return None


def run_grid(spec, workers=1):
    cells = [(d, n) for d in spec.delta_values for n in spec.n_values]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda c: _cell(spec, *c), cells))
    else:
        values = [_cell(spec, d, n) for d, n in cells]
    shape = (len(spec.delta_values), len(spec.n_values))
    probs = np.array([v[0] for v in values]).reshape(shape)
    stderr = np.array([v[1] for v in values]).reshape(shape)
    smoothed = sum(_cleanup_column(probs[:, j], stderr[:, j]) for j in range(shape[1]))
    contour = [extract_contour(spec.delta_values, probs[:, j], spec.threshold)
               for j in range(shape[1])]
    return GridResult(spec, probs, stderr, contour, smoothed)


class ContourShift(NamedTuple):
    n: int
    baseline: Optional[float]
    underspec: Optional[float]
    shift: Optional[float]


def compare_grids(baseline, underspec):
    """Per-n contour positions of two grids on the same axes and their shift."""
    if not baseline.spec.same_axes(underspec.spec):
        raise UsageError("grids must share task and axes to be compared")
    out = []
    for n, b, u in zip(baseline.spec.n_values, baseline.contour, underspec.contour):
        shift = None if b is None or u is None else u - b
        out.append(ContourShift(n, b, u, shift))
    return out
