"""Grid search for the spread parameter shared by both methods.

For segmentation the searched value is the per-case score SD
(``s_a = s_b = s``). For classification it is the accuracy of method B, with
A at ``s + delta``; a per-case Bernoulli SD cannot exceed 0.5, so a fitted
value such as 0.737 only makes sense as an operating point.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .clf import ClfComparison, ClfParams, clf_false_claim_underspec
from .errors import DomainError, UsageError
from .seg import SegParams, seg_prob_from_difference
from .tasks import Task


class ReferencePoint(NamedTuple):
    n: int
    delta_obs: float
    target_prob: float


@dataclass(frozen=True)
class CalibrationSpec:
    task: Task = Task.SEGMENTATION
    s_min: float = 0.05
    s_max: float = 0.5
    steps: int = 451
    fixed: object = None
    refine: bool = False

    def __post_init__(self):
        if not self.s_min < self.s_max:
            raise UsageError(f"s_min must be below s_max, got [{self.s_min}, {self.s_max}]")
        if self.s_min <= 0.0:
            raise UsageError("s_min must be positive")
        if self.steps < 2:
            raise UsageError("the search grid needs at least two steps")
        if self.fixed is None:
            default = SegParams() if self.task is Task.SEGMENTATION else ClfParams()
            object.__setattr__(self, "fixed", default)

    @property
    def candidates(self):
        return np.linspace(self.s_min, self.s_max, self.steps)

    @property
    def step(self):
        return (self.s_max - self.s_min) / (self.steps - 1)


def model_probability(task, s, ref, fixed):
    """The task model's false-claim probability at one reference point."""
    if task is Task.SEGMENTATION:
        params = replace(fixed, s_a=s, s_b=s)
        return float(seg_prob_from_difference(ref.delta_obs, ref.n, params))
    if s + ref.delta_obs > 1.0 or s + ref.delta_obs < 0.0:
        return math.nan
    cmp = ClfComparison(s + ref.delta_obs, s, ref.n)
    return float(clf_false_claim_underspec(cmp, fixed))


def sse_at(spec, s, refs):
    total = 0.0
    for ref in refs:
        p = model_probability(spec.task, s, ref, spec.fixed)
        if math.isnan(p):
            return math.inf
        total += (p - ref.target_prob) ** 2
    return total


def _validate(refs):
    refs = [ReferencePoint(*r) for r in refs]
    if not refs:
        raise UsageError("calibration needs at least one reference point")
    for r in refs:
        if r.n < 2:
            raise DomainError(f"reference n must be >= 2, got {r.n!r}")
        if not 0.0 <= r.target_prob <= 1.0:
            raise DomainError(f"target probability must lie in [0, 1], got {r.target_prob!r}")
    return refs


def calibration_trace(spec, refs, workers=1):
    """``(s, sse)`` for every candidate on the grid, in ascending s."""
    refs = _validate(refs)
    grid = [float(s) for s in spec.candidates]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(lambda s: sse_at(spec, s, refs), grid))
    else:
        errors = [sse_at(spec, s, refs) for s in grid]
    return list(zip(grid, errors))


def _argmin(trace):
    best = trace[0]
    for s, e in trace[1:]:
        if e < best[1] or (e == best[1] and s < best[0]):
            best = (s, e)
    return best


def calibrate_s(spec, refs, workers=1):
    """Return ``(s_best, sse)``; ties go to the smaller s."""
    trace = calibration_trace(spec, refs, workers)
    s_best, sse = _argmin(trace)
    if math.isinf(sse):
        raise UsageError("no candidate s is feasible for these reference points")
    if spec.refine:
        half = spec.step / 2.0
        probes = [s for s in (s_best - half, s_best + half) if spec.s_min <= s <= spec.s_max]
        refs = _validate(refs)
        s_best, sse = _argmin([(s_best, sse)] + [(s, sse_at(spec, s, refs)) for s in probes])
    return s_best, sse
