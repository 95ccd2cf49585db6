"""Segmentation (Dice score) false-claim probability.

The claim "A beats B" is false when the true means are ordered the other
way. Treating the paired comparison as a t-test, its probability is the
Student-t CDF (``n - 1`` degrees of freedom) of the standardized observed
difference. Seed variance enters additively in the squared standard error;
the degrees of freedom are left at ``n - 1``.
"""
import math
from dataclasses import dataclass

from ._backend import core
from .errors import DomainError
from .stats import Probability

DEFAULT_SPREAD = 0.197
DEFAULT_CONGRUENCE = 0.67


@dataclass(frozen=True)
class SegParams:
    s_a: float = DEFAULT_SPREAD
    s_b: float = DEFAULT_SPREAD
    r_ab: float = DEFAULT_CONGRUENCE
    delta_a: float = 0.0
    delta_b: float = 0.0

    def __post_init__(self):
        for name in ("s_a", "s_b", "delta_a", "delta_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be a finite non-negative number, got {v!r}")
        if not -1.0 <= self.r_ab <= 1.0:
            raise DomainError(f"r_ab must lie in [-1, 1], got {self.r_ab!r}")

    @property
    def underspecified(self):
        return self.delta_a > 0.0 or self.delta_b > 0.0

    def without_seed_variance(self):
        return SegParams(self.s_a, self.s_b, self.r_ab)


@dataclass(frozen=True)
class SegComparison:
    """Observed mean scores of the claimed-better method A and of B.

    Either ordering is accepted here; an outperformance claim has
    ``mu_hat_a >= mu_hat_b`` (see ``is_claim``).
    """

    mu_hat_a: float
    mu_hat_b: float
    n: int

    def __post_init__(self):
        for name in ("mu_hat_a", "mu_hat_b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"test-set size n must be an integer >= 2, got {self.n!r}")

    @property
    def is_claim(self):
        return self.mu_hat_a >= self.mu_hat_b

    @property
    def difference(self):
        return self.mu_hat_a - self.mu_hat_b


def seg_standard_error(params, n):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    s_a, s_b = params.s_a, params.s_b
    paired = s_a * s_a + s_b * s_b - 2.0 * s_a * s_b * params.r_ab
    var = max(paired, 0.0) / n + params.delta_a ** 2 + params.delta_b ** 2
    return math.sqrt(var)


def seg_prob_from_difference(difference, n, params):
    """False-claim probability for an observed difference ``mu_a - mu_b``."""
    se = seg_standard_error(params, n)
    if se == 0.0:
        if difference == 0.0:
            return Probability(0.5, degenerate=True)
        return Probability(0.0 if difference > 0.0 else 1.0, degenerate=True)
    return Probability(core.student_t_cdf(-difference / se, n - 1.0))


def seg_false_claim_prob(cmp, params=SegParams()):
    """P(mu_A <= mu_B | observed means, n).

    When the standard error is zero the result is a boundary value (0, 1
    or 0.5 for a tie) with ``degenerate`` set.
    """
    return seg_prob_from_difference(cmp.mu_hat_a - cmp.mu_hat_b, cmp.n, params)


def seg_asymptotic_floor(delta_obs, delta_a, delta_b):
    """Large-n limit of the false-claim probability under seed variance."""
    if delta_a < 0.0 or delta_b < 0.0:
        raise DomainError("seed-variance standard deviations must be non-negative")
    spread = math.hypot(delta_a, delta_b)
    if spread == 0.0:
        raise DomainError("no floor without seed variance: the limit is a step function")
    return Probability(core.normal_cdf(-delta_obs / spread))
