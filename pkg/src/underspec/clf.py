"""Classification (accuracy) false-claim probability.

The two classifiers' joint correctness on the test set is a 2x2 table
``(n11, n10, n01, n00)`` (both right, only A right, only B right, both
wrong) with a Dirichlet prior. Only marginal accuracies are usually
reported, so the table is imputed from them and a congruence ``p11``.

Under the Dirichlet posterior, A is not better than B exactly when
``theta10 <= theta01``. The ratio ``theta10 / (theta10 + theta01)`` is
Beta(n10 + a10, n01 + a01), which gives the closed form used by
``clf_false_claim_exact``; ``clf_false_claim_mc`` estimates the same number
by sampling and is kept as a cross-check.

Tables come in two flavours. ``impute_table`` returns integer counts. The
models default to ``expected_table``, the real-valued counts
``n * P(cell)``: the posterior is the same Dirichlet with fractional
pseudo-counts, and it avoids the staircase that integer rounding puts into
probability-vs-difference curves at small n.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import core
from .errors import DomainError
from .stats import Probability, Rng

DEFAULT_CONGRUENCE = 0.67
FLAT_PRIOR = (1.0, 1.0, 1.0, 1.0)


class ContingencyTable(NamedTuple):
    """Joint correctness counts; real-valued when built by ``expected_table``."""

    n11: float
    n10: float
    n01: float
    n00: float

    @property
    def n(self):
        return self.n11 + self.n10 + self.n01 + self.n00

    @property
    def accuracy_a(self):
        return (self.n11 + self.n10) / self.n

    @property
    def accuracy_b(self):
        return (self.n11 + self.n01) / self.n


@dataclass(frozen=True)
class ClfComparison:
    p_hat_a: float
    p_hat_b: float
    n: int

    def __post_init__(self):
        for name in ("p_hat_a", "p_hat_b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"test-set size n must be a positive integer, got {self.n!r}")

    @property
    def is_claim(self):
        return self.p_hat_a >= self.p_hat_b


@dataclass(frozen=True)
class ClfParams:
    congruence_p11: float = DEFAULT_CONGRUENCE
    prior_alphas: tuple = FLAT_PRIOR
    delta_a: float = 0.0
    delta_b: float = 0.0
    mc_samples: int = 100_000
    outer_samples: int = 10_000
    seed: int = 42
    inner: str = "exact"
    counts: str = "expected"

    def __post_init__(self):
        if not 0.0 <= self.congruence_p11 <= 1.0:
            raise DomainError(f"congruence_p11 must lie in [0, 1], got {self.congruence_p11!r}")
        _check_prior(self.prior_alphas)
        for name in ("delta_a", "delta_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be a finite non-negative number, got {v!r}")
        if self.mc_samples < 1 or self.outer_samples < 1:
            raise DomainError("sample budgets must be positive")
        if self.inner not in ("exact", "mc"):
            raise DomainError(f"inner must be 'exact' or 'mc', got {self.inner!r}")
        if self.counts not in ("expected", "integer"):
            raise DomainError(f"counts must be 'expected' or 'integer', got {self.counts!r}")

    @property
    def fractional(self):
        return self.counts == "expected"

    @property
    def underspecified(self):
        return self.delta_a > 0.0 or self.delta_b > 0.0


def _check_prior(alphas):
    if len(alphas) != 4 or not all(a > 0.0 and math.isfinite(a) for a in alphas):
        raise DomainError(f"prior needs four positive weights, got {tuple(alphas)!r}")


def _check_table(table):
    if len(table) != 4 or not all(math.isfinite(c) and c >= 0 for c in table):
        raise DomainError(f"table needs four non-negative counts, got {tuple(table)!r}")


def _check_inputs(p_a, p_b, p11, n):
    for name, v in (("p_a", p_a), ("p_b", p_b), ("p11", p11)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")


def congruence_bounds(p_a, p_b):
    """Feasible range of P(both correct) given the two accuracies."""
    return max(0.0, p_a + p_b - 1.0), min(p_a, p_b)


def impute_table(p_a, p_b, p11, n):
    """Integer 2x2 table whose marginals match the accuracies.

    ``p11`` is clamped into ``congruence_bounds(p_a, p_b)``; the four
    fractional counts are rounded by largest remainder (ties to the lower
    cell index) so they sum to n.
    """
    _check_inputs(p_a, p_b, p11, n)
    return ContingencyTable(*core.impute(float(p_a), float(p_b), float(p11), int(n)))


def expected_table(p_a, p_b, p11, n):
    """Real-valued counts ``n * P(cell)`` with ``p11`` clamped as above."""
    _check_inputs(p_a, p_b, p11, n)
    return ContingencyTable(*core.expected(float(p_a), float(p_b), float(p11), int(n)))


def model_table(p_a, p_b, params, n):
    """The table the models use under ``params.counts``."""
    build = expected_table if params.fractional else impute_table
    return build(p_a, p_b, params.congruence_p11, n)


def clf_false_claim_exact(table, prior_alphas=FLAT_PRIOR):
    """Posterior P(p_A <= p_B) as I_0.5(n10 + a10, n01 + a01)."""
    _check_table(table)
    _check_prior(prior_alphas)
    return Probability(core.betainc(table[1] + prior_alphas[1], table[2] + prior_alphas[2], 0.5, 0.5))


def clf_false_claim_mc(table, prior_alphas, mc_samples, rng):
    """Monte Carlo estimate of ``clf_false_claim_exact``; ties count one half."""
    _check_table(table)
    _check_prior(prior_alphas)
    if mc_samples < 1:
        raise DomainError("mc_samples must be positive")
    wins, ties = core.mc_counts(rng.key, rng.take(mc_samples), mc_samples,
                                float(table[1] + prior_alphas[1]),
                                float(table[2] + prior_alphas[2]))
    return Probability((2 * wins + ties) / (2 * mc_samples))


def clf_asymptotic_floor(delta_obs, delta_a, delta_b):
    """Heuristic large-n limit: posterior width vanishes, seed variance remains."""
    if delta_a < 0.0 or delta_b < 0.0:
        raise DomainError("seed-variance standard deviations must be non-negative")
    spread = math.hypot(delta_a, delta_b)
    if spread == 0.0:
        raise DomainError("no floor without seed variance: the limit is a step function")
    return Probability(core.normal_cdf(-delta_obs / spread))


def perturbation_rng(seed, n):
    """Generator for the accuracy perturbations of a comparison at size ``n``.

    Keyed on ``n`` rather than on the accuracies, so comparisons that share
    a test-set size (one column of a grid) see the same Gaussian draws.
    """
    return Rng(seed).child(n)


def _chunks(total, workers):
    size = -(-total // workers)
    return [(lo, min(size, total - lo)) for lo in range(0, total, size)]


def clf_underspec_draws(cmp, params, workers=1):
    """Per-draw posterior false-claim probabilities of the perturbed tables."""
    rng = perturbation_rng(params.seed, cmp.n)
    args = (cmp.p_hat_a, cmp.p_hat_b, params.congruence_p11, cmp.n,
            params.delta_a, params.delta_b)
    fractional = params.fractional
    prior = tuple(float(a) for a in params.prior_alphas)

    if params.inner == "exact":
        def run(chunk):
            return core.underspec_exact(rng.key, chunk[0], chunk[1], *args, prior, fractional)
    else:
        def run(chunk):
            tables = core.underspec_tables(rng.key, chunk[0], chunk[1], *args, fractional)
            return np.array([
                clf_false_claim_mc(tuple(t), prior, params.mc_samples, rng.child(chunk[0] + i))
                for i, t in enumerate(tables.tolist())])

    chunks = _chunks(params.outer_samples, max(1, workers))
    if len(chunks) == 1:
        return run(chunks[0])
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return np.concatenate(list(pool.map(run, chunks)))


def clf_false_claim_underspec(cmp, params=ClfParams(), workers=1):
    """False-claim probability with Gaussian seed noise on both accuracies.

    Averages the posterior probability over ``outer_samples`` perturbed
    accuracy pairs. Without seed variance this is exactly the baseline
    model on the unperturbed table.
    """
    if not params.underspecified:
        table = model_table(cmp.p_hat_a, cmp.p_hat_b, params, cmp.n)
        if params.inner == "mc":
            rng = perturbation_rng(params.seed, cmp.n)
            return clf_false_claim_mc(table, params.prior_alphas, params.mc_samples, rng)
        return clf_false_claim_exact(table, params.prior_alphas)
    draws = clf_underspec_draws(cmp, params, workers)
    return Probability(math.fsum(draws) / len(draws))
