"""Apply the task models to a batch of reported comparisons."""
from dataclasses import replace

from .clf import ClfComparison, ClfParams, clf_false_claim_underspec
from .errors import DomainError
from .seg import SegComparison, SegParams, seg_false_claim_prob
from .tasks import Task

CONCERN_THRESHOLD = 0.05


def verdict(p, threshold=CONCERN_THRESHOLD):
    return "CONCERNING" if p >= threshold else "OK"


def claim_probabilities(task, mu_a, mu_b, n, spread_or_congruence=None,
                        delta_a=0.0, delta_b=0.0, seg_params=None, clf_params=None):
    """``(p_baseline, p_underspec)`` for one claim that A beats B.

    ``spread_or_congruence`` is the per-case score SD for segmentation and
    P(both correct) for classification; ``None`` keeps the model default.
    """
    task = Task.parse(task)
    if mu_a < mu_b:
        raise DomainError(f"an outperformance claim needs mu_a >= mu_b, got {mu_a!r} < {mu_b!r}")
    if task is Task.SEGMENTATION:
        params = seg_params or SegParams()
        if spread_or_congruence is not None:
            params = replace(params, s_a=spread_or_congruence, s_b=spread_or_congruence)
        params = replace(params, delta_a=delta_a, delta_b=delta_b)
        cmp = SegComparison(mu_a, mu_b, n)
        return (seg_false_claim_prob(cmp, params.without_seed_variance()),
                seg_false_claim_prob(cmp, params))
    params = clf_params or ClfParams()
    if spread_or_congruence is not None:
        params = replace(params, congruence_p11=spread_or_congruence)
    params = replace(params, delta_a=delta_a, delta_b=delta_b)
    cmp = ClfComparison(mu_a, mu_b, n)
    base = clf_false_claim_underspec(cmp, replace(params, delta_a=0.0, delta_b=0.0))
    if not params.underspecified:
        return base, base
    return base, clf_false_claim_underspec(cmp, params)


def audit_rows(rows, seg_params=None, clf_params=None):
    """Evaluate parsed rows; yields ``(row, result)`` where result is a tuple or an error."""
    for row in rows:
        try:
            p0, p1 = claim_probabilities(row.task, row.mu_a, row.mu_b, row.n,
                                         row.spread_or_congruence, row.delta_a, row.delta_b,
                                         seg_params, clf_params)
        except (DomainError, ValueError) as exc:
            yield row, exc
            continue
        yield row, (float(p0), float(p1), verdict(p1))
