"""Acceptance criteria 1-10.

Each test carries ``@pytest.mark.acceptance(k, title)``; conftest prints one
PASS/FAIL line per criterion at the end of the run. Tolerances are pinned
here, next to the criterion they belong to.
"""
import io
import math
import time

import numpy as np
import pytest

from underspec import (CalibrationSpec, ClfComparison, ClfParams, GridSpec, ReferencePoint, Rng,
                       SegComparison, SegParams, Task, calibrate_s, clf_false_claim_exact,
                       clf_false_claim_mc, clf_false_claim_underspec, compare_grids, expected_table,
                       impute_table, run_grid, seg_false_claim_prob, student_t_cdf)
from underspec.cli import main
from underspec.seg import seg_prob_from_difference

import oracles

DELTA = 0.01
SEG_UNDER = SegParams(delta_a=DELTA, delta_b=DELTA)
CLF_UNDER = ClfParams(delta_a=DELTA, delta_b=DELTA)

# pinned tolerances and budgets
ORACLE_TOL = 0.01
ORACLE_CONFIGS = 50
ORACLE_DRAWS = 100_000
ORACLE_SECONDS = 30.0
EXACT_TOL = 1e-10
FLOOR_TOL = 1e-3
FLOOR_SECONDS = 1.0
SEG_CONTOUR = (0.03, 0.05)
CLF_CONTOUR = (0.045, 0.075)
FIGURE_SECONDS = 300.0
CALIB_SSE = 1e-10
CALIB_SECONDS = 10.0
MONO_CONFIGS = 100


def detail(record_property, text):
    record_property("detail", text)


@pytest.mark.acceptance(1, "Monte Carlo matches the exact posterior on 50 random configurations")
def test_oracle_equivalence(record_property):
    rnd = np.random.default_rng(2025)
    root = Rng(42)
    worst = 0.0
    start = time.perf_counter()
    for i in range(ORACLE_CONFIGS):
        p_a, p_b = rnd.uniform(0.3, 0.99, size=2)
        table = impute_table(p_a, p_b, rnd.uniform(0.2, 0.95), int(rnd.integers(10, 1001)))
        exact = clf_false_claim_exact(table)
        mc = clf_false_claim_mc(table, (1, 1, 1, 1), ORACLE_DRAWS, root.child(i))
        worst = max(worst, abs(mc - exact))
    elapsed = time.perf_counter() - start
    detail(record_property, f"max |mc - exact| = {worst:.4f}, {elapsed:.1f} s")
    assert worst < ORACLE_TOL
    assert elapsed < ORACLE_SECONDS


@pytest.mark.acceptance(2, "I_0.5(14, 9) from table (67,13,8,12) equals the binomial-tail oracle")
def test_exact_value(record_property):
    table = impute_table(0.8, 0.75, 0.67, 100)
    assert tuple(table) == (67, 13, 8, 12)
    p = clf_false_claim_exact(table, (1, 1, 1, 1))
    exact = oracles.binomial_tail_half(14, 9)
    assert exact.numerator * 4194304 == 600370 * exact.denominator
    detail(record_property, f"p = {float(p):.12f}, oracle = {float(exact):.12f}")
    assert abs(p - float(exact)) <= EXACT_TOL


@pytest.mark.acceptance(3, "without seed variance both models reduce exactly to the baseline")
def test_baseline_reduction(record_property):
    rnd = np.random.default_rng(3)
    for _ in range(200):
        mu_b = rnd.uniform(0.3, 0.9)
        mu_a = mu_b + rnd.uniform(-0.05, 0.1)
        n = int(rnd.integers(2, 20_000))
        s_a, s_b, r = rnd.uniform(0.01, 0.4), rnd.uniform(0.01, 0.4), rnd.uniform(-0.5, 0.95)
        se = math.sqrt((s_a ** 2 + s_b ** 2 - 2 * s_a * s_b * r) / n)
        direct = student_t_cdf((mu_b - mu_a) / se, n - 1)
        got = seg_false_claim_prob(SegComparison(mu_a, min(mu_b, 1.0), n), SegParams(s_a, s_b, r))
        assert got.hex() == direct.hex()
        assert got == pytest.approx(oracles.t_cdf((mu_b - mu_a) / se, n - 1), rel=1e-9, abs=1e-14)
    for _ in range(200):
        p_b = rnd.uniform(0.3, 0.9)
        p_a = min(p_b + rnd.uniform(0.0, 0.1), 1.0)
        n = int(rnd.integers(1, 20_000))
        for counts, build in (("expected", expected_table), ("integer", impute_table)):
            params = ClfParams(congruence_p11=rnd.uniform(0.2, 0.9), counts=counts)
            base = clf_false_claim_exact(build(p_a, p_b, params.congruence_p11, n))
            under = clf_false_claim_underspec(ClfComparison(p_a, p_b, n), params)
            assert under.hex() == base.hex()
    detail(record_property, "200 seg configs equal to the formula bit-for-bit, 400 clf configs likewise")


@pytest.mark.acceptance(4, "delta = 0.01 keeps a 0.01 difference above 0.05 for all n; floor at n = 1e6")
def test_floor_claim(record_property):
    start = time.perf_counter()
    ps = {n: seg_prob_from_difference(0.01, n, SEG_UNDER) for n in (10, 10 ** 2, 10 ** 3, 10 ** 4, 10 ** 6)}
    elapsed = time.perf_counter() - start
    floor = oracles.norm_cdf(-0.01 / math.hypot(DELTA, DELTA))
    detail(record_property, f"min p = {min(ps.values()):.4f}, p(1e6) - floor = {ps[10 ** 6] - floor:.2e}")
    assert all(p > 0.05 for p in ps.values())
    assert abs(floor - 0.2398) < 1e-4
    assert abs(ps[10 ** 6] - floor) < FLOOR_TOL
    assert elapsed < FLOOR_SECONDS


def contour_at(task, params, n, baseline=0.737):
    spec = GridSpec(task, (n,), model_params=params, baseline=baseline)
    return run_grid(spec).contour[0]


@pytest.mark.acceptance(5, "segmentation 0.05 contour at n = 100 with delta = 0.01 lies in [0.03, 0.05]")
def test_seg_threshold(record_property):
    c = contour_at(Task.SEGMENTATION, SegParams(0.197, 0.197, 0.67, DELTA, DELTA), 100)
    detail(record_property, f"contour = {c:.4f}")
    assert SEG_CONTOUR[0] <= c <= SEG_CONTOUR[1]


@pytest.mark.acceptance(6, "classification 0.05 contour at n = 300 with delta = 0.01 lies in [0.045, 0.075]")
def test_clf_threshold(record_property):
    c = contour_at(Task.CLASSIFICATION, ClfParams(congruence_p11=0.67, delta_a=DELTA, delta_b=DELTA), 300)
    detail(record_property, f"contour = {c:.4f}")
    assert CLF_CONTOUR[0] <= c <= CLF_CONTOUR[1]


def _not_below(under, base):
    """Contour ordering where ``None`` means the threshold is never reached in range."""
    if under is None:
        return True
    return base is not None and under >= base


@pytest.mark.acceptance(7, "four-panel run in < 5 min; seed variance moves every contour up")
def test_figure_reproduction(record_property):
    start = time.perf_counter()
    pairs = {}
    for task, under in ((Task.SEGMENTATION, SEG_UNDER), (Task.CLASSIFICATION, CLF_UNDER)):
        pairs[task] = (run_grid(GridSpec(task)), run_grid(GridSpec(task, model_params=under)))
    elapsed = time.perf_counter() - start
    failures = []
    for task, (base, under) in pairs.items():
        assert base.probs.shape == under.probs.shape == (50, 30)
        for s in compare_grids(base, under):
            if not _not_below(s.underspec, s.baseline):
                failures.append((task.short, s))
            elif s.n >= 100 and not (s.shift is not None and s.shift > 0.0):
                failures.append((task.short, s))
    detail(record_property, f"{elapsed:.1f} s, {len(failures)} contour violations")
    assert not failures, failures
    assert elapsed < FIGURE_SECONDS


@pytest.mark.acceptance(8, "calibration recovers s = 0.197 within one grid step from 20 references")
def test_calibration_round_trip(record_property):
    refs = [ReferencePoint(n, d, oracles.seg_probability(d, 0.0, n, 0.197, 0.197, 0.67))
            for n in (15, 40, 120, 400, 1500) for d in (0.005, 0.015, 0.03, 0.06)]
    assert len(refs) == 20
    spec = CalibrationSpec(Task.SEGMENTATION, 0.05, 0.5, 451)
    start = time.perf_counter()
    s, sse = calibrate_s(spec, refs)
    elapsed = time.perf_counter() - start
    detail(record_property, f"s = {s:.4f}, sse = {sse:.2e}, {elapsed:.2f} s")
    assert abs(s - 0.197) <= spec.step
    assert sse < CALIB_SSE
    assert elapsed < CALIB_SECONDS


@pytest.mark.acceptance(9, "stochastic commands are byte-identical across worker counts")
def test_determinism(record_property, tmp_path):
    outputs = {}
    for workers in (1, 2, 5):
        d = tmp_path / f"w{workers}"
        d.mkdir()
        argv_grid = ["--workers", str(workers), "grid", "clf", "--delta", "0.01",
                     "--out", str(d / "grid.csv"), "--svg", str(d / "grid.svg"),
                     "--n-values", "10,50,300,2000", "--delta-points", "11"]
        assert main(argv_grid, out=io.StringIO()) == 0
        (d / "in.csv").write_text("task,mu_a,mu_b,n,spread_or_congruence,delta_a,delta_b\n"
                                  "clf,0.78,0.75,300,0.67,0.01,0.01\nseg,0.85,0.84,100,,0.01,0.01\n")
        assert main(["audit", "--workers", str(workers), str(d / "in.csv"), str(d / "audit.csv")],
                    out=io.StringIO()) == 0
        buf = io.StringIO()
        assert main(["--workers", str(workers), "prob", "clf", "--acc-a", "0.77", "--acc-b", "0.737",
                     "--n", "500", "--delta", "0.01"], out=buf) == 0
        outputs[workers] = [(d / f).read_bytes() for f in
                            ("grid.csv", "grid_contour.csv", "grid.svg", "audit.csv")] + [buf.getvalue()]
    same = all(outputs[w] == outputs[1] for w in outputs)
    detail(record_property, f"{len(outputs[1])} artefacts x {len(outputs)} worker counts identical: {same}")
    assert same


def _strictly_decreasing(ps):
    # strict wherever the probability is still representable
    return all(b < a if a > 0.0 else b == 0.0 for a, b in zip(ps, ps[1:]))


@pytest.mark.acceptance(10, "monotone in the difference and in n, swap symmetric (>= 100 configs each)")
def test_monotonicity_suite(record_property):
    rnd = np.random.default_rng(10)
    counts = dict(dec_delta=0, inc_n=0, swap=0)
    n_grid = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000)

    for _ in range(MONO_CONFIGS):
        # segmentation, with and without seed variance
        s, r, n = rnd.uniform(0.05, 0.4), rnd.uniform(0.0, 0.95), int(rnd.integers(2, 10_000))
        for params in (SegParams(s, s, r), SegParams(s, s, r, DELTA, DELTA)):
            ds = np.sort(rnd.uniform(0.0, 0.1, 12))
            assert _strictly_decreasing([seg_prob_from_difference(d, n, params) for d in ds])
            counts["dec_delta"] += 1
            mu_b = rnd.uniform(0.2, 0.8)
            mu_a = mu_b + rnd.uniform(-0.1, 0.1)
            p = seg_false_claim_prob(SegComparison(mu_a, mu_b, n), params)
            q = seg_false_claim_prob(SegComparison(mu_b, mu_a, n), params)
            assert abs(p + q - 1.0) <= 1e-12
            counts["swap"] += 1
        d = rnd.uniform(0.001, 0.1)
        ps = [seg_prob_from_difference(d, m, SegParams(s, s, r)) for m in n_grid]
        assert all(b <= a for a, b in zip(ps, ps[1:]))
        counts["inc_n"] += 1

        # classification, exact path
        base_acc, p11 = rnd.uniform(0.5, 0.85), rnd.uniform(0.3, 0.9)
        params = ClfParams(congruence_p11=p11)
        ds = np.sort(rnd.uniform(0.0, 0.1, 12))
        m = int(rnd.integers(10, 5000))
        ps = [clf_false_claim_underspec(ClfComparison(base_acc + d, base_acc, m), params) for d in ds]
        assert _strictly_decreasing(ps)
        counts["dec_delta"] += 1
        d = rnd.uniform(0.001, 0.1)
        ps = [clf_false_claim_underspec(ClfComparison(base_acc + d, base_acc, k), params) for k in n_grid]
        assert all(b <= a for a, b in zip(ps, ps[1:]))
        counts["inc_n"] += 1
        a_acc = base_acc + rnd.uniform(-0.1, 0.1)
        p = clf_false_claim_underspec(ClfComparison(a_acc, base_acc, m), params)
        q = clf_false_claim_underspec(ClfComparison(base_acc, a_acc, m), params)
        assert abs(p + q - 1.0) <= 1e-12
        counts["swap"] += 1

    # classification with seed variance: outer sampling, so fewer but
    # full-budget configurations
    for _ in range(MONO_CONFIGS):
        base_acc, p11 = rnd.uniform(0.5, 0.85), rnd.uniform(0.3, 0.9)
        m = int(rnd.integers(10, 5000))
        params = ClfParams(congruence_p11=p11, delta_a=DELTA, delta_b=DELTA, outer_samples=2000,
                           seed=int(rnd.integers(2 ** 32)))
        ds = np.sort(rnd.uniform(0.0, 0.1, 6))
        ps = [clf_false_claim_underspec(ClfComparison(base_acc + d, base_acc, m), params) for d in ds]
        assert _strictly_decreasing(ps)
        counts["dec_delta"] += 1
        a_acc = base_acc + rnd.uniform(-0.05, 0.05)
        p = clf_false_claim_underspec(ClfComparison(a_acc, base_acc, m), params)
        q = clf_false_claim_underspec(ClfComparison(base_acc, a_acc, m), params)
        # A and B see different Gaussian draws, so the identity holds in law:
        # |p + q - 1| within 4 standard errors of a mean of 2000 values in [0, 1]
        assert abs(p + q - 1.0) < 4 * math.sqrt(2) * 0.5 / math.sqrt(2000)
        counts["swap"] += 1

    detail(record_property, ", ".join(f"{k}: {v} configs" for k, v in counts.items()))
    assert min(counts.values()) >= MONO_CONFIGS
