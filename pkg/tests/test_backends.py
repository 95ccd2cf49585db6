"""The compiled kernels and the pure-Python fallback must agree."""
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from underspec import _pycore as py

core = pytest.importorskip("underspec._core")

KEY = py.stream_key(42, 3)
rnd = random.Random(123)
SHAPES = [(rnd.uniform(0.05, 400), rnd.uniform(0.05, 400), rnd.random()) for _ in range(300)]


def test_backend_names():
    assert core.BACKEND == "cython" and py.BACKEND == "python"


def test_key_derivation_identical():
    for seed in (0, 1, 42, 2 ** 64 - 1):
        for stream in (0, 1, 77):
            assert core.stream_key(seed, stream) == py.stream_key(seed, stream)
        assert core.derive_key(seed, 5) == py.derive_key(seed, 5)
        assert core.mix64(seed) == py.mix64(seed)


@pytest.mark.parametrize("a,b,x", SHAPES)
def test_betainc(a, b, x):
    assert core.betainc(a, b, x, 1 - x) == pytest.approx(py.betainc(a, b, x, 1 - x), rel=1e-13, abs=1e-300)


def test_scalar_specials():
    for x in np.geomspace(1e-3, 1e6, 200):
        assert core.log_gamma(x) == pytest.approx(py.log_gamma(x), rel=1e-14, abs=1e-14)
    for t in np.linspace(-20, 20, 81):
        for df in (0.5, 3.0, 99.0, 1e5):
            assert core.student_t_cdf(t, df) == pytest.approx(py.student_t_cdf(t, df), rel=1e-13, abs=1e-300)
        assert core.normal_cdf(t) == pytest.approx(py.normal_cdf(t), rel=1e-14, abs=1e-300)


def test_normals():
    a = core.standard_normals(KEY, 10, 5000)
    b = py.standard_normals(KEY, 10, 5000)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("alphas", [(1.0, 1.0, 1.0, 1.0), (0.3, 2.5), (14.0, 9.0, 0.01)])
def test_dirichlet(alphas):
    a = core.dirichlet(KEY, 0, 5000, alphas)
    b = py.dirichlet(KEY, 0, 5000, alphas)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-300)


def test_mc_counts():
    wa, ta = core.mc_counts(KEY, 0, 100_000, 14.0, 9.0)
    wb, tb = py.mc_counts(KEY, 0, 100_000, 14.0, 9.0)
    # the same uniforms feed both; an ulp-level disagreement could at most
    # flip a draw sitting on the decision boundary
    assert abs(wa - wb) <= 2 and ta == tb


def test_tables_and_imputation():
    for _ in range(2000):
        args = (rnd.random(), rnd.random(), rnd.random(), rnd.randint(1, 5000))
        assert tuple(core.impute(*args)) == tuple(py.impute(*args))
        np.testing.assert_allclose(core.expected(*args), py.expected(*args), rtol=1e-15, atol=1e-12)


@pytest.mark.parametrize("fractional", [True, False])
def test_underspec_paths(fractional):
    args = (KEY, 100, 3000, 0.767, 0.737, 0.67, 300, 0.01, 0.02)
    np.testing.assert_allclose(core.underspec_tables(*args, fractional),
                               py.underspec_tables(*args, fractional), rtol=1e-13, atol=1e-12)
    np.testing.assert_allclose(core.underspec_exact(*args, (1.0, 1.0, 1.0, 1.0), fractional),
                               py.underspec_exact(*args, (1.0, 1.0, 1.0, 1.0), fractional),
                               rtol=1e-10, atol=1e-14)


def test_env_forces_fallback():
    env = dict(os.environ, UNDERSPEC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import underspec; print(underspec.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
