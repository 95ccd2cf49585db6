"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_backends.py [--repeat 3]
"""
import argparse
import timeit

from underspec import _pycore

try:
    from underspec import _core
except ImportError:
    _core = None

KEY = _pycore.stream_key(42, 0)
PRIOR = (1.0, 1.0, 1.0, 1.0)


def cases(mod):
    return {
        "betainc x 1000": lambda: [mod.betainc(14.0 + i % 50, 9.0 + i % 7, 0.5, 0.5) for i in range(1000)],
        "student_t_cdf x 1000": lambda: [mod.student_t_cdf(-0.6 - i * 1e-3, 99.0) for i in range(1000)],
        "mc_counts 1e5 draws": lambda: mod.mc_counts(KEY, 0, 100_000, 14.0, 9.0),
        "dirichlet 1e4 x 4": lambda: mod.dirichlet(KEY, 0, 10_000, PRIOR),
        "underspec_exact 1e4 outer": lambda: mod.underspec_exact(
            KEY, 0, 10_000, 0.767, 0.737, 0.67, 300, 0.01, 0.01, PRIOR, True),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = cases(_pycore)
    c = cases(_core) if _core is not None else {}
    print(f"{'kernel':<28} {'python [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for name, fn in py.items():
        t_py = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        if name in c:
            t_c = min(timeit.repeat(c[name], number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<28} {t_py:12.2f} {t_c:14.2f} {t_py / t_c:8.1f}")
        else:
            print(f"{name:<28} {t_py:12.2f} {'n/a':>14} {'':>8}")


if __name__ == "__main__":
    main()
