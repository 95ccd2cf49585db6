"""Pure-Python kernels.

This module is the fallback used when the compiled ``_core`` extension is
not available. Both modules expose the same functions with the same
arguments and implement the same algorithms step for step, so results agree
to rounding (transcendental functions in numpy may differ from libm by an
ulp, which is why parity is tested with a tolerance rather than bitwise).

Random numbers come from a counter-based generator: every uniform is a pure
function of ``(key, draw, lane, j)`` where ``draw`` indexes a sample,
``lane`` a component within the sample and ``j`` the position within that
component's private sequence. No state is carried between calls.
"""
import math

import numpy as np

from .errors import ConvergenceError

BACKEND = "python"

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
WEYL2 = 0xD1B54A32D192ED03
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB

MAX_ITER = 300
CF_EPS = 1e-15
FPMIN = 1e-300
HALF_LOG_2PI = 0.91893853320467274178
TWO_PI = 6.283185307179586
INV_2_53 = 1.0 / 9007199254740992.0

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


# --------------------------------------------------------------------------
# key derivation


def mix64(z):
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed, stream):
    return mix64(mix64(seed + GOLDEN) ^ (((stream + 1) * WEYL2) & MASK64))


def derive_key(key, index):
    return mix64(key ^ mix64((index + 1) * WEYL2))


_U = np.uint64


def _mix_arr(z):
    z = z ^ (z >> _U(30))
    z = z * _U(MUL1)
    z = z ^ (z >> _U(27))
    z = z * _U(MUL2)
    return z ^ (z >> _U(31))


def _draw_keys(key, start, count):
    i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix_arr(_U(key) ^ (i * _U(GOLDEN)))


def _lane_keys(dkeys, lane):
    return _mix_arr(dkeys + _U(((lane + 1) * WEYL2) & MASK64))


def _uniform(lkeys, j):
    x = _mix_arr(lkeys + _U(((j + 1) * GOLDEN) & MASK64))
    return ((x >> _U(11)).astype(np.float64) + 0.5) * INV_2_53


def _normal_pair(dkeys):
    lk = _lane_keys(dkeys, 0)
    r = np.sqrt(-2.0 * np.log(_uniform(lk, 0)))
    theta = TWO_PI * _uniform(lk, 1)
    return r * np.cos(theta), r * np.sin(theta)


def _log_gamma_variates(dkeys, lane, shape):
    """Log of Gamma(shape, 1) variates, one per draw key (Marsaglia-Tsang)."""
    lk = _lane_keys(dkeys, lane)
    m = lk.shape[0]
    j = 0
    log_boost = 0.0
    if shape < 1.0:
        log_boost = np.log(_uniform(lk, 0)) / shape
        shape += 1.0
        j = 1
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(m)
    active = np.arange(m)
    while active.size:
        keys = lk[active]
        u1 = _uniform(keys, j)
        u2 = _uniform(keys, j + 1)
        u3 = _uniform(keys, j + 2)
        j += 3
        x = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
        v = 1.0 + c * x
        pos = v > 0.0
        v = np.where(pos, v, 1.0)
        v = v * v * v
        xx = x * x
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = pos & (
                (u3 < 1.0 - 0.0331 * xx * xx)
                | (np.log(u3) < 0.5 * xx + d * (1.0 - v + np.log(v)))
            )
        out[active[accept]] = np.log(d * v[accept])
        active = active[~accept]
    return out + log_boost


# --------------------------------------------------------------------------
# special functions


def _stirling_corr(x):
    # ln Gamma(x) - Stirling leading terms, for x >= 10
    r = 1.0 / x
    r2 = r * r
    return r * (1.0 / 12.0 + r2 * (-1.0 / 360.0 + r2 * (1.0 / 1260.0 + r2 * (
        -1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0))))))


def log_gamma(x):
    if x >= 10.0:
        return (x - 0.5) * math.log(x) - x + HALF_LOG_2PI + _stirling_corr(x)
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _lgamma_diff(x, s):
    # ln Gamma(x) - ln Gamma(x + s) for x >= 10
    return (-(x - 0.5) * math.log1p(s / x) - s * math.log(x + s) + s
            + _stirling_corr(x) - _stirling_corr(x + s))


def log_beta(a, b):
    lo = a if a < b else b
    hi = b if a < b else a
    if lo >= 10.0:
        s = lo + hi
        return (HALF_LOG_2PI - 0.5 * math.log(s)
                + (hi - 0.5) * math.log1p(-lo / s) + (lo - 0.5) * math.log(lo / s)
                + _stirling_corr(lo) + _stirling_corr(hi) - _stirling_corr(s))
    if hi >= 10.0:
        return log_gamma(lo) + _lgamma_diff(hi, lo)
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction failed for a={a!r}, b={b!r}, x={x!r}",
        MAX_ITER)


def betainc(a, b, x, y):
    """I_x(a, b) with ``y == 1 - x`` supplied by the caller for accuracy."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    if a == b and x == y:
        return 0.5
    lx = math.log(x) if x <= 0.5 else math.log1p(-y)
    ly = math.log(y) if y <= 0.5 else math.log1p(-x)
    front = math.exp(a * lx + b * ly - log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        r = front * _betacf(a, b, x) / a
    else:
        r = 1.0 - front * _betacf(b, a, y) / b
    return min(max(r, 0.0), 1.0)


def student_t_cdf(t, df):
    t2 = t * t
    if math.isinf(t2):
        return 0.0 if t < 0 else 1.0
    denom = df + t2
    tail = 0.5 * betainc(0.5 * df, 0.5, df / denom, t2 / denom)
    return tail if t < 0 else 1.0 - tail


def normal_cdf(z):
    return 0.5 * math.erfc(-z * 0.7071067811865476)


# --------------------------------------------------------------------------
# sampling


def standard_normals(key, start, count):
    """Cosine branch of the Box-Muller pair of draws ``start..start+count-1``."""
    return _normal_pair(_draw_keys(key, start, count))[0]


def dirichlet(key, start, count, alphas):
    dk = _draw_keys(key, start, count)
    logs = np.column_stack([_log_gamma_variates(dk, lane, float(a))
                            for lane, a in enumerate(alphas)])
    w = np.exp(logs - logs.max(axis=1, keepdims=True))
    return w / w.sum(axis=1, keepdims=True)


def mc_counts(key, start, count, a10, a01):
    """Count draws with theta01 > theta10 (wins) and exact ties.

    Uses lanes 1 and 2 of each draw, i.e. the same variates a four-cell
    Dirichlet draw would use for the off-diagonal cells.
    """
    dk = _draw_keys(key, start, count)
    g10 = _log_gamma_variates(dk, 1, a10)
    g01 = _log_gamma_variates(dk, 2, a01)
    return int(np.count_nonzero(g01 > g10)), int(np.count_nonzero(g01 == g10))


# --------------------------------------------------------------------------
# contingency tables


def _clamp_congruence(p_a, p_b, p11):
    lo = p_a + p_b - 1.0
    if lo < 0.0:
        lo = 0.0
    hi = p_a if p_a < p_b else p_b
    if p11 < lo:
        p11 = lo
    if p11 > hi:
        p11 = hi
    return p11


def expected(p_a, p_b, p11, n):
    """Real-valued cell counts ``n * P(cell)`` after clamping ``p11``."""
    q = _clamp_congruence(p_a, p_b, p11)
    cells = (n * q, n * (p_a - q), n * (p_b - q), n * (((1.0 - p_a) - p_b) + q))
    return tuple(c if c > 0.0 else 0.0 for c in cells)


def impute(p_a, p_b, p11, n):
    """Integer cell counts by largest remainder (ties to the lower cell index)."""
    targets = expected(p_a, p_b, p11, n)
    counts = [int(math.floor(t)) for t in targets]
    fracs = [t - c for t, c in zip(targets, counts)]
    rest = n - sum(counts)
    order = sorted(range(4), key=lambda i: (-fracs[i], i))
    for i in order[:rest]:
        counts[i] += 1
    return tuple(counts)


def _tables_arr(p_a, p_b, p11, n, fractional):
    lo = np.maximum(p_a + p_b - 1.0, 0.0)
    hi = np.minimum(p_a, p_b)
    q = np.minimum(np.maximum(p11, lo), hi)
    t = np.column_stack([n * q, n * (p_a - q), n * (p_b - q), n * (((1.0 - p_a) - p_b) + q)])
    t = np.maximum(t, 0.0)
    if fractional:
        return t
    f = np.floor(t)
    rest = n - f.sum(axis=1)
    order = np.argsort(-(t - f), axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(4)[None, :].repeat(len(t), 0), axis=1)
    return f + (rank < rest[:, None])


def underspec_tables(key, start, count, p_a, p_b, p11, n, d_a, d_b, fractional):
    """Tables for perturbed accuracy draws ``start..start+count-1`` (float array)."""
    za, zb = _normal_pair(_draw_keys(key, start, count))
    ta = np.clip(p_a + d_a * za, 0.0, 1.0)
    tb = np.clip(p_b + d_b * zb, 0.0, 1.0)
    return _tables_arr(ta, tb, p11, n, fractional)


def underspec_exact(key, start, count, p_a, p_b, p11, n, d_a, d_b, alphas, fractional):
    """Exact posterior false-claim probability for each perturbed draw."""
    tables = underspec_tables(key, start, count, p_a, p_b, p11, n, d_a, d_b, fractional)
    pairs, inverse = np.unique(tables[:, 1:3], axis=0, return_inverse=True)
    a10, a01 = float(alphas[1]), float(alphas[2])
    values = np.array([betainc(k10 + a10, k01 + a01, 0.5, 0.5)
                       for k10, k01 in pairs.tolist()])
    return values[np.asarray(inverse).reshape(-1)]
