# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same functions, arguments and algorithms as ``_pycore``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, exp, sqrt, cos, sin, erfc, floor, fabs, isinf, isnan
from libc.stdint cimport uint64_t, int64_t

from .errors import ConvergenceError

cnp.import_array()

BACKEND = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t WEYL2 = 0xD1B54A32D192ED03ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL

cdef int MAX_ITER = 300
cdef double CF_EPS = 1e-15
cdef double FPMIN = 1e-300
cdef double HALF_LOG_2PI = 0.91893853320467274178
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double NAN = float("nan")

cdef double LANCZOS_G = 7.0
cdef double[9] LANCZOS = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]


# --------------------------------------------------------------------------
# key derivation

cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline uint64_t _draw_key(uint64_t key, uint64_t i) noexcept nogil:
    return _mix(key ^ ((i + 1) * GOLDEN))


cdef inline uint64_t _lane_key(uint64_t dkey, uint64_t lane) noexcept nogil:
    return _mix(dkey + (lane + 1) * WEYL2)


cdef inline double _uniform(uint64_t lkey, uint64_t j) noexcept nogil:
    cdef uint64_t x = _mix(lkey + (j + 1) * GOLDEN)
    return (<double>(x >> 11) + 0.5) * INV_2_53


def mix64(z):
    return _mix(<uint64_t>z)


def stream_key(seed, stream):
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t k = <uint64_t>(stream & 0xFFFFFFFFFFFFFFFF)
    return _mix(_mix(s + GOLDEN) ^ ((k + 1) * WEYL2))


def derive_key(key, index):
    cdef uint64_t k = <uint64_t>key
    cdef uint64_t i = <uint64_t>(index & 0xFFFFFFFFFFFFFFFF)
    return _mix(k ^ _mix((i + 1) * WEYL2))


cdef inline void _normal_pair(uint64_t dkey, double* z0, double* z1) noexcept nogil:
    cdef uint64_t lk = _lane_key(dkey, 0)
    cdef double r = sqrt(-2.0 * log(_uniform(lk, 0)))
    cdef double theta = TWO_PI * _uniform(lk, 1)
    z0[0] = r * cos(theta)
    z1[0] = r * sin(theta)


cdef double _log_gamma_variate(uint64_t dkey, uint64_t lane, double shape) noexcept nogil:
    # Marsaglia-Tsang squeeze; shape < 1 boosted through Gamma(shape + 1) * U^(1/shape)
    cdef uint64_t lk = _lane_key(dkey, lane)
    cdef uint64_t j = 0
    cdef double log_boost = 0.0
    cdef double d, c, x, v, xx, u3
    if shape < 1.0:
        log_boost = log(_uniform(lk, 0)) / shape
        shape += 1.0
        j = 1
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        x = sqrt(-2.0 * log(_uniform(lk, j))) * cos(TWO_PI * _uniform(lk, j + 1))
        u3 = _uniform(lk, j + 2)
        j += 3
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        xx = x * x
        if u3 < 1.0 - 0.0331 * xx * xx or log(u3) < 0.5 * xx + d * (1.0 - v + log(v)):
            return log(d * v) + log_boost


# --------------------------------------------------------------------------
# special functions

cdef inline double _stirling_corr(double x) noexcept nogil:
    cdef double r = 1.0 / x
    cdef double r2 = r * r
    return r * (1.0 / 12.0 + r2 * (-1.0 / 360.0 + r2 * (1.0 / 1260.0 + r2 * (
        -1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0))))))


cdef double _log_gamma(double x) noexcept nogil:
    cdef double z, acc, t
    cdef int i
    if x >= 10.0:
        return (x - 0.5) * log(x) - x + HALF_LOG_2PI + _stirling_corr(x)
    if x < 0.5:
        return _log_gamma(x + 1.0) - log(x)
    z = x - 1.0
    acc = LANCZOS[0]
    for i in range(1, 9):
        acc += LANCZOS[i] / (z + i)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (z + 0.5) * log(t) - t + log(acc)


cdef inline double _lgamma_diff(double x, double s) noexcept nogil:
    return (-(x - 0.5) * log1p(s / x) - s * log(x + s) + s
            + _stirling_corr(x) - _stirling_corr(x + s))


cdef double _log_beta(double a, double b) noexcept nogil:
    cdef double lo = a if a < b else b
    cdef double hi = b if a < b else a
    cdef double s
    if lo >= 10.0:
        s = lo + hi
        return (HALF_LOG_2PI - 0.5 * log(s)
                + (hi - 0.5) * log1p(-lo / s) + (lo - 0.5) * log(lo / s)
                + _stirling_corr(lo) + _stirling_corr(hi) - _stirling_corr(s))
    if hi >= 10.0:
        return _log_gamma(lo) + _lgamma_diff(hi, lo)
    return _log_gamma(a) + _log_gamma(b) - _log_gamma(a + b)


cdef double _betacf(double a, double b, double x) noexcept nogil:
    # NaN signals non-convergence
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta, m2
    cdef int m
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < CF_EPS:
            return h
    return NAN


cdef double _betainc(double a, double b, double x, double y) noexcept nogil:
    cdef double lx, ly, front, cf, r
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    if a == b and x == y:
        return 0.5
    lx = log(x) if x <= 0.5 else log1p(-y)
    ly = log(y) if y <= 0.5 else log1p(-x)
    front = exp(a * lx + b * ly - _log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        cf = _betacf(a, b, x)
        r = front * cf / a
    else:
        cf = _betacf(b, a, y)
        r = 1.0 - front * cf / b
    if isnan(cf):
        return NAN
    if r < 0.0:
        return 0.0
    if r > 1.0:
        return 1.0
    return r


cdef inline _raise_cf(double a, double b, double x):
    raise ConvergenceError(
        f"incomplete beta continued fraction failed for a={a!r}, b={b!r}, x={x!r}",
        MAX_ITER)


def log_gamma(double x):
    return _log_gamma(x)


def log_beta(double a, double b):
    return _log_beta(a, b)


def betainc(double a, double b, double x, double y):
    """I_x(a, b) with ``y == 1 - x`` supplied by the caller for accuracy."""
    cdef double r = _betainc(a, b, x, y)
    if isnan(r):
        _raise_cf(a, b, x)
    return r


def student_t_cdf(double t, double df):
    cdef double t2 = t * t
    cdef double denom, tail
    if isinf(t2):
        return 0.0 if t < 0 else 1.0
    denom = df + t2
    tail = 0.5 * betainc(0.5 * df, 0.5, df / denom, t2 / denom)
    return tail if t < 0 else 1.0 - tail


def normal_cdf(double z):
    return 0.5 * erfc(-z * 0.7071067811865476)


# --------------------------------------------------------------------------
# sampling

def standard_normals(key, Py_ssize_t start, Py_ssize_t count):
    """Cosine branch of the Box-Muller pair of draws ``start..start+count-1``."""
    cdef uint64_t k = <uint64_t>key
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count)
    cdef double z0, z1
    cdef Py_ssize_t i
    with nogil:
        for i in range(count):
            _normal_pair(_draw_key(k, start + i), &z0, &z1)
            out[i] = z0
    return out


def dirichlet(key, Py_ssize_t start, Py_ssize_t count, alphas):
    cdef uint64_t k = <uint64_t>key
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alpha = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef Py_ssize_t dim = alpha.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((count, dim))
    cdef Py_ssize_t i, lane
    cdef uint64_t dk
    cdef double top, total
    with nogil:
        for i in range(count):
            dk = _draw_key(k, start + i)
            for lane in range(dim):
                out[i, lane] = _log_gamma_variate(dk, lane, alpha[lane])
            top = out[i, 0]
            for lane in range(1, dim):
                if out[i, lane] > top:
                    top = out[i, lane]
            total = 0.0
            for lane in range(dim):
                out[i, lane] = exp(out[i, lane] - top)
                total += out[i, lane]
            for lane in range(dim):
                out[i, lane] = out[i, lane] / total
    return out


def mc_counts(key, Py_ssize_t start, Py_ssize_t count, double a10, double a01):
    """Count draws with theta01 > theta10 (wins) and exact ties."""
    cdef uint64_t k = <uint64_t>key
    cdef Py_ssize_t i
    cdef int64_t wins = 0, ties = 0
    cdef uint64_t dk
    cdef double g10, g01
    with nogil:
        for i in range(count):
            dk = _draw_key(k, start + i)
            g10 = _log_gamma_variate(dk, 1, a10)
            g01 = _log_gamma_variate(dk, 2, a01)
            if g01 > g10:
                wins += 1
            elif g01 == g10:
                ties += 1
    return int(wins), int(ties)


# --------------------------------------------------------------------------
# contingency tables

cdef void _expected(double p_a, double p_b, double p11, int64_t n, double* t) noexcept nogil:
    cdef double lo = p_a + p_b - 1.0
    cdef double hi = p_a if p_a < p_b else p_b
    cdef int i
    if lo < 0.0:
        lo = 0.0
    if p11 < lo:
        p11 = lo
    if p11 > hi:
        p11 = hi
    t[0] = n * p11
    t[1] = n * (p_a - p11)
    t[2] = n * (p_b - p11)
    t[3] = n * (((1.0 - p_a) - p_b) + p11)
    for i in range(4):
        if t[i] < 0.0:
            t[i] = 0.0


cdef void _impute(double p_a, double p_b, double p11, int64_t n, double* out) noexcept nogil:
    # largest remainder; counts written as doubles
    cdef double[4] frac
    cdef int[4] order
    cdef double f
    cdef int64_t rest = n
    cdef int i, j, tmp
    _expected(p_a, p_b, p11, n, out)
    for i in range(4):
        f = floor(out[i])
        frac[i] = out[i] - f
        out[i] = f
        rest -= <int64_t>f
        order[i] = i
    # stable insertion sort by descending fractional part
    for i in range(1, 4):
        j = i
        while j > 0 and frac[order[j]] > frac[order[j - 1]]:
            tmp = order[j]
            order[j] = order[j - 1]
            order[j - 1] = tmp
            j -= 1
    for i in range(4):
        if i < rest:
            out[order[i]] += 1.0


def expected(double p_a, double p_b, double p11, int64_t n):
    """Real-valued cell counts ``n * P(cell)`` after clamping ``p11``."""
    cdef double[4] t
    _expected(p_a, p_b, p11, n, t)
    return (t[0], t[1], t[2], t[3])


def impute(double p_a, double p_b, double p11, int64_t n):
    """Integer cell counts by largest remainder (ties to the lower cell index)."""
    cdef double[4] t
    _impute(p_a, p_b, p11, n, t)
    return (<int64_t>t[0], <int64_t>t[1], <int64_t>t[2], <int64_t>t[3])


cdef inline void _perturbed_cells(uint64_t dkey, double p_a, double p_b, double p11, int64_t n,
                                  double d_a, double d_b, bint fractional,
                                  double* cells) noexcept nogil:
    cdef double za, zb, ta, tb
    _normal_pair(dkey, &za, &zb)
    ta = p_a + d_a * za
    tb = p_b + d_b * zb
    if ta < 0.0:
        ta = 0.0
    elif ta > 1.0:
        ta = 1.0
    if tb < 0.0:
        tb = 0.0
    elif tb > 1.0:
        tb = 1.0
    if fractional:
        _expected(ta, tb, p11, n, cells)
    else:
        _impute(ta, tb, p11, n, cells)


def underspec_tables(key, Py_ssize_t start, Py_ssize_t count, double p_a, double p_b,
                     double p11, int64_t n, double d_a, double d_b, bint fractional):
    """Tables for perturbed accuracy draws ``start..start+count-1`` (float array)."""
    cdef uint64_t k = <uint64_t>key
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((count, 4))
    cdef double[4] cells
    cdef Py_ssize_t i
    with nogil:
        for i in range(count):
            _perturbed_cells(_draw_key(k, start + i), p_a, p_b, p11, n, d_a, d_b,
                             fractional, cells)
            out[i, 0] = cells[0]
            out[i, 1] = cells[1]
            out[i, 2] = cells[2]
            out[i, 3] = cells[3]
    return out


def underspec_exact(key, Py_ssize_t start, Py_ssize_t count, double p_a, double p_b,
                    double p11, int64_t n, double d_a, double d_b, alphas, bint fractional):
    """Exact posterior false-claim probability for each perturbed draw."""
    cdef uint64_t k = <uint64_t>key
    cdef double a10 = float(alphas[1])
    cdef double a01 = float(alphas[2])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count)
    cdef double[4] cells
    cdef double r
    cdef double last10 = -1.0, last01 = -1.0
    cdef double last = 0.0
    cdef Py_ssize_t i
    cdef bint failed = False
    with nogil:
        for i in range(count):
            _perturbed_cells(_draw_key(k, start + i), p_a, p_b, p11, n, d_a, d_b,
                             fractional, cells)
            if cells[1] == last10 and cells[2] == last01:
                out[i] = last
                continue
            r = _betainc(cells[1] + a10, cells[2] + a01, 0.5, 0.5)
            if isnan(r):
                failed = True
                break
            last10 = cells[1]
            last01 = cells[2]
            last = r
            out[i] = r
    if failed:
        _raise_cf(cells[1] + a10, cells[2] + a01, 0.5)
    return out
