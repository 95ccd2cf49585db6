"""Special functions and seeded sampling shared by both task models."""
import math

import numpy as np

from ._backend import core
from .errors import DomainError

MAX_SEED = 2**64 - 1


class Probability(float):
    """A float constrained to [0, 1].

    ``degenerate`` is set by callers that had to return a boundary value
    because the model's standard error vanished.
    """

    def __new__(cls, value, degenerate=False):
        v = float(value)
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"probability must lie in [0, 1], got {v!r}")
        self = super().__new__(cls, v)
        self.degenerate = degenerate
        return self

    def __repr__(self):
        return f"Probability({float(self)!r})"


def _finite(name, x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    x = _finite("x", x)
    if x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return core.log_gamma(x)


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by the continued fraction, switching to I_{1-x}(b, a) when
    ``x >= (a + 1) / (a + b + 2)``. Raises ``ConvergenceError`` if the
    expansion needs more than 300 iterations.
    """
    x, a, b = _finite("x", x), _finite("a", a), _finite("b", b)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    return Probability(core.betainc(a, b, x, 1.0 - x))


def student_t_cdf(t, df):
    t, df = _finite("t", t), _finite("df", df)
    if df <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got {df!r}")
    return Probability(core.student_t_cdf(t, df))


def normal_cdf(z):
    return Probability(core.normal_cdf(_finite("z", z)))


class Rng:
    """Counter-based generator keyed by ``(seed, stream)``.

    Every variate is a pure function of the key and a draw index, so an
    ``Rng`` only tracks how many draws it has handed out. ``child(i)``
    returns an independent generator fully determined by this one's key and
    ``i``; two children never share state.
    """

    def __init__(self, seed=0, stream=0):
        if not 0 <= int(seed) <= MAX_SEED:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        if int(stream) < 0:
            raise DomainError(f"stream index must be non-negative, got {stream!r}")
        self.seed = int(seed)
        self.key = core.stream_key(self.seed, int(stream))
        self.position = 0

    @classmethod
    def from_key(cls, key):
        rng = cls.__new__(cls)
        rng.seed = None
        rng.key = int(key)
        rng.position = 0
        return rng

    def child(self, index):
        if int(index) < 0:
            raise DomainError(f"child index must be non-negative, got {index!r}")
        return Rng.from_key(core.derive_key(self.key, int(index)))

    def take(self, count):
        """Reserve ``count`` draw indices; returns the first."""
        start = self.position
        self.position += count
        return start

    def __repr__(self):
        return f"Rng(key={self.key:#018x}, position={self.position})"


def sample_normal(mean, sd, rng, size=None):
    """Gaussian variate(s); ``sd == 0`` returns ``mean`` exactly."""
    mean, sd = _finite("mean", mean), _finite("sd", sd)
    if sd < 0.0:
        raise DomainError(f"standard deviation must be non-negative, got {sd!r}")
    count = 1 if size is None else int(size)
    z = core.standard_normals(rng.key, rng.take(count), count)
    out = np.full(count, mean) if sd == 0.0 else mean + sd * z
    return float(out[0]) if size is None else out


def sample_dirichlet(alphas, rng, size=None):
    """Dirichlet draw(s) built from normalized Gamma variates."""
    alphas = [_finite("alpha", a) for a in alphas]
    if len(alphas) < 2:
        raise DomainError("a Dirichlet needs at least two concentration parameters")
    if any(a <= 0.0 for a in alphas):
        raise DomainError(f"concentration parameters must be positive, got {alphas!r}")
    count = 1 if size is None else int(size)
    out = core.dirichlet(rng.key, rng.take(count), count, alphas)
    return out[0] if size is None else out
