"""Student's t density, distribution function, quantile and seeded sampling.

Samples come from counter-based Philox substreams keyed by ``(seed,
stream_index)``, so any partition of a Monte-Carlo run can be regenerated
independently of how the work was scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from satdyn.errors import DomainError, NumericalError

ANNUAL_VOLATILITY = 0.3
DAYS_PER_YEAR = 365


def daily_noise_scale(sigma_annual: float = ANNUAL_VOLATILITY, multiplier: float = 10.0) -> float:
    """Scale applied to raw t draws in the one-day tables: ``multiplier * sigma / sqrt(365)``."""
    return multiplier * sigma_annual / math.sqrt(DAYS_PER_YEAR)


@dataclass(frozen=True)
class TDistSpec:
    """Student's t noise: ``scale * T`` with ``T ~ t(nu)``.

    ``scale = 0`` is accepted and yields identically zero noise.
    """

    nu: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"degrees of freedom must be positive, got nu={self.nu}")
        if not self.scale >= 0:
            raise DomainError(f"scale must be non-negative, got scale={self.scale}")


@dataclass(frozen=True)
class NoiseStream:
    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream_index < 0:
            raise DomainError(f"stream_index must be non-negative, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seq))


def _check_nu(nu):
    if not np.all(np.asarray(nu) > 0):
        raise DomainError(f"degrees of freedom must be positive, got nu={nu}")


def t_pdf(x, nu):
    """Normalized Student's t density."""
    _check_nu(nu)
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    log_norm = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * np.log(nu * np.pi)
    out = np.exp(log_norm - (nu + 1) / 2 * np.log1p(x * x / nu))
    return out[()] if out.ndim == 0 else out


def _upper_tail(x, nu):
    # P(T > |x|) through the regularized incomplete beta function
    x2 = x * x
    return 0.5 * special.betainc(nu / 2, 0.5, nu / (nu + x2))


def t_cdf(x, nu):
    """Student's t distribution function.

    Both tails are evaluated from the same upper-tail value so that
    ``t_cdf(x) + t_cdf(-x) == 1`` to rounding.
    """
    _check_nu(nu)
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    tail = _upper_tail(x, nu)
    out = np.where(x >= 0, 1.0 - tail, tail)
    out = np.where(np.isinf(x), np.where(x > 0, 1.0, 0.0), out)
    return out[()] if out.ndim == 0 else out


def t_quantile(p: float, nu: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Inverse of :func:`t_cdf` by bracket expansion, bisection and Newton polish.

    Parameters
    ----------
    p : float
        Probability in the open interval (0, 1).
    nu : float
        Degrees of freedom.
    tol : float
        Absolute tolerance on the tail probability.

    Returns
    -------
    float
        ``q`` with ``t_cdf(q, nu) == p`` to within ``tol``.
    """
    _check_nu(nu)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got p={p}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(1.0 - p, nu, tol, max_iter)

    # work on the upper tail so precision near p -> 1 is not lost to 1 - p
    target = 1.0 - p
    nu = float(nu)

    def resid(q):
        return float(_upper_tail(q, nu)) - target

    lo, hi = 0.0, 1.0
    while resid(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericalError(f"could not bracket quantile p={p}, nu={nu}")

    q = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = resid(q)
        if abs(r) <= tol * max(target, 1e-300) or abs(r) < 1e-300:
            return q
        if r > 0:
            lo = q
        else:
            hi = q
        dens = float(t_pdf(q, nu))
        step = q + r / dens if dens > 0 else np.nan
        q = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            return q
    raise NumericalError(f"quantile iteration did not converge for p={p}, nu={nu}")


def sample_t(spec: TDistSpec, stream: NoiseStream, n: int) -> np.ndarray:
    """Draw ``n`` values of ``spec.scale * T``, ``T ~ t(spec.nu)``.

    ``T`` is generated as ``Z / sqrt(V / nu)`` with ``Z`` standard normal and
    ``V`` chi-square with ``nu`` degrees of freedom, which is exact for every
    real ``nu > 0``.
    """
    if n < 1:
        raise DomainError(f"sample count must be at least 1, got n={n}")
    rng = stream.generator()
    z = rng.standard_normal(n)
    v = rng.chisquare(spec.nu, n)
    return spec.scale * z / np.sqrt(v / spec.nu)


def sample_normal(scale: float, stream: NoiseStream, n: int) -> np.ndarray:
    """``n`` draws of ``scale * Z`` with ``Z`` standard normal."""
    if n < 1:
        raise DomainError(f"sample count must be at least 1, got n={n}")
    return scale * stream.generator().standard_normal(n)
