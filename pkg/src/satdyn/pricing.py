"""Truncated European-call kernel under Student's t returns.

The kernel ``exp(sigma xi) (1 + xi^2/nu)^(-(nu+1)/2)`` grows without bound
for ``sigma > 0``, so its integral to infinity diverges. Integrals here always
run to an explicit finite truncation point, typically a t quantile chosen for
a given confidence level.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from satdyn.distributions import t_quantile
from satdyn.errors import DomainError, NumericalError

FIG6_PROBABILITIES = (0.99, 0.999, 0.9999, 0.99999)

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = f(mid + half * _NODES)
    kronrod = half * float(np.dot(_KWEIGHTS, vals))
    gauss = half * float(np.dot(_GWEIGHTS, vals))
    return kronrod, abs(kronrod - gauss)


def adaptive_quad(f, a, b, abs_tol=1e-10, rel_tol=1e-8, breakpoints=(), max_intervals=20000):
    """Globally adaptive Gauss-Kronrod (7/15) integration over ``[a, b]``.

    The interval with the largest error estimate is bisected until the total
    estimate falls below ``max(abs_tol, rel_tol * |integral|)``.
    ``breakpoints`` seed the initial partition so narrow features are not
    missed by the first coarse rule.

    Returns
    -------
    (value, error_estimate)
    """
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(c for c in breakpoints if a < c < b)})
    heap = []
    total = err = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e = _gk15(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, v))
        total += v
        err += e
    while err > max(abs_tol, rel_tol * abs(total)):
        if len(heap) >= max_intervals:
            raise NumericalError(f"quadrature did not reach tolerance (error estimate {err:.3g})")
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NumericalError("quadrature interval collapsed below floating-point resolution")
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
    # re-sum to shed accumulated update round-off
    total = math.fsum(item[3] for item in heap)
    return sign * total, err


def _log_breakpoints(a, b):
    """Decade points ``+-10^k`` inside ``(a, b)``, plus 0."""
    pts = [0.0]
    for k in range(-1, 309):
        v = 10.0**k
        if v > max(abs(a), abs(b)):
            break
        pts.extend((v, -v))
    return [p for p in pts if a < p < b]


def t_density_constant(nu: float) -> float:
    """Normalizing constant of the t(nu) density, ``1 / (sqrt(nu) B(1/2, nu/2))``."""
    return math.exp(-0.5 * math.log(nu) - special.betaln(0.5, nu / 2))


def call_integrand(xi, sigma: float, nu: float = 3.0, normalize: bool = False):
    """``exp(sigma xi) / (1 + xi^2/nu)^((nu+1)/2)``, optionally times the t density constant."""
    if not nu > 0:
        raise DomainError(f"degrees of freedom must be positive, got nu={nu}")
    xi = np.asarray(xi, dtype=float)
    with np.errstate(over="ignore"):
        out = np.exp(sigma * xi - (nu + 1) / 2 * np.log1p(xi * xi / nu))
    if normalize:
        out = out * t_density_constant(nu)
    return out[()] if out.ndim == 0 else out


def call_numerator(xi, sigma: float):
    with np.errstate(over="ignore"):
        return np.exp(sigma * np.asarray(xi, dtype=float))


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration of :func:`call_integrand` over ``[lower, upper]``.

    ``lower`` is ``ln(K_T / A_T) / sigma`` for strike ``K_T`` and expected
    asset value ``A_T``. Give either ``upper`` or ``confidence``; the latter
    truncates at ``t_quantile(confidence, nu)``.
    """

    lower: float = 0.0
    upper: float | None = None
    confidence: float | None = None
    sigma: float = 0.157
    nu: float = 3.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    normalize: bool = False

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.nu > 0:
            raise DomainError(f"degrees of freedom must be positive, got nu={self.nu}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")
        if (self.upper is None) == (self.confidence is None):
            raise DomainError("give exactly one of upper or confidence as the truncation point")
        if not math.isfinite(self.lower):
            raise DomainError("lower bound must be finite")

    def truncation_point(self) -> float:
        if self.confidence is not None:
            return t_quantile(self.confidence, self.nu)
        if not math.isfinite(self.upper):
            msg = "upper bound must be finite; choose a truncation point or a confidence quantile"
            if self.sigma > 0:
                msg += " (the untruncated integral diverges for sigma > 0)"
            raise DomainError(msg)
        if self.upper < self.lower:
            raise DomainError(f"upper ({self.upper}) lies below lower ({self.lower})")
        return float(self.upper)


def truncated_call_integral(spec: QuadratureSpec) -> float:
    upper = spec.truncation_point()
    if upper <= spec.lower:
        return 0.0

    def f(xi):
        return call_integrand(xi, spec.sigma, spec.nu, spec.normalize)

    value, _ = adaptive_quad(
        f, spec.lower, upper, spec.abs_tol, spec.rel_tol, breakpoints=_log_breakpoints(spec.lower, upper)
    )
    return value


def divergence_scan(
    sigma: float,
    nu: float,
    lower: float,
    upper_grid,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-8,
) -> list[tuple[float, float]]:
    """Truncated integrals for an increasing sequence of truncation points.

    Each value is the previous one plus the integral over the new segment, so
    the sequence is monotone by construction and increments are directly
    comparable.
    """
    grid = [float(u) for u in upper_grid]
    if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
        raise DomainError("upper grid must be strictly increasing")
    out = []
    prev, acc = lower, 0.0
    for u in grid:
        if u > prev:
            acc += truncated_call_integral(
                QuadratureSpec(lower=prev, upper=u, sigma=sigma, nu=nu, abs_tol=abs_tol, rel_tol=rel_tol)
            )
            prev = u
        out.append((u, acc))
    return out


def critical_value_tics(nu: float, probs=FIG6_PROBABILITIES) -> list[float]:
    probs = list(probs)
    if not probs:
        raise DomainError("need at least one probability")
    return [t_quantile(p, nu) for p in probs]
