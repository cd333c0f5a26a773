"""Price maps for the standard, logistic and homogeneously saturated models.

All price maps work on the accumulated drift plus noise ``x = alpha*t + W``
and return the log return ``r = ln(S/S0)`` computed directly, so the
``beta = 0`` limit reproduces the standard model without round-off and large
``|x|`` does not overflow. Inputs may be scalars or numpy arrays.

Time is measured in days; ``t = 1`` is the value one day later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from satdyn.errors import DomainError, NumericalError


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of one model instance.

    Attributes
    ----------
    s0 : float
        Initial price.
    alpha : float
        Drift rate per day.
    sigma : float
        Noise scale per sqrt(day); used by the moment formulas.
    beta : float
        Saturation parameter (1/currency).
    tau : float
        Reservoir relaxation time in days.
    pump : float
        Rate at which money is pumped into the reservoir.
    m0 : float
        Reservoir baseline.
    """

    s0: float = 50.0
    alpha: float = 0.0041
    sigma: float = 0.157
    beta: float = 0.0
    tau: float = 1.0
    pump: float = 0.0
    m0: float = 0.0

    def __post_init__(self):
        if not self.s0 > 0:
            raise DomainError(f"s0 must be positive, got {self.s0}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be non-negative, got {self.beta}")
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class AccumulatedNoise:
    """Drift plus noise accumulated over a horizon of ``t`` days.

    ``x = alpha*t + w`` by construction; build with :meth:`from_w`.
    """

    x: np.ndarray | float
    t: float = 1.0
    w: np.ndarray | float | None = None

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"horizon must be positive, got t={self.t}")

    @classmethod
    def from_w(cls, alpha: float, w, t: float = 1.0) -> "AccumulatedNoise":
        w = np.asarray(w, dtype=float)
        return cls(x=alpha * t + w, t=t, w=w)


@dataclass(frozen=True)
class PriceSample:
    """Price ``s`` and log return ``r`` for accumulated drift plus noise ``x``.

    ``regularized`` marks entries evaluated through a removable singularity.
    """

    x: np.ndarray | float
    s: np.ndarray | float
    r: np.ndarray | float
    regularized: np.ndarray | bool = field(default=False)


def _sample(x, s0, r, regularized=False) -> PriceSample:
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    s = s0 * np.exp(r)
    if r.ndim == 0:
        return PriceSample(float(x), float(s), float(r), bool(np.any(regularized)))
    return PriceSample(x, s, r, np.asarray(regularized) & np.ones_like(r, dtype=bool))


_SERIES_CUTOFF = 1e-5


def expm1_ratio(y):
    """``expm1(y) / y`` with the removable singularity at 0 filled in."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = np.expm1(y) / y
    series = 1.0 + y / 2.0 + y * y / 6.0
    return np.where(small, series, direct)


def log_expm1_ratio(y):
    """``log(expm1(y) / y)`` without overflow for large positive ``y``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = y + np.log(-np.expm1(-y)) - np.log(y)
        mid = np.log(expm1_ratio(y))
    return np.where(y > 30.0, big, mid)


# --------------------------------------------------------------------------
# standard model
# --------------------------------------------------------------------------

def standard_price(p: ModelParams, noise: AccumulatedNoise) -> PriceSample:
    """Geometric Brownian motion: ``S = S0 * exp(x)``."""
    return _sample(noise.x, p.s0, noise.x)


def standard_mean(p: ModelParams, t):
    return p.s0 * np.exp((p.alpha + p.sigma**2 / 2) * np.asarray(t, dtype=float))


def standard_variance(p: ModelParams, t):
    t = np.asarray(t, dtype=float)
    return p.s0**2 * np.exp((2 * p.alpha + p.sigma**2) * t) * np.expm1(p.sigma**2 * t)


# --------------------------------------------------------------------------
# logistic model
# --------------------------------------------------------------------------

def logistic_price_path(p: ModelParams, increments, t: float) -> PriceSample:
    """Logistic price from an explicit noise path.

    Parameters
    ----------
    increments : array_like, shape (..., N)
        Noise increments ``sigma * f * h`` on ``N`` equal steps of
        ``h = t / N``. Leading axes are independent paths.
    t : float
        Horizon in days.

    Notes
    -----
    The inner exponent ``alpha*zeta + sum of increments`` is exact on the
    grid; the outer time integral of its exponential is a left-endpoint
    Riemann sum.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.shape[-1] < 1:
        raise DomainError("noise path needs at least one step")
    if not t > 0:
        raise DomainError(f"horizon must be positive, got t={t}")
    n = inc.shape[-1]
    h = t / n
    x = p.alpha * t + inc.sum(axis=-1)
    if p.beta == 0:
        return _sample(x, p.s0, x)
    # exponent at left endpoints t_0 .. t_{N-1}; t_0 = 0
    grid = p.alpha * h * np.arange(n) + np.cumsum(inc, axis=-1) - inc
    top = grid.max(axis=-1, keepdims=True)
    log_integral = np.log(h) + top[..., 0] + np.log(np.exp(grid - top).sum(axis=-1))
    r = x - np.logaddexp(0.0, np.log(p.beta * p.s0) + log_integral)
    return _sample(x, p.s0, r)


def logistic_price_approx(p: ModelParams, noise: AccumulatedNoise) -> PriceSample:
    """Closed-form logistic price when the noise moves in equal small steps.

    ``S = S0 k e^x / (k + beta S0 (e^x - 1))`` with ``k = alpha + W/t = x/t``.
    Rewritten as ``S = S0 e^x / (1 + beta S0 t expm1(x)/x)``, which is finite
    at ``k = 0`` (limit ``S0 / (1 + beta S0 t)``); such entries are flagged
    in ``regularized``.
    """
    x = np.asarray(noise.x, dtype=float)
    t = noise.t
    singular = np.abs(x) < _SERIES_CUTOFF
    if p.beta == 0:
        return _sample(x, p.s0, x, singular)
    r = x - np.logaddexp(0.0, np.log(p.beta * p.s0 * t) + log_expm1_ratio(x))
    return _sample(x, p.s0, r, singular)


def logistic_mean(p: ModelParams, t):
    """Mean price under the logistic moment equation.

    ``S0 k e^{kt} / (beta S0 (e^{kt} - 1) + k)`` with ``k = alpha + sigma^2/2``,
    evaluated as ``S0 / (e^{-kt} + beta S0 t expm1(-kt)/(-kt))``, which neither
    overflows for large ``kt`` nor breaks down at ``k = 0`` (limit
    ``S0 / (1 + beta S0 t)``).
    """
    t = np.asarray(t, dtype=float)
    k = p.alpha + p.sigma**2 / 2
    kt = k * t
    return p.s0 / (np.exp(-kt) + p.beta * p.s0 * t * expm1_ratio(-kt))


def logistic_mean_limit(p: ModelParams) -> float:
    """``t -> inf`` limit of :func:`logistic_mean`, ``(alpha + sigma^2/2) / beta``."""
    if p.beta == 0:
        raise DomainError("mean diverges for beta = 0")
    return (p.alpha + p.sigma**2 / 2) / p.beta


def logistic_second_moment(p: ModelParams, t):
    """Second moment of the logistic price.

    ``S0^2 k^2 / (e^{-kt}(beta S0 - k) - beta S0)^2`` with ``k = alpha + sigma^2``.
    Dividing numerator and denominator by ``k^2`` gives
    ``S0^2 / (e^{-kt} + beta S0 t expm1(-kt)/(-kt))^2``, finite at ``k = 0``.
    """
    t = np.asarray(t, dtype=float)
    k = p.alpha + p.sigma**2
    kt = k * t
    return p.s0**2 / (np.exp(-kt) + p.beta * p.s0 * t * expm1_ratio(-kt)) ** 2


def logistic_variance(p: ModelParams, t):
    """Second moment minus squared mean, both from their closed forms."""
    return logistic_second_moment(p, t) - logistic_mean(p, t) ** 2


def logistic_variance_limit(p: ModelParams) -> float:
    """``t -> inf`` limit of :func:`logistic_variance`:
    ``((alpha + sigma^2)^2 - (alpha + sigma^2/2)^2) / beta^2``."""
    if p.beta == 0:
        raise DomainError("variance diverges for beta = 0")
    k2 = p.alpha + p.sigma**2
    k1 = p.alpha + p.sigma**2 / 2
    return (k2**2 - k1**2) / p.beta**2


def logistic_variance_limit_printed(p: ModelParams) -> float:
    """Published closed form ``(alpha + sigma^2 + 3 (sigma^2/2)^2) / beta^2``.

    Kept verbatim for comparison; it is not dimensionally consistent with
    :func:`logistic_variance_limit` and disagrees with it numerically.
    """
    if p.beta == 0:
        raise DomainError("variance diverges for beta = 0")
    return (p.alpha + p.sigma**2 + 3 * (p.sigma**2 / 2) ** 2) / p.beta**2


def geometric_series_identity(y: float, t: float, n: int) -> tuple[float, float]:
    """Left-endpoint sum of ``exp(y i / n)`` times ``t/n`` and its closed form.

    Returns ``(direct, closed)``; for ``y = 0`` both equal ``t``.
    """
    if n < 1:
        raise DomainError(f"need at least one term, got n={n}")
    direct = t / n * float(np.sum(np.exp(y * np.arange(n) / n)))
    if y == 0:
        return direct, float(t)
    # (t/n)(1 - e^y)/(1 - e^{y/n}) == t * phi(y) / phi(y/n), phi(z) = expm1(z)/z
    closed = t * float(expm1_ratio(y) / expm1_ratio(y / n))
    return direct, closed


# --------------------------------------------------------------------------
# homogeneously saturated model
# --------------------------------------------------------------------------

def saturation_residual(p: ModelParams, noise: AccumulatedNoise, s):
    """``ln S + beta S - ln S0 - beta S0 - x``; zero at the saturated price."""
    s = np.asarray(s, dtype=float)
    return np.log(s / p.s0) + p.beta * (s - p.s0) - np.asarray(noise.x, dtype=float)


def _solve_saturated_return(x, k, tol=1e-12, max_iter=100):
    """Solve ``r + k expm1(r) = x`` for ``r`` with ``k = beta * S0 >= 0``.

    The left side is increasing and convex in ``r``, so the root lies between
    0 and ``x`` and Newton steps started to the right of it approach it
    monotonically. Steps leaving the bracket fall back to bisection.
    """
    x = np.asarray(x, dtype=float)
    lo = np.minimum(0.0, x)
    hi = np.maximum(0.0, x)
    with np.errstate(divide="ignore", over="ignore"):
        # g(log1p(x/k)) = log1p(x/k) >= 0 for x > 0, so this start is right of the root
        guess_pos = np.minimum(x, np.log1p(np.maximum(x, 0.0) / k))
    r = np.where(x > 0, guess_pos, 0.0)

    def g(r):
        return r + k * np.expm1(r) - x

    for _ in range(max_iter):
        val = g(r)
        done = np.abs(val) <= tol
        if np.all(done):
            return r
        lo = np.where(val < 0, r, lo)
        hi = np.where(val > 0, r, hi)
        newton = r - val / (1.0 + k * np.exp(r))
        inside = (newton > lo) & (newton < hi)
        r = np.where(done, r, np.where(inside, newton, 0.5 * (lo + hi)))
        collapsed = hi - lo <= 4 * np.finfo(float).eps * np.maximum(np.abs(hi), 1.0)
        if np.all(done | collapsed):
            break
    if np.any(np.abs(g(r)) > 1e-10):
        raise NumericalError("saturated price iteration did not converge")
    return r


def saturated_price(p: ModelParams, noise: AccumulatedNoise) -> PriceSample:
    """Price of the homogeneously saturated model.

    Solves ``S exp(beta (S - S0)) = S0 exp(x)`` for ``S > 0``. In terms of the
    return this is ``r + beta S0 (e^r - 1) = x``, which has exactly one root
    with ``|r| <= |x|`` and the same sign as ``x``.
    """
    x = np.asarray(noise.x, dtype=float)
    if p.beta == 0:
        return _sample(x, p.s0, x)
    r = _solve_saturated_return(x, p.beta * p.s0)
    return _sample(x, p.s0, r)


def saturated_price_approx(p: ModelParams, noise: AccumulatedNoise) -> PriceSample:
    """First-order expansion of the saturated model.

    ``S = S0 e^x / (1 + beta S0 (e^x - 1))``; requires ``0 <= beta S0 < 1``
    since larger couplings give negative prices for ``x < 0``.
    """
    k = p.beta * p.s0
    if not 0 <= k < 1:
        raise DomainError(f"approximation requires 0 <= beta*s0 < 1, got {k}")
    x = np.asarray(noise.x, dtype=float)
    if k == 0:
        return _sample(x, p.s0, x)
    with np.errstate(over="ignore"):
        moderate = x - np.log1p(k * np.expm1(np.minimum(x, 700.0)))
    large = x - np.logaddexp(np.log1p(-k), np.log(k) + x)
    return _sample(x, p.s0, np.where(x > 30.0, large, moderate))


# --------------------------------------------------------------------------
# money reservoir
# --------------------------------------------------------------------------

def money_supply_steady_state(p: ModelParams, s, noise_term=0.0):
    """Steady-state money supply with noise, ``(alpha + noise) / (1 + beta S)``."""
    return (p.alpha + np.asarray(noise_term, dtype=float)) / (1.0 + p.beta * np.asarray(s, dtype=float))


def money_supply_rate_form(p: ModelParams, s):
    """Steady state of the reservoir rate equation, ``(N + M0/tau) / (1/tau + beta S)``."""
    return (p.pump + p.m0 / p.tau) / (1.0 / p.tau + p.beta * np.asarray(s, dtype=float))


def money_supply_logistic_form(p: ModelParams, s):
    """Recast steady state ``alpha / (1 + (beta/alpha) S)``.

    Its product with ``S`` expands as ``alpha S - beta S^2 + (beta^2/alpha) S^3 - ...``,
    whose first two terms are the logistic growth rate.
    """
    if p.alpha == 0:
        raise DomainError("recast form needs alpha != 0")
    return p.alpha / (1.0 + p.beta / p.alpha * np.asarray(s, dtype=float))


@dataclass(frozen=True)
class RateTrajectory:
    t: np.ndarray
    m: np.ndarray
    s: np.ndarray


def coupled_rate_integration(
    p: ModelParams,
    horizon: float,
    h: float,
    noise=None,
    m_init: float | None = None,
    s_init: float | None = None,
    noise_target: str = "price",
    freeze_price: bool = False,
) -> RateTrajectory:
    """Explicit Euler integration of the money-reservoir and price equations.

    ``dM/dt = N - beta S M - (M - M0)/tau`` and ``dS/dt = M S``, with a noise
    increment ``sigma f h`` per step added either to the price equation
    (``noise_target="price"``, as ``S * increment``) or to the reservoir
    (``noise_target="money"``).

    Parameters
    ----------
    noise : array_like, optional
        Per-step increments, length ``round(horizon / h)``. ``None`` means no noise.
    m_init : float, optional
        Initial money supply; defaults to the steady state at ``s_init``.
    freeze_price : bool
        Hold ``S`` at its initial value, integrating the reservoir alone.
    """
    if not h > 0:
        raise DomainError(f"step must be positive, got h={h}")
    if noise_target not in ("price", "money"):
        raise DomainError(f"noise_target must be 'price' or 'money', got {noise_target!r}")
    n = int(round(horizon / h))
    if n < 1:
        raise DomainError("horizon shorter than one step")
    inc = np.zeros(n) if noise is None else np.asarray(noise, dtype=float)
    if inc.shape != (n,):
        raise DomainError(f"noise path must have {n} increments, got shape {inc.shape}")

    s_val = p.s0 if s_init is None else float(s_init)
    m_val = float(money_supply_rate_form(p, s_val)) if m_init is None else float(m_init)
    m = np.empty(n + 1)
    s = np.empty(n + 1)
    m[0], s[0] = m_val, s_val
    for i in range(n):
        dm = (p.pump - p.beta * s_val * m_val - (m_val - p.m0) / p.tau) * h
        ds = m_val * s_val * h
        if noise_target == "money":
            dm += inc[i]
        else:
            ds += s_val * inc[i]
        m_val += dm
        if not freeze_price:
            s_val += ds
            if not s_val > 0:
                raise NumericalError(
                    f"price became non-positive at step {i + 1} (t={(i + 1) * h:g}); reduce the step size"
                )
        m[i + 1], s[i + 1] = m_val, s_val
    return RateTrajectory(t=h * np.arange(n + 1), m=m, s=s)
