"""Seeded one-day Monte-Carlo experiments and their descriptive statistics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from satdyn.distributions import NoiseStream, TDistSpec, daily_noise_scale, sample_t
from satdyn.errors import DomainError
from satdyn.models import (
    AccumulatedNoise,
    ModelParams,
    PriceSample,
    logistic_price_approx,
    saturated_price,
    saturated_price_approx,
    standard_price,
)

PARTITION_SIZE = 256

MODELS = {
    "standard": standard_price,
    "logistic_approx": logistic_price_approx,
    "saturated_exact": saturated_price,
    "saturated_approx": saturated_price_approx,
}

KURTOSIS_CONVENTION = "excess g2 = m4/m2^2 - 3 (population central moments)"
STD_CONVENTION = "sample standard deviation (n-1 divisor)"


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "standard"
    params: ModelParams = field(default_factory=ModelParams)
    noise: TDistSpec = field(default_factory=lambda: TDistSpec(nu=2.0, scale=daily_noise_scale()))
    n_samples: int = 4096
    horizon_days: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}; expected one of {sorted(MODELS)}")
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be at least 1, got {self.n_samples}")
        if not self.horizon_days > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon_days}")
        if self.model == "saturated_approx" and not self.params.beta * self.params.s0 < 1:
            raise DomainError("saturated_approx requires beta*s0 < 1")

    def with_beta(self, beta: float) -> "ExperimentConfig":
        return replace(self, params=replace(self.params, beta=beta))


@dataclass(frozen=True)
class StatsSummary:
    """Max, min, mean, std and excess kurtosis of prices and returns."""

    max_s: float
    min_s: float
    mean_s: float
    std_s: float
    kurt_s: float
    max_r: float
    min_r: float
    mean_r: float
    std_r: float
    kurt_r: float
    n: int

    def rows(self) -> list[tuple[str, float]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self) if f.name != "n"]


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    w: np.ndarray
    samples: PriceSample
    summary: StatsSummary


def _describe(v: np.ndarray) -> tuple[float, float, float, float, float]:
    n = v.size
    mean = float(np.mean(v))
    if n < 2:
        return float(v.max()), float(v.min()), mean, float("nan"), float("nan")
    dev = v - mean
    # scale by the largest deviation so fourth powers of fat-tailed prices stay finite
    top = float(np.max(np.abs(dev)))
    if top == 0 or not np.isfinite(top):
        spread = 0.0 if top == 0 else float("nan")
        return float(v.max()), float(v.min()), mean, spread, float("nan")
    d = dev / top
    m2 = float(np.mean(d**2))
    m4 = float(np.mean(d**4))
    std = top * float(np.sqrt(m2 * n / (n - 1)))
    kurt = m4 / m2**2 - 3.0
    return float(v.max()), float(v.min()), mean, std, kurt


def descriptive_stats(samples: PriceSample) -> StatsSummary:
    """Summarize paired price/return samples.

    Fewer than two samples leave std and kurtosis as NaN; constant samples
    have std 0 and NaN kurtosis.
    """
    s = np.atleast_1d(np.asarray(samples.s, dtype=float))
    r = np.atleast_1d(np.asarray(samples.r, dtype=float))
    ds, dr = _describe(s), _describe(r)
    return StatsSummary(*ds, *dr, n=int(s.size))


def draw_accumulated_noise(spec: TDistSpec, seed: int, n: int, workers: int = 1) -> np.ndarray:
    """Draw ``n`` accumulated-noise values in fixed partitions of 256.

    Partition ``k`` always comes from substream ``k`` of ``seed``, so the
    result does not depend on ``workers``.
    """
    bounds = [(k, min(PARTITION_SIZE, n - k * PARTITION_SIZE)) for k in range(-(-n // PARTITION_SIZE))]

    def draw(item):
        k, size = item
        return sample_t(spec, NoiseStream(seed, k), size)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(draw, bounds))
    else:
        parts = [draw(b) for b in bounds]
    return np.concatenate(parts)


def apply_model(cfg: ExperimentConfig, w: np.ndarray) -> PriceSample:
    noise = AccumulatedNoise.from_w(cfg.params.alpha, w, cfg.horizon_days)
    return MODELS[cfg.model](cfg.params, noise)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    w = draw_accumulated_noise(cfg.noise, cfg.seed, cfg.n_samples, workers)
    samples = apply_model(cfg, w)
    return ExperimentResult(cfg, w, samples, descriptive_stats(samples))


@dataclass(frozen=True)
class ComparativeTable:
    betas: list[float]
    columns: list[StatsSummary]
    w: np.ndarray


def comparative_table(base_cfg: ExperimentConfig, beta_values, workers: int = 1) -> ComparativeTable:
    """One summary column per beta, all computed from the same noise draws."""
    betas = [float(b) for b in beta_values]
    if not betas:
        raise DomainError("need at least one beta value")
    w = draw_accumulated_noise(base_cfg.noise, base_cfg.seed, base_cfg.n_samples, workers)
    columns = [descriptive_stats(apply_model(base_cfg.with_beta(b), w)) for b in betas]
    return ComparativeTable(betas, columns, w)


# (model, beta*s0 multipliers or absolute betas, betas-are-relative-to-s0)
PRESETS = {
    "table1": ("logistic_approx", (0.0, 0.05, 0.1, 0.2), True),
    "table2": ("saturated_exact", (0.0, 0.25, 0.5, 1.0), False),
    "table3": ("saturated_approx", (0.0, 0.4, 0.8, 0.9), True),
}


def preset_betas(name: str, s0: float) -> tuple[str, list[float]]:
    """Model name and absolute beta values for a named table preset."""
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    model, values, relative = PRESETS[name]
    return model, [v / s0 if relative else v for v in values]
