"""Langevin price models driven by Student's t noise.

Standard (geometric Brownian motion), logistic, and homogeneously saturated
price maps, a seeded Monte-Carlo runner for one-day descriptive statistics,
and truncated quadrature of the fat-tailed European-call kernel.
"""

from satdyn.errors import DomainError, NumericalError
from satdyn.distributions import NoiseStream, TDistSpec, sample_t, t_cdf, t_pdf, t_quantile
from satdyn.models import (
    AccumulatedNoise,
    ModelParams,
    PriceSample,
    logistic_mean,
    logistic_price_approx,
    logistic_price_path,
    logistic_second_moment,
    saturated_price,
    saturated_price_approx,
    standard_mean,
    standard_price,
    standard_variance,
)
from satdyn.montecarlo import ExperimentConfig, StatsSummary, comparative_table, descriptive_stats, run_experiment
from satdyn.pricing import QuadratureSpec, call_integrand, critical_value_tics, divergence_scan, truncated_call_integral

__version__ = "0.1.0"

__all__ = [
    "AccumulatedNoise",
    "DomainError",
    "ExperimentConfig",
    "ModelParams",
    "NoiseStream",
    "NumericalError",
    "PriceSample",
    "QuadratureSpec",
    "StatsSummary",
    "TDistSpec",
    "call_integrand",
    "comparative_table",
    "critical_value_tics",
    "descriptive_stats",
    "divergence_scan",
    "logistic_mean",
    "logistic_price_approx",
    "logistic_price_path",
    "logistic_second_moment",
    "run_experiment",
    "sample_t",
    "saturated_price",
    "saturated_price_approx",
    "standard_mean",
    "standard_price",
    "standard_variance",
    "t_cdf",
    "t_pdf",
    "t_quantile",
    "truncated_call_integral",
]
