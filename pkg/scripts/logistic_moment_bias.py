"""Compare path-simulated logistic means with the closed-form moment solution.

Usage: python3 scripts/logistic_moment_bias.py [--paths 100000] [--steps 1000] [--seed 1]

Prints the Monte-Carlo mean, the closed form and their gap in standard errors
for several horizons and saturation strengths. The closed form treats
E[S^2] as E[S]^2, so the gap grows with beta * s0 and with the horizon.
"""

import argparse
import math

import numpy as np

from satdyn.distributions import NoiseStream
from satdyn.models import ModelParams, logistic_mean, logistic_price_path


def simulate(p, t, paths, steps, seed, chunk=10_000):
    h = t / steps
    parts = []
    for k in range(-(-paths // chunk)):
        size = min(chunk, paths - k * chunk)
        inc = p.sigma * math.sqrt(h) * NoiseStream(seed, k).generator().standard_normal((size, steps))
        parts.append(logistic_price_path(p, inc, t).s)
    return np.concatenate(parts)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print(f"{'beta*s0':>8} {'t':>6} {'mc mean':>12} {'closed form':>12} {'gap/SE':>8}")
    for bs0 in (0.02, 0.2):
        for t in (1.0, 10.0):
            p = ModelParams(s0=50.0, alpha=0.0041, sigma=0.157, beta=bs0 / 50.0)
            s = simulate(p, t, args.paths, args.steps, args.seed)
            ref = float(logistic_mean(p, t))
            se = s.std(ddof=1) / math.sqrt(s.size)
            print(f"{bs0:8g} {t:6g} {s.mean():12.6f} {ref:12.6f} {(s.mean() - ref) / se:8.2f}")


if __name__ == "__main__":
    main()
