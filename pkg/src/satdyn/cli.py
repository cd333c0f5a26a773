"""Command-line front end: ``satdyn simulate | table | figure | price | replay``.

Every command writes CSV files plus ``manifest.txt`` into ``--out``. A
manifest is a flat ``key = value`` file; passing it back through
``satdyn replay`` (or ``--config``) reproduces the CSVs byte for byte.

Exit status: 0 success, 2 usage error, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import os
import sys
from pathlib import Path

import numpy as np

from satdyn import __version__
from satdyn.distributions import TDistSpec, daily_noise_scale
from satdyn.errors import DomainError, NumericalError
from satdyn.models import (
    AccumulatedNoise,
    ModelParams,
    logistic_mean,
    logistic_price_approx,
    saturated_price,
)
from satdyn.montecarlo import (
    KURTOSIS_CONVENTION,
    PRESETS,
    STD_CONVENTION,
    ExperimentConfig,
    comparative_table,
    preset_betas,
    run_experiment,
)
from satdyn.pricing import (
    FIG6_PROBABILITIES,
    QuadratureSpec,
    call_integrand,
    call_numerator,
    critical_value_tics,
    divergence_scan,
    truncated_call_integral,
)

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4

CSV_SCHEMA_VERSION = "1"
SEED_ENV = "SATDYN_SEED"

MODEL_ALIASES = {
    "standard": "standard",
    "logistic": "logistic_approx",
    "logistic_approx": "logistic_approx",
    "saturated": "saturated_exact",
    "saturated_exact": "saturated_exact",
    "saturated_approx": "saturated_approx",
}

# keys recorded in manifests that are not run options
_META_KEYS = {"command", "version", "timestamp", "csv_schema", "kurtosis_convention", "std_convention"}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v) + 0.0, ".17g")


def _floats(text) -> list[float] | None:
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def _optional_float(text):
    if text is None or str(text).lower() in ("", "none"):
        return None
    return float(text)


def _optional_str(text):
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    return str(text).strip()


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# option name -> (type converter, default per command or shared default)
_OPTION_TYPES = {
    "model": _optional_str,
    "beta": float,
    "betas": _floats,
    "alpha": float,
    "sigma_scale": float,
    "sigma": float,
    "nu": float,
    "s0": float,
    "n": int,
    "seed": int,
    "horizon": float,
    "preset": _optional_str,
    "figure": int,
    "points": int,
    "tmax": float,
    "confidence": _optional_float,
    "upper": _optional_float,
    "lower": float,
    "scan": _floats,
    "normalize": _bool,
}

_SHARED_DEFAULTS = {
    "alpha": 0.0041,
    "s0": 50.0,
    "sigma_scale": daily_noise_scale(),
}

COMMAND_DEFAULTS = {
    "simulate": {**_SHARED_DEFAULTS, "model": "standard", "beta": 0.0, "nu": 2.0, "n": 4096, "horizon": 1.0},
    "table": {**_SHARED_DEFAULTS, "preset": None, "betas": None, "model": None, "nu": 2.0, "n": 4096},
    "figure": {**_SHARED_DEFAULTS, "figure": None, "points": 401, "betas": None, "tmax": 1000.0,
               "sigma": 0.157, "nu": 3.0},
    "price": {"sigma": 0.157, "nu": 3.0, "lower": 0.0, "upper": None, "confidence": None, "scan": None,
              "normalize": False},
}

_SEEDED = {"simulate", "table"}


def read_key_values(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_format_value(x) for x in v)
    return str(v)


def resolve_options(command: str, file_values: dict, flag_values: dict) -> dict:
    """Defaults, then config-file values, then explicit flags."""
    opts = dict(COMMAND_DEFAULTS[command])
    if command in _SEEDED:
        env = os.environ.get(SEED_ENV)
        opts["seed"] = int(env) if env else 0
    for source in (file_values, flag_values):
        for key, value in source.items():
            if key in _META_KEYS or key not in opts:
                continue
            try:
                opts[key] = _OPTION_TYPES[key](value) if isinstance(value, str) else value
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {value!r} ({exc})") from None
    return opts


def write_manifest(out: Path, command: str, opts: dict, workers: int) -> None:
    lines = [
        "# satdyn run manifest; replay with: satdyn replay <this file> --out <dir>",
        f"command = {command}",
        f"version = {__version__}",
        f"timestamp = {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}",
        f"csv_schema = {CSV_SCHEMA_VERSION}",
        f"kurtosis_convention = {KURTOSIS_CONVENTION}",
        f"std_convention = {STD_CONVENTION}",
        f"workers = {workers}",
    ]
    lines += [f"{k} = {_format_value(v)}" for k, v in opts.items()]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _beta_header(b: float) -> str:
    return f"beta_{b:g}"


def _params(opts, beta=0.0, sigma=None) -> ModelParams:
    return ModelParams(
        s0=opts["s0"],
        alpha=opts["alpha"],
        sigma=opts["sigma_scale"] if sigma is None else sigma,
        beta=beta,
    )


def _model_name(name: str) -> str:
    if name not in MODEL_ALIASES:
        raise UsageError(f"unknown model {name!r}; choose from {sorted(MODEL_ALIASES)}")
    return MODEL_ALIASES[name]


def _print_summary(labels, columns) -> None:
    width = max(14, *(len(l) + 2 for l in labels))
    print("statistic".ljust(10) + "".join(l.rjust(width) for l in labels))
    for i, (name, _) in enumerate(columns[0].rows()):
        print(name.ljust(10) + "".join(f"{c.rows()[i][1]:{width}.6g}" for c in columns))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_simulate(opts: dict, out: Path, workers: int) -> None:
    cfg = ExperimentConfig(
        model=_model_name(opts["model"]),
        params=_params(opts, beta=opts["beta"]),
        noise=TDistSpec(nu=opts["nu"], scale=opts["sigma_scale"]),
        n_samples=opts["n"],
        horizon_days=opts["horizon"],
        seed=opts["seed"],
    )
    result = run_experiment(cfg, workers=workers)
    sm = result.samples
    x, s, r = (np.atleast_1d(v) for v in (sm.x, sm.s, sm.r))
    _write_csv(
        out / "samples.csv",
        ["index", "w", "x", "s", "r"],
        ([i, fmt(result.w[i]), fmt(x[i]), fmt(s[i]), fmt(r[i])] for i in range(len(x))),
    )
    _write_csv(out / "summary.csv", ["statistic", "value"], ((k, fmt(v)) for k, v in result.summary.rows()))
    _print_summary([_beta_header(opts["beta"])], [result.summary])


def cmd_table(opts: dict, out: Path, workers: int) -> None:
    if opts["preset"] is not None:
        if opts["preset"] not in PRESETS:
            raise UsageError(f"unknown preset {opts['preset']!r}; choose from {sorted(PRESETS)}")
        model, betas = preset_betas(opts["preset"], opts["s0"])
        if opts["betas"] is not None:
            betas = opts["betas"]
        if opts["model"] is not None:
            model = _model_name(opts["model"])
    else:
        if opts["betas"] is None:
            raise UsageError("table needs --preset or --betas")
        betas = opts["betas"]
        model = _model_name(opts["model"] or "saturated")
    if not betas:
        raise UsageError("empty beta list")
    cfg = ExperimentConfig(
        model=model,
        params=_params(opts),
        noise=TDistSpec(nu=opts["nu"], scale=opts["sigma_scale"]),
        n_samples=opts["n"],
        seed=opts["seed"],
    )
    for b in betas:
        if model == "saturated_approx" and not b * opts["s0"] < 1:
            raise DomainError(f"saturated_approx requires beta*s0 < 1, got beta={b}")
    table = comparative_table(cfg, betas, workers=workers)
    labels = [_beta_header(b) for b in table.betas]
    names = [k for k, _ in table.columns[0].rows()]
    rows = ([name] + [fmt(col.rows()[i][1]) for col in table.columns] for i, name in enumerate(names))
    _write_csv(out / "table.csv", ["statistic"] + labels, rows)
    print(f"model: {model}")
    _print_summary(labels, table.columns)


_FIGURE_DEFAULT_BETAS = {
    # beta*s0 for the logistic figures, absolute beta for the saturated ones
    1: ((0.01, 0.02, 0.05, 0.1), True),
    2: ((0.0, 0.05, 0.1, 0.2), True),
    3: ((0.0, 0.05, 0.1, 0.2), True),
    4: ((0.0, 0.25, 0.5, 1.0), False),
    5: ((0.0, 0.25, 0.5, 1.0), False),
}


def figure_data(opts: dict) -> dict[str, tuple[list[str], list[list]]]:
    """Curve data per output file name: ``{filename: (header, rows)}``."""
    fig = opts["figure"]
    if fig not in range(1, 7):
        raise UsageError(f"unknown figure id {fig!r}; choose 1-6")
    npts = opts["points"]
    if npts < 2:
        raise UsageError("--points must be at least 2")

    if fig == 6:
        xi = np.linspace(0.0, 100.0, npts)
        num = call_numerator(xi, opts["sigma"])
        full = call_integrand(xi, opts["sigma"], opts["nu"])
        tics = critical_value_tics(opts["nu"], FIG6_PROBABILITIES + (0.999999,))
        return {
            "fig6.csv": (["xi", "numerator", "integrand"], [[fmt(a), fmt(b), fmt(c)] for a, b, c in zip(xi, num, full)]),
            "fig6_tics.csv": (
                ["probability", "critical_value"],
                [[fmt(p), fmt(q)] for p, q in zip(FIG6_PROBABILITIES + (0.999999,), tics)],
            ),
        }

    if opts["betas"] is not None:
        betas = list(opts["betas"])
    else:
        values, relative = _FIGURE_DEFAULT_BETAS[fig]
        betas = [v / opts["s0"] if relative else v for v in values]
    header_x = "t" if fig == 1 else "x"
    if fig == 1:
        grid = np.linspace(0.0, opts["tmax"], npts)
        series = [logistic_mean(_params(opts, beta=b), grid) for b in betas]
    else:
        grid = np.linspace(-20.0, 20.0, npts)
        model = logistic_price_approx if fig in (2, 3) else saturated_price
        noise = AccumulatedNoise(x=grid, t=1.0)
        samples = [model(_params(opts, beta=b), noise) for b in betas]
        series = [sm.s if fig in (2, 4) else sm.r for sm in samples]
    rows = [[fmt(g)] + [fmt(s[i]) for s in series] for i, g in enumerate(grid)]
    return {f"fig{fig}.csv": ([header_x] + [_beta_header(b) for b in betas], rows)}


def cmd_figure(opts: dict, out: Path, workers: int) -> None:
    for name, (header, rows) in figure_data(opts).items():
        _write_csv(out / name, header, rows)
        print(f"wrote {out / name} ({len(rows)} rows)")


def cmd_price(opts: dict, out: Path, workers: int) -> None:
    if opts["upper"] is None and opts["confidence"] is None:
        msg = "choose a truncation point with --upper or --confidence"
        if opts["sigma"] > 0:
            msg = "refusing to integrate to infinity: the integral diverges for sigma > 0; " + msg
        raise DomainError(msg)
    if opts["upper"] is not None and opts["confidence"] is not None:
        raise UsageError("give only one of --upper and --confidence")
    spec = QuadratureSpec(
        lower=opts["lower"],
        upper=opts["upper"],
        confidence=opts["confidence"],
        sigma=opts["sigma"],
        nu=opts["nu"],
        normalize=opts["normalize"],
    )
    upper = spec.truncation_point()
    value = truncated_call_integral(spec)
    conf = "" if opts["confidence"] is None else fmt(opts["confidence"])
    _write_csv(out / "price.csv", ["lower", "upper", "confidence", "integral"],
               [[fmt(spec.lower), fmt(upper), conf, fmt(value)]])
    print(f"truncation point: {upper:.6g}")
    print(f"integral:         {value:.10g}")
    if opts["scan"]:
        scan = divergence_scan(spec.sigma, spec.nu, spec.lower, sorted(opts["scan"]))
        _write_csv(out / "scan.csv", ["upper", "integral"], [[fmt(u), fmt(v)] for u, v in scan])
        print("upper            integral")
        for u, v in scan:
            print(f"{u:<16.6g} {v:.10g}")


COMMANDS = {
    "simulate": cmd_simulate,
    "table": cmd_table,
    "figure": cmd_figure,
    "price": cmd_price,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key = value file; flags override its values")
    common.add_argument("--out", help="output directory (default: satdyn_out)")
    common.add_argument("--workers", type=int, help="threads for noise generation (results do not depend on it)")

    model_opts = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    model_opts.add_argument("--alpha", type=float, help="drift per day (default 0.0041)")
    model_opts.add_argument("--s0", type=float, help="initial price (default 50)")
    model_opts.add_argument("--sigma-scale", dest="sigma_scale", type=float,
                            help="multiplier on raw t draws (default 10*0.3/sqrt(365))")
    model_opts.add_argument("--nu", type=float, help="t degrees of freedom")

    seeded = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    seeded.add_argument("--seed", type=int, help=f"64-bit seed (fallback: ${SEED_ENV}, then 0)")
    seeded.add_argument("--n", type=int, help="number of samples (default 4096)")

    parser = argparse.ArgumentParser(prog="satdyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"satdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common, model_opts, seeded], argument_default=argparse.SUPPRESS,
                       help="draw one-day samples for a single model")
    p.add_argument("--model", choices=sorted(MODEL_ALIASES))
    p.add_argument("--beta", type=float)
    p.add_argument("--horizon", type=float, help="horizon in days (default 1)")

    p = sub.add_parser("table", parents=[common, model_opts, seeded], argument_default=argparse.SUPPRESS,
                       help="comparative statistics across beta values")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--model", choices=sorted(MODEL_ALIASES))

    p = sub.add_parser("figure", parents=[common, model_opts], argument_default=argparse.SUPPRESS,
                       help="emit curve data for figures 1-6")
    p.add_argument("--figure", type=int, choices=range(1, 7), required=False)
    p.add_argument("--points", type=int)
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--tmax", type=float, help="time span for figure 1, days")
    p.add_argument("--sigma", type=float, help="kernel sigma for figure 6")

    p = sub.add_parser("price", parents=[common], argument_default=argparse.SUPPRESS,
                       help="truncated European-call kernel integral")
    p.add_argument("--sigma", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--lower", type=float)
    p.add_argument("--upper", type=float)
    p.add_argument("--confidence", type=float)
    p.add_argument("--scan", type=float, nargs="+", help="truncation grid for a divergence scan")
    p.add_argument("--normalize", action="store_true", help="include the t density constant")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=None)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    try:
        if command == "replay":
            file_values = read_key_values(args["manifest"])
            command = file_values.get("command")
            if command not in COMMANDS:
                raise UsageError(f"manifest names unknown command {command!r}")
            flags = {}
            workers = args["workers"] if args["workers"] is not None else int(file_values.get("workers", 1))
            out = Path(args["out"] or "satdyn_out")
        else:
            config = args.pop("config", None)
            file_values = read_key_values(config) if config else {}
            out = Path(args.pop("out", file_values.get("out", "satdyn_out")))
            workers = args.pop("workers", int(file_values.get("workers", 1)))
            flags = args
        if workers < 1:
            raise UsageError("--workers must be at least 1")
        opts = resolve_options(command, file_values, flags)
        if command == "figure" and opts["figure"] is None:
            raise UsageError("figure needs --figure N")
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[command](opts, out, workers)
        write_manifest(out, command, opts, workers)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"satdyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OverflowError) as exc:
        print(f"satdyn: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"satdyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
