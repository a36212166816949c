"""Command line entry point: ``simulate`` and ``test-one``.

Exit status is 0 on success, 2 on configuration errors and 3 on numerical
failures (for example a covariance that is not positive definite).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from .bsd import bsd_step_down
from .estimators import EstimatorConfig, estimate_params
from .harness import METHODS, ExperimentConfig, emit_report, run_experiment
from .linalg import read_matrix, to_correlation
from .model import CovarianceFamily, MixtureParams, build_covariance
from .mrd import default_critical_sequence, mrd_step_down, read_critical_sequence

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("bayes_stepdown")


class ConfigError(ValueError):
    pass


def _methods(text: str) -> list:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", help="YAML file with default values for any flag")
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--cov", choices=("identity", "intraclass", "ar1", "block", "custom"), default=S)
    p.add_argument("--rho", type=float, default=S)
    p.add_argument("--block-size", dest="block_size", type=int, default=S)
    p.add_argument("--sigma-file", dest="sigma_file", default=S)
    p.add_argument("--p", type=float, default=S)
    p.add_argument("--v", type=float, default=S)
    p.add_argument("--delta", type=float, default=S, help="BSD threshold (default 1)")
    p.add_argument("--alpha", type=float, default=S, help="level for p-value methods and MRD (default 0.05)")
    p.add_argument("--gamma", type=float, default=S, help="frequency exponent of the p estimate (default 0.25)")
    p.add_argument("--estimate-params", dest="estimate_params", action="store_true", default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayes-stepdown", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="replicated Monte Carlo comparison of methods")
    _add_model_flags(sim)
    S = argparse.SUPPRESS
    sim.add_argument("--methods", type=_methods, default=S, help=f"comma list from {','.join(METHODS)}")
    sim.add_argument("--reps", type=int, default=S)
    sim.add_argument("--seed", type=int, default=S)
    sim.add_argument("--workers", type=int, default=S)
    sim.add_argument("--keep-replicates", dest="keep_replicates", action="store_true", default=S)
    sim.add_argument("--out", default="-", help="report path, '-' for stdout")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")

    one = sub.add_parser("test-one", help="run BSD or MRD on a single dataset and print the trace")
    _add_model_flags(one)
    one.add_argument("--x-file", dest="x_file", required=True, help="whitespace separated observations")
    one.add_argument("--method", choices=("bsd", "mrd"), default="bsd")
    one.add_argument("--critical-file", dest="critical_file", help="MRD critical constants, one per line")
    one.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    # nested sections such as {model: {...}, run: {...}} are flattened
    flat = {}
    for key, val in data.items():
        if isinstance(val, dict):
            flat.update(val)
        else:
            flat[key] = val
    flat = {k.replace("-", "_"): v for k, v in flat.items()}
    if isinstance(flat.get("methods"), str):
        flat["methods"] = _methods(flat["methods"])
    return flat


def _merged(args: argparse.Namespace, skip=()) -> dict:
    values = _load_config(getattr(args, "config", None))
    skip = set(skip) | {"config", "command", "verbose"}
    values.update({k: v for k, v in vars(args).items() if k not in skip})
    return values


def cmd_simulate(args) -> int:
    values = _merged(args, skip=("out", "format"))
    try:
        cfg = ExperimentConfig.from_dict(values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    report = run_experiment(cfg)
    emit_report(report, args.out, args.format)
    return 0


def _read_vector(path) -> np.ndarray:
    try:
        return np.array([float(t) for t in Path(path).read_text().split()])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_test_one(args) -> int:
    values = _merged(args, skip=("x_file", "method", "critical_file", "format"))
    x = _read_vector(args.x_file)
    m = x.size
    if m == 0:
        raise ConfigError(f"{args.x_file}: no observations")
    if values.get("sigma_file"):
        sigma = to_correlation(read_matrix(values["sigma_file"]))
        if sigma.shape[0] != m:
            raise ConfigError(f"Sigma has dimension {sigma.shape[0]}, x has {m} values")
    else:
        fam = CovarianceFamily(
            values.get("cov", "identity"), m, values.get("rho", 0.0), values.get("block_size", 1)
        )
        sigma = fam if fam.is_intraclass else build_covariance(fam)

    out = {"method": args.method, "m": m}
    if args.method == "bsd":
        if values.get("estimate_params"):
            est = estimate_params(x, EstimatorConfig(gamma=values.get("gamma", 0.25)))
            out["estimates"] = est
            p, v = est["p"], est["v"]
        else:
            if "p" not in values or "v" not in values:
                raise ConfigError("bsd needs --p and --v, or --estimate-params")
            p, v = values["p"], values["v"]
        params = MixtureParams(p, v, values.get("delta", 1.0))
        decisions, trace = bsd_step_down(x, sigma, params)
    else:
        if args.critical_file:
            c = read_critical_sequence(args.critical_file, m)
        else:
            c = default_critical_sequence(m, values.get("alpha", 0.05))
        decisions, trace = mrd_step_down(x, sigma, c)

    out.update(trace.to_dict())
    out["rejected"] = [int(i) for i in np.flatnonzero(decisions)]
    if args.format == "json":
        print(json.dumps(out, indent=2))
    else:
        label = "log S" if args.method == "bsd" else "|U|"
        print(f"{'stage':>5}  {'index':>6}  {label:>14}  decision")
        for s in trace.stages:
            print(f"{s.stage:>5}  {s.index:>6}  {s.statistic:>14.6g}  {'reject' if s.rejected else 'accept'}")
        print(f"stop stage: {trace.stop_stage}; rejected {len(out['rejected'])} of {m}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    handler = cmd_simulate if args.command == "simulate" else cmd_test_one
    try:
        return handler(args)
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
