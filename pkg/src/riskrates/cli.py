"""Command-line front end.

Subcommands: estimate | hedge | rate | deviation | bias | sharpness |
probe-unbounded | oracle.  All commands are pure functions of
(config file, seed, flags); outputs are CSV and JSON files in --out.

Exit codes: 0 success, 2 config error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import oracle
from .dist import dist_from_json, dist_to_json, empirical, load_samples
from .errors import (
    ContractError,
    InfeasibleError,
    NumericError,
    ParameterError,
    ParseError,
    SchemaError,
)
from .experiments import (
    DEFAULT_SEED,
    ExperimentConfig,
    bias_report,
    bias_reports_csv,
    deviation_curve,
    deviation_curve_csv,
    exp_utility,
    fit_rate,
    linear_utility,
    mean_error_curve,
    rate_curve_csv,
    sharpness_curve,
    true_value,
)
from .hedge import ScenarioSet, hedged_risk, strategy_from_json, unboundedness_probe, utility_max
from .risk import evaluate_risk, risk_spec_from_json, risk_spec_to_json

CONFIG_ERROR_EXIT = 2
NUMERIC_ERROR_EXIT = 3


def _load_config(path, allowed_fields):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path!r} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise SchemaError("config must be a JSON object")
    if cfg.get("schema") != 1:
        raise SchemaError("config must declare \"schema\": 1")
    extra = set(cfg) - set(allowed_fields) - {"schema"}
    if extra:
        raise SchemaError(f"unknown config fields: {sorted(extra)}")
    return cfg


def _resolve_seed(args, cfg=None):
    if args.seed is not None:
        return args.seed
    if cfg is not None and "seed" in cfg:
        return int(cfg["seed"])
    env = os.environ.get("RISKRATES_SEED")
    if env is not None:
        return int(env, 0)
    return DEFAULT_SEED


def _write_json(out_dir, name, payload):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_text(out_dir, name, text):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    return path


def _input_dist(cfg, field="input"):
    spec = cfg[field]
    if not isinstance(spec, dict):
        raise SchemaError(f"{field!r} must be an object")
    if "dist" in spec and "csv" not in spec:
        return dist_from_json(spec["dist"]), spec
    if "csv" in spec and "dist" not in spec:
        csv_spec = spec["csv"]
        extra = set(csv_spec) - {"path", "column"}
        if extra:
            raise SchemaError(f"unknown csv fields: {sorted(extra)}")
        sample_vec = load_samples(csv_spec["path"], csv_spec.get("column", 0))
        return empirical(sample_vec), spec
    raise SchemaError(f"{field!r} must contain exactly one of 'dist' or 'csv'")


def _scenarios_from_config(cfg):
    spec = cfg["scenarios"]
    if isinstance(spec, dict) and "csv" in spec:
        path = spec["csv"]
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read scenario CSV {path!r}: {exc}")
        return ScenarioSet.from_csv(text)
    extra = set(spec) - {"weights", "f", "g"}
    if extra:
        raise SchemaError(f"unknown scenario fields: {sorted(extra)}")
    return ScenarioSet(tuple(spec["weights"]), tuple(spec["f"]), spec.get("g", []))


def _utility_from_json(obj):
    extra = set(obj) - {"name", "a"}
    if extra:
        raise SchemaError(f"unknown utility fields: {sorted(extra)}")
    name = obj.get("name")
    if name == "exp":
        return exp_utility(float(obj.get("a", 1.0)))
    if name == "linear":
        return linear_utility()
    raise SchemaError(f"unknown utility {name!r}")


def _experiment_config(cfg, seed, need_eps=False):
    risk = risk_spec_from_json(cfg["risk"]) if "risk" in cfg else None
    utility = _utility_from_json(cfg["utility"]) if "utility" in cfg else None
    strategies = strategy_from_json(cfg["strategies"]) if "strategies" in cfg else None
    kwargs = dict(
        dist=dist_from_json(cfg["dist"]),
        risk=risk,
        utility=utility,
        n_grid=tuple(cfg["n_grid"]),
        replications=int(cfg["replications"]),
        option_transforms=tuple(cfg.get("options", ())),
        seed=seed,
        epsilons=tuple(cfg.get("epsilons", ())),
    )
    if strategies is not None:
        kwargs["strategies"] = strategies
    if "solver_tol" in cfg:
        kwargs["solver_tol"] = float(cfg["solver_tol"])
    config = ExperimentConfig(**kwargs)
    if need_eps and not config.epsilons:
        raise SchemaError("deviation config needs a nonempty 'epsilons' list")
    return config


EXPERIMENT_FIELDS = (
    "dist",
    "risk",
    "utility",
    "strategies",
    "options",
    "n_grid",
    "replications",
    "seed",
    "epsilons",
    "solver_tol",
)


def cmd_estimate(args):
    cfg = _load_config(args.config, ("input", "risk", "tol", "seed"))
    dist, input_spec = _input_dist(cfg)
    risk = risk_spec_from_json(cfg["risk"])
    tol = float(cfg.get("tol", 1e-10))
    value = evaluate_risk(risk, dist.as_discrete(), tol)
    print(f"{value:.12g}")
    _write_json(
        args.out,
        "estimate.json",
        {
            "risk_spec": risk_spec_to_json(risk),
            "input": input_spec if "csv" in input_spec else {"dist": dist_to_json(dist)},
            "value": value,
            "solver_stats": {"tol": tol},
        },
    )
    return 0


def cmd_hedge(args):
    cfg = _load_config(args.config, ("scenarios", "risk", "utility", "strategies", "tol", "seed"))
    scenarios = _scenarios_from_config(cfg)
    strategies = strategy_from_json(cfg["strategies"])
    tol = float(cfg.get("tol", 1e-8))
    if "utility" in cfg:
        result = utility_max(scenarios, _utility_from_json(cfg["utility"]), strategies, tol)
        mode = "utility"
    else:
        result = hedged_risk(scenarios, risk_spec_from_json(cfg["risk"]), strategies, tol)
        mode = "risk"
    print(f"{result.value:.12g}")
    _write_json(
        args.out,
        "hedge.json",
        {
            "mode": mode,
            "value": result.value,
            "g_star": list(result.g_star),
            "solver_stats": {
                "restarts_used": result.restarts_used,
                "inner_iterations": result.inner_iterations,
                "tol": tol,
            },
        },
    )
    return 0


def cmd_rate(args):
    cfg = _load_config(args.config, EXPERIMENT_FIELDS)
    config = _experiment_config(cfg, _resolve_seed(args, cfg))
    target, exact = true_value(config)
    curve = mean_error_curve(config)
    _write_text(args.out, "rate_curve.csv", rate_curve_csv(curve))
    fit = fit_rate(curve)
    _write_json(
        args.out,
        "rate_fit.json",
        {
            "config": cfg,
            "true_value": target,
            "true_value_exact": exact,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        },
    )
    print(f"slope {fit.slope:.6g} (r^2 {fit.r_squared:.6g})")
    return 0


def cmd_deviation(args):
    cfg = _load_config(args.config, EXPERIMENT_FIELDS)
    config = _experiment_config(cfg, _resolve_seed(args, cfg), need_eps=True)
    target, exact = true_value(config)
    curve = deviation_curve(config)
    _write_text(args.out, "deviation_curve.csv", deviation_curve_csv(curve))
    _write_json(
        args.out,
        "deviation_summary.json",
        {"config": cfg, "true_value": target, "true_value_exact": exact},
    )
    print(f"{len(curve.points)} deviation points written")
    return 0


def cmd_bias(args):
    cfg = _load_config(args.config, EXPERIMENT_FIELDS + ("n_values",))
    config = _experiment_config(cfg, _resolve_seed(args, cfg))
    n_values = tuple(int(n) for n in cfg.get("n_values", config.n_grid))
    reports = [bias_report(config, n) for n in n_values]
    _write_text(args.out, "bias.csv", bias_reports_csv(reports))
    target, exact = true_value(config)
    _write_json(
        args.out,
        "bias_summary.json",
        {"config": cfg, "true_value": target, "true_value_exact": exact},
    )
    for rep in reports:
        print(f"N={rep.n}: {rep.mean_signed_error:.6g} +- {rep.std_error:.6g}")
    return 0


def cmd_sharpness(args):
    cfg = _load_config(args.config, ("eps", "n_grid", "replications", "seed"))
    seed = _resolve_seed(args, cfg)
    curve = sharpness_curve(float(cfg["eps"]), tuple(cfg["n_grid"]), int(cfg["replications"]), seed)
    _write_text(args.out, "sharpness_curve.csv", rate_curve_csv(curve))
    fit = fit_rate(curve)
    _write_json(
        args.out,
        "sharpness_fit.json",
        {"config": cfg, "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared},
    )
    print(f"slope {fit.slope:.6g} (r^2 {fit.r_squared:.6g})")
    return 0


def cmd_probe_unbounded(args):
    cfg = _load_config(args.config, ("scenarios", "risk", "direction", "t_max", "steps", "seed"))
    scenarios = _scenarios_from_config(cfg)
    risk = risk_spec_from_json(cfg["risk"])
    report = unboundedness_probe(
        scenarios,
        risk,
        cfg["direction"],
        t_max=float(cfg.get("t_max", 1e4)),
        steps=int(cfg.get("steps", 41)),
    )
    _write_json(
        args.out,
        "probe.json",
        {
            "diverging": report.diverging,
            "values": [[t, v] for t, v in report.values],
        },
    )
    print(f"diverging={'true' if report.diverging else 'false'}")
    return 0


_ORACLES = {
    "avar_bernoulli": (oracle.avar_bernoulli, 2),
    "avar_pareto": (oracle.avar_pareto, 2),
    "sharpness_two_point": (oracle.sharpness_two_point, 2),
    "dyadic_sum": (oracle.dyadic_sum, 3),
}


def cmd_oracle(args):
    name = args.name
    if name not in _ORACLES:
        raise SchemaError(f"unknown oracle {name!r}; choose from {sorted(_ORACLES)}")
    fn, arity = _ORACLES[name]
    params = [float(x) for x in args.params]
    if len(params) < arity:
        raise SchemaError(f"oracle {name!r} needs at least {arity} arguments")
    if name == "dyadic_sum" and len(params) == 4:
        value = fn(params[0], params[1], params[2], int(params[3]))
    else:
        value = fn(*params[:arity])
    print(f"{value:.12g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="riskrates", description=__doc__)
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="64-bit RNG seed (overrides RISKRATES_SEED)")
    parser.add_argument("--out", default=".", help="output directory for CSV/JSON reports")
    parser.add_argument("--threads", type=int, default=1, help="parallelism hint; results are independent of it")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in (
        ("estimate", cmd_estimate, True),
        ("hedge", cmd_hedge, True),
        ("rate", cmd_rate, True),
        ("deviation", cmd_deviation, True),
        ("bias", cmd_bias, True),
        ("sharpness", cmd_sharpness, True),
        ("probe-unbounded", cmd_probe_unbounded, True),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config)
        p.set_defaults(handler=fn)
    p = sub.add_parser("oracle")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.set_defaults(handler=cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (SchemaError, ParameterError, ParseError, ContractError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR_EXIT
    except (NumericError, InfeasibleError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return NUMERIC_ERROR_EXIT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return CONFIG_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
