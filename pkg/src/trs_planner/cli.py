"""Command-line front end: rate reports, curves, TRS tables, validation, scenarios.

Exit codes: 0 success (including infeasible planning results, which are
results), 1 validation-suite failure, 2 invalid configuration, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import coverage, montecarlo, trs
from .coverage import ConfigError, LoadModel, NetworkConfig, QuadratureError
from .hypergeom import HypergeometricError
from .montecarlo import ActivityModel, McConfig

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NUMERIC = 3

SCENARIO_KEYS = {
    "lambda_b": float,
    "lambda_u": float,
    "antennas": int,
    "bandwidth_mhz": str,  # number or "auto"
    "alpha": float,
    "noise_power": float,
    "tx_power": float,
    "load_model": str,
    "target_rate_mbps": float,
    "max_antennas": int,
}

BUILTIN_SCENARIOS = {
    "sparse": {
        "lambda_b": 10.0,
        "lambda_u": 100.0,
        "antennas": 1,
        "bandwidth_mhz": "auto",
        "alpha": 4.0,
        "load_model": "mean-load",
        "target_rate_mbps": 15.0,
    },
    "dense": {
        "lambda_b": 1000.0,
        "lambda_u": 100.0,
        "antennas": 1,
        "bandwidth_mhz": "auto",
        "alpha": 4.0,
        "load_model": "mean-load",
        "target_rate_mbps": 420.0,
    },
}


class Scenario:
    """One named entry of a scenario file, resolved lazily to configs."""

    def __init__(self, name: str, fields: dict):
        self.name = name
        unknown = set(fields) - set(SCENARIO_KEYS)
        if unknown:
            raise ConfigError(f"scenario {name!r} has unknown keys: {sorted(unknown)}")
        if "target_rate_mbps" not in fields:
            raise ConfigError(f"scenario {name!r} is missing target_rate_mbps")
        self.target_rate_mbps = float(fields["target_rate_mbps"])
        if self.target_rate_mbps <= 0:
            raise ConfigError(f"scenario {name!r}: target_rate_mbps must be positive")
        self.max_antennas = int(fields.get("max_antennas", trs.DEFAULT_MAX_ANTENNAS))
        raw_w = fields.get("bandwidth_mhz", "auto")
        self._auto_bandwidth = isinstance(raw_w, str) and raw_w.strip().lower() == "auto"
        load = fields.get("load_model", "mean-load")
        try:
            load_model = LoadModel(load)
        except ValueError as err:
            raise ConfigError(
                f"scenario {name!r}: unknown load_model {load!r} "
                f"(expected one of {[m.value for m in LoadModel]})"
            ) from err
        self._base = dict(
            lambda_b=float(fields["lambda_b"]),
            lambda_u=float(fields["lambda_u"]),
            antennas=int(fields.get("antennas", 1)),
            alpha=float(fields.get("alpha", 4.0)),
            noise_power=float(fields.get("noise_power", 0.0)),
            tx_power=float(fields.get("tx_power", 1.0)),
            load_model=load_model,
        )
        if not self._auto_bandwidth:
            self._base["bandwidth_mhz"] = float(raw_w)
        # validate the physical quantities now, at load time
        probe = dict(self._base)
        probe.setdefault("bandwidth_mhz", 0.0)
        NetworkConfig(**probe)

    def network_config(self) -> NetworkConfig:
        base = dict(self._base)
        if self._auto_bandwidth:
            base["bandwidth_mhz"] = trs.required_spectrum(
                self.target_rate_mbps,
                base["lambda_b"],
                base["antennas"],
                base["lambda_u"],
                base["alpha"],
                base["load_model"],
            )
        return NetworkConfig(**base)

    def operating_point(self) -> trs.OperatingPoint:
        return trs.OperatingPoint(config=self.network_config(), target_rate_mbps=self.target_rate_mbps)


def parse_scenario_text(text: str) -> dict[str, Scenario]:
    """Parse the flat dotted key-value scenario format.

    Lines look like ``name.key = value``; ``#`` starts a comment; blank
    lines are ignored.  Unknown keys and invalid quantities are rejected.
    """
    groups: dict[str, dict] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"scenario line {lineno}: expected 'name.key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"scenario line {lineno}: key {key!r} lacks a scenario prefix")
        name, field = key.split(".", 1)
        if field not in SCENARIO_KEYS:
            raise ConfigError(f"scenario line {lineno}: unknown key {field!r}")
        caster = SCENARIO_KEYS[field]
        if caster is str:
            parsed = value
        else:
            try:
                parsed = caster(value)
            except ValueError as err:
                raise ConfigError(
                    f"scenario line {lineno}: cannot parse {value!r} for {field!r}"
                ) from err
        groups.setdefault(name, {})[field] = parsed
    return {name: Scenario(name, fields) for name, fields in groups.items()}


def load_scenarios(path) -> dict[str, Scenario]:
    return parse_scenario_text(Path(path).read_text())


def builtin_scenario(name: str) -> Scenario:
    try:
        return Scenario(name, dict(BUILTIN_SCENARIOS[name]))
    except KeyError as err:
        raise ConfigError(
            f"unknown scenario {name!r} (bundled: {sorted(BUILTIN_SCENARIOS)})"
        ) from err


def _fmt(value) -> str:
    """Shortest round-trip text for CSV cells."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """Re-load CSV emitted by this tool: header plus typed rows."""
    lines = [line for line in text.splitlines() if line]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        row = []
        for cell in line.split(","):
            if cell == "true":
                row.append(True)
            elif cell == "false":
                row.append(False)
            elif cell == "":
                row.append(None)
            else:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(row)
    return header, rows


def _write(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _scenario_from_args(args) -> Scenario:
    if getattr(args, "file", None):
        table = load_scenarios(args.file)
        name = args.scenario or (next(iter(table)) if len(table) == 1 else None)
        if name is None:
            raise ConfigError(
                f"scenario file holds {sorted(table)}; pick one with --scenario"
            )
        if name not in table:
            raise ConfigError(f"scenario {name!r} not in file (has {sorted(table)})")
        return table[name]
    return builtin_scenario(args.scenario or "sparse")


def _config_from_args(args) -> tuple[NetworkConfig, float | None, Scenario | None]:
    """Network config plus optional demand, from flags or a scenario."""
    if args.lambda_b is not None or args.lambda_u is not None:
        required = {"--lambda-b": args.lambda_b, "--lambda-u": args.lambda_u}
        missing = [flag for flag, value in required.items() if value is None]
        if missing:
            raise ConfigError(f"missing {missing} (or use --scenario/--file)")
        cfg = NetworkConfig(
            lambda_b=args.lambda_b,
            lambda_u=args.lambda_u,
            antennas=args.antennas if args.antennas is not None else 1,
            bandwidth_mhz=args.bandwidth_mhz or 0.0,
            alpha=args.alpha if args.alpha is not None else 4.0,
            load_model=LoadModel(args.load_model or "mean-load"),
        )
        return cfg, args.target_rate_mbps, None
    scenario = _scenario_from_args(args)
    cfg = scenario.network_config()
    if args.bandwidth_mhz is not None:
        cfg = cfg.with_(bandwidth_mhz=args.bandwidth_mhz)
    if args.antennas is not None:
        cfg = cfg.with_(antennas=args.antennas)
    if args.alpha is not None:
        cfg = cfg.with_(alpha=args.alpha)
    if args.load_model is not None:
        cfg = cfg.with_(load_model=LoadModel(args.load_model))
    rate = args.target_rate_mbps if args.target_rate_mbps is not None else scenario.target_rate_mbps
    return cfg, rate, scenario


def cmd_rate(args) -> int:
    cfg, _, _ = _config_from_args(args)
    p_a = coverage.active_probability(cfg.rho)
    se = coverage.spectral_efficiency(p_a, cfg.antennas, cfg.alpha)
    share = coverage.mean_load_share(cfg, p_a)
    rate = cfg.bandwidth_mhz * se * share
    report = {
        "rate_mbps": rate,
        "spectral_efficiency_bits_per_hz": se,
        "bandwidth_share": share,
        "active_probability": p_a,
        "config": {
            "lambda_b": cfg.lambda_b,
            "lambda_u": cfg.lambda_u,
            "antennas": cfg.antennas,
            "bandwidth_mhz": cfg.bandwidth_mhz,
            "alpha": cfg.alpha,
            "load_model": cfg.load_model.value,
        },
    }
    if args.output == "human":
        text = (
            f"rate {rate:.6g} Mbps  (W={cfg.bandwidth_mhz:.6g} MHz x "
            f"SE={se:.6g} b/s/Hz x share={share:.6g}; p_a={p_a:.6g})\n"
        )
    else:
        text = json.dumps(report, indent=2) + "\n"
    _write(text, args.out)
    return EXIT_OK


def _parse_grid(raw: str):
    return [float(tok) for tok in raw.split(",") if tok.strip()]


def cmd_curve(args) -> int:
    cfg, rate, _ = _config_from_args(args)
    if rate is None:
        raise ConfigError("curve needs --target-rate-mbps or a scenario demand")
    if args.grid:
        grid = _parse_grid(args.grid)
    elif args.pair == "w-m":
        grid = list(range(args.grid_min_int, args.grid_max_int + 1))
    else:
        grid = trs.log_grid(args.grid_min, args.grid_max, args.grid_points)
    if args.pair == "w-m":
        if any(g != int(g) for g in grid):
            raise ConfigError(f"antenna grid must hold integers, got {grid}")
        grid = [int(g) for g in grid]
        curve = trs.indifference_curve(
            rate, cfg.lambda_u, "w-m", grid,
            lambda_b=cfg.lambda_b, alpha=cfg.alpha, load_model=cfg.load_model,
        )
    else:
        curve = trs.indifference_curve(
            rate, cfg.lambda_u, "w-density", grid,
            antennas=cfg.antennas, alpha=cfg.alpha, load_model=cfg.load_model,
        )
    rows = [
        (s.axis1, s.axis2 if s.axis2 is not None else "", s.feasible)
        for s in curve.samples
    ]
    if args.output == "json":
        payload = {
            "pair": curve.pair,
            "target_rate_mbps": curve.target_rate_mbps,
            "lambda_u": curve.lambda_u,
            "held": curve.held,
            "samples": [
                {"axis1": s.axis1, "axis2": s.axis2, "feasible": s.feasible}
                for s in curve.samples
            ],
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _write(emit_csv(("axis1", "axis2", "feasible"), rows), args.out)
    return EXIT_OK


def cmd_trs(args) -> int:
    cfg, rate, _ = _config_from_args(args)
    if rate is None:
        raise ConfigError("trs needs --target-rate-mbps or a scenario demand")
    points = _parse_grid(args.at) if args.at else None
    values = []
    if args.pair == "w-m":
        points = [int(p) for p in (points or [1, 4, 8, 16])]
        for m in points:
            values.append(
                trs.trs_spectrum_antennas(rate, cfg.lambda_b, m, cfg.lambda_u, cfg.alpha, cfg.load_model)
            )
    else:
        points = points or [cfg.lambda_b]
        for lam in points:
            values.append(
                trs.trs_spectrum_density(
                    rate, lam, cfg.antennas, cfg.lambda_u, cfg.alpha, cfg.load_model,
                    policy=args.step_policy,
                )
            )
    if args.output == "json":
        payload = []
        for v in values:
            entry = asdict(v)
            if v.is_infinite:
                entry["magnitude"] = "inf"  # keep the JSON standard-parseable
            payload.append(entry)
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        header = ("point", "trs", "units", "step_policy", "note")
        rows = [
            (
                v.antennas if v.pair == "spectrum-antennas" else v.lambda_b,
                v.magnitude if not v.is_infinite else "inf",
                v.units,
                v.step_policy,
                v.note,
            )
            for v in values
        ]
        _write(emit_csv(header, rows), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    rho_values = _parse_grid(args.rho_values)
    m_values = [int(m) for m in _parse_grid(args.m_values)]
    t_values = _parse_grid(args.t_values)
    lambda_u = args.lambda_u
    rows = []
    all_pass = True
    for rho in rho_values:
        lambda_b = rho * lambda_u
        for m in m_values:
            net = NetworkConfig(
                lambda_b=lambda_b, lambda_u=lambda_u, antennas=m, alpha=args.alpha,
            )
            mc_cfg = McConfig(
                network=net,
                window_radius=montecarlo.recommended_window(lambda_b, args.window_factor),
                n_drops=args.n_drops,
                n_fading_per_drop=args.n_fading,
                seed=args.seed,
                activity_model=ActivityModel.INDEPENDENT_THINNING,
            )
            samples = montecarlo.sinr_samples(mc_cfg)
            p_a = coverage.active_probability(rho)
            for t in t_values:
                est = montecarlo.outage_from_samples(samples, t, mc_cfg)
                analytic = coverage.outage_probability(
                    t, p_a, m, args.alpha + args.inject_alpha_offset
                ).p_out
                tol = max(3.0 * est.std_error, 0.01)
                diff = abs(est.mean - analytic)
                ok = diff <= tol
                all_pass = all_pass and ok
                rows.append((rho, m, t, est.mean, est.std_error, analytic, diff, tol, ok))
    header = (
        "rho", "antennas", "threshold", "p_out_mc", "std_error",
        "p_out_analytic", "abs_diff", "tolerance", "pass",
    )
    if args.output == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _write(json.dumps({"cells": payload, "all_pass": all_pass}, indent=2) + "\n", args.out)
    else:
        _write(emit_csv(header, rows), args.out)
    return EXIT_OK if all_pass else EXIT_VALIDATION_FAILED


def cmd_scenario(args) -> int:
    scenario = _scenario_from_args(args)
    point = scenario.operating_point()
    report = trs.doubling_scenario(
        point,
        trs.ScaleMode(args.mode),
        trs.Lever(args.lever),
        factor=args.factor,
        max_antennas=scenario.max_antennas,
    )
    payload = {
        "scenario": scenario.name,
        "base": {
            "lambda_b": point.config.lambda_b,
            "lambda_u": point.config.lambda_u,
            "antennas": point.config.antennas,
            "bandwidth_mhz": point.config.bandwidth_mhz,
            "target_rate_mbps": point.target_rate_mbps,
        },
        "report": asdict(report),
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trs-planner",
        description="Substitution planning among spectrum, station density and antennas "
        "for PPP cellular networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p, with_demand=True):
        p.add_argument("--scenario", help="bundled or in-file scenario name")
        p.add_argument("--file", help="scenario file path")
        p.add_argument("--lambda-b", type=float, dest="lambda_b")
        p.add_argument("--lambda-u", type=float, dest="lambda_u")
        p.add_argument("--antennas", type=int, default=None)
        p.add_argument("--bandwidth-mhz", type=float, dest="bandwidth_mhz")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--load-model", default=None,
                       choices=[m.value for m in LoadModel])
        if with_demand:
            p.add_argument("--target-rate-mbps", type=float, dest="target_rate_mbps")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p_rate = sub.add_parser("rate", help="per-user rate at an operating point")
    add_config_flags(p_rate)
    p_rate.add_argument("--output", choices=("json", "human"), default="json")
    p_rate.set_defaults(func=cmd_rate)

    p_curve = sub.add_parser("curve", help="indifference curve tracing")
    add_config_flags(p_curve)
    p_curve.add_argument("--pair", choices=("w-m", "w-density"), required=True)
    p_curve.add_argument("--grid", help="explicit comma-separated axis-1 grid")
    p_curve.add_argument("--grid-min", type=float, default=1.0)
    p_curve.add_argument("--grid-max", type=float, default=100.0)
    p_curve.add_argument("--grid-points", type=int, default=64)
    p_curve.add_argument("--grid-min-int", type=int, default=1)
    p_curve.add_argument("--grid-max-int", type=int, default=16)
    p_curve.add_argument("--output", choices=("csv", "json"), default="csv")
    p_curve.set_defaults(func=cmd_curve)

    p_trs = sub.add_parser("trs", help="technical rate of substitution table")
    add_config_flags(p_trs)
    p_trs.add_argument("--pair", choices=("w-m", "w-density"), required=True)
    p_trs.add_argument("--at", help="comma-separated evaluation points")
    p_trs.add_argument("--step-policy", choices=("unit-step", "central-derivative"),
                       default="unit-step")
    p_trs.add_argument("--output", choices=("csv", "json"), default="csv")
    p_trs.set_defaults(func=cmd_trs)

    p_val = sub.add_parser("validate", help="Monte-Carlo vs analytic agreement grid")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--n-drops", type=int, default=600, dest="n_drops")
    p_val.add_argument("--n-fading", type=int, default=200, dest="n_fading")
    p_val.add_argument("--rho-values", default="0.1,1,10", dest="rho_values")
    p_val.add_argument("--m-values", default="1,2,4,8", dest="m_values")
    p_val.add_argument("--t-values", default="0.1,1,10", dest="t_values")
    p_val.add_argument("--lambda-u", type=float, default=100.0, dest="lambda_u")
    p_val.add_argument("--alpha", type=float, default=4.0)
    p_val.add_argument("--window-factor", type=float, default=20.0, dest="window_factor")
    p_val.add_argument("--inject-alpha-offset", type=float, default=0.0,
                       dest="inject_alpha_offset",
                       help="test hook: offset the analytic alpha to force disagreement")
    p_val.add_argument("--output", choices=("csv", "json"), default="csv")
    p_val.add_argument("--out", default=None)
    p_val.set_defaults(func=cmd_validate)

    p_scn = sub.add_parser("scenario", help="demand-doubling resource requirement")
    p_scn.add_argument("--file", help="scenario file path")
    p_scn.add_argument("--scenario", help="scenario name (bundled: sparse, dense)")
    p_scn.add_argument("--mode", choices=[m.value for m in trs.ScaleMode], required=True)
    p_scn.add_argument("--lever", choices=[l.value for l in trs.Lever], required=True)
    p_scn.add_argument("--factor", type=float, default=2.0)
    p_scn.add_argument("--out", default=None)
    p_scn.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (HypergeometricError, QuadratureError, ArithmeticError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
