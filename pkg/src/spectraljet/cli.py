"""Command-line front end: wick / lattice / verify / curvature / report.

Exit codes: 0 all checks passed, 1 a tolerance failed, 2 usage or config
error.  All file output is deterministic for a fixed config and seed.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys

from . import multiindex
from .asymptotics import (
    curvature_suite,
    isometry_suite,
    jet_relation_suite,
    mean_curvature_suite,
    scalar_ricci_suite,
    scalar_suite,
    time_grid,
    umbilical_suite,
)
from .lattice import run_triple_suite
from .manifolds import TruncationPolicy, make_model
from .reporting import (
    fmt_float,
    json_dumps,
    records_to_csv,
    triple_rows_to_csv,
    write_text,
)
from .wick import enumerate_admissible_graphs, gaussian_moment_oracle, wick_a, wick_b

DEFAULT_CONFIG = {
    "model": {"kind": None, "radius": 1.0, "radii": [1.0, 1.3]},
    "t": None,
    "t_grid": {"start": 0.1, "ratio": 0.5, "count": 7},
    "max_degree": 4,
    "policy": {"epsilon": 1e-14, "rho": 0.5, "hard_cap": None},
    "seed": 42,
    "count": 10000,
    "tolerances": {
        "flat_jet_abs": 1e-6,
        "fit_rel": 0.01,
        "scalar_rel": 0.02,
        "scalar_flat_abs": 1e-6,
        "isometry_c1_rel": 0.05,
        "isometry_flat_abs": 1e-8,
        "mean_curvature_rel": 0.02,
        "umbilical_rel": 0.03,
        "umbilical_zero_abs": 0.05,
        "curvature_rel": 0.05,
        "curvature_flat_abs": 1e-6,
        "residual_rel": 1e-3,
        "triangle_slack": 1e-12,
    },
}


class ConfigError(ValueError):
    pass


def _deep_update(base: dict, extra: dict) -> dict:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def build_config(args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit CLI flags."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad config file {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        _deep_update(cfg, file_cfg)
    if getattr(args, "model", None):
        cfg["model"]["kind"] = args.model
    if getattr(args, "radius", None) is not None:
        cfg["model"]["radius"] = args.radius
    if getattr(args, "radii", None):
        try:
            cfg["model"]["radii"] = [float(r) for r in args.radii.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --radii {args.radii!r}") from exc
    if getattr(args, "t", None) is not None:
        cfg["t"] = args.t
    if getattr(args, "t_grid", None):
        parts = args.t_grid.split(":")
        if len(parts) != 3:
            raise ConfigError("--t-grid must look like start:ratio:count")
        try:
            cfg["t_grid"] = {
                "start": float(parts[0]),
                "ratio": float(parts[1]),
                "count": int(parts[2]),
            }
        except ValueError as exc:
            raise ConfigError(f"bad --t-grid {args.t_grid!r}") from exc
        cfg["t"] = None
    if getattr(args, "max_degree", None) is not None:
        cfg["max_degree"] = args.max_degree
    if getattr(args, "policy_eps", None) is not None:
        cfg["policy"]["epsilon"] = args.policy_eps
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "count", None) is not None:
        cfg["count"] = args.count
    if getattr(args, "n", None) is not None:
        cfg["n"] = args.n
    return cfg


def config_model(cfg: dict):
    kind = cfg["model"].get("kind")
    if not kind:
        raise ConfigError("no model specified (use --model)")
    try:
        return make_model(
            kind, radius=cfg["model"].get("radius", 1.0),
            radii=cfg["model"].get("radii"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_grid(cfg: dict) -> tuple[float, ...]:
    if cfg.get("t") is not None:
        if cfg["t"] <= 0:
            raise ConfigError("t must be positive")
        return (float(cfg["t"]),)
    g = cfg["t_grid"]
    try:
        return time_grid(g["start"], g["ratio"], g["count"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_policy(cfg: dict) -> TruncationPolicy:
    p = cfg["policy"]
    try:
        return TruncationPolicy(
            epsilon=p.get("epsilon", 1e-14),
            rho=p.get("rho", 0.5),
            hard_cap=p.get("hard_cap"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _a_text(a) -> str:
    if a.sign == 0:
        return "0"
    return f"{'+' if a.sign > 0 else '-'}{a.magnitude}"


def _b_text(b) -> str:
    if b.sign == 0:
        return "0"
    num, den = b.square.numerator, b.square.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    sign = "-" if b.sign < 0 else ""
    if rn * rn == num and rd * rd == den:
        return f"{sign}{rn}/{rd}" if rd != 1 else f"{sign}{rn}"
    return f"{sign}sqrt({num}/{den})"


def cmd_wick(args: argparse.Namespace) -> int:
    if args.n is None:
        raise ConfigError("wick needs --n")
    alpha = multiindex.parse(args.alpha, args.n)
    beta = multiindex.parse(args.beta, args.n)
    a = wick_a(alpha, beta)
    b = wick_b(alpha, beta)
    print(f"A={_a_text(a)} B={_b_text(b)} ({fmt_float(b.value)})")
    if args.graphs:
        g = enumerate_admissible_graphs(alpha, beta)
        sign = "none" if g.common_sign is None else f"{g.common_sign:+d}"
        print(f"graphs: count={g.count} sign={sign}")
    if args.oracle:
        print(f"oracle: {fmt_float(gaussian_moment_oracle(alpha, beta))}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    model = config_model(cfg)
    grid = config_grid(cfg)
    policy = config_policy(cfg)
    tol = cfg["tolerances"]
    result = jet_relation_suite(
        model,
        cfg["max_degree"],
        ts=grid,
        policy=policy,
        flat_abs_tol=tol["flat_jet_abs"],
        fit_rel_tol=tol["fit_rel"],
    )
    if args.out:
        write_text(args.out, records_to_csv(result.records))
    doc = {
        "command": "verify",
        "config": cfg,
        "model": model.describe(),
        "passed": result.passed,
        "suites": {"jet_relation": result.summary_dict()},
    }
    if args.out_json:
        write_text(args.out_json, json_dumps(doc))
    n_pairs = len(result.summaries)
    print(
        f"verify: model={model.label} max_degree={cfg['max_degree']} "
        f"checks={n_pairs} passed={result.passed}"
    )
    return 0 if result.passed else 1


def cmd_curvature(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    model = config_model(cfg)
    grid = config_grid(cfg)
    if len(grid) < 4:
        raise ConfigError("curvature suites need a t-grid (use --t-grid)")
    policy = config_policy(cfg)
    tol = cfg["tolerances"]
    suites = [
        scalar_suite(model, grid, policy,
                     rel_tol=tol["scalar_rel"], flat_abs_tol=tol["scalar_flat_abs"]),
        isometry_suite(model, grid, policy,
                       c1_rel_tol=tol["isometry_c1_rel"],
                       flat_abs_tol=tol["isometry_flat_abs"]),
        mean_curvature_suite(model, grid, policy, rel_tol=tol["mean_curvature_rel"]),
        umbilical_suite(model, grid, policy,
                        rel_tol=tol["umbilical_rel"],
                        zero_abs_tol=tol["umbilical_zero_abs"]),
    ]
    if model.n >= 2:
        suites.append(
            curvature_suite(model, grid, policy,
                            rel_tol=tol["curvature_rel"],
                            flat_abs_tol=tol["curvature_flat_abs"],
                            residual_rel_tol=tol["residual_rel"])
        )
        suites.append(scalar_ricci_suite(model, grid, policy))
    passed = all(s.passed for s in suites)
    doc = {
        "command": "curvature",
        "config": cfg,
        "model": model.describe(),
        "passed": passed,
        "suites": {s.name: s.summary_dict() for s in suites},
    }
    if args.out_json:
        write_text(args.out_json, json_dumps(doc))
    for s in suites:
        print(f"curvature: suite={s.name} checks={len(s.summaries)} passed={s.passed}")
    return 0 if passed else 1


def cmd_lattice(args: argparse.Namespace) -> int:
    if args.action != "sample":
        raise ConfigError(f"unknown lattice action {args.action!r}")
    cfg = build_config(args)
    n = cfg.get("n") or 3
    rows, report = run_triple_suite(
        n=n,
        max_degree=cfg["max_degree"],
        count=cfg["count"],
        seed=cfg["seed"],
        triangle_slack_tol=cfg["tolerances"]["triangle_slack"],
    )
    if args.out:
        write_text(args.out, triple_rows_to_csv(rows))
    doc = {
        "command": "lattice",
        "config": cfg,
        "passed": report.passed(),
        "report": {
            "n": report.n,
            "max_degree": report.max_degree,
            "count": report.count,
            "seed": report.seed,
            "triangle_violations": report.triangle_violations,
            "identity_violations": report.identity_violations,
            "orthogonality_violations": report.orthogonality_violations,
            "comparison_violations": report.comparison_violations,
            "stabilization_violations": report.stabilization_violations,
            "max_triangle_slack": report.max_triangle_slack,
            "min_comparison_margin": report.min_comparison_margin,
        },
    }
    if args.out_json:
        write_text(args.out_json, json_dumps(doc))
    print(
        f"lattice: n={report.n} max_degree={report.max_degree} "
        f"count={report.count} passed={report.passed()}"
    )
    return 0 if report.passed() else 1


def _any_failures(obj) -> bool:
    if isinstance(obj, dict):
        for key, value in obj.items():
            if key in ("pass", "passed") and value is False:
                return True
            if _any_failures(value):
                return True
    elif isinstance(obj, (list, tuple)):
        return any(_any_failures(v) for v in obj)
    return False


def cmd_report(args: argparse.Namespace) -> int:
    reports = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            reports.append(json.load(fh))
    doc = {
        "command": "report",
        "inputs": list(args.inputs),
        "passed": not _any_failures(reports),
        "reports": reports,
    }
    text = json_dumps(doc)
    if args.out:
        write_text(args.out, text)
        print(f"report: merged={len(reports)} passed={doc['passed']}")
    else:
        sys.stdout.write(text)  # pure JSON on stdout for piping
    return 0 if doc["passed"] else 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=["circle", "torus", "sphere2", "sphere3"])
    parser.add_argument("--radius", type=float)
    parser.add_argument("--radii", type=str, help="comma-separated torus radii")
    parser.add_argument("--t", type=float)
    parser.add_argument("--t-grid", dest="t_grid", type=str,
                        help="geometric grid start:ratio:count")
    parser.add_argument("--max-degree", dest="max_degree", type=int)
    parser.add_argument("--policy-eps", dest="policy_eps", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--config", type=str, help="JSON config file")
    parser.add_argument("--out", type=str, help="CSV output path")
    parser.add_argument("--out-json", dest="out_json", type=str,
                        help="JSON summary output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectraljet",
        description="Wick constants, heat-kernel embedding jets, and the "
                    "angle metric on the multi-index lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_wick = sub.add_parser("wick", help="print A and B for one pair")
    p_wick.add_argument("--alpha", default="")
    p_wick.add_argument("--beta", default="")
    p_wick.add_argument("--n", type=int)
    p_wick.add_argument("--graphs", action="store_true",
                        help="also enumerate admissible graphs")
    p_wick.add_argument("--oracle", action="store_true",
                        help="also print the Gaussian-moment value")
    p_wick.set_defaults(func=cmd_wick)

    p_lat = sub.add_parser("lattice", help="angle-metric sampling suites")
    p_lat.add_argument("action", choices=["sample"])
    p_lat.add_argument("--n", type=int)
    p_lat.add_argument("--count", type=int)
    _add_common(p_lat)
    p_lat.set_defaults(func=cmd_lattice)

    p_ver = sub.add_parser("verify", help="jet relations against Wick targets")
    _add_common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_cur = sub.add_parser("curvature", help="curvature and isometry suites")
    _add_common(p_cur)
    p_cur.set_defaults(func=cmd_curvature)

    p_rep = sub.add_parser("report", help="merge JSON summaries")
    p_rep.add_argument("--inputs", nargs="+", required=True)
    p_rep.add_argument("--out", type=str)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
