"""Command line entry point ``bhx``."""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ..dyadic import build_system, check_system
from ..geometry import make_sphere_quadrature, sphere_moment
from .config import experiment_overrides, load_config
from .experiments import REGISTRY, ExperimentError, ExperimentSpec, cli_overrides, list_experiments, run_experiment
from .report import emit_report, load_reports


def _common(p: argparse.ArgumentParser, fmt: str = "json"):
    p.add_argument("--n", type=int, choices=(1, 2), default=None)
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--eps-cut", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="bhx-out")
    p.add_argument("--format", choices=("json", "csv"), default=fmt)
    p.add_argument("--config", default=None, help="TOML file with [quadrature], [dyadic], [weights], [experiments.Ek]")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bhx", description="Numerical checks of weighted square-function bounds.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("list", help="list the experiment registry")
    _common(p)
    quad = sub.add_parser("quad", help="quadrature utilities")
    qs = quad.add_subparsers(dest="action", required=True)
    _common(qs.add_parser("check", help="check sphere moments up to degree 6"))
    dy = sub.add_parser("dyadic", help="dyadic systems")
    ds = dy.add_subparsers(dest="action", required=True)
    _common(ds.add_parser("build", help="build a system and write it as JSON"))
    _common(ds.add_parser("check", help="build a system and check its properties"))
    v = sub.add_parser("verify", help="run experiments: an id E1..E10 or 'all'")
    v.add_argument("target")
    _common(v)
    _common(sub.add_parser("scan-optimality", help="run the optimality scan (E5) and write its table"), "csv")
    _common(sub.add_parser("report", help="summarize reports already written to --out"))
    return ap


def _quad_params(args, cfg):
    q = cfg["quadrature"]
    n = args.n or q.get("n", 1)
    res = args.resolution or q.get("resolution", 1024 if n == 1 else 32)
    return n, res


def cmd_quad_check(args, cfg) -> int:
    n, res = _quad_params(args, cfg)
    q = make_sphere_quadrature(n, res)
    a = np.abs(q.nodes[:, 0]) ** 2
    err = max(abs(float(q.integrate(a ** k)) - sphere_moment(n, k)) for k in range(7))
    ok = err <= 1e-8
    print(f"n={n} nodes={q.size} weight_sum={q.weights.sum():.15g} moment_err={err:.3e} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _system(args, cfg):
    n, res = _quad_params(args, cfg)
    d = dict(cfg["dyadic"])
    if n == 2 and not args.resolution and "resolution" not in cfg["quadrature"]:
        res = (24, 12)
        d.setdefault("k_min", -4)
        d.setdefault("k_max", 1)
    q = make_sphere_quadrature(n, res)
    return build_system(q, seed=args.seed, **d)


def cmd_dyadic(args, cfg) -> int:
    try:
        S = _system(args, cfg)
    except ValueError as exc:
        print(f"dyadic: {exc}", file=sys.stderr)
        return 2
    if args.action == "build":
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"dyadic_n{S.quad.n}.json")
        with open(path, "w") as fh:
            fh.write(S.to_json())
        print(f"wrote {path} ({len(S.cubes)} cubes, {S.level_count} levels)")
        return 0
    c = check_system(S)
    ok = c["partition"] and c["nesting"] and c["children"] and c["sandwich"]
    print(json.dumps(c, sort_keys=True))
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _spec(eid, args, cfg) -> ExperimentSpec:
    params = experiment_overrides(cfg, eid)
    allowed = REGISTRY[eid].defaults
    params = {k: v for k, v in params.items() if k in allowed}
    params.update(cli_overrides(eid, args.n, args.resolution, args.eps_cut))
    return ExperimentSpec(eid, params, seed=args.seed)


def run_and_emit(ids, args, cfg) -> int:
    reports = []
    for eid in ids:
        try:
            r = run_experiment(_spec(eid, args, cfg))
        except ExperimentError as exc:
            print(f"{eid}: ERROR {exc}", file=sys.stderr)
            return 2
        for c, ok in sorted(r.criteria.items()):
            print(f"{eid} {c} {'PASS' if ok else 'FAIL'} ({r.timing:.1f}s)")
        reports.append(r)
    emit_report(reports, args.out, args.format)
    return 0 if all(r.passed for r in reports) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config)
    if args.command == "list":
        for eid, name, binding, crit in list_experiments():
            print(f"{eid:4s} {name:16s} [{','.join(crit)}] {binding}")
        return 0
    if args.command == "quad":
        return cmd_quad_check(args, cfg)
    if args.command == "dyadic":
        return cmd_dyadic(args, cfg)
    if args.command == "verify":
        ids = [e[0] for e in list_experiments()] if args.target == "all" else [args.target.upper()]
        if any(i not in REGISTRY for i in ids):
            print(f"unknown experiment {args.target!r}", file=sys.stderr)
            return 2
        return run_and_emit(ids, args, cfg)
    if args.command == "scan-optimality":
        return run_and_emit(["E5"], args, cfg)
    if args.command == "report":
        reports = load_reports(args.out)
        if not reports:
            print(f"no reports in {args.out}", file=sys.stderr)
            return 2
        for r in reports:
            for c, ok in sorted(r.criteria.items()):
                print(f"{r.experiment} {c} {'PASS' if ok else 'FAIL'}")
        return 0 if all(r.passed for r in reports) else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
