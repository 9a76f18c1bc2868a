"""Command-line front end: single-point solves, rate reports, and dB sweeps.

Exit codes: 0 success, 1 solver failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from .model import JammerAllocation, JammerBudget, SystemConfig
from .optimizer import SolveResult, SolverError, solve, solve_kkt, solve_oracle
from .rates import MonteCarloSettings, RateReport, rate_report
from .scenario import (
    ScenarioError,
    ScenarioSpec,
    db_to_linear,
    load_scenario,
    sweep_db_values,
    to_system_config,
    uniform_allocation,
)

__all__ = ["main", "SweepRow", "run_sweep", "write_csv", "write_plot_script", "csv_columns"]

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_CONFIG = 2


@dataclass(frozen=True)
class SweepRow:
    """One jamming-power grid point: optimal allocation plus both rate reports."""

    pw_db: float
    zeta_t: tuple[float, ...]
    zeta_d: float
    rho_star: float
    opt: RateReport
    unif: RateReport
    rate_reduction_pct: float
    method: str
    kkt_residual: float


def csv_columns(n_users: int) -> list[str]:
    cols = ["pw_db"]
    cols += [f"zeta_t_{k + 1}" for k in range(n_users)]
    cols += [
        "zeta_d",
        "rho_star",
        "r_lb_opt",
        "r_mc_opt",
        "r_mc_halfwidth_opt",
        "r_ub_opt",
        "r_lb_unif",
        "r_mc_unif",
        "r_mc_halfwidth_unif",
        "r_ub_unif",
        "rate_reduction_pct",
        "method",
        "kkt_residual",
    ]
    return cols


def _fmt(x: float) -> str:
    return format(x, ".17g")


def run_sweep(spec: ScenarioSpec, workers: int = 1) -> list[SweepRow]:
    cfg = to_system_config(spec)
    unif_alloc = uniform_allocation(cfg)
    rows = []
    for pw_db in sweep_db_values(spec):
        budget = JammerBudget(db_to_linear(pw_db))
        try:
            result = solve(cfg, budget)
        except SolverError as exc:
            raise SolverError(f"sweep failed at P_w = {pw_db} dB: {exc}", exc.residual) from exc
        opt = rate_report(result.alloc, cfg, budget, spec.mc, workers=workers)
        unif = rate_report(unif_alloc, cfg, budget, spec.mc, workers=workers)
        reduction = 100.0 * (1.0 - opt.r_mc / unif.r_mc) if unif.r_mc > 0.0 else 0.0
        rows.append(
            SweepRow(
                pw_db=pw_db,
                zeta_t=result.alloc.zeta_t,
                zeta_d=result.alloc.zeta_d,
                rho_star=result.rho_star,
                opt=opt,
                unif=unif,
                rate_reduction_pct=reduction,
                method=result.method,
                kkt_residual=result.kkt_residual,
            )
        )
    return rows


def write_csv(rows: list[SweepRow], n_users: int, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_columns(n_users))
        for r in rows:
            writer.writerow(
                [_fmt(r.pw_db)]
                + [_fmt(z) for z in r.zeta_t]
                + [
                    _fmt(r.zeta_d),
                    _fmt(r.rho_star),
                    _fmt(r.opt.r_lb),
                    _fmt(r.opt.r_mc),
                    _fmt(r.opt.r_mc_halfwidth),
                    _fmt(r.opt.r_ub),
                    _fmt(r.unif.r_lb),
                    _fmt(r.unif.r_mc),
                    _fmt(r.unif.r_mc_halfwidth),
                    _fmt(r.unif.r_ub),
                    _fmt(r.rate_reduction_pct),
                    r.method,
                    _fmt(r.kkt_residual),
                ]
            )


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
# Renders rate and allocation curves from @STEM@.csv (same directory).
# Regenerate the data with: macjam sweep <scenario>
import csv

import matplotlib.pyplot as plt

with open("@STEM@.csv") as fh:
    rows = list(csv.DictReader(fh))

pw = [float(r["pw_db"]) for r in rows]
n_users = @NUSERS@

fig, ax = plt.subplots(figsize=(7, 5))
for col, style, label in [
    ("r_ub_unif", "b--", "upper bound, uniform"),
    ("r_mc_unif", "b-", "achievable, uniform"),
    ("r_lb_unif", "b:", "lower bound, uniform"),
    ("r_ub_opt", "r--", "upper bound, optimal"),
    ("r_mc_opt", "r-", "achievable, optimal"),
    ("r_lb_opt", "r:", "lower bound, optimal"),
]:
    ax.plot(pw, [float(r[col]) for r in rows], style, label=label)
ax.set_xlabel("average jamming power P_w (dB)")
ax.set_ylabel("ergodic sum-rate (bits/symbol)")
ax.legend()
ax.grid(True)
fig.tight_layout()
fig.savefig("@STEM@_rates.png", dpi=150)

fig, ax = plt.subplots(figsize=(7, 5))
for k in range(n_users):
    ax.plot(pw, [float(r[f"zeta_t_{k + 1}"]) for r in rows], label=f"zeta_t user {k + 1}")
ax.plot(pw, [float(r["zeta_d"]) for r in rows], "k--", label="zeta_d")
ax.set_xlabel("average jamming power P_w (dB)")
ax.set_ylabel("optimal energy ratio")
ax.legend()
ax.grid(True)
fig.tight_layout()
fig.savefig("@STEM@_alloc.png", dpi=150)
print("wrote @STEM@_rates.png and @STEM@_alloc.png")
'''


def write_plot_script(stem: str, n_users: int, path: Path) -> None:
    text = _PLOT_TEMPLATE.replace("@STEM@", stem).replace("@NUSERS@", str(n_users))
    path.write_text(text)


def _print_result(result: SolveResult) -> None:
    names = [f"zeta_t[{k + 1}]" for k in range(result.alloc.n_users)] + ["zeta_d"]
    print(f"method: {result.method}")
    print(f"iterations: {result.iterations}")
    print(f"kkt_residual: {result.kkt_residual:.3e}")
    print(f"nu_star: {result.nu_star:.12g}")
    print(f"rho_star: {result.rho_star:.12g}")
    for name, value in zip(names, result.alloc.as_vector()):
        print(f"{name} = {value:.12g}")
    pinned = [names[i] for i in result.active_set]
    print("pinned at zero: " + (", ".join(pinned) if pinned else "none"))


def _point_budget(spec: ScenarioSpec, pw_db_override: float | None) -> tuple[float, JammerBudget]:
    if pw_db_override is not None:
        pw_db = pw_db_override
    elif spec.jammer.power_db is not None:
        pw_db = spec.jammer.power_db
    else:
        raise ScenarioError("scenario defines a sweep; pass --pw-db to pick a single point")
    return pw_db, JammerBudget(db_to_linear(pw_db))


def _cmd_optimize(args) -> int:
    spec = load_scenario(args.scenario)
    cfg = to_system_config(spec)
    pw_db, budget = _point_budget(spec, args.pw_db)
    print(f"P_w = {pw_db:g} dB")
    result = solve(cfg, budget)
    _print_result(result)
    if args.out:
        doc = {
            "pw_db": pw_db,
            "zeta_t": list(result.alloc.zeta_t),
            "zeta_d": result.alloc.zeta_d,
            "rho_star": result.rho_star,
            "method": result.method,
            "kkt_residual": result.kkt_residual,
        }
        Path(args.out).write_text(yaml.safe_dump(doc, sort_keys=False))
    return EXIT_OK


def _load_alloc_file(path: str, cfg: SystemConfig) -> JammerAllocation:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from exc
    if not isinstance(raw, dict) or set(raw) != {"zeta_t", "zeta_d"}:
        raise ScenarioError(f"{path}: allocation file needs exactly the keys zeta_t and zeta_d")
    alloc = JammerAllocation(tuple(float(z) for z in raw["zeta_t"]), float(raw["zeta_d"]))
    if alloc.n_users != cfg.n_users:
        raise ScenarioError(
            f"{path}: allocation has {alloc.n_users} training ratios, config has {cfg.n_users}"
        )
    return alloc


def _cmd_rates(args) -> int:
    spec = load_scenario(args.scenario)
    cfg = to_system_config(spec)
    pw_db, budget = _point_budget(spec, args.pw_db)
    if args.alloc == "uniform":
        alloc = uniform_allocation(cfg)
    elif args.alloc == "optimal":
        if budget.avg_power == 0.0:
            # Zero budget: the objective is allocation-independent.
            alloc = uniform_allocation(cfg)
        else:
            alloc = solve(cfg, budget).alloc
    elif args.alloc.startswith("file:"):
        alloc = _load_alloc_file(args.alloc[len("file:"):], cfg)
    else:
        raise ScenarioError(f"unknown allocation choice {args.alloc!r}")
    report = rate_report(alloc, cfg, budget, spec.mc, workers=args.workers)
    print(f"P_w = {pw_db:g} dB, allocation = {args.alloc}")
    print(f"R_LB = {report.r_lb:.12g} bits/symbol")
    print(f"R_MC = {report.r_mc:.12g} +/- {report.r_mc_halfwidth:.3g} bits/symbol")
    print(f"R_UB = {report.r_ub:.12g} bits/symbol")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = load_scenario(args.scenario)
    cfg = to_system_config(spec)
    rows = run_sweep(spec, workers=args.workers)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{spec.output}.csv"
    plot_path = outdir / f"{spec.output}.plot"
    write_csv(rows, cfg.n_users, csv_path)
    write_plot_script(spec.output, cfg.n_users, plot_path)
    print(f"wrote {csv_path} ({len(rows)} rows) and {plot_path}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    spec = load_scenario(args.scenario)
    cfg = to_system_config(spec)
    pw_db, budget = _point_budget(spec, args.pw_db)
    kkt = solve_kkt(cfg, budget)
    oracle = solve_oracle(cfg, budget, grid_resolution=args.grid)
    gap = oracle.rho_star - kkt.rho_star
    dist = max(abs(a - b) for a, b in zip(kkt.alloc.as_vector(), oracle.alloc.as_vector()))
    print(f"P_w = {pw_db:g} dB")
    print(f"kkt    rho* = {kkt.rho_star:.12g} (residual {kkt.kkt_residual:.3e})")
    print(f"oracle rho* = {oracle.rho_star:.12g} (grid {args.grid:g})")
    print(f"rho discrepancy (oracle - kkt) = {gap:.3e}")
    print(f"allocation max |difference| = {dist:.3e}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macjam",
        description="Optimal jamming energy allocation for training-based MAC systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="solve one jamming-power point")
    p_opt.add_argument("scenario")
    p_opt.add_argument("--pw-db", type=float, default=None)
    p_opt.add_argument("--out", default=None, help="also write the result as YAML")
    p_opt.set_defaults(handler=_cmd_optimize)

    p_rates = sub.add_parser("rates", help="rate report for a chosen allocation")
    p_rates.add_argument("scenario")
    p_rates.add_argument("--alloc", required=True, help="uniform | optimal | file:PATH")
    p_rates.add_argument("--pw-db", type=float, default=None)
    p_rates.add_argument("--workers", type=int, default=1)
    p_rates.set_defaults(handler=_cmd_rates)

    p_sweep = sub.add_parser("sweep", help="sweep the jamming power and emit CSV + plot script")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--outdir", default=".")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_oracle = sub.add_parser("oracle-check", help="compare the KKT solver with the brute-force oracle")
    p_oracle.add_argument("scenario")
    p_oracle.add_argument("--grid", type=float, default=1e-3)
    p_oracle.add_argument("--pw-db", type=float, default=None)
    p_oracle.set_defaults(handler=_cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
