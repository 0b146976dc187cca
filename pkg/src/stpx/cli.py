"""Command line entry point: ``stpx solve|simulate|matrices --config run.json``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import dump_logical
from .config import ConfigError, RunConfig, load_config
from .montecarlo import GENERATOR, SimConfig, simulate, total_variation
from .states import format_state, state_at
from .steady import (
    ConvergenceError,
    assemble,
    density_profile,
    site_current,
    solve_model,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_csv(path: Path, header: str, rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_meta(path: Path, meta: dict) -> None:
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.out if args.out is not None else cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solve(cfg: RunConfig, args):
    method = args.method or cfg.solver.method
    tol = args.tol if args.tol is not None else cfg.solver.tol
    if not tol > 0:
        raise InputError("--tol must be positive")
    t0 = time.perf_counter()
    M, pi = solve_model(cfg.model, method, tol, cfg.solver.max_iter)
    return M, pi, time.perf_counter() - t0, method, tol


def _solver_meta(cfg: RunConfig, M, pi, wall: float, method: str, tol: float) -> dict:
    return {
        "sigma": cfg.model.total_rate,
        "transitions": len(cfg.model.transitions),
        "states": M.dim,
        "method": method,
        "tol": tol,
        "iterations": pi.report.iterations,
        "residual": pi.report.residual,
        "unique": pi.report.unique,
        "wall_time_s": wall,
    }


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    M, pi, wall, method, tol = _solve(cfg, args)
    out = _out_dir(args, cfg)
    tables = cfg.output.tables
    if "steady_state" in tables:
        _write_csv(out / "steady_state.csv", "state,probability",
                   ((format_state(s), fmt(p)) for s, p in pi.lexicographic()))
    if "densities" in tables:
        rho = density_profile(pi)
        _write_csv(out / "densities.csv", "species,site,density",
                   ((str(i + 1), str(j + 1), fmt(rho[i, j])) for i in range(rho.shape[0]) for j in range(rho.shape[1])))
    if "currents" in tables:
        _write_csv(out / "currents.csv", "transition,current",
                   ((name, fmt(j)) for name, j in site_current(pi, cfg.model).items()))
    meta = _solver_meta(cfg, M, pi, wall, method, tol)
    resolved = cfg.resolved()
    resolved["solver"].update(method=method, tol=tol)
    meta["config"] = resolved
    _write_meta(out / "meta.json", meta)
    print(f"solved {M.dim} states in {pi.report.iterations} iterations "
          f"(residual {pi.report.residual:.3e}); wrote {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.simulate is None:
        raise InputError("config has no 'simulate' section")
    sim = cfg.simulate
    if args.seed is not None:
        try:
            sim = SimConfig(sim.steps, sim.burn_in, args.seed, sim.chains)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    M, pi, wall, method, tol = _solve(cfg, args)
    t0 = time.perf_counter()
    emp = simulate(cfg.model, sim)
    sim_wall = time.perf_counter() - t0
    emp_pi = emp.to_distribution(M.index_map)
    tv = total_variation(pi, emp_pi)
    out = _out_dir(args, cfg)
    lattice = cfg.model.lattice
    rows = ((format_state(state_at(lattice.size - d, lattice)), str(c), fmt(c / emp.total))
            for d, c in sorted(emp.counts.items()))
    _write_csv(out / "empirical.csv", "state,count,probability", rows)
    comp = [(format_state(s), fmt(a), fmt(b), fmt(b - a))
            for (s, a), (_, b) in zip(pi.lexicographic(), emp_pi.lexicographic())]
    comp.append(("total_variation", "", "", fmt(tv)))
    _write_csv(out / "comparison.csv", "state,solver,empirical,difference", comp)
    meta = _solver_meta(cfg, M, pi, wall, method, tol)
    meta.update(seed=sim.seed, generator=emp.generator, samples=emp.total, total_variation=tv,
                simulation_wall_time_s=sim_wall)
    resolved = cfg.resolved()
    resolved["solver"].update(method=method, tol=tol)
    resolved["simulate"]["seed"] = sim.seed
    meta["config"] = resolved
    _write_meta(out / "meta.json", meta)
    print(f"simulated {emp.total} samples (seed {sim.seed}, {GENERATOR}); TV distance {tv:.4g}; wrote {out}")
    return EXIT_OK


def _file_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._(),-]", "_", name)


def cmd_matrices(args) -> int:
    cfg = load_config(args.config)
    model = cfg.model
    if args.transition is not None:
        try:
            chosen = [model.transitions.index(model.transition(args.transition))]
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    else:
        chosen = range(len(model.transitions))
    out = _out_dir(args, cfg)
    sdir = out / "structure"
    sdir.mkdir(exist_ok=True)
    for k in chosen:
        t, mt = model.transitions[k], model.structure_matrices[k]
        line = dump_logical(mt)
        (sdir / f"{_file_name(t.name)}.txt").write_text(line + "\n", encoding="utf-8")
        print(f"{t.name}: {line}")
    coo = assemble(model).matrix.tocoo()
    order = np.lexsort((coo.row, coo.col))
    _write_csv(out / "transition_matrix.csv", "row,col,value",
               ((str(coo.row[i] + 1), str(coo.col[i] + 1), fmt(coo.data[i])) for i in order))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stpx", description="Exact steady states of exclusion processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: config output.directory or ./out)")

    p = sub.add_parser("solve", help="stationary distribution, densities and currents")
    common(p)
    p.add_argument("--method", choices=("power", "direct"))
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="Monte Carlo check against the solver")
    common(p)
    p.add_argument("--method", choices=("power", "direct"))
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("matrices", help="dump structure matrices and the transition matrix")
    common(p)
    which = p.add_mutually_exclusive_group()
    which.add_argument("--transition", metavar="NAME")
    which.add_argument("--all", action="store_true", help="every transition (default)")
    p.set_defaults(func=cmd_matrices)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
