"""Command line front end: one experiment per invocation.

Every subcommand takes a config file (see :mod:`nematiclab.config`) and
writes under its ``output_dir``.  Exit codes: 0 success, 1 bad config or
input, 2 a checked property failed, 3 Blowup / NonContraction.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig, format_config, load_config
from .diagnostics import decay_exponents, energy_series
from .estimates import run_suite
from .initial_data import EtaVector, make_scenario, sphere_defect
from .mild import NonContraction, PicardConfig, picard_solve
from .semigroup import decay_fit, heat_decay_series
from .spectral import Grid, OutsideTheoryWarning, gradient, lp_norm
from .state import SimState, Trajectory
from .timestepper import Blowup, StepConfig, integrate

__all__ = ["main", "run_cli", "SLOPE_TOL", "DECAY_TOL"]

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT, EXIT_SOLVER = 0, 1, 2, 3

SEMIGROUP_CASES = ((1, 2, 0), (1, np.inf, 0), (1, np.inf, 1))
SLOPE_TOL = 0.05
DECAY_TOL = {"u0": 0.15, "d1": 0.2}

SEMIGROUP_HEADER = ("t", "norm", "p", "q", "j", "domain", "slope_window_lo", "slope_window_hi")
PICARD_HEADER = ("iter", "y_norm", "diff_norm", "ratio")
VERIFY_HEADER = ("name", "seed", "lhs", "rhs", "margin", "grid_digest")
ENERGY_HEADER = ("step", "t", "energy", "constraint")
DECAY_HEADER = ("quantity", "slope", "target", "deviation", "residual", "npoints", "window_lo", "window_hi")
FITS_HEADER = ("p", "q", "j", "slope", "theory", "deviation", "residual", "npoints")


class _InputError(Exception):
    pass


def _grid(cfg: RunConfig) -> Grid:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideTheoryWarning)
        return Grid(cfg.dimension, cfg.resolution, cfg.box_len)


def _data(cfg: RunConfig):
    grid = _grid(cfg)
    eta = EtaVector(np.array(cfg.eta))
    try:
        u0, d0 = make_scenario(cfg.scenario, grid, eta, cfg.epsilon, cfg.seed, cfg.s)
    except ValueError as exc:
        raise _InputError(f"cannot build {cfg.scenario!r} data: {exc}") from None
    return grid, eta, u0, d0


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out: Path, cfg: RunConfig, command: str, wall: float, extra: dict) -> None:
    text = format_config(cfg)
    entries = {"command": command}
    entries.update({f"config.{line.split(' = ')[0]}": line.split(" = ", 1)[1] for line in text.splitlines()})
    entries["config_hash"] = io.git_blob_hash(text.encode())
    entries.update(extra)
    entries["wall_time_s"] = f"{wall:.3f}"
    # simulate owns manifest.txt; later analyses of the same directory must not clobber it
    name = "manifest.txt" if command == "simulate" else f"manifest_{command}.txt"
    io.write_manifest(out / name, entries)


def _snapshot_bytes(state: SimState) -> bytes:
    return np.ascontiguousarray(state.stacked().coeffs, dtype="<c16").tobytes()


# -- subcommands ----------------------------------------------------------------


def cmd_simulate(cfg: RunConfig, args) -> int:
    t0 = time.time()
    grid, eta, u0, d0 = _data(cfg)
    out = _out(cfg)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for old in snap_dir.glob("*.elsf"):
        old.unlink()
    step_cfg = StepConfig(cfg.dt, cfg.t_end, cfg.snapshot_every, cfg.solver, cfg.dealias)
    rows = []

    def observer(state):
        e = 0.5 * lp_norm(state.u, 2) ** 2 + 0.5 * lp_norm(gradient(state.d), 2) ** 2
        c = float(np.abs(sphere_defect(state.d, eta)).max())
        rows.append((len(rows), state.t, e, c))

    code, status = EXIT_OK, "ok"
    try:
        traj = integrate(u0, d0, eta, step_cfg, cfg.s, observer=observer)
    except Blowup as exc:
        traj, code, status = exc.trajectory, EXIT_SOLVER, f"blowup at t={exc.time:g}"
    for i, st in enumerate(traj.states):
        io.write_snapshot(snap_dir / f"state_{i:05d}.elsf", st.stacked(), st.t)
        if traj.pressures is not None:
            io.write_snapshot(snap_dir / f"pressure_{i:05d}.elsf", traj.pressures[i], st.t)
    io.write_csv(out / "energy.csv", ENERGY_HEADER, rows)
    _manifest(out, cfg, "simulate", time.time() - t0, {
        "initial_data_hash": io.git_blob_hash(_snapshot_bytes(traj.states[0])),
        "snapshots": len(traj),
        "status": status,
    })
    print(f"simulate: {len(traj)} snapshots, {status}; output in {out}")
    return code


def cmd_picard(cfg: RunConfig, args) -> int:
    t0 = time.time()
    grid, eta, u0, d0 = _data(cfg)
    out = _out(cfg)
    n_time = max(8, int(round(cfg.t_end / cfg.dt)) + 1)
    try:
        pcfg = PicardConfig(T=cfg.t_end, n_time=n_time, max_iter=args.max_iter, tol=args.tol, s=cfg.s)
    except ValueError as exc:
        raise _InputError(str(exc)) from None
    code, status = EXIT_OK, "converged"
    try:
        traj, report = picard_solve(u0, d0, eta, pcfg)
        if not report.converged:
            code, status = EXIT_ASSERT, "not converged within max_iter"
        else:
            final = traj.states[-1]
            io.write_snapshot(out / "picard_final.elsf", final.stacked(), final.t)
    except NonContraction as exc:
        report, code, status = exc.report, EXIT_SOLVER, f"non-contraction: {exc}"
    io.write_csv(out / "picard.csv", PICARD_HEADER, report.rows())
    _manifest(out, cfg, "picard", time.time() - t0, {
        "initial_data_hash": io.git_blob_hash(_snapshot_bytes(SimState(u0.u0, d0.d0))),
        "n_time": n_time,
        "tol": report.tol,
        "iterations": report.iterations,
        "status": status,
    })
    print(f"picard: {report.iterations} iterations, {status}")
    return code


def cmd_semigroup_lab(cfg: RunConfig, args) -> int:
    t0 = time.time()
    grid = _grid(cfg)
    out = _out(cfg)
    lo, hi = 1.0, grid.validity_time
    if hi <= lo:
        raise _InputError(f"box_len={cfg.box_len} too small: validity window [1, L^2/16] is empty")
    rows, fits, ok = [], [], True
    for p, q, j in SEMIGROUP_CASES:
        series = heat_decay_series(grid, p, q, j)
        for t, v in zip(series.times, series.norms):
            rows.append((t, v, p, q, j, "torus", lo, hi))
        fit = decay_fit(series, (lo, hi))
        theory = series.meta["theory"]
        dev = fit.slope - theory
        ok &= abs(dev) <= SLOPE_TOL
        fits.append((p, q, j, fit.slope, theory, dev, fit.residual, fit.npoints))
        print(f"semigroup-lab: (p,q,j)=({p},{q},{j}) slope {fit.slope:+.4f} theory {theory:+.4f}")
    io.write_csv(out / "semigroup.csv", SEMIGROUP_HEADER, rows)
    io.write_csv(out / "semigroup_fits.csv", FITS_HEADER, fits)
    _manifest(out, cfg, "semigroup-lab", time.time() - t0, {"slope_tol": SLOPE_TOL, "status": "ok" if ok else "slope outside tolerance"})
    return EXIT_OK if ok else EXIT_ASSERT


def cmd_verify(cfg: RunConfig, args) -> int:
    t0 = time.time()
    grid = _grid(cfg)
    out = _out(cfg)
    if args.seeds < 1:
        raise _InputError(f"--seeds must be >= 1, got {args.seeds}")
    seeds = range(cfg.seed, cfg.seed + args.seeds)
    records = run_suite(grid, seeds, T=cfg.t_end, s=cfg.s)
    records.sort(key=lambda r: (r.name, r.seed))
    io.write_csv(out / "verify.csv", VERIFY_HEADER, [r.row() for r in records])
    failed = [r for r in records if not r.passed]
    _manifest(out, cfg, "verify", time.time() - t0, {"records": len(records), "failed": len(failed)})
    print(f"verify: {len(records)} records, {len(failed)} failed")
    return EXIT_OK if not failed else EXIT_ASSERT


def _load_trajectory(snap_dir: Path, s: float) -> Trajectory:
    paths = sorted(snap_dir.glob("state_*.elsf"))
    if not paths:
        raise _InputError(f"no snapshots in {snap_dir}; run 'simulate' first")
    states = []
    for p in paths:
        try:
            f, t = io.read_snapshot(p)
            states.append(SimState.from_stacked(f, t))
        except ValueError as exc:
            raise _InputError(str(exc)) from None
    return Trajectory(states, s=s)


def cmd_decay_fit(cfg: RunConfig, args) -> int:
    t0 = time.time()
    out = _out(cfg)
    traj = _load_trajectory(out / "snapshots", cfg.s)
    window = tuple(args.window) if args.window else (1.0, traj.grid.validity_time)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = decay_exponents(traj, window)
        except ValueError as exc:
            raise _InputError(str(exc)) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows, ok = [], True
    for key, fit in result.fits.items():
        dev = result.deviation(key)
        if key in DECAY_TOL:
            ok &= abs(dev) <= DECAY_TOL[key]
        rows.append((key, fit.slope, result.targets[key], dev, fit.residual, fit.npoints, *result.window))
        print(f"decay-fit: {key} slope {fit.slope:+.4f} target {result.targets[key]:+.4f}")
    io.write_csv(out / "decay_fit.csv", DECAY_HEADER, rows)
    energy = energy_series(traj)
    io.write_csv(out / "decay_energy.csv", ("t", "energy"), list(zip(traj.times, energy)))
    _manifest(out, cfg, "decay-fit", time.time() - t0, {"window_lo": result.window[0], "window_hi": result.window[1],
                                                        "status": "ok" if ok else "slope outside tolerance"})
    return EXIT_OK if ok else EXIT_ASSERT


def _summarize(name: str, header, rows) -> list[str]:
    col = {h: i for i, h in enumerate(header)}
    lines = [f"[{name}] {len(rows)} rows"]
    if name == "verify.csv" and rows:
        worst = min(rows, key=lambda r: float(r[col["margin"]]) / max(float(r[col["rhs"]]), 1e-300))
        lines.append(f"  worst relative margin: {float(worst[col['margin']]) / float(worst[col['rhs']]):.6g} ({worst[0]}, seed {worst[1]})")
    elif name == "picard.csv" and rows:
        lines.append(f"  final diff_norm {rows[-1][col['diff_norm']]}, ratios {', '.join(r[col['ratio']] for r in rows)}")
    elif name in ("semigroup_fits.csv", "decay_fit.csv"):
        for r in rows:
            lines.append("  " + ", ".join(f"{h}={v}" for h, v in zip(header, r)))
    elif name == "energy.csv" and rows:
        e = np.array([float(r[col["energy"]]) for r in rows])
        c = np.array([float(r[col["constraint"]]) for r in rows])
        rise = float(np.max(np.diff(e))) if len(e) > 1 else 0.0
        lines.append(f"  E(0) = {e[0]:.6g}, max step increase {rise:.3g}, max constraint drift {c.max():.3g}")
    return lines


def cmd_report(cfg: RunConfig, args) -> int:
    out = _out(cfg)
    csvs = sorted(p for p in out.glob("*.csv"))
    if not csvs:
        raise _InputError(f"no CSV files in {out}")
    lines = [f"report for {out}"]
    for p in csvs:
        header, rows = io.read_csv(p)
        lines.extend(_summarize(p.name, header, rows))
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "picard": cmd_picard,
    "semigroup-lab": cmd_semigroup_lab,
    "verify": cmd_verify,
    "decay-fit": cmd_decay_fit,
    "report": cmd_report,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nematiclab", description="Nematic liquid-crystal spectral solver and verification lab.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "integrate the system and write snapshots, energy.csv and manifest.txt",
        "picard": "Picard iteration of the Duhamel map; writes picard.csv",
        "semigroup-lab": "heat-flow decay series and slope fits; writes semigroup.csv",
        "verify": "seeded inequality suites; writes verify.csv",
        "decay-fit": "decay exponents of stored snapshots; writes decay_fit.csv",
        "report": "summarize the CSV files in output_dir into report.txt",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("config", help="path to a key = value config file")
        if name == "picard":
            p.add_argument("--max-iter", type=int, default=50)
            p.add_argument("--tol", type=float, default=None, help="Y-norm stopping threshold (default 1e-9*(1+data norm))")
        if name == "verify":
            p.add_argument("--seeds", type=int, default=100, help="number of consecutive seeds starting at config seed")
        if name == "decay-fit":
            p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), help="fit window (default [1, L^2/16])")
    return ap


def run_cli(argv) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except (_InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
