"""Configuration parsing, run persistence and subcommand dispatch.

Configs are plain ``key = value`` text ('#' starts a comment, unknown keys
rejected).  A persisted run is a directory

    config.txt          canonical re-emission of the parsed config
    series.csv          per-step scalar series
    snapshots/NNNNNN.csv  one CSV per dump (x, eta, v, zeta, B, q, accel)
    status.txt          format version, status and scalar summaries

All numbers are serialized with 17 significant digits so a read-back record
is bit-identical to the written one.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from itertools import product
from pathlib import Path

import numpy as np

from . import diagnostics
from .indices import compute_index_set, feasible_window, regime
from .profiles import write_profile_csv, entropy_profile
from .selfsim import (IntegrationError, integrate_alpha_t, integrate_alpha_tau,
                      write_trajectory_csv)
from .solver import (REQUIRED_KEYS, RunRecord, SERIES_COLUMNS, PerturbationState,
                     SolverConfig, compute_B, run)

FORMAT_VERSION = "vacuumflow-record-1"

SNAPSHOT_COLUMNS = ("x", "eta", "v", "zeta", "B", "q", "accel")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration text."""


class RecordError(RuntimeError):
    """Malformed or incomplete persisted run directory."""


# ---------------------------------------------------------------------------
# config text

def _parse_float(s):
    try:
        return float(s)
    except ValueError:
        return None


def _parse_int(s):
    try:
        return int(s)
    except ValueError:
        return None


# key -> (parser, predicate, message)
_SCHEMA = {
    "gamma": (_parse_float, lambda v: np.isfinite(v) and v > 1.0, "must exceed 1"),
    "mu": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "delta": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "alpha0": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "alpha1": (_parse_float, np.isfinite, "must be finite"),
    "tau_end": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "N": (_parse_int, lambda v: v >= 32, "must be an integer >= 32"),
    "dtau": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "c_nu": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "s_bar": (_parse_float, np.isfinite, "must be finite"),
    "profile_kind": (str, lambda v: v in ("power", "constant", "entropy_bounded"),
                     "must be power, constant or entropy_bounded"),
    "varrho": (_parse_float, lambda v: np.isfinite(v) and v >= 0.0, "must be >= 0"),
    "scale": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "a_eta": (_parse_float, lambda v: np.isfinite(v) and abs(v) < 1.0,
              "must have magnitude below 1"),
    "a_eta1": (_parse_float, lambda v: np.isfinite(v) and abs(v) < 1.0,
               "must have magnitude below 1"),
    "a_q": (_parse_float, lambda v: np.isfinite(v) and abs(v) < 1.0,
            "must have magnitude below 1"),
    "shape_m": (_parse_int, lambda v: v >= 1, "must be an integer >= 1"),
    "r1": (_parse_float, np.isfinite, "must be finite"),
    "sigma1": (_parse_float, np.isfinite, "must be finite"),
    "eps_det": (_parse_float, lambda v: 0.0 < v < 1.0, "must lie in (0, 1)"),
    "newton_tol": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
    "snapshot_every": (_parse_int, lambda v: v >= 0, "must be an integer >= 0"),
    "c_cfl": (_parse_float, lambda v: np.isfinite(v) and v > 0.0, "must be positive"),
}

_INT_KEYS = ("N", "shape_m", "snapshot_every")
_STR_KEYS = ("profile_kind",)


def parse_config(text: str) -> SolverConfig:
    """Parse and validate a key = value config; errors name the offending
    key and line."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' (line {lineno})")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (line {lineno})")
        parser, pred, msg = _SCHEMA[key]
        parsed = parser(val)
        if parsed is None:
            kind = "an integer" if key in _INT_KEYS else "a number"
            raise ConfigError(f"{key} expects {kind} (line {lineno})")
        if not pred(parsed):
            raise ConfigError(f"{key} {msg} (line {lineno})")
        values[key] = parsed
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    if ("r1" in values) != ("sigma1" in values):
        raise ConfigError("r1 and sigma1 must be given together")
    cfg = SolverConfig(**values)
    cfg.validate()
    return cfg


def emit_config(cfg: SolverConfig) -> str:
    """Canonical re-emission; parse(emit(parse(t))) == parse(t)."""
    optional = sorted(k for k in _SCHEMA if k not in REQUIRED_KEYS)
    lines = []
    for key in (*REQUIRED_KEYS, *optional):
        val = getattr(cfg, key)
        if val is None:
            continue
        if key in _STR_KEYS:
            lines.append(f"{key} = {val}")
        elif key in _INT_KEYS:
            lines.append(f"{key} = {val:d}")
        else:
            lines.append(f"{key} = {val:.17g}")
    return "\n".join(lines) + "\n"


def resolve_index_set(cfg: SolverConfig):
    """Index set from the config's (r1, sigma1), or a scanned feasibility
    witness of the strongest applicable case; falls back to a nominal pair
    when no case is feasible (gamma <= 7/6)."""
    if cfg.r1 is not None:
        return compute_index_set(cfg.gamma, cfg.r1, cfg.sigma1)
    for case in (3, 2, 1):
        ok, witness = feasible_window(cfg.gamma, case)
        if ok:
            return compute_index_set(cfg.gamma, *witness)
    return compute_index_set(cfg.gamma, 1.5, 0.5)


# ---------------------------------------------------------------------------
# run records

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_run_record(record: RunRecord, path) -> None:
    path = Path(path)
    (path / "snapshots").mkdir(parents=True, exist_ok=True)

    cfg = record.config
    if cfg.r1 is None:
        cfg = replace(cfg, r1=record.index_set.r1, sigma1=record.index_set.sigma1)
    (path / "config.txt").write_text(emit_config(cfg))

    with open(path / "series.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_COLUMNS)
        n_rows = len(record.series["tau"])
        for i in range(n_rows):
            w.writerow([_fmt(record.series[col][i]) for col in SERIES_COLUMNS])

    for i, snap in enumerate(record.snapshots):
        qf = diagnostics.q_field(snap, record.pressure)
        B = snap.B if snap.B is not None else compute_B(snap)
        accel = snap.accel if snap.accel is not None else np.full_like(snap.x, np.nan)
        with open(path / "snapshots" / f"{i:06d}.csv", "w", newline="") as fh:
            fh.write(f"# tau = {_fmt(snap.tau)}\n")
            fh.write(f"# alpha = {_fmt(snap.alpha)}\n")
            fh.write(f"# alpha_tau = {_fmt(snap.alpha_tau)}\n")
            w = csv.writer(fh)
            w.writerow(SNAPSHOT_COLUMNS)
            for j in range(snap.x.size):
                w.writerow([_fmt(snap.x[j]), _fmt(snap.eta[j]), _fmt(snap.v[j]),
                            _fmt(snap.zeta[j]), _fmt(B[j]), _fmt(qf.q[j]),
                            _fmt(accel[j])])

    with open(path / "status.txt", "w") as fh:
        fh.write(FORMAT_VERSION + "\n")
        fh.write(f"status={record.status}\n")
        fh.write(f"e_in={_fmt(record.e_in)}\n")
        fh.write(f"entropy_violations={record.entropy_violations:d}\n")


def read_run_record(path) -> RunRecord:
    path = Path(path)
    status_file = path / "status.txt"
    if not status_file.is_file():
        raise RecordError(f"missing status.txt in {path}")
    lines = status_file.read_text().splitlines()
    if not lines or lines[0].strip() != FORMAT_VERSION:
        raise RecordError(f"format version mismatch: expected {FORMAT_VERSION!r}")
    meta = {}
    for line in lines[1:]:
        if "=" in line:
            key, _, val = line.partition("=")
            meta[key.strip()] = val.strip()
    if "status" not in meta:
        raise RecordError("status.txt lacks a status entry")
    status = meta["status"]
    if status not in ("completed", "aborted_degenerate", "aborted_nan"):
        raise RecordError(f"unknown status {status!r}")

    cfg_file = path / "config.txt"
    if not cfg_file.is_file():
        raise RecordError(f"missing config.txt in {path}")
    try:
        cfg = parse_config(cfg_file.read_text())
    except ConfigError as exc:
        raise RecordError(f"config.txt: {exc}") from exc
    profile, pressure = cfg.build_profiles()
    index_set = resolve_index_set(cfg)

    series_file = path / "series.csv"
    if not series_file.is_file():
        raise RecordError(f"missing series.csv in {path}")
    series = {col: [] for col in SERIES_COLUMNS}
    with open(series_file, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(SERIES_COLUMNS):
            raise RecordError("series.csv header does not match the format")
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(SERIES_COLUMNS):
                raise RecordError(f"series.csv row {rownum}: expected "
                                  f"{len(SERIES_COLUMNS)} fields, got {len(row)}")
            try:
                vals = [float(tok) for tok in row]
            except ValueError:
                raise RecordError(f"series.csv row {rownum}: malformed number")
            for col, val in zip(SERIES_COLUMNS, vals):
                series[col].append(val)
    series = {col: np.asarray(vals) for col, vals in series.items()}

    snap_dir = path / "snapshots"
    if not snap_dir.is_dir():
        raise RecordError(f"missing snapshots directory in {path}")
    snapshots = []
    for fname in sorted(snap_dir.iterdir()):
        if fname.suffix != ".csv":
            continue
        snapshots.append(_read_snapshot(fname, cfg))
    if not snapshots:
        raise RecordError("snapshots directory holds no snapshots")
    taus = [s.tau for s in snapshots]
    if np.any(np.diff(taus) <= 0.0):
        raise RecordError("snapshot times are not strictly increasing")

    return RunRecord(config=cfg, profile=profile, pressure=pressure,
                     index_set=index_set, snapshots=snapshots, series=series,
                     status=status, e_in=float(meta.get("e_in", "0")),
                     entropy_violations=int(meta.get("entropy_violations", "0")))


def _read_snapshot(fname, cfg) -> PerturbationState:
    meta = {}
    rows = []
    lines = fname.read_text().splitlines()
    body_start = 0
    for raw in lines:
        if not raw.startswith("#"):
            break
        body_start += 1
        key, _, val = raw[1:].strip().partition("=")
        meta[key.strip()] = val.strip()
    if body_start >= len(lines):
        raise RecordError(f"{fname.name}: missing header row")
    header = next(csv.reader([lines[body_start]]))
    if header != list(SNAPSHOT_COLUMNS):
        raise RecordError(f"{fname.name}: unexpected snapshot columns")
    for rownum, row in enumerate(csv.reader(lines[body_start + 1:]), start=1):
        if len(row) != len(SNAPSHOT_COLUMNS):
            raise RecordError(f"{fname.name} row {rownum}: expected "
                              f"{len(SNAPSHOT_COLUMNS)} fields, got {len(row)}")
        try:
            rows.append([float(tok) for tok in row])
        except ValueError:
            raise RecordError(f"{fname.name} row {rownum}: malformed number")
    for key in ("tau", "alpha", "alpha_tau"):
        if key not in meta:
            raise RecordError(f"{fname.name}: missing '# {key} = ...' line")
    data = np.asarray(rows)
    if data.size == 0:
        raise RecordError(f"{fname.name}: no data rows")
    return PerturbationState(
        tau=float(meta["tau"]), x=data[:, 0], eta=data[:, 1], v=data[:, 2],
        zeta=data[:, 3], alpha=float(meta["alpha"]),
        alpha_tau=float(meta["alpha_tau"]), gamma=cfg.gamma, mu=cfg.mu,
        accel=data[:, 6], B=data[:, 4])


# ---------------------------------------------------------------------------
# subcommands

USAGE = """usage: vacuumflow <command> [options]

commands:
  selfsim    integrate the scale factor and export trajectory/profile CSVs
  indices    print the regime table with feasibility witnesses
  simulate   run the perturbation solver and persist a run record
  diagnose   compute energy reports and decay fits for a stored run
  sweep      run a grid of configs concurrently and summarize
"""


def _parser(cmd: str) -> argparse.ArgumentParser:
    return argparse.ArgumentParser(prog=f"vacuumflow {cmd}")


def cmd_selfsim(rest) -> int:
    p = _parser("selfsim")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--tau-end", type=float, default=3.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--profile-kind", default="entropy_bounded",
                   choices=("power", "constant", "entropy_bounded"))
    p.add_argument("--varrho", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--n-grid", type=int, default=256)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        traj_t = integrate_alpha_t(args.delta, args.gamma, args.alpha0,
                                   args.alpha1, args.t_end, args.tol)
        traj_tau = integrate_alpha_tau(args.delta, args.gamma, args.alpha0,
                                       args.alpha1, args.tau_end, args.tol)
        from .profiles import build_density_profile, pressure_profile
        prof = build_density_profile(args.profile_kind, args.varrho, args.scale,
                                     args.gamma, args.n_grid)
        pres = pressure_profile(prof, args.delta)
        ent = entropy_profile(prof, pres, 1.0, 0.0, args.gamma)
    except (ValueError, IntegrationError) as exc:
        print(f"selfsim error: {exc}", file=sys.stderr)
        return 2
    write_trajectory_csv(out / "alpha_t.csv", traj_t)
    write_trajectory_csv(out / "alpha_tau.csv", traj_tau)
    write_profile_csv(out / "profile.csv", prof, pres, ent)
    print(f"alpha(t_end) = {traj_t.alpha[-1]:.12g}, drift = "
          f"{traj_t.invariant_drift():.3e}; wrote {out}")
    return 0


def cmd_indices(rest) -> int:
    p = _parser("indices")
    p.add_argument("--gamma", type=float, action="append", required=True)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out")
    args = p.parse_args(rest)

    header = ("gamma", "I0", "I1", "I2", "feas1", "feas2", "feas3",
              "witness_r1", "witness_sigma1")
    rows = []
    try:
        for g in args.gamma:
            reg = regime(g)
            feas, witness = {}, None
            for case in (1, 2, 3):
                ok, wit = feasible_window(g, case, args.grid)
                feas[case] = ok
                if ok:
                    witness = wit
            rows.append([f"{g:.6g}",
                         str("I0" in reg).lower(), str("I1" in reg).lower(),
                         str("I2" in reg).lower(),
                         str(feas[1]).lower(), str(feas[2]).lower(),
                         str(feas[3]).lower(),
                         "" if witness is None else f"{witness[0]:.6g}",
                         "" if witness is None else f"{witness[1]:.6g}"])
    except ValueError as exc:
        print(f"indices error: {exc}", file=sys.stderr)
        return 2
    widths = [max(len(header[j]), max((len(r[j]) for r in rows), default=0))
              for j in range(len(header))]
    print("  ".join(h.ljust(widths[j]) for j, h in enumerate(header)))
    for r in rows:
        print("  ".join(r[j].ljust(widths[j]) for j in range(len(header))))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    return 0


def cmd_simulate(rest) -> int:
    p = _parser("simulate")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)

    cfg_path = Path(args.config)
    if not cfg_path.is_file():
        print(f"config error: no such file {cfg_path}", file=sys.stderr)
        return 2
    cfg = parse_config(cfg_path.read_text())
    idx = resolve_index_set(cfg)
    cfg = replace(cfg, r1=idx.r1, sigma1=idx.sigma1)
    profile, pressure = cfg.build_profiles()
    record = run(cfg, profile, pressure, idx)
    write_run_record(record, args.out)
    s = record.series
    print(f"status = {record.status}; steps = {len(s['tau']) - 1}; "
          f"sup|eta| = {np.max(s['sup_eta']):.6g}; "
          f"E0+E1 = {s['E0'][-1] + s['E1'][-1]:.6g}; "
          f"entropy violations = {record.entropy_violations}")
    return 0 if record.status == "completed" else 3


def cmd_diagnose(rest) -> int:
    p = _parser("diagnose")
    p.add_argument("--run", required=True)
    p.add_argument("--out")
    args = p.parse_args(rest)

    record = read_run_record(args.run)
    out = Path(args.out) if args.out else Path(args.run)
    out.mkdir(parents=True, exist_ok=True)

    report = diagnostics.energy_report(record, record.index_set, record.pressure)
    diagnostics.write_energy_csv(out / "energy.csv", report)
    mon = diagnostics.entropy_monitor(record)
    print(f"E0 = {report.E0:.6g}  E1 = {report.E1:.6g}  "
          f"D0 = {report.D0:.6g}  D1 = {report.D1:.6g}  E_in = {report.E_in:.6g}")
    print(f"entropy monitor: min increment = {mon.min_increment:.3e}, "
          f"violations = {mon.violation_count}")

    sup_q = []
    for snap in record.snapshots:
        qf = diagnostics.q_field(snap, record.pressure)
        sup_q.append((snap.tau, qf.sup_global, qf.sup_strip))
    with open(out / "qsup.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "sup_q_global", "sup_q_strip"])
        for row in sup_q:
            w.writerow([_fmt(v) for v in row])
    print(f"sup|q| (final dump) = {sup_q[-1][1]:.6g}")

    try:
        fits = diagnostics.decay_fit(record, record.index_set)
    except (diagnostics.InsufficientWindowError, ValueError) as exc:
        print(f"decay fit skipped: {exc}")
        fits = []
    if fits:
        with open(out / "decay.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "fitted_exponent", "target", "tau_lo",
                        "tau_hi", "r_squared"])
            for f in fits:
                w.writerow([f.quantity, _fmt(f.fitted_exponent), _fmt(f.target),
                            _fmt(f.window[0]), _fmt(f.window[1]), _fmt(f.r_squared)])
        for f in fits:
            print(f"decay {f.quantity}: exponent = {f.fitted_exponent:.4f} "
                  f"(target <= -{f.target:.4g}), r^2 = {f.r_squared:.4f}")
    return 0


def _sweep_worker(task):
    text, out_dir = task
    cfg = parse_config(text)
    idx = resolve_index_set(cfg)
    cfg = replace(cfg, r1=idx.r1, sigma1=idx.sigma1)
    profile, pressure = cfg.build_profiles()
    record = run(cfg, profile, pressure, idx)
    write_run_record(record, out_dir)
    s = record.series
    return {
        "status": record.status,
        "sup_eta": float(np.max(s["sup_eta"])),
        "sup_B": float(np.max(s["sup_B"])),
        "E0": float(s["E0"][-1]), "E1": float(s["E1"][-1]),
        "D0": float(s["D0"][-1]), "D1": float(s["D1"][-1]),
        "e_in": record.e_in,
        "entropy_violations": record.entropy_violations,
    }


def _max_workers() -> int:
    env = os.environ.get("VACUUMFLOW_THREADS")
    if env:
        try:
            val = int(env)
            if val >= 1:
                return val
        except ValueError:
            pass
    return os.cpu_count() or 1


def cmd_sweep(rest) -> int:
    p = _parser("sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--vary", action="append", default=[],
                   metavar="key=v1,v2,...", required=True)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)

    base_path = Path(args.config)
    if not base_path.is_file():
        print(f"config error: no such file {base_path}", file=sys.stderr)
        return 2
    base_text = base_path.read_text()
    parse_config(base_text)  # validate the base before expanding

    axes = []
    for spec in args.vary:
        if "=" not in spec:
            raise ConfigError(f"--vary expects key=v1,v2,... got {spec!r}")
        key, _, vals = spec.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown sweep key {key!r}")
        axes.append((key, [v.strip() for v in vals.split(",") if v.strip()]))
    if not axes:
        raise ConfigError("sweep needs at least one --vary axis")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks, names = [], []
    for combo in product(*(vals for _key, vals in axes)):
        overrides = {key: combo[i] for i, (key, _vals) in enumerate(axes)}
        text = base_text + "".join(f"\n{k} = {v}" for k, v in overrides.items())
        # overriding means the base must not already pin the key
        for key in overrides:
            if any(line.split("#")[0].split("=")[0].strip() == key
                   for line in base_text.splitlines() if "=" in line.split("#")[0]):
                raise ConfigError(f"sweep key {key!r} already set in the base config")
        name = "run_" + "_".join(f"{k}={v}" for k, v in overrides.items())
        parse_config(text)  # fail fast with a helpful message
        tasks.append((text, str(out / name)))
        names.append((name, overrides))

    with ProcessPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(_sweep_worker, tasks))

    keys = [key for key, _vals in axes]
    summary_cols = ["run"] + keys + ["status", "sup_eta", "sup_B", "E0", "E1",
                                     "D0", "D1", "e_in", "entropy_violations"]
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(summary_cols)
        for (name, overrides), res in zip(names, results):
            row = [name] + [overrides[k] for k in keys]
            row += [res["status"]] + [_fmt(res[c]) if isinstance(res[c], float)
                                      else str(res[c])
                                      for c in summary_cols[len(keys) + 2:]]
            w.writerow(row)
    n_bad = sum(1 for r in results if r["status"] != "completed")
    print(f"sweep: {len(results)} runs, {n_bad} aborted; wrote {out / 'sweep.csv'}")
    return 0 if n_bad == 0 else 3


_COMMANDS = {
    "selfsim": cmd_selfsim,
    "indices": cmd_indices,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "sweep": cmd_sweep,
}


def dispatch(argv) -> int:
    """Top-level dispatcher; exit codes 0 ok, 1 usage, 2 config error,
    3 aborted run."""
    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE)
        return 0 if argv else 1
    cmd = argv[0]
    if cmd not in _COMMANDS:
        print(USAGE, file=sys.stderr)
        return 1
    try:
        return _COMMANDS[cmd](argv[1:])
    except SystemExit as exc:  # argparse
        return 0 if exc.code in (0, None) else 1
    except (ConfigError, RecordError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
