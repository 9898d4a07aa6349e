"""Weighted energy functionals, integrated-identity residuals and the
Eulerian reconstruction for a stored run.

Runs a short simulation, persists it in the run-record layout, reads it
back, and evaluates every diagnostic the stability theory monitors.
"""

import tempfile
from pathlib import Path

import numpy as np

from vacuumflow import (SolverConfig, compute_index_set, energy_report,
                        entropy_monitor, identity_residuals, q_field,
                        read_run_record, reconstruct_eulerian, relative_entropy,
                        run, write_run_record)
from vacuumflow.diagnostics import E_TERM_LABELS, write_energy_csv

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

cfg = SolverConfig(gamma=1.5, mu=1.0, delta=1.0, alpha0=1.0, alpha1=4.0,
                   tau_end=1.0, N=128, dtau=1e-3,
                   a_eta=2e-3, a_eta1=1e-3, a_q=5e-3,
                   r1=1.8, sigma1=0.875)
idx = compute_index_set(cfg.gamma, cfg.r1, cfg.sigma1)
profile, pressure = cfg.build_profiles()
record = run(cfg, profile, pressure, idx)

with tempfile.TemporaryDirectory() as tmp:
    write_run_record(record, tmp)
    record = read_run_record(tmp)  # everything below works off the record

report = energy_report(record, record.index_set, record.pressure)
print(f"E0 = {report.E0:.4e}  E1 = {report.E1:.4e}  "
      f"D0 = {report.D0:.4e}  D1 = {report.D1:.4e}  E_in = {report.E_in:.4e}")
print("largest energy contributions:")
for key in sorted(E_TERM_LABELS, key=lambda k: -report.terms[k])[:3]:
    print(f"  {E_TERM_LABELS[key]:<45} {report.terms[key]:.4e}")
write_energy_csv(OUT / "energy.csv", report)

mon = entropy_monitor(record)
print(f"entropy monitor: min increment {mon.min_increment:.2e}, "
      f"violations {mon.violation_count}")

snap = record.snapshots[-1]
r103, r105 = identity_residuals(snap, record.profile, record.pressure)
print(f"integrated-identity residuals at probes (0.25, 0.5, 0.75): "
      f"{r103:.2e}, {r105:.2e}")

fields = reconstruct_eulerian(snap, record.profile, record.pressure)
print(f"Eulerian check: radius {fields.r[-1]:.4f}, central density "
      f"{fields.rho[0]:.4e}, mass error "
      f"{abs(fields.mass_eulerian - fields.mass_lagrangian):.2e}")

rel = relative_entropy(snap)
print(f"relative-entropy norms: |H_x| = {rel.h_x_norm:.3e}, "
      f"|H_xtau| = {rel.h_xtau_norm:.3e}, comparison ratio "
      f"{rel.comparison_ratio:.3f}")

qf = q_field(snap, record.pressure)
print(f"pressure perturbation: sup|q| global {qf.sup_global:.4g}, "
      f"outer strip {qf.sup_strip:.4g}")
print(f"csv -> {OUT / 'energy.csv'}")
