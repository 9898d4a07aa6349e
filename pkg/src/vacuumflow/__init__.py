"""Free-boundary expanding-gas perturbation toolkit.

Public surface: background profiles, self-similar scale-factor dynamics,
exponent/regime bookkeeping, the semi-implicit perturbation solver and its
diagnostics, and the config/record/CLI layer.
"""

from .profiles import (DensityProfile, PressureProfile, EntropyProfile,
                       build_density_profile, pressure_profile, entropy_profile,
                       write_profile_csv)
from .selfsim import (AlphaTrajectory, TimeMap, AsymptoteReport,
                      integrate_alpha_t, integrate_alpha_tau, rescale_time,
                      asymptote_check, rate_sandwich_violations,
                      conserved_invariant, advance_alpha_tau,
                      write_trajectory_csv)
from .indices import IndexSet, compute_index_set, regime, feasible_window
from .solver import (SolverConfig, PerturbationState, InitialData, RunRecord,
                     initialize_run, compute_B, step, run, identity_residuals,
                     reconstruct_eulerian, apply_viscous_operator,
                     DegenerateStateError, LinearSolveError, NanStateError)
from .diagnostics import (chi_cutoff, energy_report, EnergyReport, q_field,
                          QField, entropy_monitor, EntropyMonitor, decay_fit,
                          DecayFit, relative_entropy, RelativeEntropyReport,
                          rhs2_pointwise, entropy_Z)
from .cli import (parse_config, emit_config, write_run_record, read_run_record,
                  dispatch, ConfigError, RecordError)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
