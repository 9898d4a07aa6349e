"""Self-similar scale factor: conserved invariant, linear asymptote, and
the exponential picture in rescaled time.

For delta=1, gamma=5/3, alpha(0)=1, alpha'(0)=0 the motion has the closed
form alpha(t) = sqrt(1+t^2) (equivalently cosh tau), which calibrates the
integrators; a second trajectory with alpha'(0) > 0 shows the exponential
sandwich alpha0 e^{beta1 tau} <= alpha <= alpha0 e^{beta2 tau}.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vacuumflow import (asymptote_check, integrate_alpha_t,
                        integrate_alpha_tau, rate_sandwich_violations,
                        rescale_time, write_trajectory_csv)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# closed-form calibration
traj = integrate_alpha_t(1.0, 5.0 / 3.0, 1.0, 0.0, 10.0)
exact = np.sqrt(1.0 + traj.time ** 2)
print(f"closed form sqrt(1+t^2): max rel err {np.max(np.abs(traj.alpha - exact) / exact):.2e}")
print(f"invariant drift: {traj.invariant_drift():.2e}")

tm = rescale_time(traj)
print(f"tau(1) = {tm.tau_of_t(1.0):.12f} vs asinh(1) = {np.arcsinh(1.0):.12f}")

traj_tau = integrate_alpha_tau(1.0, 5.0 / 3.0, 1.0, 0.0, 3.0)
print(f"cosh tau: max rel err "
      f"{np.max(np.abs(traj_tau.alpha - np.cosh(traj_tau.time)) / np.cosh(traj_tau.time)):.2e}")

# expanding trajectory and its pinching rates
expanding = integrate_alpha_tau(1.0, 1.5, 1.0, 2.0, 3.0)
print(f"beta1 = {expanding.beta1:g}, beta2 = {expanding.beta2:.6f}, "
      f"sandwich violations: {rate_sandwich_violations(expanding)}")

rep = asymptote_check(integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 80.0))
print(f"linear asymptote: c1 = {rep.c1:g}, c2 = {rep.c2:.6f}, "
      f"sup alpha/(c1+c2 t) = {rep.sup_ratio:.6f}")

fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
axes[0].plot(traj.time, traj.alpha, label="alpha(t)")
axes[0].plot(traj.time, exact, "--", label="sqrt(1+t^2)")
axes[0].set_xlabel("t")
axes[0].legend()
tau = expanding.time
axes[1].semilogy(tau, expanding.alpha, label="alpha(tau)")
axes[1].semilogy(tau, np.exp(expanding.beta1 * tau), "--", label="e^{beta1 tau}")
axes[1].semilogy(tau, np.exp(expanding.beta2 * tau), ":", label="e^{beta2 tau}")
axes[1].set_xlabel("tau")
axes[1].legend()
fig.tight_layout()
fig.savefig(OUT / "scale_factor.png", dpi=130)
write_trajectory_csv(OUT / "alpha_t.csv", traj)
print(f"figure -> {OUT / 'scale_factor.png'}; csv -> {OUT / 'alpha_t.csv'}")
