"""Scale-factor dynamics of the expanding self-similar solution.

In physical time the scale factor solves alpha^{3g-2} alpha'' = delta and
conserves (alpha')^2 + 2 delta alpha^{3-3g}/(3g-3).  In the rescaled time
tau = int_0^t ds/alpha(s) the same motion reads
alpha^{3g-4} alpha_tautau - alpha^{3g-5} alpha_tau^2 = delta, and for
alpha1 > 0 the trajectory is pinched between exponentials with rates
beta1 = alpha1 and beta2 = sqrt(alpha1^2 + 2 delta alpha0^{3-3g}/(3g-3)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

GAMMA_MIN = 1.01  # keeps 3*gamma - 3 safely away from 0


class IntegrationError(RuntimeError):
    """Adaptive integration failed its invariant-drift or step-size contract."""


class InsufficientHorizonError(RuntimeError):
    """Trajectory too short for a converged tail estimate."""


@dataclass(frozen=True)
class AlphaTrajectory:
    coord: str          # "t" or "tau"
    delta: float
    gamma: float
    alpha0: float
    alpha1: float       # initial d(alpha)/dt even for tau trajectories
    time: np.ndarray
    alpha: np.ndarray
    alpha_prime: np.ndarray  # derivative in the trajectory's own coordinate
    invariant0: float
    beta1: float | None = None
    beta2: float | None = None
    aux_tau: np.ndarray | None = None  # tau(t) samples for t-trajectories

    def invariant_values(self) -> np.ndarray:
        """Conserved combination at every sample (same formula both
        coordinates; in tau the role of alpha' is played by alpha_tau/alpha)."""
        g3 = 3.0 * self.gamma - 3.0
        if self.coord == "t":
            ap = self.alpha_prime
        else:
            ap = self.alpha_prime / self.alpha
        return ap ** 2 + (2.0 * self.delta / g3) * self.alpha ** (-g3)

    def invariant_drift(self) -> float:
        vals = self.invariant_values()
        return float(np.max(np.abs(vals - self.invariant0)) / abs(self.invariant0))


def conserved_invariant(delta, gamma, alpha0, alpha1) -> float:
    g3 = 3.0 * gamma - 3.0
    return alpha1 ** 2 + (2.0 * delta / g3) * alpha0 ** (-g3)


def _validate(delta, gamma, alpha0, horizon, tol):
    for name, val in (("delta", delta), ("gamma", gamma), ("alpha0", alpha0),
                      ("horizon", horizon), ("tol", tol)):
        if not np.isfinite(val):
            raise ValueError(f"{name} must be finite")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if gamma < GAMMA_MIN:
        raise ValueError(f"gamma must be >= {GAMMA_MIN}")
    if alpha0 <= 0.0:
        raise ValueError("alpha0 must be positive")
    if horizon <= 0.0:
        raise ValueError("integration horizon must be positive")
    if tol <= 0.0:
        raise ValueError("tol must be positive")


def _solve(rhs, y0, horizon, tol, n_samples):
    rtol = min(1e-10, tol * 1e-2)
    sol = solve_ivp(rhs, (0.0, horizon), y0, method="RK45",
                    rtol=rtol, atol=rtol * 1e-3, dense_output=True,
                    t_eval=np.linspace(0.0, horizon, n_samples))
    if not sol.success:
        raise IntegrationError(f"adaptive step failed: {sol.message}")
    return sol


def integrate_alpha_t(delta, gamma, alpha0, alpha1, t_end,
                      tol: float = 1e-10, n_samples: int = 2001) -> AlphaTrajectory:
    """Integrate alpha'' = delta * alpha^{2-3g} in physical time.

    The rescaled time tau(t) is carried as an extra quadrature component so
    rescale_time can reuse it at integrator accuracy.
    """
    _validate(delta, gamma, alpha0, t_end, tol)
    p = 2.0 - 3.0 * gamma

    def rhs(_t, y):
        a, ap, _tau = y
        return (ap, delta * a ** p, 1.0 / a)

    sol = _solve(rhs, [alpha0, alpha1, 0.0], t_end, tol, n_samples)
    a, ap, tau = sol.y
    if np.any(a <= 0.0):
        raise IntegrationError("alpha lost positivity")
    traj = AlphaTrajectory(coord="t", delta=delta, gamma=gamma, alpha0=alpha0,
                           alpha1=alpha1, time=sol.t, alpha=a, alpha_prime=ap,
                           invariant0=conserved_invariant(delta, gamma, alpha0, alpha1),
                           aux_tau=tau)
    _check_drift(traj, tol)
    return traj


def integrate_alpha_tau(delta, gamma, alpha0, alpha1, tau_end,
                        tol: float = 1e-10, n_samples: int = 2001) -> AlphaTrajectory:
    """Integrate the rescaled-time form; alpha_tau(0) = alpha0*alpha1."""
    _validate(delta, gamma, alpha0, tau_end, tol)
    p = 4.0 - 3.0 * gamma

    def rhs(_tau, y):
        a, ap = y
        return (ap, delta * a ** p + ap * ap / a)

    sol = _solve(rhs, [alpha0, alpha0 * alpha1], tau_end, tol, n_samples)
    a, ap = sol.y
    if np.any(a <= 0.0):
        raise IntegrationError("alpha lost positivity")
    inv0 = conserved_invariant(delta, gamma, alpha0, alpha1)
    beta1 = beta2 = None
    if alpha1 > 0.0:
        beta1, beta2 = float(alpha1), float(np.sqrt(inv0))
    traj = AlphaTrajectory(coord="tau", delta=delta, gamma=gamma, alpha0=alpha0,
                           alpha1=alpha1, time=sol.t, alpha=a, alpha_prime=ap,
                           invariant0=inv0, beta1=beta1, beta2=beta2)
    _check_drift(traj, tol)
    return traj


def _check_drift(traj: AlphaTrajectory, tol: float) -> None:
    drift = traj.invariant_drift()
    if drift > 10.0 * tol:
        raise IntegrationError(
            f"invariant drift {drift:.3e} exceeds 10*tol = {10 * tol:.3e}")


def advance_alpha_tau(alpha, alpha_tau, dtau, delta, gamma):
    """One classical RK4 step of the rescaled-time scale-factor system."""
    p = 4.0 - 3.0 * gamma

    def f(a, ap):
        return ap, delta * a ** p + ap * ap / a

    k1 = f(alpha, alpha_tau)
    k2 = f(alpha + 0.5 * dtau * k1[0], alpha_tau + 0.5 * dtau * k1[1])
    k3 = f(alpha + 0.5 * dtau * k2[0], alpha_tau + 0.5 * dtau * k2[1])
    k4 = f(alpha + dtau * k3[0], alpha_tau + dtau * k3[1])
    a = alpha + dtau * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
    ap = alpha_tau + dtau * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
    return a, ap


@dataclass(frozen=True)
class TimeMap:
    """Monotone map between physical time t and rescaled time tau."""
    t: np.ndarray
    tau: np.ndarray

    def tau_of_t(self, t):
        return PchipInterpolator(self.t, self.tau)(t)

    def t_of_tau(self, tau):
        return PchipInterpolator(self.tau, self.t)(tau)


def rescale_time(traj: AlphaTrajectory) -> TimeMap:
    """tau(t) = int_0^t ds/alpha(s) with the inverse by monotone interpolation.

    Uses the trajectory's own quadrature component when present; otherwise
    integrates a monotone cubic interpolant of 1/alpha exactly piecewise.
    """
    if traj.coord != "t":
        raise ValueError("rescale_time expects a t-coordinate trajectory")
    t = traj.time
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("time samples must be strictly increasing")
    if np.any(traj.alpha <= 0.0):
        raise ValueError("alpha must stay positive")
    if traj.aux_tau is not None:
        tau = traj.aux_tau
    else:
        anti = PchipInterpolator(t, 1.0 / traj.alpha).antiderivative()
        tau = anti(t) - anti(t[0])
    if np.any(np.diff(tau) <= 0.0):
        raise ValueError("computed tau is not strictly increasing")
    return TimeMap(t=t, tau=tau)


@dataclass(frozen=True)
class AsymptoteReport:
    c1: float
    c2: float
    sup_ratio: float


def asymptote_check(traj: AlphaTrajectory, slope_tol: float = 0.02) -> AsymptoteReport:
    """Fit the linear asymptote alpha ~ c1 + c2 t and report the sampled
    sup of alpha/(c1 + c2 t).

    c2 is the tail slope (last alpha' sample, converging to sqrt(invariant0));
    c1 = alpha0 is the tight intercept because alpha' increases monotonically.
    The t=0 sample is excluded, where the ratio is 1 by construction.
    """
    if traj.coord != "t":
        raise ValueError("asymptote_check expects a t-coordinate trajectory")
    ap = traj.alpha_prime
    c2 = float(ap[-1])
    if c2 <= 0.0:
        raise InsufficientHorizonError("tail slope not positive yet")
    i80 = int(0.8 * (ap.size - 1))
    if abs(ap[-1] - ap[i80]) > slope_tol * abs(ap[-1]):
        raise InsufficientHorizonError(
            "tail slope not converged; extend t_end")
    c1 = float(traj.alpha0)
    sel = traj.time > 0.0
    ratio = traj.alpha[sel] / (c1 + c2 * traj.time[sel])
    return AsymptoteReport(c1=c1, c2=c2, sup_ratio=float(np.max(ratio)))


def rate_sandwich_violations(traj: AlphaTrajectory, rel_slack: float = 1e-9) -> int:
    """Count sample-wise violations of the exponential pinching
    alpha0 e^{beta1 tau} <= alpha <= alpha0 e^{beta2 tau} and
    beta1 alpha <= alpha_tau <= beta2 alpha (tau trajectories, alpha1 > 0)."""
    if traj.coord != "tau" or traj.beta1 is None:
        raise ValueError("rate sandwich applies to tau trajectories with alpha1 > 0")
    tau, a, ap = traj.time, traj.alpha, traj.alpha_prime
    lo = traj.alpha0 * np.exp(traj.beta1 * tau)
    hi = traj.alpha0 * np.exp(traj.beta2 * tau)
    slack = rel_slack * a
    bad = (a < lo - slack) | (a > hi + slack)
    slack_p = rel_slack * np.maximum(np.abs(ap), traj.beta2 * a)
    bad |= (ap < traj.beta1 * a - slack_p) | (ap > traj.beta2 * a + slack_p)
    return int(np.count_nonzero(bad))


def write_trajectory_csv(path, traj: AlphaTrajectory) -> None:
    """Export columns time, alpha, alpha_prime, invariant."""
    import csv

    inv = traj.invariant_values()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "alpha", "alpha_prime", "invariant"])
        for i in range(traj.time.size):
            w.writerow([f"{traj.time[i]:.17g}", f"{traj.alpha[i]:.17g}",
                        f"{traj.alpha_prime[i]:.17g}", f"{inv[i]:.17g}"])
