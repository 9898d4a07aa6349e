"""Functionals, norms and monitors evaluated on perturbation states.

Everything here is a pure function of immutable snapshots/series: the
weighted energy and dissipation functionals with their alpha-power weights,
the interior cutoff, the relative pressure field q, the nodewise entropy
monitor, decay-exponent fits, and the relative-entropy comparison norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .indices import IndexSet
from .kinematics import d_dx, d2_dx2, geometry, nodal_strain, trapezoid, volume_pow


class InsufficientWindowError(RuntimeError):
    """Run too short for a meaningful tail fit."""


# ---------------------------------------------------------------------------
# interior cutoff

def chi_cutoff(x):
    """C^1 cutoff: 1 on [0, 1/2], 0 on [3/4, 1], cubic blend between.

    The blend's slope reaches -6 at its steepest, inside the admissible
    [-8, 0] range.
    """
    x = np.asarray(x, dtype=float)
    t = np.clip((x - 0.5) / 0.25, 0.0, 1.0)
    out = 1.0 - t * t * (3.0 - 2.0 * t)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# pointwise reconstructions shared with the solver

def rhs2_pointwise(x, h, p_bar, eta, v, alpha, mu, gamma):
    """Exact zeta_tau from the transport line of the evolution system:
    -gamma p_bar J^{g-1} k^{2g} (v + x v_x) - 2 gamma p_bar J^g k^{2g-1} v
    + (4/3) mu (g-1) alpha^{3g-1} (J k^2)^g B^2."""
    k, eta_x, J = geometry(x, eta, h)
    v_x = d_dx(v, h)
    B = nodal_strain(x, k, eta_x, J, v, v_x)
    B[-1] = 0.0
    Pi = volume_pow(J, k, gamma)
    transport = (gamma * p_bar * J ** (gamma - 1.0) * k ** (2.0 * gamma) * (v + x * v_x)
                 + 2.0 * gamma * p_bar * J ** gamma * k ** (2.0 * gamma - 1.0) * v)
    source = (4.0 / 3.0) * mu * (gamma - 1.0) * alpha ** (3.0 * gamma - 1.0) * Pi * B * B
    return -transport + source


def entropy_Z(x, h, p_bar, eta, zeta, gamma):
    """Nodewise thermodynamic monitor Z = (1+q)[(1+eta)^2(1+eta+x eta_x)]^g.

    Uses the division-free split Z = zeta/p_bar + (J k^2)^g where p_bar > 0
    and falls back to the geometric factor alone on vacuum nodes (where
    zeta = 0 and q carries no information).  Returns (Z, valid).
    """
    k, _eta_x, J = geometry(x, eta, h)
    Pi = volume_pow(J, k, gamma)
    valid = p_bar > 0.0
    Z = Pi.copy()
    Z[valid] = zeta[valid] / p_bar[valid] + Pi[valid]
    return Z, valid


# ---------------------------------------------------------------------------
# relative pressure field

@dataclass(frozen=True)
class QField:
    q: np.ndarray          # nan on masked nodes
    valid: np.ndarray
    sup_strip: float       # sup |q| over valid nodes with x >= 1/2
    sup_global: float      # sup |q| over all valid nodes


def q_field(state, pressure, eps0: float = 1e-6) -> QField:
    """Invert zeta = p_bar q (J k^2)^g for q where the background pressure
    is above the noise threshold eps0 * p_bar(0); masked (nan) beyond."""
    x = state.x
    h = x[1] - x[0]
    p_bar = pressure.p_bar
    k, _eta_x, J = geometry(x, state.eta, h)
    if np.min(k) <= 0.0 or np.min(J) <= 0.0:
        raise ValueError("degenerate state: 1+eta or 1+eta+x eta_x not positive")
    Pi = volume_pow(J, k, state_gamma(state))
    valid = p_bar > eps0 * p_bar[0]
    q = np.full_like(x, np.nan)
    q[valid] = state.zeta[valid] / (p_bar[valid] * Pi[valid])
    strip = valid & (x >= 0.5)
    sup_strip = float(np.max(np.abs(q[strip]))) if strip.any() else float("nan")
    sup_global = float(np.max(np.abs(q[valid]))) if valid.any() else float("nan")
    return QField(q=q, valid=valid, sup_strip=sup_strip, sup_global=sup_global)


def state_gamma(state) -> float:
    """Adiabatic exponent attached to a state (set by the solver)."""
    g = getattr(state, "gamma", None)
    if g is None:
        raise ValueError("state does not carry gamma")
    return float(g)


# ---------------------------------------------------------------------------
# energy and dissipation functionals

E_TERM_LABELS = {
    "e0_1": "alpha^r1*norm(x2 rho12 eta_tau)^2",
    "e0_2": "alpha^-l1*norm(x zeta)^2",
    "e0_3": "alpha^r2*norm(x2 rho12 eta_tautau)^2",
    "e0_4": "alpha^-l2*norm(x zeta_tau)^2",
    "e0_5": "norm(x2 rho12 eta)^2",
    "e1_1": "alpha^-l3*norm(chi12 zeta)^2",
    "e1_2": "alpha^-r4*norm(chi12 x rho12 eta_tautau)^2",
    "e1_3": "alpha^-l4*norm(chi12 zeta_tau)^2",
}

D_TERM_LABELS = {
    "d0_1": "int alpha^(r1-1) alpha_tau norm(x2 rho12 eta_tau)^2",
    "d0_2": "int alpha^(r1+2) norm(x[(1+eta)x eta_xtau - x eta_x eta_tau])^2",
    "d0_3": "int alpha^(r2-1) alpha_tau norm(x2 rho12 eta_tautau)^2",
    "d0_4": "int alpha^(r2+2) norm(x[(1+eta)x eta_xtautau - x eta_x eta_tautau])^2",
    "d0_5": "int alpha^(-l1-1) alpha_tau norm(x zeta)^2",
    "d0_6": "int alpha^(-l2-1) alpha_tau norm(x zeta_tau)^2",
    "d1_1": "int alpha^(-l3-1) alpha_tau norm(chi12 zeta)^2",
    "d1_2": "int alpha^r3 (norm(chi12 eta_tau)^2 + norm(chi12 x eta_xtau)^2)",
    "d1_3": "int alpha^(-r4-1) alpha_tau norm(chi12 x rho12 eta_tautau)^2",
    "d1_4": "int alpha^(2-r4) (norm(chi12 eta_tautau)^2 + norm(chi12 x eta_xtautau)^2)",
    "d1_5": "int alpha^(-l4-1) alpha_tau norm(chi12 zeta_tau)^2",
}

E0_KEYS = ("e0_1", "e0_2", "e0_3", "e0_4", "e0_5")
E1_KEYS = ("e1_1", "e1_2", "e1_3")
D0_KEYS = ("d0_1", "d0_2", "d0_3", "d0_4", "d0_5", "d0_6")
D1_KEYS = ("d1_1", "d1_2", "d1_3", "d1_4", "d1_5")


def instantaneous_energy_terms(x, h, rho_bar, eta, v, zeta, accel, zeta_tau,
                               alpha, alpha_tau, idx: IndexSet):
    """Instantaneous values of the 8 energy terms and 11 dissipation
    integrands at one time slice."""
    chi = chi_cutoff(x)
    k, eta_x, J = geometry(x, eta, h)
    v_x = d_dx(v, h)
    a_x = d_dx(accel, h)
    x2, x4 = x * x, (x * x) ** 2

    n_v = trapezoid(x4 * rho_bar * v * v, h)
    n_a = trapezoid(x4 * rho_bar * accel * accel, h)
    n_eta = trapezoid(x4 * rho_bar * eta * eta, h)
    n_z = trapezoid(x2 * zeta * zeta, h)
    n_zt = trapezoid(x2 * zeta_tau * zeta_tau, h)
    comb_v = x * (k * x * v_x - x * eta_x * v)
    comb_a = x * (k * x * a_x - x * eta_x * accel)
    n_comb_v = trapezoid(comb_v * comb_v, h)
    n_comb_a = trapezoid(comb_a * comb_a, h)
    nc_z = trapezoid(chi * zeta * zeta, h)
    nc_zt = trapezoid(chi * zeta_tau * zeta_tau, h)
    nc_a_rho = trapezoid(chi * x2 * rho_bar * accel * accel, h)
    nc_v = trapezoid(chi * v * v, h)
    nc_xvx = trapezoid(chi * x2 * v_x * v_x, h)
    nc_a = trapezoid(chi * accel * accel, h)
    nc_xax = trapezoid(chi * x2 * a_x * a_x, h)

    al = alpha
    e_terms = {
        "e0_1": al ** idx.r1 * n_v,
        "e0_2": al ** (-idx.l1) * n_z,
        "e0_3": al ** idx.r2 * n_a,
        "e0_4": al ** (-idx.l2) * n_zt,
        "e0_5": n_eta,
        "e1_1": al ** (-idx.l3) * nc_z,
        "e1_2": al ** (-idx.r4) * nc_a_rho,
        "e1_3": al ** (-idx.l4) * nc_zt,
    }
    d_integrands = {
        "d0_1": al ** (idx.r1 - 1.0) * alpha_tau * n_v,
        "d0_2": al ** (idx.r1 + 2.0) * n_comb_v,
        "d0_3": al ** (idx.r2 - 1.0) * alpha_tau * n_a,
        "d0_4": al ** (idx.r2 + 2.0) * n_comb_a,
        "d0_5": al ** (-idx.l1 - 1.0) * alpha_tau * n_z,
        "d0_6": al ** (-idx.l2 - 1.0) * alpha_tau * n_zt,
        "d1_1": al ** (-idx.l3 - 1.0) * alpha_tau * nc_z,
        "d1_2": al ** idx.r3 * (nc_v + nc_xvx),
        "d1_3": al ** (-idx.r4 - 1.0) * alpha_tau * nc_a_rho,
        "d1_4": al ** (2.0 - idx.r4) * (nc_a + nc_xax),
        "d1_5": al ** (-idx.l4 - 1.0) * alpha_tau * nc_zt,
    }
    return e_terms, d_integrands


@dataclass
class EnergyReport:
    E0: float
    E1: float
    D0: float
    D1: float
    E_in: float
    terms: dict = field(default_factory=dict)   # per-term sup (E) / integral (D)
    table: list = field(default_factory=list)   # per-dump instantaneous rows


def energy_report(run, index_set: IndexSet, pressure) -> EnergyReport:
    """Assemble E0/E1 as running suprema and D0/D1 as trapezoidal
    tau-integrals over the run's snapshots."""
    if not index_set.case1:
        raise ValueError("index set violates the base constraint chain; "
                         "energy weights are undefined")
    profile = run.profile
    x = profile.grid
    h = x[1] - x[0]
    mu, gamma = run.config.mu, run.config.gamma

    taus, rows = [], []
    sup_terms = {key: 0.0 for key in (*E0_KEYS, *E1_KEYS)}
    d_series = {key: [] for key in (*D0_KEYS, *D1_KEYS)}
    for snap in run.snapshots:
        if snap.accel is None:
            raise ValueError("snapshot lacks an acceleration estimate")
        zeta_tau = rhs2_pointwise(x, h, pressure.p_bar, snap.eta, snap.v,
                                  snap.alpha, mu, gamma)
        e_terms, d_ints = instantaneous_energy_terms(
            x, h, profile.rho_bar, snap.eta, snap.v, snap.zeta, snap.accel,
            zeta_tau, snap.alpha, snap.alpha_tau, index_set)
        taus.append(snap.tau)
        row = {"tau": snap.tau}
        row.update(e_terms)
        row.update(d_ints)
        rows.append(row)
        for key, val in e_terms.items():
            sup_terms[key] = max(sup_terms[key], val)
        for key, val in d_ints.items():
            d_series[key].append(val)

    taus = np.asarray(taus)
    terms = dict(sup_terms)
    for key, vals in d_series.items():
        vals = np.asarray(vals)
        terms[key] = float(np.trapezoid(vals, taus)) if taus.size > 1 else 0.0

    report = EnergyReport(
        E0=sum(terms[k] for k in E0_KEYS),
        E1=sum(terms[k] for k in E1_KEYS),
        D0=sum(terms[k] for k in D0_KEYS),
        D1=sum(terms[k] for k in D1_KEYS),
        E_in=float(getattr(run, "e_in", 0.0)),
        terms=terms,
        table=rows,
    )
    return report


def write_energy_csv(path, report: EnergyReport) -> None:
    """One row per dump time; term columns labeled by their weight formula."""
    import csv

    keys = [*E0_KEYS, *E1_KEYS, *D0_KEYS, *D1_KEYS]
    labels = {**E_TERM_LABELS, **D_TERM_LABELS}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau"] + [labels[k] for k in keys])
        for row in report.table:
            w.writerow([f"{row['tau']:.17g}"] + [f"{row[k]:.17g}" for k in keys])


# ---------------------------------------------------------------------------
# entropy monitor

@dataclass(frozen=True)
class EntropyMonitor:
    min_increment: float
    violation_count: int


def entropy_monitor(run, tol_scale: float = 1e-10) -> EntropyMonitor:
    """Smallest nodewise increment of the monitor Z over the run and the
    number of increments below -tol_scale*(1+|Z|).

    Prefers the per-step series recorded by the solver; falls back to
    consecutive snapshots.
    """
    series = getattr(run, "series", None)
    if series is not None and "Z_min_increment" in series and len(series["Z_min_increment"]) > 1:
        incs = np.asarray(series["Z_min_increment"])[1:]
        count = int(getattr(run, "entropy_violations", 0))
        return EntropyMonitor(min_increment=float(np.min(incs)), violation_count=count)

    snaps = run.snapshots
    if len(snaps) < 2:
        raise ValueError("need consecutive snapshots for the entropy monitor")
    profile, pressure = run.profile, run.pressure
    x = profile.grid
    h = x[1] - x[0]
    gamma = run.config.gamma
    worst, count = np.inf, 0
    Z_prev, valid = entropy_Z(x, h, pressure.p_bar, snaps[0].eta, snaps[0].zeta, gamma)
    for snap in snaps[1:]:
        Z, valid = entropy_Z(x, h, pressure.p_bar, snap.eta, snap.zeta, gamma)
        dZ = (Z - Z_prev)[valid]
        worst = min(worst, float(np.min(dZ)) if dZ.size else 0.0)
        count += int(np.count_nonzero(dZ < -tol_scale * (1.0 + np.abs(Z[valid]))))
        Z_prev = Z
    return EntropyMonitor(min_increment=worst, violation_count=count)


# ---------------------------------------------------------------------------
# decay fits

@dataclass(frozen=True)
class DecayFit:
    quantity: str
    fitted_exponent: float
    target: float
    window: tuple
    r_squared: float


_FIT_COLUMNS = (("eta_tau", "sup_etatau"), ("x_eta_x_tau", "sup_xetaxtau"),
                ("B", "sup_B"))


def decay_fit(run, index_set: IndexSet, window_frac: float = 0.6):
    """Least-squares slope of log sup|.| against log alpha on the tail
    window (last ``window_frac`` of the tau-samples) for eta_tau, x eta_xtau
    and the viscous strain."""
    series = run.series
    alpha = np.asarray(series["alpha"])
    tau = np.asarray(series["tau"])
    if np.log(alpha[-1] / alpha[0]) < 2.0:
        raise InsufficientWindowError("run covers fewer than two e-foldings of alpha")
    start = int((1.0 - window_frac) * (tau.size - 1))
    sel = slice(start, None)
    fits = []
    for name, col in _FIT_COLUMNS:
        sup = np.asarray(series[col])[sel]
        if np.any(sup <= 0.0):
            raise ValueError(f"decay fit undefined: {col} vanishes on the window")
        la = np.log(alpha[sel])
        ls = np.log(sup)
        slope, intercept = np.polyfit(la, ls, 1)
        resid = ls - (slope * la + intercept)
        ss_tot = float(np.sum((ls - ls.mean()) ** 2))
        r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
        target = 1.0 if name == "B" else index_set.sigma1
        fits.append(DecayFit(quantity=name, fitted_exponent=float(slope),
                             target=target, window=(float(tau[sel][0]), float(tau[-1])),
                             r_squared=r2))
    return fits


# ---------------------------------------------------------------------------
# relative entropy

@dataclass(frozen=True)
class RelativeEntropyReport:
    h_values: np.ndarray
    h_x_norm: float
    h_xtau_norm: float
    comparison_ratio: float


def relative_entropy(state) -> RelativeEntropyReport:
    """log[(1+eta)^2(1+eta+x eta_x)] with its x- and mixed-derivative L2
    norms, plus the comparison ratio int(eta_x^2 + x^2 eta_xx^2) / int(H_x^2)
    that the displacement-control inequality bounds."""
    x = state.x
    h = x[1] - x[0]
    k, eta_x, J = geometry(x, state.eta, h)
    if np.min(k) <= 0.0 or np.min(J) <= 0.0:
        raise ValueError("degenerate state")
    H = 2.0 * np.log(k) + np.log(J)
    H_x = d_dx(H, h)
    h_x_norm = np.sqrt(trapezoid(H_x * H_x, h))

    v = state.v
    v_x = d_dx(v, h)
    H_tau = 2.0 * v / k + (v + x * v_x) / J
    H_xtau = d_dx(H_tau, h)
    h_xtau_norm = np.sqrt(trapezoid(H_xtau * H_xtau, h))

    eta_xx = d2_dx2(state.eta, h)
    num = trapezoid(eta_x * eta_x + x * x * eta_xx * eta_xx, h)
    den = trapezoid(H_x * H_x, h)
    ratio = num / den if den > 0.0 else (0.0 if num == 0.0 else np.inf)
    return RelativeEntropyReport(h_values=H, h_x_norm=float(h_x_norm),
                                 h_xtau_norm=float(h_xtau_norm),
                                 comparison_ratio=float(ratio))
