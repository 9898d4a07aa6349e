"""Reference profiles of the expanding gas ball on the unit mass-label grid.

The background density is a one-parameter vacuum family
rho_bar(x) = scale * (1 - x)^varrho; the background pressure follows from
hydrostatic-type balance p_bar_x = -delta * x * rho_bar with p_bar(1) = 0,
and the background entropy is c_nu * log(p_bar / rho_bar^gamma) + s_bar.
Profiles are immutable after construction and safe to share between runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .kinematics import make_grid, trapezoid

#: stand-in for -infinity in entropy columns; keeps CSV output finite
ENTROPY_SENTINEL = -1.0e300

PROFILE_KINDS = ("power", "constant", "entropy_bounded")


@dataclass(frozen=True)
class DensityProfile:
    kind: str
    varrho: float
    scale: float
    grid: np.ndarray
    rho_bar: np.ndarray
    mass: float

    @property
    def n(self) -> int:
        return self.grid.size - 1

    def boundary_band_ok(self, band: float = 2.0) -> bool:
        """Check rho_bar stays within a factor ``band`` of scale*(1-x)^varrho
        on the outer decade x >= 0.9 (vacuum-degeneracy proxy)."""
        x = self.grid
        sel = (x >= 0.9) & (x < 1.0)
        model = self.scale * (1.0 - x[sel]) ** self.varrho
        ratio = self.rho_bar[sel] / model
        return bool(np.all((ratio >= 1.0 / band) & (ratio <= band)))


@dataclass(frozen=True)
class PressureProfile:
    delta: float
    p_bar: np.ndarray


@dataclass(frozen=True)
class EntropyProfile:
    c_nu: float
    s_bar: float
    s: np.ndarray
    valid: np.ndarray
    bounded: bool


def build_density_profile(kind: str, varrho: float, scale: float,
                          gamma: float, n: int) -> DensityProfile:
    """Construct rho_bar on a uniform grid of n intervals.

    kind="power" uses the given vacuum exponent varrho, "constant" forces
    varrho=0 (density jumps to vacuum at x=1), and "entropy_bounded" forces
    varrho = 1/(gamma-1), the exponent that balances p_bar against
    rho_bar^gamma at the vacuum boundary.
    """
    if kind not in PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}")
    if not (isinstance(n, (int, np.integer)) and n >= 8):
        raise ValueError("n must be an integer >= 8")
    for name, val in (("scale", scale), ("gamma", gamma)):
        if not np.isfinite(val):
            raise ValueError(f"{name} must be finite")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")

    if kind == "constant":
        varrho = 0.0
    elif kind == "entropy_bounded":
        varrho = 1.0 / (gamma - 1.0)
    else:
        if not np.isfinite(varrho) or varrho < 0.0:
            raise ValueError("varrho must be finite and >= 0")

    x = make_grid(n)
    rho = scale * (1.0 - x) ** varrho
    mass = trapezoid(x * x * rho, x[1] - x[0])
    return DensityProfile(kind=kind, varrho=float(varrho), scale=float(scale),
                          grid=x, rho_bar=rho, mass=mass)


def pressure_profile(profile: DensityProfile, delta: float) -> PressureProfile:
    """p_bar(x) = delta * int_x^1 s rho_bar(s) ds by composite trapezoid,
    accumulated from the vacuum boundary inward so p_bar(1) = 0 exactly."""
    if not np.isfinite(delta) or delta <= 0.0:
        raise ValueError("delta must be positive")
    x = profile.grid
    h = x[1] - x[0]
    g = x * profile.rho_bar
    seg = 0.5 * h * (g[:-1] + g[1:])
    p = np.zeros_like(x)
    p[:-1] = delta * np.cumsum(seg[::-1])[::-1]
    return PressureProfile(delta=float(delta), p_bar=p)


def entropy_profile(profile: DensityProfile, pressure: PressureProfile,
                    c_nu: float, s_bar: float, gamma: float) -> EntropyProfile:
    """Nodewise background entropy with a sentinel on degenerate nodes.

    ``bounded`` reports whether the one-sided limit at the vacuum boundary is
    finite, estimated from the slope of s against log(1-x) on a window just
    inside the boundary (clear of the last few nodes, where the tail
    quadrature has O(1) relative error).
    """
    if not np.isfinite(c_nu) or c_nu <= 0.0:
        raise ValueError("c_nu must be positive")
    x = profile.grid
    h = x[1] - x[0]
    rho, p = profile.rho_bar, pressure.p_bar
    valid = (rho > 0.0) & (p > 0.0)
    s = np.full_like(x, ENTROPY_SENTINEL)
    s[valid] = c_nu * np.log(p[valid] / rho[valid] ** gamma) + s_bar

    one_minus = 1.0 - x
    lo, hi = 4.0 * h, max(12.0 * h, 0.25)
    win = valid & (one_minus >= lo) & (one_minus <= hi)
    if np.count_nonzero(win) >= 3:
        slope = np.polyfit(np.log(one_minus[win]), s[win], 1)[0]
        bounded = bool(abs(slope) < 0.25 * c_nu)
    else:
        bounded = False
    return EntropyProfile(c_nu=float(c_nu), s_bar=float(s_bar), s=s,
                          valid=valid, bounded=bounded)


def write_profile_csv(path, profile: DensityProfile, pressure: PressureProfile,
                      entropy: EntropyProfile) -> None:
    """Export columns x, rho_bar, p_bar, s (header row mandatory)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "rho_bar", "p_bar", "s"])
        for i in range(profile.grid.size):
            w.writerow([f"{profile.grid[i]:.17g}", f"{profile.rho_bar[i]:.17g}",
                        f"{pressure.p_bar[i]:.17g}", f"{entropy.s[i]:.17g}"])
