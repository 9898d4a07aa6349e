"""Exponent bookkeeping for the weighted energy functionals.

A pair (r1, sigma1) generates the full tuple of alpha-power exponents by
exact arithmetic; three nested strict constraint chains decide which energy
machinery applies, and their feasibility as gamma varies reproduces the
adiabatic-index windows I0 = (7/6, inf), I1 = (7/6, 7/3), I2 = (11/9, 5/3)
by brute-force scanning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

I0 = (7.0 / 6.0, np.inf)
I1 = (7.0 / 6.0, 7.0 / 3.0)
I2 = (11.0 / 9.0, 5.0 / 3.0)

# brute-force scan rectangle; superset of admissible pairs (r1 < 2, 2*sigma1 < r1)
SCAN_R1_MAX = 2.5
SCAN_SIGMA1_MAX = 1.25


@dataclass(frozen=True)
class IndexSet:
    gamma: float
    r1: float
    sigma1: float
    l1: float
    r2: float
    l2: float
    l3: float
    r3: float
    r4: float
    l4: float
    frak_a: float
    frak_b: float
    case1: bool
    case2: bool
    case3: bool


def _chain_holds(gamma: float, r1: float, sigma1: float, lower_base: float) -> bool:
    # lower_base - r1 < 2*sigma1 < r1 < min(6*gamma - 6, 2), all strict
    m = min(6.0 * gamma - 6.0, 2.0)
    s = 2.0 * sigma1
    return (max(lower_base - r1, 2.0 - r1) < s) and (s < r1) and (r1 < m)


def compute_index_set(gamma: float, r1: float, sigma1: float) -> IndexSet:
    """Fill the derived exponents and the three constraint-case flags."""
    if not np.isfinite(gamma) or gamma <= 1.0:
        raise ValueError("gamma must be finite and exceed 1")
    if not (np.isfinite(r1) and np.isfinite(sigma1)):
        raise ValueError("r1 and sigma1 must be finite")
    l1 = 6.0 * gamma - 6.0 - r1
    r2 = r1 + 2.0 * sigma1 - 2.0
    l2 = 6.0 * gamma - 6.0 - r2
    l3 = l1 + 2.0
    r3 = r1
    r4 = 2.0 - r2
    l4 = 6.0 * gamma - 6.0 + r4
    frak_a = r1 + sigma1 + 1.0
    frak_b = r1

    case1 = _chain_holds(gamma, r1, sigma1, 2.0)
    case2 = (_chain_holds(gamma, r1, sigma1, 3.0 * gamma - 3.0)
             and I1[0] < gamma < I1[1])
    case3 = (_chain_holds(gamma, r1, sigma1, 3.0 * gamma - 1.0)
             and I2[0] < gamma < I2[1])
    return IndexSet(gamma=gamma, r1=r1, sigma1=sigma1, l1=l1, r2=r2, l2=l2,
                    l3=l3, r3=r3, r4=r4, l4=l4, frak_a=frak_a, frak_b=frak_b,
                    case1=case1, case2=case2, case3=case3)


def regime(gamma: float) -> set:
    """Open-interval membership flags among {I0, I1, I2}."""
    if not np.isfinite(gamma) or gamma <= 1.0:
        raise ValueError("gamma must be finite and exceed 1")
    out = set()
    if I0[0] < gamma:
        out.add("I0")
    if I1[0] < gamma < I1[1]:
        out.add("I1")
    if I2[0] < gamma < I2[1]:
        out.add("I2")
    return out


_CASE_LOWER = {1: lambda g: 2.0,
               2: lambda g: max(3.0 * g - 3.0, 2.0),
               3: lambda g: max(3.0 * g - 1.0, 2.0)}


def feasible_window(gamma: float, case: int, grid: int = 200):
    """Brute-force feasibility of the case-``case`` constraint chain.

    The scan rectangle (0, 2.5] x (0, 1.25] is tiled into grid x grid cells
    and each cell is tested for a nonempty intersection with the open region
    {max(L, 2) - r1 < 2*sigma1 < r1 < min(6*gamma - 6, 2)}.  Because the
    region's sigma1-section widens monotonically in r1, per-cell emptiness
    has the closed form used below, so no strict inequality is blurred by
    lattice resolution.  Returns (nonempty, witness) with an exact interior
    witness (r1, sigma1) from the first feasible cell.
    """
    if case not in (1, 2, 3):
        raise ValueError("case must be 1, 2 or 3")
    if not (isinstance(grid, (int, np.integer)) and grid >= 100):
        raise ValueError("grid must be an integer >= 100")
    if not np.isfinite(gamma) or gamma <= 1.0:
        raise ValueError("gamma must be finite and exceed 1")
    if case == 2 and not (I1[0] < gamma < I1[1]):
        return False, None
    if case == 3 and not (I2[0] < gamma < I2[1]):
        return False, None

    L = _CASE_LOWER[case](gamma)
    m = min(6.0 * gamma - 6.0, 2.0)
    if m <= 0.0:
        return False, None

    r_edges = np.linspace(0.0, SCAN_R1_MAX, grid + 1)
    s_edges = np.linspace(0.0, SCAN_SIGMA1_MAX, grid + 1)
    a, b = r_edges[:-1][:, None], r_edges[1:][:, None]   # r1 cell bounds
    c, e = s_edges[:-1][None, :], s_edges[1:][None, :]   # sigma1 cell bounds
    R = np.minimum(b, m)
    feas = (a < m) & (b > 0.5 * L) & (2.0 * e > L - R) & (2.0 * c < R)
    if not feas.any():
        return False, None

    # witness from the cell with the widest clipped sigma1-window; knife-edge
    # cells admitted by rounding get skipped by the verification below
    margin = np.where(feas, np.minimum(2.0 * e, R) - np.maximum(2.0 * c, L - R),
                      -np.inf)
    order = np.argsort(margin, axis=None)[::-1]
    for flat in order[: min(64, order.size)]:
        i, j = np.unravel_index(flat, margin.shape)
        if not feas[i, j]:
            break
        a0, b0 = r_edges[i], r_edges[i + 1]
        c0, e0 = s_edges[j], s_edges[j + 1]
        R0 = min(b0, m)
        s_lo = max(2.0 * c0, L - R0)
        s_hi = min(2.0 * e0, R0)
        s_star = 0.5 * (s_lo + s_hi)
        r_lo = max(a0, s_star, L - s_star)
        r_star = 0.5 * (r_lo + R0)
        witness = (float(r_star), float(0.5 * s_star))
        flags = compute_index_set(gamma, *witness)
        if {1: flags.case1, 2: flags.case2, 3: flags.case3}[case]:
            return True, witness
    # every candidate sat within rounding of the region boundary
    return False, None
