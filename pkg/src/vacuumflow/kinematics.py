"""Shared discrete calculus on the fixed Lagrangian grid [0, 1].

All fields live on uniform nodes x_i = i/N.  Radial symmetry makes the
physical fields even in x, so derivatives at the center use an even
reflection (zero slope); the outer boundary uses one-sided second-order
stencils.
"""

from __future__ import annotations

import numpy as np


def make_grid(n: int) -> np.ndarray:
    """Uniform nodes 0 = x_0 < ... < x_N = 1."""
    if n < 2:
        raise ValueError("grid needs at least 2 intervals")
    return np.linspace(0.0, 1.0, n + 1)


def d_dx(f: np.ndarray, h: float, even_center: bool = True) -> np.ndarray:
    """Nodal first derivative: centered interior, one-sided 2nd order at x=1.

    At x=0 an even reflection is used when ``even_center`` (the smooth
    spherically symmetric case), otherwise a one-sided stencil.
    """
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    if even_center:
        out[0] = 0.0
    else:
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return out


def d2_dx2(f: np.ndarray, h: float) -> np.ndarray:
    """Nodal second derivative; even reflection at x=0, one-sided at x=1."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    out[0] = 2.0 * (f[1] - f[0]) / (h * h)
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (h * h)
    return out


def trapezoid(f: np.ndarray, h: float) -> float:
    """Composite trapezoid of nodal values on the uniform grid."""
    return float(h * (np.sum(f) - 0.5 * (f[0] + f[-1])))


def geometry(x: np.ndarray, eta: np.ndarray, h: float):
    """Return (k, eta_x, J) with k = 1+eta and J = 1+eta+x*eta_x."""
    k = 1.0 + eta
    eta_x = d_dx(eta, h)
    J = k + x * eta_x
    return k, eta_x, J


def volume_pow(J: np.ndarray, k: np.ndarray, gamma: float) -> np.ndarray:
    """[(1+eta+x eta_x)(1+eta)^2]^gamma, the specific-volume ratio weight."""
    return (J * k * k) ** gamma


def nodal_strain(x, k, eta_x, J, v, v_x) -> np.ndarray:
    """Division-free nodal viscous strain x[(1+eta)v_x - eta_x v]/(J(1+eta)).

    Equals (v + x v_x)/J - v/k pointwise; the factored form avoids 0/0 at
    the center.  The stress-free value at x=1 is NOT imposed here.
    """
    return x * (k * v_x - eta_x * v) / (J * k)
