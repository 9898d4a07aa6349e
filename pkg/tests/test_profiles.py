import csv

import numpy as np
import pytest

from vacuumflow.kinematics import d_dx
from vacuumflow.profiles import (ENTROPY_SENTINEL, build_density_profile,
                                 entropy_profile, pressure_profile,
                                 write_profile_csv)


def test_constant_profile_mass_one_third():
    prof = build_density_profile("constant", 0.0, 1.0, 1.5, 64)
    assert np.all(prof.rho_bar == 1.0)
    assert prof.varrho == 0.0
    # composite trapezoid of y^2 carries an O(h^2) bias
    assert abs(prof.mass - 1.0 / 3.0) < (1.0 / 64) ** 2
    assert prof.rho_bar[-1] == 1.0  # jump at the vacuum boundary


def test_power_profile_formula():
    prof = build_density_profile("power", 1.0, 1.0, 1.5, 64)
    assert prof.rho_bar[32] == 0.5
    assert prof.rho_bar[-1] == 0.0
    assert prof.mass > 0.0
    assert prof.boundary_band_ok()


def test_entropy_bounded_exponent():
    # 1/(gamma-1) solves varrho + 1 = gamma * varrho
    prof = build_density_profile("entropy_bounded", 99.0, 1.0, 1.5, 64)
    assert prof.varrho == pytest.approx(2.0, abs=0.0)


@pytest.mark.parametrize("kwargs", [
    dict(kind="power", varrho=1.0, scale=1.0, gamma=1.5, n=4),
    dict(kind="power", varrho=-0.5, scale=1.0, gamma=1.5, n=64),
    dict(kind="power", varrho=1.0, scale=0.0, gamma=1.5, n=64),
    dict(kind="power", varrho=1.0, scale=1.0, gamma=1.0, n=64),
    dict(kind="entropy_bounded", varrho=0.0, scale=1.0, gamma=0.9, n=64),
    dict(kind="bogus", varrho=1.0, scale=1.0, gamma=1.5, n=64),
    dict(kind="power", varrho=float("nan"), scale=1.0, gamma=1.5, n=64),
])
def test_density_validation(kwargs):
    with pytest.raises(ValueError):
        build_density_profile(kwargs["kind"], kwargs["varrho"], kwargs["scale"],
                              kwargs["gamma"], kwargs["n"])


def test_pressure_uniform_density_exact():
    prof = build_density_profile("constant", 0.0, 1.0, 1.5, 64)
    pres = pressure_profile(prof, 1.0)
    x = prof.grid
    # trapezoid is exact for the linear integrand s*1
    assert np.allclose(pres.p_bar, 0.5 * (1.0 - x * x), rtol=0, atol=1e-15)
    assert pres.p_bar[0] == pytest.approx(0.5, abs=1e-15)
    assert pres.p_bar[-1] == 0.0


def test_pressure_linear_density_quadrature():
    prof = build_density_profile("power", 1.0, 1.0, 1.5, 64)
    pres = pressure_profile(prof, 1.0)
    x = prof.grid
    exact = 1.0 / 6.0 - x ** 2 / 2.0 + x ** 3 / 3.0
    assert pres.p_bar[-1] == 0.0
    assert np.max(np.abs(pres.p_bar - exact)) < (1.0 / 64) ** 2
    assert pres.p_bar[0] == pytest.approx(1.0 / 6.0, abs=(1.0 / 64) ** 2)


def test_pressure_monotone_and_positive_delta():
    for kind, varrho in (("constant", 0.0), ("power", 1.0), ("power", 3.0)):
        prof = build_density_profile(kind, varrho, 2.0, 1.5, 80)
        pres = pressure_profile(prof, 0.7)
        assert np.all(np.diff(pres.p_bar) <= 0.0)
    with pytest.raises(ValueError):
        pressure_profile(prof, 0.0)


def test_pressure_derivative_consistency_second_order():
    # finite-difference derivative of p_bar matches -delta*x*rho_bar at O(h^2)
    errs = {}
    for n in (64, 128):
        prof = build_density_profile("power", 2.0, 1.0, 1.5, n)
        pres = pressure_profile(prof, 1.0)
        h = 1.0 / n
        dp = d_dx(pres.p_bar, h, even_center=True)
        target = -prof.grid * prof.rho_bar
        errs[n] = np.max(np.abs(dp - target)[1:-1])
    ratio = errs[64] / errs[128]
    assert 3.5 < ratio < 4.5


def test_entropy_uniform_density_values():
    prof = build_density_profile("constant", 0.0, 1.0, 1.5, 64)
    pres = pressure_profile(prof, 1.0)
    ent = entropy_profile(prof, pres, 1.0, 0.0, 1.5)
    assert ent.s[0] == pytest.approx(np.log(0.5), abs=1e-13)
    assert not ent.bounded
    assert not ent.valid[-1]
    assert ent.s[-1] == ENTROPY_SENTINEL


@pytest.mark.parametrize("varrho,expect", [(0.0, False), (1.0, False),
                                           (2.0, True), (3.0, False)])
def test_entropy_bounded_criterion(varrho, expect):
    # at gamma = 1.5 only varrho = 1/(gamma-1) = 2 keeps the boundary limit finite
    prof = build_density_profile("power", varrho, 1.0, 1.5, 128)
    pres = pressure_profile(prof, 1.0)
    ent = entropy_profile(prof, pres, 1.0, 0.0, 1.5)
    assert ent.bounded == expect


def test_entropy_scale_shift():
    gamma, c_nu = 1.5, 1.3
    prof1 = build_density_profile("constant", 0.0, 1.0, gamma, 64)
    prof2 = build_density_profile("constant", 0.0, 2.0, gamma, 64)
    s1 = entropy_profile(prof1, pressure_profile(prof1, 1.0), c_nu, 0.0, gamma)
    s2 = entropy_profile(prof2, pressure_profile(prof2, 1.0), c_nu, 0.0, gamma)
    shift = c_nu * (1.0 - gamma) * np.log(2.0)
    sel = s1.valid & s2.valid
    assert np.allclose(s2.s[sel] - s1.s[sel], shift, atol=1e-12)


def test_profile_csv_export(tmp_path):
    prof = build_density_profile("power", 1.0, 1.0, 1.5, 32)
    pres = pressure_profile(prof, 1.0)
    ent = entropy_profile(prof, pres, 1.0, 0.0, 1.5)
    path = tmp_path / "profile.csv"
    write_profile_csv(path, prof, pres, ent)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "rho_bar", "p_bar", "s"]
    assert len(rows) == 34
    assert float(rows[1][0]) == 0.0 and float(rows[-1][0]) == 1.0
    assert float(rows[-1][2]) == 0.0
