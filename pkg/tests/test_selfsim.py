import warnings

import numpy as np
import pytest

from vacuumflow.selfsim import (AlphaTrajectory, InsufficientHorizonError,
                                IntegrationError, advance_alpha_tau,
                                asymptote_check, conserved_invariant,
                                integrate_alpha_t, integrate_alpha_tau,
                                rate_sandwich_violations, rescale_time,
                                write_trajectory_csv)

# (delta=1, gamma=5/3, alpha0=1, alpha1=0) has the closed form
# alpha(t) = sqrt(1+t^2), equivalently alpha(tau) = cosh(tau)


def test_closed_form_physical_time():
    traj = integrate_alpha_t(1.0, 5.0 / 3.0, 1.0, 0.0, 10.0)
    exact = np.sqrt(1.0 + traj.time ** 2)
    assert np.max(np.abs(traj.alpha - exact) / exact) < 1e-8
    assert traj.alpha[0] == 1.0 and traj.alpha_prime[0] == 0.0


def test_closed_form_rescaled_time():
    traj = integrate_alpha_tau(1.0, 5.0 / 3.0, 1.0, 0.0, 3.0)
    exact = np.cosh(traj.time)
    assert np.max(np.abs(traj.alpha - exact) / exact) < 1e-7
    assert traj.alpha_prime[0] == 0.0  # alpha_tau(0) = alpha0*alpha1


def test_invariant_on_closed_form():
    traj = integrate_alpha_t(1.0, 5.0 / 3.0, 1.0, 0.0, 10.0)
    # (alpha')^2 + alpha^{-2} = 1 along sqrt(1+t^2)
    assert traj.invariant0 == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(traj.invariant_values() - 1.0)) < 1e-9


def test_invariant_drift_random_parameters():
    rng = np.random.default_rng(20240817)
    for _ in range(5):
        delta = rng.uniform(0.5, 2.0)
        gamma = rng.uniform(1.1, 2.5)
        alpha0 = rng.uniform(0.5, 2.0)
        alpha1 = rng.uniform(-1.0, 2.0)
        traj = integrate_alpha_t(delta, gamma, alpha0, alpha1, 10.0, tol=1e-8)
        assert traj.invariant_drift() <= 1e-8
        assert np.all(traj.alpha > 0.0)


def test_initial_condition_tau_derivative():
    traj = integrate_alpha_tau(1.0, 1.5, 2.0, 3.0, 1.0)
    assert traj.alpha[0] == 2.0
    assert traj.alpha_prime[0] == 6.0  # alpha0 * alpha1


def test_beta_rates_formula():
    traj = integrate_alpha_tau(1.0, 1.5, 1.0, 2.0, 2.0)
    assert traj.beta1 == 2.0
    assert traj.beta2 == pytest.approx(np.sqrt(16.0 / 3.0), rel=1e-15)


@pytest.mark.parametrize("alpha1", [1.0, 2.0, 4.0])
def test_rate_sandwich(alpha1):
    traj = integrate_alpha_tau(1.0, 1.5, 1.0, alpha1, 3.0)
    assert rate_sandwich_violations(traj) == 0
    # alpha_tautau <= beta2^2 alpha + delta alpha^{4-3g} nodewise
    att = 1.0 * traj.alpha ** (4.0 - 3.0 * 1.5) + traj.alpha_prime ** 2 / traj.alpha
    bound = traj.beta2 ** 2 * traj.alpha + 1.0 * traj.alpha ** (4.0 - 3.0 * 1.5)
    assert np.all(att <= bound * (1.0 + 1e-12))


def test_expansion_rate_limit():
    # alpha_tau/alpha approaches sqrt(invariant0)
    traj = integrate_alpha_tau(1.0, 1.5, 1.0, 1.0, 5.0)
    tail = traj.alpha_prime[-1] / traj.alpha[-1]
    assert abs(tail - np.sqrt(traj.invariant0)) / np.sqrt(traj.invariant0) < 0.01


def test_coordinate_consistency():
    from scipy.interpolate import PchipInterpolator

    tol = 1e-10
    traj_t = integrate_alpha_t(1.0, 1.4, 1.0, 1.0, 8.0, tol=tol)
    tm = rescale_time(traj_t)
    traj_tau = integrate_alpha_tau(1.0, 1.4, 1.0, 1.0, float(tm.tau[-1]), tol=tol)
    a_of_tau = PchipInterpolator(traj_tau.time, traj_tau.alpha)
    probes = np.linspace(0.3, 8.0, 20)
    a_direct = PchipInterpolator(traj_t.time, traj_t.alpha)(probes)
    a_via_map = a_of_tau(tm.tau_of_t(probes))
    assert np.max(np.abs(a_via_map - a_direct) / a_direct) < 10.0 * tol


def test_rescale_time_closed_form():
    traj = integrate_alpha_t(1.0, 5.0 / 3.0, 1.0, 0.0, 10.0)
    tm = rescale_time(traj)
    assert tm.tau[0] == 0.0
    assert abs(tm.tau_of_t(1.0) - np.log(1.0 + np.sqrt(2.0))) < 1e-10
    # inverse round trip
    assert abs(tm.t_of_tau(tm.tau_of_t(3.0)) - 3.0) < 1e-9


def _synthetic_linear(alpha0, alpha1, t_end=10.0, n=101):
    t = np.linspace(0.0, t_end, n)
    return AlphaTrajectory(coord="t", delta=1.0, gamma=1.5, alpha0=alpha0,
                           alpha1=alpha1, time=t, alpha=alpha0 + alpha1 * t,
                           alpha_prime=np.full_like(t, alpha1),
                           invariant0=conserved_invariant(1.0, 1.5, alpha0, alpha1))


def test_rescale_time_constant_alpha():
    t = np.linspace(0.0, 4.0, 401)
    traj = AlphaTrajectory(coord="t", delta=1.0, gamma=1.5, alpha0=2.0,
                           alpha1=0.0, time=t, alpha=np.full_like(t, 2.0),
                           alpha_prime=np.zeros_like(t),
                           invariant0=conserved_invariant(1.0, 1.5, 2.0, 0.0))
    tm = rescale_time(traj)
    assert np.allclose(tm.tau, t / 2.0, rtol=0, atol=1e-14)


def test_rescale_time_rejects_non_monotone():
    traj = _synthetic_linear(1.0, 2.0)
    bad = AlphaTrajectory(coord="t", delta=1.0, gamma=1.5, alpha0=1.0,
                          alpha1=2.0, time=traj.time[::-1], alpha=traj.alpha,
                          alpha_prime=traj.alpha_prime, invariant0=traj.invariant0)
    with pytest.raises(ValueError):
        rescale_time(bad)


def test_asymptote_exact_linear():
    rep = asymptote_check(_synthetic_linear(1.0, 2.0))
    assert rep.sup_ratio == 1.0
    assert rep.c1 == 1.0 and rep.c2 == 2.0


def test_asymptote_closed_form_converges():
    r50 = asymptote_check(integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 50.0))
    r100 = asymptote_check(integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 100.0))
    assert abs(r50.sup_ratio - 1.0) < 0.02
    assert abs(r100.sup_ratio - 1.0) < abs(r50.sup_ratio - 1.0)
    # the tail slope approaches the invariant speed
    inv = conserved_invariant(1.0, 1.5, 1.0, 1.0)
    assert r100.c2 == pytest.approx(np.sqrt(inv), rel=1e-3)


def test_asymptote_insufficient_horizon():
    with pytest.raises(InsufficientHorizonError):
        asymptote_check(integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 0.5))


def test_gamma_guard():
    with pytest.raises(ValueError):
        integrate_alpha_t(1.0, 1.005, 1.0, 0.0, 1.0)


def test_drift_abort():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(IntegrationError):
            integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 10.0, tol=1e-16)


def test_rk4_substep_tracks_integrator():
    delta, gamma = 1.0, 1.5
    a, ap = 1.0, 2.0  # alpha_tau(0) = alpha0*alpha1 with alpha0=1, alpha1=2
    dtau = 1e-3
    for _ in range(2000):
        a, ap = advance_alpha_tau(a, ap, dtau, delta, gamma)
    ref = integrate_alpha_tau(delta, gamma, 1.0, 2.0, 2.0)
    assert a == pytest.approx(ref.alpha[-1], rel=1e-9)
    inv = (ap / a) ** 2 + (2.0 * delta / (3 * gamma - 3)) * a ** (3 - 3 * gamma)
    assert inv == pytest.approx(ref.invariant0, rel=1e-9)


def test_trajectory_csv(tmp_path):
    traj = integrate_alpha_t(1.0, 1.5, 1.0, 1.0, 1.0, n_samples=11)
    path = tmp_path / "alpha.csv"
    write_trajectory_csv(path, traj)
    lines = path.read_text().splitlines()
    assert lines[0] == "time,alpha,alpha_prime,invariant"
    assert len(lines) == 12
