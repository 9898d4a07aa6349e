import numpy as np
import pytest

import vacuumflow as vf
from vacuumflow.indices import compute_index_set


@pytest.fixture(scope="session")
def idx15():
    return compute_index_set(1.5, 1.8, 0.875)


@pytest.fixture(scope="session")
def small_run(idx15):
    """A short perturbed run shared by solver/diagnostics/CLI tests."""
    cfg = vf.SolverConfig(gamma=1.5, mu=1.0, delta=1.0, alpha0=1.0, alpha1=4.0,
                          tau_end=0.5, N=64, dtau=1e-3,
                          a_eta=1e-3, a_eta1=1e-3, a_q=1e-3,
                          r1=1.8, sigma1=0.875)
    prof, pres = cfg.build_profiles()
    rec = vf.run(cfg, prof, pres, idx15)
    assert rec.status == "completed"
    return rec


@pytest.fixture(scope="session")
def zero_run(idx15):
    cfg = vf.SolverConfig(gamma=1.5, mu=1.0, delta=1.0, alpha0=1.0, alpha1=4.0,
                          tau_end=0.1, N=64, dtau=1e-3, r1=1.8, sigma1=0.875)
    prof, pres = cfg.build_profiles()
    rec = vf.run(cfg, prof, pres, idx15)
    assert rec.status == "completed"
    return rec


def l_inf(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
