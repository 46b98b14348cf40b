import numpy as np
import pytest

from wavekg.oracles import DalembertField, KGSpectralField, OracleSampler
from wavekg.profiles import Profile
from wavekg.scenario import Scenario
from wavekg.solver import HistorySampler, evolve

EPS = 1e-3

BUMP4 = Profile("bump", k=4, radius=1.0, amp=1.0)
BUMP3 = Profile("bump", k=3, radius=0.9, amp=0.5)
ZERO = Profile("zero")


def make_scenario(**overrides):
    base = dict(b00=1.0, bd=1.0, p00=1.0, pd=1.0, c=1.0, eps=EPS,
                u0=BUMP4, u1=ZERO, v0=BUMP4, v1=ZERO,
                dr=0.05, r_max=14.0, t_end=14.0)
    base.update(overrides)
    return Scenario(**base)


@pytest.fixture(scope="session")
def small_scn():
    return make_scenario()


@pytest.fixture(scope="session")
def small_history(small_scn):
    """Coupled run on a coarse grid; shared by the fast integration tests."""
    return evolve(small_scn)


@pytest.fixture(scope="session")
def small_sampler(small_history):
    return HistorySampler(small_history)


@pytest.fixture(scope="session")
def free_wave_scn():
    return make_scenario(b00=0.0, bd=0.0, p00=0.0, pd=0.0,
                         v0=ZERO, v1=ZERO, dr=0.02, r_max=12.0, t_end=12.0)


@pytest.fixture(scope="session")
def free_wave_history(free_wave_scn):
    return evolve(free_wave_scn)


@pytest.fixture(scope="session")
def free_kg_scn():
    return make_scenario(b00=0.0, bd=0.0, p00=0.0, pd=0.0,
                         u0=ZERO, u1=ZERO, dr=0.02, r_max=12.0, t_end=12.0)


@pytest.fixture(scope="session")
def free_kg_history(free_kg_scn):
    return evolve(free_kg_scn)


@pytest.fixture(scope="session")
def wave_oracle():
    return DalembertField(Profile("bump", k=4, radius=1.0, amp=EPS), ZERO)


@pytest.fixture(scope="session")
def kg_oracle():
    return KGSpectralField(Profile("bump", k=4, radius=1.0, amp=EPS), ZERO, 1.0)


@pytest.fixture(scope="session")
def oracle_sampler(wave_oracle, kg_oracle):
    return OracleSampler(wave_oracle, kg_oracle)


# ---- heavy fixtures for the acceptance suite ----------------------------------


@pytest.fixture(scope="session")
def reference_scn():
    return make_scenario(dr=0.01, r_max=60.0, t_end=52.0)


@pytest.fixture(scope="session")
def reference_history(reference_scn):
    """The coupled reference run (several minutes, ~1.6 GB)."""
    return evolve(reference_scn)


@pytest.fixture(scope="session")
def reference_free_history(reference_scn):
    """Free-wave run at the reference grid, for radiation cross-checks."""
    return evolve(reference_scn.free().with_grid(v0=ZERO, v1=ZERO))


def slope_of(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = y > 0
    return np.polyfit(np.log(x[m]), np.log(y[m]), 1)[0]
