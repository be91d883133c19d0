import numpy as np
import pytest
from hypothesis import settings

from wavepacket_lab import make_frame, make_profiles
from wavepacket_lab.radial.fields import FourierBesselBasis

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def frame64():
    return make_frame(64, 0.25)


@pytest.fixture(scope="session")
def profiles64(frame64):
    return make_profiles(frame64)


@pytest.fixture(scope="session")
def frame128():
    return make_frame(128, 0.25)


@pytest.fixture(scope="session")
def basis256():
    return FourierBesselBasis(8.0, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
