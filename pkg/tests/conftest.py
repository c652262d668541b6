import pytest

from zetafourier.coefficients import calibrate_all, calibration_state, set_calibration
from zetafourier.zeros import bundled_zeros


@pytest.fixture(scope="session")
def zeros():
    return bundled_zeros()


@pytest.fixture(scope="session")
def calibration(zeros):
    """Calibrate every residue-type family once; restores the records if a test cleared them."""
    records = calibrate_all(zeros)
    yield records


@pytest.fixture
def calibrated(calibration):
    for rec in calibration.values():
        set_calibration(rec)
    yield calibration
    for rec in calibration.values():
        set_calibration(rec)


@pytest.fixture
def saved_calibration():
    before = calibration_state()
    yield
    for rec in before.values():
        set_calibration(rec)
