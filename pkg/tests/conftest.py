import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polarflash.flash_channel import FlashModel
from polarflash.mapping import direct_scheme, gray_scheme

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def nand():
    return FlashModel.nand_mlc(0.3)


@pytest.fixture
def gray():
    return gray_scheme()


@pytest.fixture
def direct():
    return direct_scheme()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
