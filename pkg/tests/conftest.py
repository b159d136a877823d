import numpy as np
import pytest

from icdetect import make_pam, make_qam


@pytest.fixture
def pam2():
    return make_pam(2)


@pytest.fixture
def pam4():
    return make_pam(4)


@pytest.fixture
def qam4():
    return make_qam(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)
