import dataclasses

import numpy as np
import pytest

from tpcdec.bch import make_code
from tpcdec.schedule import default_schedule
from tpcdec.tpc import TpcSpec


@pytest.fixture(scope="session")
def hamming15():
    return make_code(4, 1, extended=False)


@pytest.fixture(scope="session")
def ebch16():
    return make_code(4, 1)


@pytest.fixture(scope="session")
def ebch32():
    return make_code(5, 1)


@pytest.fixture(scope="session")
def ebch256():
    return make_code(8, 2)


@pytest.fixture(scope="session")
def bch255():
    return make_code(8, 2, extended=False)


@pytest.fixture(scope="session")
def default_params():
    return default_schedule()


def short_code_schedule():
    """Default schedule rescaled for n=32 components (alpha and mu halved)."""
    return [dataclasses.replace(p, alpha=0.5 * p.alpha, mu=0.5 * p.mu) for p in default_schedule()]


@pytest.fixture(scope="session")
def tpc32(ebch32):
    return TpcSpec(ebch32, ebch32, 4, short_code_schedule())


@pytest.fixture(scope="session")
def tpc16(ebch16, default_params):
    return TpcSpec(ebch16, ebch16, 3, default_params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def noisy_llr(rng, codeword, sigma):
    x = 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)
    return 2.0 * (x + sigma * rng.standard_normal(x.shape)) / sigma**2
