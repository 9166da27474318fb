import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_psd(rng, q, rank=None):
    r = q if rank is None else rank
    B = rng.normal(size=(q, r)) + 1j * rng.normal(size=(q, r))
    return B @ B.conj().T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
