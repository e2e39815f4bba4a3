import numpy as np
import pytest

from dunkl_hardy.dunkl import MultiplicitySetup


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def setup_k1():
    return MultiplicitySetup((1.0,))


@pytest.fixture
def setup_classical():
    return MultiplicitySetup((0.0,))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SUMMARY

    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY:
            terminalreporter.write_line(line)
