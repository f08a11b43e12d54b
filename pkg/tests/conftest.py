import numpy as np
import pytest

from mixedflow.conductivity import (
    canonical_interpolated,
    canonical_multiplicative,
    canonical_piecewise,
    canonical_rational,
)


@pytest.fixture
def interp():
    return canonical_interpolated()


@pytest.fixture
def piecewise():
    return canonical_piecewise()


@pytest.fixture
def rational():
    return canonical_rational()


@pytest.fixture
def multiplicative():
    return canonical_multiplicative()


@pytest.fixture(params=["interpolated", "piecewise", "rational", "multiplicative"])
def any_model(request):
    return {
        "interpolated": canonical_interpolated,
        "piecewise": canonical_piecewise,
        "rational": canonical_rational,
        "multiplicative": canonical_multiplicative,
    }[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
