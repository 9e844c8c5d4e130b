import numpy as np
import pytest

from damek_ricci.clifford_algebra import CliffordSpec, build_algebra

BENCHMARK_SPECS = {
    "m1_d": CliffordSpec.from_tags(1, ("d", 1)),
    "m3_d1": CliffordSpec.from_tags(3, ("d1", 1)),
    "m3_d1d2": CliffordSpec.from_tags(3, ("d1", 1), ("d2", 1)),
    "m7_d1d1": CliffordSpec.from_tags(7, ("d1", 2)),
}

_ALGEBRAS = {}


def algebra_for(key):
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = build_algebra(BENCHMARK_SPECS[key])
    return _ALGEBRAS[key]


@pytest.fixture(params=list(BENCHMARK_SPECS))
def bench(request):
    """(spec, algebra) for each benchmark space."""
    return BENCHMARK_SPECS[request.param], algebra_for(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
