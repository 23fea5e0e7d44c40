import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from medfactor.empirical import accumulate, accumulate_both  # noqa: E402


@pytest.fixture(scope="session")
def counts_1e4():
    return accumulate_both(10**4, p_cut=10**4, segment_size=1 << 12)


@pytest.fixture(scope="session")
def counts_1e6():
    return accumulate_both(10**6)


@pytest.fixture(scope="session")
def counts_x10():
    return {nu: accumulate(10, nu, p_cut=16) for nu in ("omega", "Omega")}


@pytest.fixture(scope="session")
def counts_1e8():
    from desk import desk_scale_counts

    return desk_scale_counts()[0]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
