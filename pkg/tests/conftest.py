import numpy as np
import pytest

from leogsl.kernels import _numpy_impl, numba_backend
from leogsl.orbits import STARLINK_SHELL1, Constellation
from leogsl.stations import ingest_stations

BACKENDS = {"numpy": _numpy_impl}
if numba_backend() is not None:
    BACKENDS["numba"] = numba_backend()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return BACKENDS[request.param]


@pytest.fixture(scope="session")
def shell1():
    return Constellation.from_config(STARLINK_SHELL1)


@pytest.fixture(scope="session")
def stations():
    return ingest_stations()


@pytest.fixture(scope="session")
def by_id(stations):
    return {s.station_id: s for s in stations}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if not acceptance_log.RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in acceptance_log.TITLES.items():
        if n in acceptance_log.RESULTS:
            _, ok, detail = acceptance_log.RESULTS[n]
            tr.line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        else:
            tr.line(f"criterion {n:2d} NOT RUN  {title}")
