"""numba and numpy backends must agree; the env flag must select numpy."""

import os
import subprocess
import sys

import numpy as np
import pytest

from leogsl.kernels import _numpy_impl as npk
from leogsl.kernels import numba_backend
from leogsl.orbits import STARLINK_SHELL1
from leogsl.stations import station_matrix
from leogsl.topology import build_plus_grid, delay_ms, isl_arrays

nbk = numba_backend()
needs_numba = pytest.mark.skipif(nbk is None, reason="numba not installed")


@pytest.fixture(scope="module")
def elem(shell1):
    return np.ascontiguousarray(shell1.elements)


@pytest.fixture(scope="module")
def st_mat(stations):
    return station_matrix(stations)


@needs_numba
@pytest.mark.parametrize("t", [0.0, 0.5, 777.25, 86400.0])
def test_positions_agree(elem, t):
    assert np.allclose(nbk.eci_positions(elem, t), npk.eci_positions(elem, t), atol=1e-8)
    assert np.allclose(nbk.ecef_positions(elem, t), npk.ecef_positions(elem, t), atol=1e-8)
    assert np.allclose(nbk.latitudes(elem, t), npk.latitudes(elem, t), atol=1e-12)
    assert np.array_equal(nbk.flight_directions(elem, t, 1.0), npk.flight_directions(elem, t, 1.0))


@needs_numba
def test_eccentric_positions_agree():
    rng = np.random.default_rng(0)
    e = np.column_stack(
        [
            rng.uniform(7000, 9000, 50),
            rng.uniform(0, 0.3, 50),
            rng.uniform(0, np.pi, 50),
            rng.uniform(0, 2 * np.pi, 50),
            rng.uniform(0, 2 * np.pi, 50),
            rng.uniform(0, 2 * np.pi, 50),
        ]
    )
    mm = np.sqrt(398600.4418 / e[:, 0] ** 3)
    e = np.ascontiguousarray(np.column_stack([e, mm]))
    for t in (0.0, 1234.5):
        assert np.allclose(nbk.eci_positions(e, t), npk.eci_positions(e, t), atol=1e-7)


@needs_numba
def test_elevations_agree(elem, st_mat):
    pos = npk.ecef_positions(elem, 42.0)
    for st in st_mat[:20]:
        assert np.allclose(nbk.elevations_deg(st, pos), npk.elevations_deg(st, pos), atol=1e-10)


@needs_numba
@pytest.mark.parametrize("sid,t", [(84, 0.0), (102, 313.0), (0, 999.0), (50, 10.5)])
def test_service_and_selection_agree(elem, st_mat, sid, t):
    st = st_mat[sid]
    el = npk.elevations_deg(st, npk.ecef_positions(elem, t))
    rows = np.ascontiguousarray(elem[el >= 25.0])
    assert np.array_equal(nbk.service_times(st, rows, t, 25.0, 1000), npk.service_times(st, rows, t, 25.0, 1000))
    for want in (-1, 0, 1):
        a = nbk.select_longest(st, elem, t, 25.0, want, -1, 1.0, 1000)
        b = npk.select_longest(st, elem, t, 25.0, want, -1, 1.0, 1000)
        assert a[0] == b[0] and a[1] == b[1]


@needs_numba
def test_nearest_agree(elem, st_mat):
    pos = npk.ecef_positions(elem, 100.0)
    a = nbk.nearest_visible_many(st_mat, pos, 25.0)
    b = npk.nearest_visible_many(st_mat, pos, 25.0)
    assert np.array_equal(a[0], b[0])
    assert np.allclose(a[1], b[1], equal_nan=True)


@needs_numba
def test_graph_kernels_agree(elem):
    pos = npk.ecef_positions(elem, 0.0)
    u, v = isl_arrays(build_plus_grid(STARLINK_SHELL1))
    w = delay_ms(np.linalg.norm(pos[u] - pos[v], axis=1))
    a = nbk.build_csr(1296, u, v, w)
    b = npk.build_csr(1296, u, v, w)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    da, db = nbk.dijkstra(*a, 7), npk.dijkstra(*b, 7)
    assert np.allclose(da, db, rtol=1e-12)
    pa = nbk.extract_path(*a, da, 1000, 7, 1e-9)
    pb = npk.extract_path(*b, db, 1000, 7, 1e-9)
    assert np.array_equal(pa, pb)


@needs_numba
def test_unreachable_agree():
    u = np.array([0], dtype=np.int64)
    v = np.array([1], dtype=np.int64)
    w = np.array([1.0])
    for k in (nbk, npk):
        csr = k.build_csr(3, u, v, w)
        d = k.dijkstra(*csr, 2)
        assert np.isinf(d[0]) and d[2] == 0.0
        assert k.extract_path(*csr, d, 0, 2, 1e-9).size == 0


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("LEOGSL_DISABLE_NUMBA", None)
    else:
        env["LEOGSL_DISABLE_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", "from leogsl.kernels import BACKEND; print(BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return out.stdout.strip()


def test_env_flag_forces_numpy():
    assert _backend_in_subprocess("1") == "numpy"


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess(None) == "numba"
    assert _backend_in_subprocess("0") == "numba"
