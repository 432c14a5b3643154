from collections import Counter

import numpy as np
import pytest

from leogsl.constants import UNSET
from leogsl.errors import ConfigurationError
from leogsl.interconnect import GslState, clrst_init
from leogsl.orbits import STARLINK_SHELL1, Constellation, ConstellationConfig
from leogsl.topology import (
    GSL,
    ISL,
    SNAPSHOT_HEADER,
    build_plus_grid,
    build_snapshot,
    delay_ms,
    is_connected,
    isl_arrays,
    station_node,
    write_snapshot_csv,
)


def _degrees(edges, n):
    c = Counter()
    for e in edges:
        c[e.sat_a] += 1
        c[e.sat_b] += 1
    return [c[i] for i in range(n)]


def test_shell1_grid():
    edges = build_plus_grid(STARLINK_SHELL1)
    assert len(edges) == 2592
    assert set(_degrees(edges, 1296)) == {4}
    assert all(e.sat_a < e.sat_b for e in edges)
    kinds = Counter(e.kind for e in edges)
    assert kinds == {"intra": 1296, "inter": 1296}
    u, v = isl_arrays(edges)
    assert is_connected(1296, u, v)


def test_intra_inter_per_satellite():
    per = {i: Counter() for i in range(1296)}
    for e in build_plus_grid(STARLINK_SHELL1):
        per[e.sat_a][e.kind] += 1
        per[e.sat_b][e.kind] += 1
    assert all(c == {"intra": 2, "inter": 2} for c in per.values())


def test_smallest_grid():
    edges = build_plus_grid(ConstellationConfig(3, 3, 0, 53.0, 550.0))
    assert len(edges) == 18
    assert set(_degrees(edges, 9)) == {4}
    assert is_connected(9, *isl_arrays(edges))


@pytest.mark.parametrize("n,m", [(2, 18), (72, 2), (1, 1)])
def test_degenerate_grid(n, m):
    with pytest.raises(ConfigurationError):
        build_plus_grid(ConstellationConfig(n, m, 0, 53.0, 550.0))


def test_neighbours_are_specified():
    edges = {(e.sat_a, e.sat_b) for e in build_plus_grid(STARLINK_SHELL1)}
    m = 18
    s = 5 * m + 17  # orbit 5, index 17
    for nb in (5 * m + 0, 5 * m + 16, 4 * m + 17, 6 * m + 17):
        assert (min(s, nb), max(s, nb)) in edges
    # the seam wraps: orbit 71 meets orbit 0 at the same index
    assert (3, 71 * m + 3) in edges


def test_disconnected_detected():
    assert not is_connected(4, np.array([0, 2]), np.array([1, 3]))


def test_zenith_gsl_delay():
    assert float(delay_ms(550.0)) == pytest.approx(1.834, abs=1e-3)


def test_isl_snapshot_contains_only_pair(shell1, by_id, stations):
    states, _ = clrst_init(stations, shell1, 25.0, 0.0)
    g = build_snapshot("isl", 0.0, shell1, stations, states, (84, 102))
    ground = set(g.nodes.tolist()) - set(range(1296))
    assert ground == {station_node(1296, 84), station_node(1296, 102)}
    assert np.all(g.weight_ms > 0) and np.all(np.isfinite(g.weight_ms))
    assert int((g.kind == GSL).sum()) == 4


def test_hybrid_snapshot(shell1, stations):
    states, _ = clrst_init(stations, shell1, 25.0, 0.0)
    g = build_snapshot("hybrid", 0.0, shell1, stations, states)
    ground = set(g.nodes.tolist()) - set(range(1296))
    assert len(ground) == 165
    sat_only = g.without_gsls()
    ref = build_snapshot("hybrid", 0.0, shell1, [], {})
    assert sat_only.u.tolist() == ref.u.tolist() and sat_only.v.tolist() == ref.v.tolist()
    assert np.allclose(sat_only.weight_ms, ref.weight_ms)


def test_hybrid_with_no_stations_is_isl_mesh(shell1):
    g = build_snapshot("hybrid", 10.0, shell1, [], {})
    assert g.num_nodes == 1296 and np.all(g.kind == ISL) and g.u.size == 2592


def test_unset_links_leave_station_isolated(shell1, by_id):
    states = {84: GslState(84, UNSET, UNSET), 102: GslState(102, 5, UNSET)}
    g = build_snapshot("isl", 0.0, shell1, [by_id[84], by_id[102]], states, (84, 102))
    assert int((g.kind == GSL).sum()) == 1


def test_bad_mode(shell1):
    with pytest.raises(ConfigurationError):
        build_snapshot("mesh", 0.0, shell1, [], {})


def test_networkx_export_and_csv(tmp_path, shell1, by_id):
    states, _ = clrst_init([by_id[84], by_id[102]], shell1, 25.0, 0.0)
    g = build_snapshot("isl", 0.0, shell1, [by_id[84], by_id[102]], states, (84, 102))
    nxg = g.to_networkx()
    assert nxg.number_of_edges() == g.u.size
    p = tmp_path / "snap.csv"
    write_snapshot_csv([g], p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(SNAPSHOT_HEADER) and len(lines) == g.u.size + 1


def test_edge_kind(shell1, by_id):
    states, _ = clrst_init([by_id[84], by_id[102]], shell1, 25.0, 0.0)
    g = build_snapshot("isl", 0.0, shell1, [by_id[84], by_id[102]], states, (84, 102))
    assert g.edge_kind(0, 1) == ISL
    assert g.edge_kind(station_node(1296, 84), states[84].l0) == GSL


def test_scaled_grid():
    c = Constellation.from_config(STARLINK_SHELL1.scaled(2))
    assert len(c) == 2592 and len(build_plus_grid(c.config)) == 5184
