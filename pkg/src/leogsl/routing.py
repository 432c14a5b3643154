"""Shortest propagation-delay paths and per-interval route tracking."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constants import UNSET
from .errors import ConfigurationError
from .interconnect import GslRun
from .orbits import TimeGrid, as_constellation
from .stations import station_matrix
from .topology import SnapshotGraph, build_plus_grid, delay_ms, isl_arrays, station_node

# paths whose delays agree to this relative tolerance count as ties
TIE_REL_TOL = 1e-9


@dataclass(frozen=True)
class RoutePath:
    t: float
    nodes: tuple[int, ...]
    one_way_delay: float  # ms
    hop_count: int
    gsl_count: int

    @property
    def rtt_ms(self) -> float:
        return 2.0 * self.one_way_delay


def path_digest(nodes) -> str:
    return hashlib.blake2b(",".join(map(str, nodes)).encode(), digest_size=8).hexdigest()


def _gsl_count(nodes, num_sats):
    return sum(1 for a, b in zip(nodes, nodes[1:]) if a >= num_sats or b >= num_sats)


def _route(indptr, indices, weights, src, dst):
    dist = kernels.dijkstra(indptr, indices, weights, dst)
    path = kernels.extract_path(indptr, indices, weights, dist, src, dst, TIE_REL_TOL)
    return path, float(dist[src])


def shortest_path(g: SnapshotGraph, src: int, dst: int) -> RoutePath | None:
    """Minimum-delay path; equal-delay paths resolve to the lexicographically
    smallest node sequence.  Returns None when ``dst`` is unreachable."""
    if src == dst:
        return RoutePath(g.t, (src,), 0.0, 0, 0)
    n = g.num_nodes
    if not (0 <= src < n and 0 <= dst < n):
        raise ConfigurationError(f"nodes {src}, {dst} not in the snapshot")
    indptr, indices, weights = g.csr()
    path, d = _route(indptr, indices, weights, src, dst)
    if path.size == 0:
        return None
    nodes = tuple(int(x) for x in path)
    return RoutePath(g.t, nodes, d, len(nodes) - 1, _gsl_count(nodes, g.num_sats))


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


def route_times_ms(grid: TimeGrid, route_update_ms: int) -> np.ndarray:
    if route_update_ms <= 0:
        raise ConfigurationError("route update interval must be positive")
    span_ms = round((grid.end - grid.start) * 1000.0)
    count = -(-span_ms // route_update_ms)
    return round(grid.start * 1000.0) + np.arange(count, dtype=np.int64) * route_update_ms


@dataclass
class Scenario:
    """One routed flow: a GSL history, a mode and an endpoint pair of station ids."""

    mode: str
    run: GslRun
    pair: tuple[int, int]
    label: str = ""


@dataclass
class RouteSeries:
    mode: str
    algorithm: str
    pair: tuple[int, int]
    t_ms: np.ndarray
    delay_ms: np.ndarray  # one-way, NaN when unreachable
    hops: np.ndarray
    gsls: np.ndarray
    paths: list = field(repr=False, default_factory=list)
    change_ms: list = field(default_factory=list)

    @property
    def rtt_ms(self) -> np.ndarray:
        return 2.0 * self.delay_ms

    @property
    def reachable(self) -> np.ndarray:
        return ~np.isnan(self.delay_ms)

    @property
    def coverage(self) -> float:
        return float(self.reachable.mean()) if self.t_ms.size else 0.0

    @property
    def mean_rtt(self) -> float:
        ok = self.reachable
        return float(self.rtt_ms[ok].mean()) if ok.any() else math.nan

    @property
    def path_changes(self) -> int:
        return len(self.change_ms)

    def digests(self) -> list[str]:
        return ["" if p is None else path_digest(p) for p in self.paths]


def _slot_index(t_ms, grid: TimeGrid):
    slot_ms = round(grid.slot * 1000.0)
    return int((t_ms - round(grid.start * 1000.0)) // slot_ms)


def route_many(scenarios, sats, stations, grid: TimeGrid, route_update_ms: int = 100, isl_edges=None):
    """Route every scenario at each update instant of ``grid``.

    Satellite positions and ISL weights are computed once per instant and
    shared across scenarios.
    """
    c = as_constellation(sats)
    k = len(c)
    if isl_edges is None:
        isl_edges = build_plus_grid(c.config)
    iu, iv = isl_arrays(isl_edges)
    by_id = {s.station_id: i for i, s in enumerate(stations)}
    st_mat = station_matrix(stations)
    all_ids = np.array([s.station_id for s in stations], dtype=np.int64)
    num_nodes = k + (int(all_ids.max()) + 1 if all_ids.size else 0)

    plans = []
    for sc in scenarios:
        members = list(sc.pair) if sc.mode == "isl" else all_ids.tolist()
        if sc.mode not in ("isl", "hybrid"):
            raise ConfigurationError(f"unknown mode {sc.mode!r}")
        rows = np.array([sc.run.index_of(sid) for sid in members], dtype=np.int64)
        rows_st = np.array([by_id[sid] for sid in members], dtype=np.int64)
        plans.append((rows, rows_st, np.array(members, dtype=np.int64)))

    times = route_times_ms(grid, route_update_ms)
    n_t = times.size
    out = []
    for sc in scenarios:
        out.append(
            RouteSeries(
                sc.mode,
                sc.run.algorithm,
                tuple(sc.pair),
                times.copy(),
                np.full(n_t, np.nan),
                np.zeros(n_t, dtype=np.int64),
                np.zeros(n_t, dtype=np.int64),
                [None] * n_t,
                [],
            )
        )

    for r, t_ms in enumerate(times.tolist()):
        t = t_ms / 1000.0
        pos = c.ecef(t)
        iw = delay_ms(np.linalg.norm(pos[iu] - pos[iv], axis=1))
        slot = _slot_index(t_ms, grid)
        for sc, (rows, rows_st, members), series in zip(scenarios, plans, out):
            links = sc.run.links[slot][rows]  # (m, 2)
            m_idx, l_idx = np.nonzero(links != UNSET)
            sat = links[m_idx, l_idx]
            gu = sat
            gv = k + members[m_idx]
            gw = delay_ms(np.linalg.norm(pos[sat] - st_mat[rows_st[m_idx]], axis=1))
            indptr, indices, weights = kernels.build_csr(
                num_nodes,
                np.concatenate([iu, gu]),
                np.concatenate([iv, gv]),
                np.concatenate([iw, gw]),
            )
            src = station_node(k, sc.pair[0])
            dst = station_node(k, sc.pair[1])
            path, d = _route(indptr, indices, weights, src, dst)
            if path.size:
                nodes = tuple(path.tolist())
                series.paths[r] = nodes
                series.delay_ms[r] = d
                series.hops[r] = len(nodes) - 1
                series.gsls[r] = _gsl_count(nodes, k)
            if r > 0 and series.paths[r] != series.paths[r - 1]:
                series.change_ms.append(int(t_ms))
    return out


def route_series(mode, run: GslRun, pair, sats, stations, grid: TimeGrid, route_update_ms: int = 100, isl_edges=None) -> RouteSeries:
    return route_many([Scenario(mode, run, tuple(pair))], sats, stations, grid, route_update_ms, isl_edges)[0]
