"""+Grid ISL mesh and per-slot snapshot graphs (ISL and Hybrid modes)."""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .constants import SPEED_OF_LIGHT_KM_S, UNSET
from .errors import ConfigurationError
from .orbits import ConstellationConfig, as_constellation
from .stations import station_vector

ISL = 0
GSL = 1
KIND_NAMES = {ISL: "isl", GSL: "gsl"}
MODES = ("isl", "hybrid")


@dataclass(frozen=True)
class IslEdge:
    sat_a: int
    sat_b: int
    kind: str  # "intra" or "inter"


def build_plus_grid(config: ConstellationConfig) -> list[IslEdge]:
    """Each satellite links to both in-orbit neighbours and to the
    same-index satellites of the adjacent orbits (the seam wraps)."""
    n, m = config.orbit_count, config.sats_per_orbit
    if n < 3 or m < 3:
        raise ConfigurationError(f"+Grid needs N >= 3 and M >= 3, got N={n}, M={m}")
    edges = []
    for i in range(n):
        for j in range(m):
            s = i * m + j
            t = i * m + (j + 1) % m
            edges.append(IslEdge(min(s, t), max(s, t), "intra"))
            t = ((i + 1) % n) * m + j
            edges.append(IslEdge(min(s, t), max(s, t), "inter"))
    edges.sort(key=lambda e: (e.sat_a, e.sat_b))
    return edges


def isl_arrays(edges: Iterable[IslEdge]) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array([(e.sat_a, e.sat_b) for e in edges], dtype=np.int64).reshape(-1, 2)
    return pairs[:, 0].copy(), pairs[:, 1].copy()


def is_connected(num_nodes: int, u: np.ndarray, v: np.ndarray) -> bool:
    adj = [[] for _ in range(num_nodes)]
    for a, b in zip(u.tolist(), v.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == num_nodes


def delay_ms(distance_km):
    return np.asarray(distance_km) / SPEED_OF_LIGHT_KM_S * 1000.0


def station_node(num_sats: int, station_id: int) -> int:
    """Graph node id of a ground station: station ids follow the satellites."""
    return num_sats + station_id


@dataclass
class SnapshotGraph:
    """Undirected weighted graph at one instant; weights are one-way delays (ms)."""

    t: float
    num_sats: int
    nodes: np.ndarray
    u: np.ndarray
    v: np.ndarray
    weight_ms: np.ndarray
    kind: np.ndarray

    @property
    def num_nodes(self) -> int:
        return int(self.nodes.max()) + 1 if self.nodes.size else 0

    def csr(self):
        """Symmetric CSR arrays ``(indptr, indices, weights)``; rows sorted by neighbour."""
        return kernels.build_csr(self.num_nodes, self.u, self.v, self.weight_ms)

    def edge_kind(self, a: int, b: int) -> int:
        hit = ((self.u == a) & (self.v == b)) | ((self.u == b) & (self.v == a))
        return int(self.kind[np.flatnonzero(hit)[0]])

    def without_gsls(self) -> "SnapshotGraph":
        keep = self.kind == ISL
        return SnapshotGraph(
            self.t,
            self.num_sats,
            np.arange(self.num_sats, dtype=np.int64),
            self.u[keep],
            self.v[keep],
            self.weight_ms[keep],
            self.kind[keep],
        )

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.nodes.tolist())
        for a, b, w, k in zip(self.u.tolist(), self.v.tolist(), self.weight_ms.tolist(), self.kind.tolist()):
            g.add_edge(a, b, weight=w, kind=KIND_NAMES[k])
        return g


def _links_of(gsl_states, station_id):
    st = gsl_states.get(station_id) if isinstance(gsl_states, Mapping) else None
    if st is None:
        return ()
    return tuple(s for s in st.links if s != UNSET)


def gsl_edges(num_sats, sat_pos, stations, gsl_states):
    """GSL edge arrays for the given stations (station objects with ids)."""
    u, v, w = [], [], []
    for st in stations:
        p = station_vector(st)
        node = station_node(num_sats, st.station_id)
        for sat in sorted(set(_links_of(gsl_states, st.station_id))):
            u.append(sat)
            v.append(node)
            w.append(float(np.linalg.norm(sat_pos[sat] - p)))
    return np.array(u, dtype=np.int64), np.array(v, dtype=np.int64), delay_ms(np.array(w, dtype=float))


def build_snapshot(
    mode,
    t,
    sats,
    stations,
    gsl_states,
    pair=None,
    isl_edges=None,
    positions=None,
) -> SnapshotGraph:
    """Snapshot at ``t``.

    ISL mode includes only the two ``pair`` stations (so ground nodes can
    never relay); Hybrid mode includes every station in ``stations``.
    """
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")
    c = as_constellation(sats)
    k = len(c)
    if isl_edges is None:
        if c.config is None:
            raise ConfigurationError("ISL edges required for a constellation without a grid config")
        isl_edges = build_plus_grid(c.config)
    iu, iv = isl_arrays(isl_edges) if not isinstance(isl_edges, tuple) else isl_edges
    pos = c.ecef(t) if positions is None else positions
    iw = delay_ms(np.linalg.norm(pos[iu] - pos[iv], axis=1))

    if mode == "isl":
        if pair is None:
            raise ConfigurationError("ISL mode needs the endpoint pair")
        by_id = {s.station_id: s for s in stations}
        members = [by_id[pair[0]], by_id[pair[1]]]
    else:
        members = list(stations)
    gu, gv, gw = gsl_edges(k, pos, members, gsl_states)
    nodes = np.concatenate(
        [np.arange(k, dtype=np.int64), np.array([station_node(k, s.station_id) for s in members], dtype=np.int64)]
    )
    return SnapshotGraph(
        float(t),
        k,
        nodes,
        np.concatenate([iu, gu]),
        np.concatenate([iv, gv]),
        np.concatenate([iw, gw]),
        np.concatenate([np.full(iu.size, ISL, dtype=np.int8), np.full(gu.size, GSL, dtype=np.int8)]),
    )


SNAPSHOT_HEADER = ["t", "node_a", "node_b", "kind", "delay_ms"]


def write_snapshot_csv(graphs: Iterable[SnapshotGraph], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_HEADER)
        for g in graphs:
            for a, b, k, d in zip(g.u.tolist(), g.v.tolist(), g.kind.tolist(), g.weight_ms.tolist()):
                w.writerow([f"{g.t:.3f}", a, b, KIND_NAMES[k], f"{d:.9f}"])
