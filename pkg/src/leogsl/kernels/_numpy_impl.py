"""Vectorised numpy versions of the hot kernels.

Element matrices are ``(K, 7)`` float arrays with columns
``a, ecc, inc, raan, argp, m0, mean_motion`` (km, -, rad, rad, rad, rad,
rad/s).  Every function here has a loop-based twin in ``_numba_impl`` with
the same signature and semantics.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from ..constants import (
    DIRECTION_TIE_TOL_RAD,
    EARTH_ROTATION_RAD_S,
    NORTH,
    SOUTH,
)

A, ECC, INC, RAAN, ARGP, M0, MM = range(7)
_KEPLER_ITERS = 8


def eci_positions(elem, t):
    """ECI positions of every row at time(s) ``t`` (scalar or per-row)."""
    a = elem[:, A]
    e = elem[:, ECC]
    m = elem[:, M0] + elem[:, MM] * t
    ea = m.copy()
    # each Newton step is an exact no-op on circular rows
    for _ in range(_KEPLER_ITERS if np.any(e != 0.0) else 0):
        ea = ea - (ea - e * np.sin(ea) - m) / (1.0 - e * np.cos(ea))
    xp = a * (np.cos(ea) - e)
    yp = a * np.sqrt(1.0 - e * e) * np.sin(ea)

    co, so = np.cos(elem[:, RAAN]), np.sin(elem[:, RAAN])
    cw, sw = np.cos(elem[:, ARGP]), np.sin(elem[:, ARGP])
    ci, si = np.cos(elem[:, INC]), np.sin(elem[:, INC])
    out = np.empty((elem.shape[0], 3))
    out[:, 0] = (co * cw - so * sw * ci) * xp + (-co * sw - so * cw * ci) * yp
    out[:, 1] = (so * cw + co * sw * ci) * xp + (-so * sw + co * cw * ci) * yp
    out[:, 2] = (sw * si) * xp + (cw * si) * yp
    return out


def eci_to_ecef(pos, t):
    th = EARTH_ROTATION_RAD_S * t
    c, s = np.cos(th), np.sin(th)
    out = np.empty_like(pos)
    out[:, 0] = c * pos[:, 0] + s * pos[:, 1]
    out[:, 1] = -s * pos[:, 0] + c * pos[:, 1]
    out[:, 2] = pos[:, 2]
    return out


def ecef_positions(elem, t):
    return eci_to_ecef(eci_positions(elem, t), t)


def elevations_deg(station, pos):
    d = pos - station
    rs = np.sqrt(station @ station)
    rd = np.sqrt(np.einsum("ij,ij->i", d, d))
    s = (d @ station) / (rs * rd)
    return np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))


def latitudes(elem, t):
    p = eci_positions(elem, t)
    r = np.sqrt(np.einsum("ij,ij->i", p, p))
    return np.arcsin(p[:, 2] / r)


def flight_directions(elem, t, delta):
    """NORTH/SOUTH code per row; flat tracks carry the t-delta trend."""
    now = latitudes(elem, t)
    diff = latitudes(elem, t + delta) - now
    out = np.full(elem.shape[0], NORTH, dtype=np.int64)
    out[diff < -DIRECTION_TIE_TOL_RAD] = SOUTH
    tie = np.abs(diff) <= DIRECTION_TIE_TOL_RAD
    if tie.any() and t - delta >= 0.0:
        prev = now[tie] - latitudes(elem[tie], t - delta)
        out[np.flatnonzero(tie)[prev < -DIRECTION_TIE_TOL_RAD]] = SOUTH
    return out


def _visible_at(station, elem, t_rows, e_min):
    return elevations_deg(station, ecef_positions(elem, t_rows)) >= e_min


def service_times(station, elem, t, e_min, step_ms):
    """Remaining service time (s) of each row, on a 1 ms lattice.

    Rows are assumed visible at ``t``.  A coarse scan of ``step_ms`` brackets
    the exit, then integer bisection finds the last visible millisecond.
    The result is capped at one orbital period.
    """
    k = elem.shape[0]
    cap = np.floor(2.0 * np.pi / elem[:, MM] * 1000.0).astype(np.int64)
    lo = np.zeros(k, dtype=np.int64)
    hi = cap.copy()
    active = np.ones(k, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        nxt = np.minimum(lo[idx] + step_ms, cap[idx])
        done = nxt == lo[idx]
        vis = np.zeros(idx.size, dtype=bool)
        live = ~done
        if live.any():
            vis[live] = _visible_at(
                station, elem[idx[live]], t + nxt[live] * 0.001, e_min
            )
        move = live & vis
        lo[idx[move]] = nxt[move]
        stop = live & ~vis
        hi[idx[stop]] = nxt[stop]
        active[idx[done | stop]] = False
    while True:
        gap = hi - lo > 1
        if not gap.any():
            break
        idx = np.flatnonzero(gap)
        mid = (lo[idx] + hi[idx]) // 2
        vis = _visible_at(station, elem[idx], t + mid * 0.001, e_min)
        lo[idx[vis]] = mid[vis]
        hi[idx[~vis]] = mid[~vis]
    return lo * 0.001


def select_longest(station, elem, t, e_min, want_dir, exclude, delta, step_ms):
    """Argmax of remaining service time among eligible visible rows.

    ``want_dir`` is NORTH, SOUTH or -1 (no direction filter).  Returns
    ``(index or -1, service time, rows visited)``.
    """
    k = elem.shape[0]
    el = elevations_deg(station, ecef_positions(elem, t))
    cand = el >= e_min
    if 0 <= exclude < k:
        cand[exclude] = False
    if want_dir >= 0 and cand.any():
        idx = np.flatnonzero(cand)
        dirs = flight_directions(elem[idx], t, delta)
        cand[idx[dirs != want_dir]] = False
    idx = np.flatnonzero(cand)
    if idx.size == 0:
        return -1, 0.0, k
    r = service_times(station, elem[idx], t, e_min, step_ms)
    best = int(np.argmax(r))  # first maximum = smallest id
    return int(idx[best]), float(r[best]), k


def nearest_visible(station, pos, e_min):
    """Visible row with the smallest slant range, or -1."""
    el = elevations_deg(station, pos)
    d = np.sqrt(np.einsum("ij,ij->i", pos - station, pos - station))
    d = np.where(el >= e_min, d, np.inf)
    if d.size == 0 or not np.isfinite(d.min()):
        return -1, np.inf
    j = int(np.argmin(d))
    return j, float(d[j])


def nearest_visible_many(stations, pos, e_min):
    out_idx = np.full(stations.shape[0], -1, dtype=np.int64)
    out_rng = np.full(stations.shape[0], np.inf)
    for i in range(stations.shape[0]):
        out_idx[i], out_rng[i] = nearest_visible(stations[i], pos, e_min)
    return out_idx, out_rng


def dijkstra(indptr, indices, weights, source):
    """Distances from ``source`` over a directed CSR graph."""
    n = indptr.size - 1
    g = csr_matrix((weights, indices, indptr), shape=(n, n))
    return _csgraph_dijkstra(g, directed=True, indices=source)


def extract_path(indptr, indices, weights, dist_to_dst, src, dst, rel_tol):
    """Lexicographically smallest shortest path src -> dst (node array).

    ``dist_to_dst`` must come from a Dijkstra run rooted at ``dst``;
    neighbour lists must be sorted ascending.
    """
    total = dist_to_dst[src]
    if not np.isfinite(total):
        return np.empty(0, dtype=np.int64)
    slack = rel_tol * max(1.0, total)
    path = [src]
    acc = 0.0
    u = src
    while u != dst:
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if acc + weights[p] + dist_to_dst[v] <= total + slack:
                acc += weights[p]
                u = int(v)
                path.append(u)
                break
        else:  # pragma: no cover - unreachable with a consistent dist
            raise RuntimeError("shortest-path extraction lost the path")
    return np.asarray(path, dtype=np.int64)


def build_csr(num_nodes, u, v, w):
    """Symmetric CSR of an undirected edge list, neighbours ascending."""
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    ww = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=num_nodes), out=indptr[1:])
    return indptr, dst[order].astype(np.int64), ww[order].astype(np.float64)
