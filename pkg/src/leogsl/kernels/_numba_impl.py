"""Loop-based numba kernels mirroring ``_numpy_impl`` one to one."""

import math

import numpy as np
from numba import njit

from ..constants import (
    DIRECTION_TIE_TOL_RAD,
    EARTH_ROTATION_RAD_S,
    NORTH,
    SOUTH,
)

A, ECC, INC, RAAN, ARGP, M0, MM = range(7)
_KEPLER_ITERS = 8


@njit(cache=True)
def _eci_row(elem, j, t, out):
    a = elem[j, A]
    e = elem[j, ECC]
    m = elem[j, M0] + elem[j, MM] * t
    ea = m
    if e != 0.0:
        for _ in range(_KEPLER_ITERS):
            ea = ea - (ea - e * math.sin(ea) - m) / (1.0 - e * math.cos(ea))
    xp = a * (math.cos(ea) - e)
    yp = a * math.sqrt(1.0 - e * e) * math.sin(ea)
    co = math.cos(elem[j, RAAN])
    so = math.sin(elem[j, RAAN])
    cw = math.cos(elem[j, ARGP])
    sw = math.sin(elem[j, ARGP])
    ci = math.cos(elem[j, INC])
    si = math.sin(elem[j, INC])
    out[0] = (co * cw - so * sw * ci) * xp + (-co * sw - so * cw * ci) * yp
    out[1] = (so * cw + co * sw * ci) * xp + (-so * sw + co * cw * ci) * yp
    out[2] = (sw * si) * xp + (cw * si) * yp


@njit(cache=True)
def _ecef_row(elem, j, t, out):
    _eci_row(elem, j, t, out)
    th = EARTH_ROTATION_RAD_S * t
    c = math.cos(th)
    s = math.sin(th)
    x = out[0]
    y = out[1]
    out[0] = c * x + s * y
    out[1] = -s * x + c * y


@njit(cache=True)
def _elevation(station, p):
    dx = p[0] - station[0]
    dy = p[1] - station[1]
    dz = p[2] - station[2]
    rs = math.sqrt(station[0] ** 2 + station[1] ** 2 + station[2] ** 2)
    rd = math.sqrt(dx * dx + dy * dy + dz * dz)
    s = (dx * station[0] + dy * station[1] + dz * station[2]) / (rs * rd)
    if s > 1.0:
        s = 1.0
    elif s < -1.0:
        s = -1.0
    return math.degrees(math.asin(s))


@njit(cache=True)
def _latitude(elem, j, t, buf):
    _eci_row(elem, j, t, buf)
    r = math.sqrt(buf[0] ** 2 + buf[1] ** 2 + buf[2] ** 2)
    return math.asin(buf[2] / r)


@njit(cache=True)
def _direction(elem, j, t, delta, buf):
    now = _latitude(elem, j, t, buf)
    diff = _latitude(elem, j, t + delta, buf) - now
    if diff > DIRECTION_TIE_TOL_RAD:
        return NORTH
    if diff < -DIRECTION_TIE_TOL_RAD:
        return SOUTH
    if t - delta >= 0.0:
        prev = now - _latitude(elem, j, t - delta, buf)
        if prev < -DIRECTION_TIE_TOL_RAD:
            return SOUTH
    return NORTH


@njit(cache=True)
def _visible_at(station, elem, j, t, e_min, buf):
    _ecef_row(elem, j, t, buf)
    return _elevation(station, buf) >= e_min


@njit(cache=True)
def _service_time(station, elem, j, t, e_min, step_ms, buf):
    cap = np.int64(math.floor(2.0 * math.pi / elem[j, MM] * 1000.0))
    lo = np.int64(0)
    hi = cap
    while True:
        nxt = min(lo + step_ms, cap)
        if nxt == lo:
            break
        if _visible_at(station, elem, j, t + nxt * 0.001, e_min, buf):
            lo = nxt
        else:
            hi = nxt
            break
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _visible_at(station, elem, j, t + mid * 0.001, e_min, buf):
            lo = mid
        else:
            hi = mid
    return lo * 0.001


@njit(cache=True)
def eci_positions(elem, t):
    out = np.empty((elem.shape[0], 3))
    for j in range(elem.shape[0]):
        _eci_row(elem, j, t, out[j])
    return out


@njit(cache=True)
def eci_to_ecef(pos, t):
    th = EARTH_ROTATION_RAD_S * t
    c = math.cos(th)
    s = math.sin(th)
    out = np.empty_like(pos)
    for j in range(pos.shape[0]):
        out[j, 0] = c * pos[j, 0] + s * pos[j, 1]
        out[j, 1] = -s * pos[j, 0] + c * pos[j, 1]
        out[j, 2] = pos[j, 2]
    return out


@njit(cache=True)
def ecef_positions(elem, t):
    out = np.empty((elem.shape[0], 3))
    for j in range(elem.shape[0]):
        _ecef_row(elem, j, t, out[j])
    return out


@njit(cache=True)
def elevations_deg(station, pos):
    out = np.empty(pos.shape[0])
    for j in range(pos.shape[0]):
        out[j] = _elevation(station, pos[j])
    return out


@njit(cache=True)
def latitudes(elem, t):
    buf = np.empty(3)
    out = np.empty(elem.shape[0])
    for j in range(elem.shape[0]):
        out[j] = _latitude(elem, j, t, buf)
    return out


@njit(cache=True)
def flight_directions(elem, t, delta):
    buf = np.empty(3)
    out = np.empty(elem.shape[0], dtype=np.int64)
    for j in range(elem.shape[0]):
        out[j] = _direction(elem, j, t, delta, buf)
    return out


@njit(cache=True)
def service_times(station, elem, t, e_min, step_ms):
    buf = np.empty(3)
    out = np.empty(elem.shape[0])
    for j in range(elem.shape[0]):
        out[j] = _service_time(station, elem, j, t, e_min, step_ms, buf)
    return out


@njit(cache=True)
def select_longest(station, elem, t, e_min, want_dir, exclude, delta, step_ms):
    buf = np.empty(3)
    best = -1
    best_r = 0.0
    visits = 0
    for j in range(elem.shape[0]):
        visits += 1
        if j == exclude:
            continue
        _ecef_row(elem, j, t, buf)
        if _elevation(station, buf) < e_min:
            continue
        if want_dir >= 0 and _direction(elem, j, t, delta, buf) != want_dir:
            continue
        r = _service_time(station, elem, j, t, e_min, step_ms, buf)
        if best < 0 or r > best_r:
            best = j
            best_r = r
    return best, best_r, visits


@njit(cache=True)
def nearest_visible(station, pos, e_min):
    best = -1
    best_d = np.inf
    for j in range(pos.shape[0]):
        if _elevation(station, pos[j]) < e_min:
            continue
        dx = pos[j, 0] - station[0]
        dy = pos[j, 1] - station[1]
        dz = pos[j, 2] - station[2]
        d = math.sqrt(dx * dx + dy * dy + dz * dz)
        if d < best_d:
            best = j
            best_d = d
    return best, best_d


@njit(cache=True)
def nearest_visible_many(stations, pos, e_min):
    out_idx = np.full(stations.shape[0], -1, dtype=np.int64)
    out_rng = np.full(stations.shape[0], np.inf)
    for i in range(stations.shape[0]):
        out_idx[i], out_rng[i] = nearest_visible(stations[i], pos, e_min)
    return out_idx, out_rng


@njit(cache=True)
def _heap_push(keys, vals, size, k, v):
    i = size
    keys[i] = k
    vals[i] = v
    while i > 0:
        parent = (i - 1) // 2
        if keys[parent] <= keys[i]:
            break
        keys[parent], keys[i] = keys[i], keys[parent]
        vals[parent], vals[i] = vals[i], vals[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _heap_pop(keys, vals, size):
    k = keys[0]
    v = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        c = left
        if left + 1 < size and keys[left + 1] < keys[left]:
            c = left + 1
        if keys[i] <= keys[c]:
            break
        keys[c], keys[i] = keys[i], keys[c]
        vals[c], vals[i] = vals[i], vals[c]
        i = c
    return k, v, size


@njit(cache=True)
def dijkstra(indptr, indices, weights, source):
    n = indptr.size - 1
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    cap = indices.size + 1
    keys = np.empty(cap)
    vals = np.empty(cap, dtype=np.int64)
    dist[source] = 0.0
    size = _heap_push(keys, vals, 0, 0.0, source)
    while size > 0:
        du, u, size = _heap_pop(keys, vals, size)
        if done[u]:
            continue
        done[u] = True
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            nd = du + weights[p]
            if nd < dist[v]:
                dist[v] = nd
                size = _heap_push(keys, vals, size, nd, v)
    return dist


@njit(cache=True)
def extract_path(indptr, indices, weights, dist_to_dst, src, dst, rel_tol):
    total = dist_to_dst[src]
    if not np.isfinite(total):
        return np.empty(0, dtype=np.int64)
    slack = rel_tol * max(1.0, total)
    path = np.empty(indptr.size - 1, dtype=np.int64)
    path[0] = src
    n = 1
    acc = 0.0
    u = src
    while u != dst:
        moved = False
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if acc + weights[p] + dist_to_dst[v] <= total + slack:
                acc += weights[p]
                u = v
                path[n] = u
                n += 1
                moved = True
                break
        if not moved:
            raise RuntimeError("shortest-path extraction lost the path")
    return path[:n].copy()


@njit(cache=True)
def build_csr(num_nodes, u, v, w):
    m = u.size
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    for e in range(m):
        indptr[u[e] + 1] += 1
        indptr[v[e] + 1] += 1
    for i in range(num_nodes):
        indptr[i + 1] += indptr[i]
    fill = indptr[:-1].copy()
    indices = np.empty(2 * m, dtype=np.int64)
    weights = np.empty(2 * m)
    for e in range(m):
        a = u[e]
        b = v[e]
        indices[fill[a]] = b
        weights[fill[a]] = w[e]
        fill[a] += 1
        indices[fill[b]] = a
        weights[fill[b]] = w[e]
        fill[b] += 1
    # rows are short: insertion sort by neighbour id
    for i in range(num_nodes):
        for p in range(indptr[i] + 1, indptr[i + 1]):
            key = indices[p]
            kw = weights[p]
            q = p - 1
            while q >= indptr[i] and indices[q] > key:
                indices[q + 1] = indices[q]
                weights[q + 1] = weights[q]
                q -= 1
            indices[q + 1] = key
            weights[q + 1] = kw
    return indptr, indices, weights
