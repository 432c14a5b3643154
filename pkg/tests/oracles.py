"""Independent reference implementations used only by the tests.

Nothing here calls the package's kernels: positions come from the closed
form of a circular orbit, searches are exhaustive.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from numba import njit

R_E = 6371.0
MU = 398600.4418
OMEGA_E = 7.2921159e-5


def circular_ecef(a, inc, raan, u0, t):
    """ECEF position of a circular orbit with argument of latitude ``u0`` at t=0."""
    t = np.asarray(t, dtype=float)
    n = math.sqrt(MU / a**3)
    u = u0 + n * t
    cu, su = np.cos(u), np.sin(u)
    co, so = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    x = a * (cu * co - su * ci * so)
    y = a * (cu * so + su * ci * co)
    z = a * su * si
    th = OMEGA_E * t
    return np.stack([x * np.cos(th) + y * np.sin(th), -x * np.sin(th) + y * np.cos(th), z], axis=-1)


def station_ecef(lat_deg, lon_deg, alt_km=0.0):
    la, lo = math.radians(lat_deg), math.radians(lon_deg)
    r = R_E + alt_km
    return np.array([r * math.cos(la) * math.cos(lo), r * math.cos(la) * math.sin(lo), r * math.sin(la)])


def elevation(st, sat):
    d = sat - st
    return np.degrees(np.arcsin(np.clip((d @ st) / (np.linalg.norm(d, axis=-1) * np.linalg.norm(st)), -1, 1)))


def sat_params(el):
    return el.semi_major_axis, el.inclination, el.raan, el.arg_perigee + el.mean_anomaly_at_epoch


@njit(cache=False)
def _first_drop_ms(st, a, inc, raan, u0, t, e_m, max_ms):
    n = math.sqrt(MU / a**3)
    co, so, ci, si = math.cos(raan), math.sin(raan), math.cos(inc), math.sin(inc)
    rs = math.sqrt(st[0] ** 2 + st[1] ** 2 + st[2] ** 2)
    s_e = math.sin(math.radians(e_m))
    for k in range(max_ms + 1):
        tt = t + k * 0.001
        u = u0 + n * tt
        cu, su = math.cos(u), math.sin(u)
        x = a * (cu * co - su * ci * so)
        y = a * (cu * so + su * ci * co)
        z = a * su * si
        th = OMEGA_E * tt
        px = x * math.cos(th) + y * math.sin(th)
        py = -x * math.sin(th) + y * math.cos(th)
        dx, dy, dz = px - st[0], py - st[1], z - st[2]
        dn = math.sqrt(dx * dx + dy * dy + dz * dz)
        el = math.degrees(math.asin(max(-1.0, min(1.0, (dx * st[0] + dy * st[1] + dz * st[2]) / (dn * rs)))))
        if el < e_m:
            return k
    return -1


def brute_service_time(st, el, t, e_m, horizon_s=300.0):
    """Last visible millisecond on the lattice t + k*0.001, by a 1 ms linear scan."""
    k = _first_drop_ms(np.asarray(st, dtype=float), *sat_params(el), float(t), float(e_m), int(horizon_s * 1000))
    assert k > 0, "satellite must be visible at t and set within the horizon"
    return (k - 1) * 0.001


def direction(el, t, delta=1.0):
    """0 north, 1 south, by geocentric latitude at t + delta vs t."""
    a, inc, raan, u0 = sat_params(el)
    z0, z1 = circular_ecef(a, inc, raan, u0, np.array([t, t + delta]))[:, 2]
    r = a
    l0, l1 = math.asin(z0 / r), math.asin(z1 / r)
    return 0 if l1 >= l0 else 1


def brute_candidates(st, sats, t, e_m):
    """{id: (direction, remaining)} for every satellite visible at t."""
    sats = list(sats)
    a, inc, raan, u0 = (np.array(v) for v in zip(*(sat_params(el) for el in sats)))
    n = np.sqrt(MU / a**3)
    u = u0 + n * t
    x = a * (np.cos(u) * np.cos(raan) - np.sin(u) * np.cos(inc) * np.sin(raan))
    y = a * (np.cos(u) * np.sin(raan) + np.sin(u) * np.cos(inc) * np.cos(raan))
    z = a * np.sin(u) * np.sin(inc)
    th = OMEGA_E * t
    pos = np.stack([x * math.cos(th) + y * math.sin(th), -x * math.sin(th) + y * math.cos(th), z], axis=1)
    out = {}
    for j in np.flatnonzero(elevation(st, pos) >= e_m):
        el = sats[j]
        out[el.satellite_id] = (direction(el, t), brute_service_time(st, el, t, e_m))
    return out


def pick_longest(cands, want=None, exclude=-1):
    """(id, remaining) maximising remaining service time; smallest id on ties."""
    best, best_r = -1, -1.0
    for sid in sorted(cands):
        d, r = cands[sid]
        if sid == exclude or (want is not None and d != want):
            continue
        if r > best_r:
            best, best_r = sid, r
    return best, best_r


def enumerate_shortest(n, edges, src, dst, rel_tol=1e-9):
    """Exhaustive search over simple paths: min delay, then lexicographic order."""
    adj = {i: {} for i in range(n)}
    for a, b, w in edges:
        if b not in adj[a] or w < adj[a][b]:
            adj[a][b] = w
            adj[b][a] = w
    if src == dst:
        return (src,), 0.0
    found = []

    def walk(path, dist):
        u = path[-1]
        if u == dst:
            found.append((dist, tuple(path)))
            return
        for v, w in adj[u].items():
            if v not in path:
                path.append(v)
                walk(path, dist + w)
                path.pop()

    walk([src], 0.0)
    if not found:
        return None, math.inf
    best = min(d for d, _ in found)
    ties = sorted(p for d, p in found if d <= best + rel_tol * max(1.0, best))
    return ties[0], best


def haversine(lat1, lon1, lat2, lon2, r=R_E):
    import mpmath as mp

    mp.mp.dps = 30
    p1, p2 = mp.radians(lat1), mp.radians(lat2)
    dp, dl = p2 - p1, mp.radians(lon2 - lon1)
    h = mp.sin(dp / 2) ** 2 + mp.cos(p1) * mp.cos(p2) * mp.sin(dl / 2) ** 2
    return float(2 * r * mp.asin(mp.sqrt(h)))


def pairs(iterable):
    return itertools.combinations(iterable, 2)
