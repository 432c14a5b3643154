"""Switching intervals, RTT aggregates, CDFs and distance sweeps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .analysis import expected_service_time
from .constants import EARTH_RADIUS_KM, SERVICE_SCAN_STEP_MS
from .interconnect import SwitchEvent, simulate
from .orbits import GeodeticPoint, TimeGrid, as_constellation, geodetic_to_ecef
from .routing import Scenario, route_many
from .stations import station_vector


@dataclass
class SwitchIntervalStats:
    pair_id: str
    algorithm: str
    count: int
    intervals: list[float]
    mean_interval: float
    median_interval: float
    first_offset: float
    tail: float
    window: tuple[float, float]
    events: list[SwitchEvent] = field(default_factory=list, repr=False)


def switching_stats(events, pair, window, algorithm="", pair_id="") -> SwitchIntervalStats:
    """Merge both endpoints' switch events inside ``window`` and measure gaps.

    Events at the window start are link initialisation and are not counted.
    """
    start, end = window
    pair = set(pair)
    evs = sorted(e for e in events if e.station_id in pair and start < e.t <= end)
    ts = [e.t for e in evs]
    intervals = sorted(b - a for a, b in zip(ts, ts[1:]))
    first = ts[0] - start if ts else end - start
    tail = end - ts[-1] if ts else 0.0
    return SwitchIntervalStats(
        pair_id=pair_id,
        algorithm=algorithm,
        count=len(evs),
        intervals=intervals,
        mean_interval=float(np.mean(intervals)) if intervals else math.nan,
        median_interval=float(np.median(intervals)) if intervals else math.nan,
        first_offset=first,
        tail=tail,
        window=(start, end),
        events=evs,
    )


def great_circle_distance(a: GeodeticPoint, b: GeodeticPoint) -> float:
    """Haversine surface distance (km) on the spherical Earth."""
    la1, la2 = math.radians(a.latitude), math.radians(b.latitude)
    dla = la2 - la1
    dlo = math.radians(b.longitude - a.longitude)
    h = math.sin(dla / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin(dlo / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def chord_distance(a: GeodeticPoint, b: GeodeticPoint) -> float:
    return float(np.linalg.norm(geodetic_to_ecef(a).vector - geodetic_to_ecef(b).vector))


def cdf(values) -> list[tuple[float, float]]:
    """Empirical CDF as ``(value, fraction <= value)`` at each distinct value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return []
    uniq, counts = np.unique(v, return_counts=True)
    frac = np.cumsum(counts) / v.size
    return [(float(x), float(f)) for x, f in zip(uniq, frac)]


def disruption_score(series, window_ms: int = 1000) -> float:
    """Fraction of route-update instants within ``window_ms`` after a path change."""
    t = series.t_ms
    if t.size == 0:
        return 0.0
    hit = np.zeros(t.size, dtype=bool)
    for c in series.change_ms:
        hit |= (t >= c) & (t < c + window_ms)
    return float(hit.mean())


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    n: int

    def __call__(self, x):
        return self.slope * np.asarray(x) + self.intercept


def linear_fit(x, y) -> LinearFit | None:
    """Least-squares line; None when fewer than two distinct x values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = ~(np.isnan(x) | np.isnan(y))
    x, y = x[ok], y[ok]
    if np.unique(x).size < 2:
        return None
    slope, intercept = np.polyfit(x, y, 1)
    return LinearFit(float(slope), float(intercept), int(x.size))


@dataclass
class PairSweepRow:
    pair_id: str
    station_a: int
    station_b: int
    great_circle_km: float
    chord_km: float
    mean_rtt_ms: float
    algorithm: str
    coverage: float
    switch_count: int = 0
    path_changes: int = 0


def pair_id(a: int, b: int) -> str:
    return f"{a}-{b}"


def select_pairs(stations, count, min_km, max_km, seed) -> list[tuple[int, int]]:
    """``count`` pairs spread over equal-width distance bins in ``[min_km, max_km]``.

    Each bin contributes one pair drawn with a seeded PCG64 generator; empty
    bins are skipped.
    """
    rng = np.random.default_rng(seed)
    cands = []
    for a, b in itertools.combinations(stations, 2):
        d = great_circle_distance(a.point, b.point)
        if min_km <= d <= max_km:
            cands.append((d, a.station_id, b.station_id))
    cands.sort()
    edges = np.linspace(min_km, max_km, count + 1)
    out = []
    for lo, hi in zip(edges, edges[1:]):
        pool = [c for c in cands if lo <= c[0] < hi or (hi == max_km and c[0] == hi)]
        if pool:
            d, a, b = pool[int(rng.integers(len(pool)))]
            out.append((a, b))
    return out


def pair_sweep(pairs, algorithms, grid: TimeGrid, sats, stations, e_m, route_update_ms=100, mode="isl", isl_edges=None):
    """Mean RTT per pair and algorithm plus per-algorithm linear fits vs distance.

    Returns ``(rows, fits, series)`` where ``fits[alg]`` is a LinearFit or None.
    """
    c = as_constellation(sats)
    by_id = {s.station_id: s for s in stations}
    needed = sorted({sid for p in pairs for sid in p}) if mode == "isl" else sorted(by_id)
    members = [by_id[sid] for sid in needed]
    runs = {alg: simulate(alg, members, c, e_m, grid) for alg in algorithms}
    scenarios = [Scenario(mode, runs[alg], tuple(p), alg) for alg in algorithms for p in pairs]
    series = route_many(scenarios, c, members, grid, route_update_ms, isl_edges)
    rows = []
    for sc, s in zip(scenarios, series):
        a, b = sc.pair
        st = switching_stats(sc.run.events, sc.pair, (grid.start, grid.end))
        rows.append(
            PairSweepRow(
                pair_id=pair_id(a, b),
                station_a=a,
                station_b=b,
                great_circle_km=great_circle_distance(by_id[a].point, by_id[b].point),
                chord_km=chord_distance(by_id[a].point, by_id[b].point),
                mean_rtt_ms=s.mean_rtt,
                algorithm=sc.label,
                coverage=s.coverage,
                switch_count=st.count,
                path_changes=s.path_changes,
            )
        )
    fits = {}
    for alg in algorithms:
        sub = [r for r in rows if r.algorithm == alg]
        fits[alg] = linear_fit([r.great_circle_km for r in sub], [r.mean_rtt_ms for r in sub])
    return rows, fits, series


def switch_service_times(events, stations, sats, e_m) -> np.ndarray:
    """Remaining service times of every candidate visible at each switch event."""
    c = as_constellation(sats)
    by_id = {s.station_id: station_vector(s) for s in stations}
    seen = sorted({(e.t, e.station_id) for e in events})
    out = []
    for t, sid in seen:
        el = kernels.elevations_deg(by_id[sid], c.ecef(t))
        idx = np.flatnonzero(el >= e_m)
        if idx.size:
            rows = np.ascontiguousarray(c.elements[idx])
            out.append(kernels.service_times(by_id[sid], rows, float(t), float(e_m), SERVICE_SCAN_STEP_MS))
    return np.concatenate(out) if out else np.empty(0)


def service_time_check(samples, low=0.85, high=1.15) -> dict:
    """Mean candidate service time against the disc-model prediction from the longest one."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        return {"samples": 0, "mean_s": None, "st_max_measured_s": None, "expected_s": None, "ratio": None, "passed": False}
    st_max = float(samples.max())
    expected = expected_service_time(st_max)
    mean = float(samples.mean())
    ratio = mean / expected
    return {
        "samples": int(samples.size),
        "mean_s": mean,
        "st_max_measured_s": st_max,
        "expected_s": expected,
        "ratio": ratio,
        "passed": bool(low <= ratio <= high),
    }
