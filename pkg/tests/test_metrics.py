import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leogsl import metrics
from leogsl.interconnect import SwitchEvent, simulate
from leogsl.orbits import GeodeticPoint, TimeGrid
from leogsl.routing import RouteSeries

import oracles

C = 299792.458


def _ev(t, sid=1, slot=0):
    return SwitchEvent(float(t), sid, slot, 0, 1)


def test_switching_empty():
    s = metrics.switching_stats([], (1, 2), (0.0, 1000.0))
    assert s.count == 0 and s.intervals == [] and math.isnan(s.mean_interval)
    assert s.first_offset == 1000.0 and s.tail == 0.0


def test_switching_example():
    s = metrics.switching_stats([_ev(300, 2), _ev(100, 1), _ev(600, 1), _ev(0, 1)], (1, 2), (0.0, 1000.0))
    assert s.count == 3
    assert s.intervals == [200.0, 300.0]
    assert s.mean_interval == 250.0 and s.median_interval == 250.0


def test_switching_ignores_other_stations():
    s = metrics.switching_stats([_ev(10, 1), _ev(20, 9)], (1, 2), (0.0, 100.0))
    assert s.count == 1


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.5, 999.5), max_size=30))
def test_interval_accounting(times):
    s = metrics.switching_stats([_ev(t) for t in times], (1, 2), (0.0, 1000.0))
    assert sum(s.intervals) + s.first_offset + s.tail == pytest.approx(1000.0)
    assert all(x >= 0 for x in s.intervals)
    if s.count:
        assert s.count == len(s.intervals) + 1


def test_great_circle():
    a = GeodeticPoint(0.0, 0.0)
    assert metrics.great_circle_distance(a, a) == 0.0
    assert metrics.great_circle_distance(a, GeodeticPoint(0.0, 180.0)) == pytest.approx(math.pi * 6371.0)


def test_flagship_distance(by_id):
    a, b = by_id[84].point, by_id[102].point
    ref = oracles.haversine(a.latitude, a.longitude, b.latitude, b.longitude)
    d = metrics.great_circle_distance(a, b)
    assert d == pytest.approx(ref, rel=1e-12)
    assert d == pytest.approx(10690.97, abs=0.05)
    # roughly "10,000 km"
    assert abs(d - 10000.0) / 10000.0 < 0.1
    assert metrics.chord_distance(a, b) < d


@settings(max_examples=50, deadline=None)
@given(st.floats(-90, 90), st.floats(-180, 180), st.floats(-90, 90), st.floats(-180, 180))
def test_great_circle_vs_oracle(la1, lo1, la2, lo2):
    d = metrics.great_circle_distance(GeodeticPoint(la1, lo1), GeodeticPoint(la2, lo2))
    assert d == pytest.approx(oracles.haversine(la1, lo1, la2, lo2), rel=1e-9, abs=1e-6)
    assert 0.0 <= d <= math.pi * 6371.0 + 1e-6


def test_cdf():
    assert metrics.cdf([5]) == [(5.0, 1.0)]
    assert metrics.cdf([1, 2, 2, 4]) == [(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]
    assert metrics.cdf([]) == []


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_cdf_monotone(vals):
    out = metrics.cdf(vals)
    fr = [f for _, f in out]
    assert fr == sorted(fr) and fr[-1] == 1.0
    assert [v for v, _ in out] == sorted(set(float(v) for v in vals))


def test_linear_fit():
    d = np.array([2000.0, 5000.0, 9000.0, 12000.0])
    fit = metrics.linear_fit(d, 2 * d / C * 1000)
    assert fit.slope == pytest.approx(2 / C * 1000)
    assert fit.intercept == pytest.approx(0.0, abs=1e-9)
    assert metrics.linear_fit([3000.0], [40.0]) is None
    assert metrics.linear_fit([3000.0, 3000.0], [40.0, 41.0]) is None


def test_disruption_score():
    t = np.arange(0, 5000, 100)
    s = RouteSeries("isl", "clrst", (1, 2), t, np.zeros(t.size), t * 0, t * 0, [], [1000])
    assert metrics.disruption_score(s) == pytest.approx(10 / 50)
    s.change_ms = []
    assert metrics.disruption_score(s) == 0.0
    s.change_ms = [1000, 1500]
    assert metrics.disruption_score(s) == pytest.approx(15 / 50)


def test_select_pairs(stations):
    pairs = metrics.select_pairs(stations, 10, 2000.0, 12000.0, seed=0)
    assert len(pairs) == 10
    by = {s.station_id: s for s in stations}
    d = [metrics.great_circle_distance(by[a].point, by[b].point) for a, b in pairs]
    assert all(2000 <= x <= 12000 for x in d) and d == sorted(d)
    assert max(d) - min(d) > 8000
    assert pairs == metrics.select_pairs(stations, 10, 2000.0, 12000.0, seed=0)


def test_pair_sweep_single_pair(shell1, by_id):
    rows, fits, series = metrics.pair_sweep([(84, 102)], ["clrst"], TimeGrid(0, 5, 1), shell1, list(by_id.values()), 25.0, 1000)
    assert len(rows) == 1 and fits["clrst"] is None
    r = rows[0]
    assert r.great_circle_km > 0 and r.coverage == 1.0
    assert r.mean_rtt_ms >= 2 * r.chord_km / C * 1000


def test_service_time_check_shape():
    assert metrics.service_time_check([])["passed"] is False
    out = metrics.service_time_check([100.0, 200.0, 250.0])
    assert out["st_max_measured_s"] == 250.0
    assert out["expected_s"] == pytest.approx(math.pi * 250 / 8)


def test_service_time_invariant_over_all_stations(shell1, stations):
    # candidate service times seen at every switch event of a 165-station run
    run = simulate("clrst", stations, shell1, 25.0, TimeGrid(0, 1000, 1))
    samples = metrics.switch_service_times(run.events, stations, shell1, 25.0)
    out = metrics.service_time_check(samples)
    assert out["samples"] > 10000
    assert 0.85 <= out["ratio"] <= 1.15, out
