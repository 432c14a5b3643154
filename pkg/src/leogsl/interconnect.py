"""Satellite-ground interconnection policies.

C-LRST keeps two links per station, slot 0 for a north-flying and slot 1 for
a south-flying satellite, each picked by longest remaining service time.
The baselines are LRST-1/LRST-2 (one/two links, no direction split), ND
(nearest at switch time) and AND (always nearest).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .constants import DIRECTION_DELTA_S, NORTH, SERVICE_SCAN_STEP_MS, SOUTH, UNSET
from .errors import ConfigurationError
from .orbits import Constellation, TimeGrid, as_constellation
from .stations import GroundStation, station_matrix, station_vector
from .visibility import Direction

ALGORITHMS = ("clrst", "lrst1", "lrst2", "nd", "and")
LINKS_PER_STATION = {"clrst": 2, "lrst1": 1, "lrst2": 2, "nd": 1, "and": 1}


@dataclass(frozen=True)
class GslState:
    station_id: int
    l0: int = UNSET
    l1: int = UNSET
    t: float = 0.0

    @property
    def links(self) -> tuple[int, int]:
        return (self.l0, self.l1)


@dataclass(frozen=True, order=True)
class SwitchEvent:
    t: float
    station_id: int
    slot: int
    old_satellite: int
    new_satellite: int


@dataclass
class VisitCounter:
    """Counts selector calls and satellites examined, for complexity checks."""

    calls: int = 0
    visits: int = 0


def check_algorithm(name: str) -> str:
    name = name.lower()
    if name not in ALGORITHMS:
        raise ConfigurationError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return name


# ---------------------------------------------------------------------------
# selectors
# ---------------------------------------------------------------------------


def _longest(st, c: Constellation, want_dir, e_m, t, exclude, counter):
    best, _, visits = kernels.select_longest(
        st,
        c.elements,
        float(t),
        float(e_m),
        int(want_dir),
        int(exclude),
        DIRECTION_DELTA_S,
        SERVICE_SCAN_STEP_MS,
    )
    if counter is not None:
        counter.calls += 1
        counter.visits += int(visits)
    return int(best)


def clrst_select(station, sats, d, e_m, t, exclude=UNSET, counter=None) -> int:
    """Longest-remaining-service satellite among visible ones flying ``d``.

    Ties go to the smallest id; UNSET when no candidate exists.
    """
    return _longest(station_vector(station), as_constellation(sats), Direction(d), e_m, t, exclude, counter)


def lrst_select(station, sats, e_m, t, exclude=UNSET, counter=None) -> int:
    """Longest-remaining-service satellite over every visible one."""
    return _longest(station_vector(station), as_constellation(sats), -1, e_m, t, exclude, counter)


def nd_select(station, sats, e_m, t) -> int:
    """Visible satellite with the smallest slant range (ties: smallest id)."""
    c = as_constellation(sats)
    best, _ = kernels.nearest_visible(station_vector(station), c.ecef(t), float(e_m))
    return int(best)


# ---------------------------------------------------------------------------
# per-slot stepping on arrays
# ---------------------------------------------------------------------------


def _pick(algorithm, k, st, c, e_m, t, other, pos):
    if algorithm == "clrst":
        return _longest(st, c, NORTH if k == 0 else SOUTH, e_m, t, other, None)
    if algorithm in ("lrst1", "lrst2"):
        return _longest(st, c, -1, e_m, t, other, None)
    best, _ = kernels.nearest_visible(st, pos, float(e_m))
    return int(best)


def _elevation_ok(st_mat, pos, links, e_m):
    """Visibility of each (station, slot) link; UNSET counts as not visible."""
    ok = links >= 0
    if not ok.any():
        return ok
    sat = pos[np.where(ok, links, 0)]  # (S, L, 3)
    d = sat - st_mat[:, None, :]
    num = np.einsum("slk,sk->sl", d, st_mat)
    den = np.linalg.norm(d, axis=2) * np.linalg.norm(st_mat, axis=1)[:, None]
    el = np.degrees(np.arcsin(np.clip(num / den, -1.0, 1.0)))
    return ok & (el >= e_m)


def initial_links(algorithm, st_mat, station_ids, c, e_m, t):
    algorithm = check_algorithm(algorithm)
    n_links = LINKS_PER_STATION[algorithm]
    links = np.full((len(station_ids), 2), UNSET, dtype=np.int64)
    events = []
    pos = c.ecef(t) if algorithm in ("nd", "and") else None
    for s, sid in enumerate(station_ids):
        for k in range(n_links):
            other = links[s, 1 - k]
            new = _pick(algorithm, k, st_mat[s], c, e_m, t, other, pos)
            links[s, k] = new
            if new != UNSET:
                events.append(SwitchEvent(float(t), int(sid), k, UNSET, new))
    return links, events


def step_links(algorithm, links, st_mat, station_ids, c, e_m, t):
    """Advance every station's links to time ``t``; returns new links and events."""
    algorithm = check_algorithm(algorithm)
    n_links = LINKS_PER_STATION[algorithm]
    pos = c.ecef(t)
    ok = _elevation_ok(st_mat, pos, links, e_m)
    new_links = links.copy()
    events = []

    if algorithm == "and":
        near, near_rng = kernels.nearest_visible_many(st_mat, pos, float(e_m))
        for s, sid in enumerate(station_ids):
            cur = int(links[s, 0])
            cand = int(near[s])
            if cand == cur:
                continue
            if ok[s, 0]:
                cur_rng = float(np.linalg.norm(pos[cur] - st_mat[s]))
                if not near_rng[s] < cur_rng:
                    continue
            if cand == UNSET and cur == UNSET:
                continue
            new_links[s, 0] = cand
            events.append(SwitchEvent(float(t), int(sid), 0, cur, cand))
        return new_links, events

    need = ~ok[:, :n_links]
    for s in np.flatnonzero(need.any(axis=1)):
        for k in range(n_links):
            if not need[s, k]:
                continue
            old = int(new_links[s, k])
            new = _pick(algorithm, k, st_mat[s], c, e_m, t, int(new_links[s, 1 - k]), pos)
            if new != old:
                new_links[s, k] = new
                events.append(SwitchEvent(float(t), int(station_ids[s]), k, old, new))
    return new_links, events


# ---------------------------------------------------------------------------
# public state-map API
# ---------------------------------------------------------------------------


def _as_arrays(stations: Sequence[GroundStation]):
    return station_matrix(stations), [s.station_id for s in stations]


def _to_states(links, station_ids, t):
    return {
        sid: GslState(sid, int(links[s, 0]), int(links[s, 1]), float(t))
        for s, sid in enumerate(station_ids)
    }


def _from_states(states, station_ids):
    links = np.full((len(station_ids), 2), UNSET, dtype=np.int64)
    for s, sid in enumerate(station_ids):
        st = states.get(sid)
        if st is not None:
            links[s] = st.links
    return links


def initialize(algorithm, stations, sats, e_m, t=0.0):
    st_mat, ids = _as_arrays(stations)
    links, events = initial_links(algorithm, st_mat, ids, as_constellation(sats), e_m, t)
    return _to_states(links, ids, t), events


def handover(algorithm, states, stations, sats, e_m, t_next):
    st_mat, ids = _as_arrays(stations)
    links = _from_states(states, ids)
    new, events = step_links(algorithm, links, st_mat, ids, as_constellation(sats), e_m, t_next)
    return _to_states(new, ids, t_next), events


def clrst_init(stations, sats, e_m, t=0.0):
    """Both C-LRST links of every station at the first slot, plus their events."""
    return initialize("clrst", stations, sats, e_m, t)


def clrst_handover(states, stations, sats, e_m, t_next):
    """Keep links still visible at ``t_next``; refill the others per direction."""
    return handover("clrst", states, stations, sats, e_m, t_next)


def and_policy(states, stations, sats, e_m, t_next):
    """One AND slot: move to a strictly nearer visible satellite when one exists."""
    return handover("and", states, stations, sats, e_m, t_next)


def replay_events(station_ids, events, t=None):
    """Fold events onto an all-UNSET start; returns the resulting state map."""
    links = {sid: [UNSET, UNSET] for sid in station_ids}
    last_t = 0.0
    for ev in sorted(events):
        if links[ev.station_id][ev.slot] != ev.old_satellite:
            raise ValueError(f"event {ev} does not follow the replayed state")
        links[ev.station_id][ev.slot] = ev.new_satellite
        last_t = ev.t
    t = last_t if t is None else t
    return {sid: GslState(sid, l[0], l[1], float(t)) for sid, l in links.items()}


# ---------------------------------------------------------------------------
# full run
# ---------------------------------------------------------------------------


@dataclass
class GslRun:
    """Link history of one policy over a time grid.

    ``links[k, s]`` holds the (slot 0, slot 1) satellites of station ``s``
    during slot ``k``.
    """

    algorithm: str
    station_ids: list[int]
    times: np.ndarray
    links: np.ndarray
    events: list[SwitchEvent] = field(default_factory=list)

    def index_of(self, station_id: int) -> int:
        return self.station_ids.index(station_id)

    def states_at(self, k: int) -> dict[int, GslState]:
        return _to_states(self.links[k], self.station_ids, self.times[k])

    def final_states(self) -> dict[int, GslState]:
        return self.states_at(len(self.times) - 1)


def simulate(algorithm, stations, sats, e_m, grid: TimeGrid) -> GslRun:
    algorithm = check_algorithm(algorithm)
    c = as_constellation(sats)
    st_mat, ids = _as_arrays(stations)
    times = grid.times()
    hist = np.full((times.size, len(ids), 2), UNSET, dtype=np.int64)
    events: list[SwitchEvent] = []
    if times.size == 0:
        return GslRun(algorithm, ids, times, hist, events)
    links, ev = initial_links(algorithm, st_mat, ids, c, e_m, times[0])
    hist[0] = links
    events += ev
    for k in range(1, times.size):
        links, ev = step_links(algorithm, links, st_mat, ids, c, e_m, times[k])
        hist[k] = links
        events += ev
    events.sort()
    return GslRun(algorithm, ids, times, hist, events)
