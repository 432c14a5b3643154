"""Visible sets, flight directions and remaining service times."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .constants import (
    DIRECTION_DELTA_S,
    EARTH_RADIUS_KM,
    NORTH,
    SERVICE_SCAN_STEP_MS,
    SOUTH,
)
from .errors import ConfigurationError, GeometryError
from .orbits import OrbitalElements, as_constellation
from .stations import GroundStation, station_vector


class Direction(IntEnum):
    NORTH = NORTH
    SOUTH = SOUTH


@dataclass(frozen=True)
class VisibilityRecord:
    station_id: int
    satellite_id: int
    t: float
    elevation: float
    direction: Direction
    remaining_service_time: float


def _check_threshold(e_m):
    if not 0.0 <= e_m <= 90.0:
        raise ConfigurationError(f"minimum elevation {e_m} outside [0, 90]")


def _station_id(station):
    return station.station_id if isinstance(station, GroundStation) else -1


def visible_mask(station, sats, t, e_m) -> np.ndarray:
    c = as_constellation(sats)
    st = station_vector(station)
    return kernels.elevations_deg(st, c.ecef(t)) >= e_m


def visible_set(station, sats, t: float, e_m: float) -> list[VisibilityRecord]:
    """Satellites at or above ``e_m`` at ``t``, in ascending id order."""
    _check_threshold(e_m)
    c = as_constellation(sats)
    st = station_vector(station)
    el = kernels.elevations_deg(st, c.ecef(t))
    idx = np.flatnonzero(el >= e_m)
    if idx.size == 0:
        return []
    rows = np.ascontiguousarray(c.elements[idx])
    dirs = kernels.flight_directions(rows, float(t), DIRECTION_DELTA_S)
    rem = kernels.service_times(st, rows, float(t), float(e_m), SERVICE_SCAN_STEP_MS)
    sid = _station_id(station)
    return [
        VisibilityRecord(sid, int(j), float(t), float(el[j]), Direction(int(d)), float(r))
        for j, d, r in zip(idx, dirs, rem)
    ]


def flight_direction(el: OrbitalElements, t: float, delta: float = DIRECTION_DELTA_S) -> Direction:
    """North when latitude grows over ``[t, t + delta]``, South when it falls.

    A flat step keeps the trend of ``[t - delta, t]``; with no history
    (``t < delta``) or a flat trend as well, the answer is North.
    """
    if delta <= 0:
        raise ConfigurationError("delta must be positive")
    return Direction(int(kernels.flight_directions(el.as_row()[None, :], float(t), float(delta))[0]))


def remaining_service_time(station, el: OrbitalElements, t: float, e_m: float) -> float:
    """Seconds (1 ms resolution) until the satellite drops below ``e_m``.

    Capped at one orbital period.
    """
    _check_threshold(e_m)
    row = el.as_row()[None, :]
    st = station_vector(station)
    here = kernels.elevations_deg(st, kernels.ecef_positions(row, float(t)))[0]
    if here < e_m:
        raise GeometryError(
            f"satellite {el.satellite_id} is at {here:.3f} deg, below {e_m} deg at t={t}"
        )
    return float(kernels.service_times(st, row, float(t), float(e_m), SERVICE_SCAN_STEP_MS)[0])


def footprint_central_angle(altitude_km: float, e_m: float) -> float:
    """Earth central angle (rad) from a sub-satellite point to the ``e_m`` edge."""
    e = math.radians(e_m)
    return math.acos(EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km) * math.cos(e)) - e


def footprint_radius_km(altitude_km: float, e_m: float) -> float:
    return EARTH_RADIUS_KM * footprint_central_angle(altitude_km, e_m)


TRACE_HEADER = ["t", "station_id", "satellite_id", "elevation_deg", "direction", "remaining_s"]


def write_visibility_trace(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in records:
            w.writerow(
                [
                    f"{r.t:.3f}",
                    r.station_id,
                    r.satellite_id,
                    f"{r.elevation:.6f}",
                    r.direction.name.lower(),
                    f"{r.remaining_service_time:.3f}",
                ]
            )
