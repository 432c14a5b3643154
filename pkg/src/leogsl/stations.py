"""Ground-station records and CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import IngestionError
from .orbits import EcefPosition, GeodeticPoint, geodetic_to_ecef

HEADER = ["id", "name", "lat_deg", "lon_deg", "alt_km"]
BUNDLED_STATIONS = "starlink_gateways_165.csv"


@dataclass(frozen=True)
class GroundStation:
    station_id: int
    name: str
    point: GeodeticPoint

    @property
    def ecef(self) -> EcefPosition:
        return geodetic_to_ecef(self.point)


def bundled_stations_path() -> Path:
    return Path(str(resources.files("leogsl.data").joinpath(BUNDLED_STATIONS)))


def ingest_stations(path: str | Path | None = None) -> list[GroundStation]:
    """Read ``id,name,lat_deg,lon_deg,alt_km`` rows; defaults to the bundled set.

    All problems are collected and reported together with their line numbers.
    """
    path = Path(path) if path is not None else bundled_stations_path()
    problems: list[str] = []
    out: list[GroundStation] = []
    seen: dict[int, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != HEADER:
        raise IngestionError([f"line 1: header must be {','.join(HEADER)}"])
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(HEADER):
            problems.append(f"line {lineno}: expected {len(HEADER)} fields, got {len(row)}")
            continue
        try:
            sid = int(row[0])
            lat, lon, alt = float(row[2]), float(row[3]), float(row[4])
        except ValueError:
            problems.append(f"line {lineno}: non-numeric field in {row!r}")
            continue
        if sid < 0:
            problems.append(f"line {lineno}: station id must be non-negative")
            continue
        if not -90.0 <= lat <= 90.0:
            problems.append(f"line {lineno}: latitude {lat} out of range")
            continue
        if not -180.0 <= lon <= 180.0:
            problems.append(f"line {lineno}: longitude {lon} out of range")
            continue
        if sid in seen:
            problems.append(f"line {lineno}: duplicate id {sid} (first on line {seen[sid]})")
            continue
        seen[sid] = lineno
        out.append(GroundStation(sid, row[1].strip(), GeodeticPoint(lat, lon, alt)))
    if problems:
        raise IngestionError(problems)
    return out


def station_vector(station) -> np.ndarray:
    """ECEF vector (km) for a GroundStation, GeodeticPoint, EcefPosition or array."""
    if isinstance(station, GroundStation):
        return station.ecef.vector
    if isinstance(station, GeodeticPoint):
        return geodetic_to_ecef(station).vector
    if isinstance(station, EcefPosition):
        return station.vector
    v = np.asarray(station, dtype=float)
    if v.shape != (3,):
        raise TypeError(f"cannot interpret {station!r} as a station position")
    return v


def station_matrix(stations) -> np.ndarray:
    return np.array([station_vector(s) for s in stations]).reshape(-1, 3)


def find_station(stations, key) -> GroundStation:
    """Look a station up by id or by case-insensitive name prefix."""
    if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
        sid = int(key)
        for s in stations:
            if s.station_id == sid:
                return s
    else:
        k = key.lower()
        hits = [s for s in stations if s.name.lower().startswith(k)]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise KeyError(f"station name {key!r} is ambiguous")
    raise KeyError(f"no station {key!r}")
