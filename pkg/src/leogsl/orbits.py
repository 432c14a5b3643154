"""Walker Delta generation, TLE parsing, two-body propagation and frames."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .constants import EARTH_MU, EARTH_RADIUS_KM, EARTH_ROTATION_RAD_S
from .errors import (
    ConfigurationError,
    GeometryError,
    TleParseError,
    UnsupportedOrbitError,
)

SECONDS_PER_DAY = 86400.0
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker Delta ``N/M/F/alpha`` shell at a single altitude."""

    orbit_count: int
    sats_per_orbit: int
    phase_factor: int
    inclination_deg: float
    altitude_km: float
    epoch: float = 0.0

    def __post_init__(self):
        n, m, f = self.orbit_count, self.sats_per_orbit, self.phase_factor
        if n < 1 or m < 1:
            raise ConfigurationError(f"need N >= 1 and M >= 1, got N={n}, M={m}")
        if not (1 - n <= f <= n - 1) and not (n == 1 and f == 0):
            raise ConfigurationError(
                f"phase factor F={f} outside {{{1 - n}, ..., {n - 1}}}"
            )
        if self.altitude_km <= 0:
            raise ConfigurationError("altitude must be positive")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ConfigurationError("inclination must lie in [0, 180] degrees")

    @property
    def size(self) -> int:
        return self.orbit_count * self.sats_per_orbit

    @property
    def semi_major_axis_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def phase_offset_rad(self) -> float:
        """In-orbit phase shift between same-index satellites of adjacent orbits."""
        return TWO_PI * self.phase_factor / (self.orbit_count * self.sats_per_orbit)

    def scaled(self, orbit_multiplier: int) -> "ConstellationConfig":
        return replace(self, orbit_count=self.orbit_count * orbit_multiplier)


STARLINK_SHELL1 = ConstellationConfig(72, 18, 45, 53.0, 550.0)


@dataclass(frozen=True)
class OrbitalElements:
    satellite_id: int
    semi_major_axis: float
    inclination: float
    raan: float
    eccentricity: float
    arg_perigee: float
    mean_anomaly_at_epoch: float
    mean_motion: float
    epoch: datetime | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.semi_major_axis <= EARTH_RADIUS_KM:
            raise ConfigurationError(
                f"satellite {self.satellite_id}: semi-major axis "
                f"{self.semi_major_axis} km is inside the Earth"
            )
        if self.mean_motion <= 0:
            raise ConfigurationError("mean motion must be positive")

    @property
    def period(self) -> float:
        return TWO_PI / self.mean_motion

    def as_row(self) -> np.ndarray:
        return np.array(
            [
                self.semi_major_axis,
                self.eccentricity,
                self.inclination,
                self.raan,
                self.arg_perigee,
                self.mean_anomaly_at_epoch,
                self.mean_motion,
            ]
        )


@dataclass(frozen=True)
class EciPosition:
    x: float
    y: float
    z: float
    t: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class EcefPosition:
    x: float
    y: float
    z: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    @classmethod
    def from_vector(cls, v) -> "EcefPosition":
        return cls(float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class GeodeticPoint:
    latitude: float
    longitude: float
    altitude: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ConfigurationError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ConfigurationError(f"longitude {self.longitude} outside [-180, 180]")


@dataclass(frozen=True)
class TimeGrid:
    """Half-open slot grid ``start, start + slot, ...`` below ``end``."""

    start: float
    end: float
    slot: float

    def __post_init__(self):
        if self.slot <= 0:
            raise ConfigurationError("slot must be positive")
        if self.end < self.start:
            raise ConfigurationError("time grid ends before it starts")

    @property
    def count(self) -> int:
        # tolerate float noise such as (1.0 - 0.0) / 0.1
        return max(0, math.ceil((self.end - self.start) / self.slot - 1e-9))

    def times(self) -> np.ndarray:
        return self.start + np.arange(self.count) * self.slot


def mean_motion_for(a_km: float) -> float:
    return math.sqrt(EARTH_MU / a_km**3)


def semi_major_axis_for(mean_motion: float) -> float:
    return (EARTH_MU / mean_motion**2) ** (1.0 / 3.0)


def generate_walker_delta(config: ConstellationConfig) -> list[OrbitalElements]:
    """All ``N*M`` satellites; id ``i*M + j`` is satellite ``j`` of orbit ``i``."""
    a = config.semi_major_axis_km
    n = mean_motion_for(a)
    inc = math.radians(config.inclination_deg)
    df = config.phase_offset_rad
    out = []
    for i in range(config.orbit_count):
        raan = TWO_PI * i / config.orbit_count
        for j in range(config.sats_per_orbit):
            anomaly = (TWO_PI * j / config.sats_per_orbit + i * df) % TWO_PI
            out.append(
                OrbitalElements(
                    satellite_id=i * config.sats_per_orbit + j,
                    semi_major_axis=a,
                    inclination=inc,
                    raan=raan,
                    eccentricity=0.0,
                    arg_perigee=0.0,
                    mean_anomaly_at_epoch=anomaly,
                    mean_motion=n,
                )
            )
    return out


# ---------------------------------------------------------------------------
# TLE
# ---------------------------------------------------------------------------


def tle_checksum(line: str) -> int:
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _field(line: str, lineno: int, first: int, last: int, what: str, conv=float):
    """Columns are 1-based and inclusive, as in the TLE format definition."""
    raw = line[first - 1 : last]
    try:
        return conv(raw)
    except ValueError:
        raise TleParseError(f"{what} is not numeric: {raw!r}", lineno, (first, last))


def _implied_decimal(raw: str) -> float:
    """Parse ``' 12345-4'`` style fields meaning 0.12345e-4."""
    raw = raw.strip()
    if not raw:
        return 0.0
    sign = -1.0 if raw[0] == "-" else 1.0
    raw = raw.lstrip("+-")
    mantissa, exp = raw[:-2], raw[-2:]
    return sign * float("0." + mantissa) * 10.0 ** int(exp)


def _epoch(yy: int, day: float) -> datetime:
    year = 2000 + yy if yy < 57 else 1900 + yy
    return datetime(year, 1, 1, tzinfo=timezone.utc) + timedelta(days=day - 1.0)


def parse_tle(line1: str, line2: str, satellite_id: int | None = None) -> OrbitalElements:
    """Decode one element set.  ``satellite_id`` defaults to the catalog number."""
    for no, line in ((1, line1), (2, line2)):
        if len(line) != 69:
            raise TleParseError(f"expected 69 characters, got {len(line)}", no, (1, 69))
        if line[0] != str(no):
            raise TleParseError(f"line must start with {no!r}", no, (1, 1))
        if not line[68].isdigit():
            raise TleParseError("checksum is not a digit", no, (69, 69))
        if tle_checksum(line) != int(line[68]):
            raise TleParseError(
                f"checksum mismatch (computed {tle_checksum(line)}, found {line[68]})",
                no,
                (69, 69),
            )

    catnum = _field(line1, 1, 3, 7, "satellite number", int)
    if _field(line2, 2, 3, 7, "satellite number", int) != catnum:
        raise TleParseError("satellite number differs from line 1", 2, (3, 7))
    yy = _field(line1, 1, 19, 20, "epoch year", int)
    day = _field(line1, 1, 21, 32, "epoch day")
    for first, last, what in ((45, 52, "second derivative"), (54, 61, "BSTAR")):
        _field(line1, 1, first, last, what, _implied_decimal)

    inc = _field(line2, 2, 9, 16, "inclination")
    raan = _field(line2, 2, 18, 25, "right ascension")
    ecc = _field(line2, 2, 27, 33, "eccentricity", lambda s: float("0." + s.strip()))
    argp = _field(line2, 2, 35, 42, "argument of perigee")
    ma = _field(line2, 2, 44, 51, "mean anomaly")
    rev_day = _field(line2, 2, 53, 63, "mean motion")
    if rev_day <= 0:
        raise TleParseError("mean motion must be positive", 2, (53, 63))

    n = rev_day * TWO_PI / SECONDS_PER_DAY
    return OrbitalElements(
        satellite_id=catnum if satellite_id is None else satellite_id,
        semi_major_axis=semi_major_axis_for(n),
        inclination=math.radians(inc),
        raan=math.radians(raan),
        eccentricity=ecc,
        arg_perigee=math.radians(argp),
        mean_anomaly_at_epoch=math.radians(ma),
        mean_motion=n,
        epoch=_epoch(yy, day),
    )


def format_tle(el: OrbitalElements, catnum: int | None = None, epoch: datetime | None = None) -> tuple[str, str]:
    """Render elements as a checksummed TLE pair (drag terms zeroed)."""
    catnum = el.satellite_id + 1 if catnum is None else catnum
    epoch = epoch or el.epoch or datetime(2000, 1, 1, tzinfo=timezone.utc)
    start = datetime(epoch.year, 1, 1, tzinfo=epoch.tzinfo)
    day = (epoch - start).total_seconds() / SECONDS_PER_DAY + 1.0
    l1 = (
        f"1 {catnum:05d}U 00000A   {epoch.year % 100:02d}{day:012.8f} "
        f" .00000000  00000-0  00000-0 0    1"
    )
    ecc = f"{el.eccentricity:.7f}"[2:]
    rev_day = el.mean_motion * SECONDS_PER_DAY / TWO_PI
    l2 = (
        f"2 {catnum:05d} {math.degrees(el.inclination) % 360:8.4f} "
        f"{math.degrees(el.raan) % 360:8.4f} {ecc} "
        f"{math.degrees(el.arg_perigee) % 360:8.4f} "
        f"{math.degrees(el.mean_anomaly_at_epoch) % 360:8.4f} {rev_day:11.8f}    0"
    )
    return l1 + str(tle_checksum(l1)), l2 + str(tle_checksum(l2))


def read_tle_text(text: str) -> list[OrbitalElements]:
    """Parse 2-line or 3-line (name header) sets and align their epochs.

    Satellites are renumbered 0..K-1 in file order.  Simulation t=0 is the
    earliest epoch; later epochs have their mean anomaly wound back.
    """
    lines = [ln.rstrip("\r\n") for ln in text.splitlines() if ln.strip()]
    parsed = []
    i = 0
    while i < len(lines):
        name = ""
        if not lines[i].startswith("1 "):
            name = lines[i].strip()
            i += 1
        if i + 1 >= len(lines):
            raise TleParseError("truncated element set at end of file")
        el = parse_tle(lines[i], lines[i + 1], satellite_id=len(parsed))
        parsed.append(replace(el, name=name))
        i += 2
    if not parsed:
        return []
    t0 = min(el.epoch for el in parsed)
    out = []
    for el in parsed:
        lag = (el.epoch - t0).total_seconds()
        m0 = (el.mean_anomaly_at_epoch - el.mean_motion * lag) % TWO_PI
        out.append(replace(el, mean_anomaly_at_epoch=m0))
    return out


def load_tle_file(path: str | Path) -> list[OrbitalElements]:
    return read_tle_text(Path(path).read_text())


# ---------------------------------------------------------------------------
# propagation and frames
# ---------------------------------------------------------------------------


class Constellation:
    """Array view of a satellite set; satellite ids equal row indices."""

    def __init__(self, elements: Sequence[OrbitalElements], config: ConstellationConfig | None = None):
        for k, el in enumerate(elements):
            if el.satellite_id != k:
                raise ConfigurationError(
                    f"satellite ids must be 0..K-1 in order; row {k} has id {el.satellite_id}"
                )
            if el.eccentricity >= 1.0 or el.eccentricity < 0.0:
                raise UnsupportedOrbitError(
                    f"satellite {k}: eccentricity {el.eccentricity} not in [0, 1)"
                )
        self.satellites = list(elements)
        self.config = config
        self.elements = (
            np.vstack([el.as_row() for el in elements]) if elements else np.empty((0, 7))
        )
        self.elements.setflags(write=False)

    @classmethod
    def from_config(cls, config: ConstellationConfig) -> "Constellation":
        return cls(generate_walker_delta(config), config)

    def __len__(self):
        return len(self.satellites)

    def __getitem__(self, k) -> OrbitalElements:
        return self.satellites[k]

    def eci(self, t: float) -> np.ndarray:
        return kernels.eci_positions(self.elements, float(t))

    def ecef(self, t: float) -> np.ndarray:
        return kernels.ecef_positions(self.elements, float(t))


def as_constellation(sats) -> Constellation:
    if isinstance(sats, Constellation):
        return sats
    if isinstance(sats, ConstellationConfig):
        return Constellation.from_config(sats)
    return Constellation(list(sats))


def propagate(el: OrbitalElements, t: float) -> EciPosition:
    if t < 0:
        raise ConfigurationError("propagation time must be non-negative")
    if not 0.0 <= el.eccentricity < 1.0:
        raise UnsupportedOrbitError(f"eccentricity {el.eccentricity} is not elliptic")
    p = kernels.eci_positions(el.as_row()[None, :], float(t))[0]
    return EciPosition(float(p[0]), float(p[1]), float(p[2]), float(t))


def eci_to_ecef(p: EciPosition) -> EcefPosition:
    th = EARTH_ROTATION_RAD_S * p.t
    c, s = math.cos(th), math.sin(th)
    return EcefPosition(c * p.x + s * p.y, -s * p.x + c * p.y, p.z)


def geodetic_to_ecef(g: GeodeticPoint) -> EcefPosition:
    lat, lon = math.radians(g.latitude), math.radians(g.longitude)
    r = EARTH_RADIUS_KM + g.altitude
    return EcefPosition(
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
    )


def geodetic_array(points: Iterable[GeodeticPoint]) -> np.ndarray:
    return np.array([geodetic_to_ecef(g).vector for g in points]).reshape(-1, 3)


def elevation_angle(station: EcefPosition, sat: EcefPosition) -> float:
    """Degrees above the station's local (spherical) horizon."""
    s = station.vector
    d = sat.vector - s
    rs, rd = np.linalg.norm(s), np.linalg.norm(d)
    if rs == 0.0:
        raise ConfigurationError("station position must be non-zero")
    if rd == 0.0:
        raise GeometryError("station and satellite coincide")
    return math.degrees(math.asin(max(-1.0, min(1.0, float(d @ s) / (rs * rd)))))
