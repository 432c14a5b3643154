"""Beam-disc service-time model: closed forms and Monte Carlo estimates.

Monte Carlo draws use numpy's PCG64 generator seeded explicitly, so each
estimate is reproducible bit for bit for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import kernels
from .constants import DIRECTION_DELTA_S, SERVICE_SCAN_STEP_MS
from .errors import ConfigurationError
from .orbits import as_constellation
from .stations import station_matrix

RNG_ALGORITHM = "PCG64"


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class BeamDiscModel:
    radius: float = 1.0
    st_max: float = 250.0

    def __post_init__(self):
        if self.radius <= 0 or self.st_max <= 0:
            raise ConfigurationError("radius and st_max must be positive")

    @property
    def mean_chord(self) -> float:
        return math.pi * self.radius / 2.0

    @property
    def mean_remaining(self) -> float:
        return math.pi * self.radius / 4.0


def chord_length(radius, offset):
    """Chord at distance ``offset`` from the centre of a disc."""
    return 2.0 * np.sqrt(radius**2 - np.asarray(offset) ** 2)


def remaining_segment(radius, offset, position):
    """Length still ahead of a point at fractional ``position`` along the chord."""
    return (1.0 - np.asarray(position)) * chord_length(radius, offset)


def mean_chord_length(radius: float, samples: int, seed: int = 0) -> float:
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    x = _rng(seed).uniform(0.0, radius, samples)
    return float(chord_length(radius, x).mean())


def mean_remaining_segment(radius: float, samples: int, seed: int = 0) -> float:
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    rng = _rng(seed)
    x = rng.uniform(0.0, radius, samples)
    u = rng.uniform(0.0, 1.0, samples)
    return float(remaining_segment(radius, x, u).mean())


def expected_service_time(st_max: float) -> float:
    return math.pi * st_max / 8.0


def expected_switch_count(t: float, st_mean: float) -> float:
    """Average switch count over ``t`` seconds with both path ends switching."""
    if st_mean <= 0:
        raise ConfigurationError("mean service time must be positive")
    return 2.0 * t / st_mean


# ---------------------------------------------------------------------------
# simulation-side samples
# ---------------------------------------------------------------------------


def sample_service_times(stations, sats, e_m, probes, seed=0, horizon=1000.0):
    """Remaining service times of every visible satellite at random probes.

    Each probe draws a station uniformly from ``stations`` and a time
    uniformly from ``[0, horizon)``.  Returns ``(north, south)`` arrays.
    """
    c = as_constellation(sats)
    st_mat = station_matrix(stations)
    rng = _rng(seed)
    which = rng.integers(0, len(st_mat), probes)
    times = rng.uniform(0.0, horizon, probes)
    north, south = [], []
    for s, t in zip(which, times):
        st = st_mat[s]
        el = kernels.elevations_deg(st, c.ecef(t))
        idx = np.flatnonzero(el >= e_m)
        if idx.size == 0:
            continue
        rows = np.ascontiguousarray(c.elements[idx])
        d = kernels.flight_directions(rows, float(t), DIRECTION_DELTA_S)
        r = kernels.service_times(st, rows, float(t), float(e_m), SERVICE_SCAN_STEP_MS)
        north.append(r[d == 0])
        south.append(r[d == 1])
    cat = lambda xs: np.concatenate(xs) if xs else np.empty(0)  # noqa: E731
    return cat(north), cat(south)


@dataclass
class DirectionReport:
    north_mean: float
    south_mean: float
    north_median: float
    south_median: float
    n_north: int
    n_south: int
    relative_difference: float
    ks_statistic: float
    ks_pvalue: float
    sufficient: bool
    passed: bool


def direction_distribution_compare(north, south, threshold=0.10, min_samples=2) -> DirectionReport:
    """Compare north- and south-flying service times.

    The relative difference is ``|mean_n - mean_s|`` over the average of the
    two means.  Fewer than ``min_samples`` in either group is flagged as
    insufficient and never passes.
    """
    north = np.asarray(north, dtype=float)
    south = np.asarray(south, dtype=float)
    ok = north.size >= min_samples and south.size >= min_samples
    if not ok:
        nan = math.nan
        mn = float(north.mean()) if north.size else nan
        ms = float(south.mean()) if south.size else nan
        return DirectionReport(mn, ms, nan, nan, int(north.size), int(south.size), nan, nan, nan, False, False)
    mn, ms = float(north.mean()), float(south.mean())
    denom = (mn + ms) / 2.0
    rel = abs(mn - ms) / denom if denom > 0 else 0.0
    ks = stats.ks_2samp(north, south)
    return DirectionReport(
        mn,
        ms,
        float(np.median(north)),
        float(np.median(south)),
        int(north.size),
        int(south.size),
        rel,
        float(ks.statistic),
        float(ks.pvalue),
        True,
        rel < threshold,
    )


# ---------------------------------------------------------------------------
# closed-form checks bundled for the verify command
# ---------------------------------------------------------------------------


def _check(name, analytic, estimate, tolerance, relative=True):
    err = abs(estimate - analytic) / abs(analytic) if relative and analytic else abs(estimate - analytic)
    return {
        "name": name,
        "analytic": analytic,
        "estimate": estimate,
        "tolerance": tolerance,
        "tolerance_kind": "relative" if relative else "absolute",
        "error": err,
        "passed": bool(err <= tolerance),
    }


def verify_report(samples: int = 10**6, seed: int = 0, radius: float = 1.0) -> dict:
    """All disc-model checks with pass/fail flags."""
    checks = [
        _check("mean_chord_length", math.pi * radius / 2, mean_chord_length(radius, samples, seed), 0.005),
        _check(
            "mean_remaining_segment",
            math.pi * radius / 4,
            mean_remaining_segment(radius, samples, seed + 1),
            0.005,
        ),
        _check("expected_service_time_250s", 98.17, expected_service_time(250.0), 0.01, relative=False),
        _check("expected_switch_count_1000s", 20.37, expected_switch_count(1000.0, 98.17), 0.01, relative=False),
        _check("switch_count_at_zero_time", 0.0, expected_switch_count(0.0, 98.17), 0.0, relative=False),
    ]
    return {
        "rng": RNG_ALGORITHM,
        "seed": seed,
        "samples": samples,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
