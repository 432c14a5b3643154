"""Run configuration, orchestration and deterministic file output.

Every writer formats floats with a fixed number of decimals and JSON is
dumped with sorted keys, so identical ``(config, seed)`` give identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import analysis, metrics
from .errors import ConfigurationError
from .interconnect import ALGORITHMS, simulate
from .orbits import (
    STARLINK_SHELL1,
    Constellation,
    ConstellationConfig,
    TimeGrid,
    format_tle,
    load_tle_file,
)
from .routing import Scenario, path_digest, route_many
from .stations import bundled_stations_path, find_station, ingest_stations
from .topology import MODES, build_plus_grid, build_snapshot, write_snapshot_csv
from .visibility import TRACE_HEADER, visible_set, write_visibility_trace

DEFAULT_PAIR = ("Itaborai", "Kaunas")
SWEEP_ALGORITHMS = ("clrst", "lrst2", "lrst1")


@dataclass
class RunConfig:
    constellation: ConstellationConfig = STARLINK_SHELL1
    tle_path: str | None = None
    stations_path: str | None = None
    algorithm: str = "clrst"
    algorithms: tuple[str, ...] = SWEEP_ALGORITHMS
    mode: str = "isl"
    e_m: float = 25.0
    start: float = 0.0
    end: float = 1000.0
    slot: float = 1.0
    route_update_ms: int = 100
    pairs: list = field(default_factory=lambda: [DEFAULT_PAIR])
    sweep_count: int = 10
    sweep_min_km: float = 2000.0
    sweep_max_km: float = 12000.0
    orbit_multiplier: int = 2
    output_dir: str = "out"
    seed: int = 0
    verify_samples: int = 10**6
    verify_probes: int = 10**4
    visibility_trace: bool = False
    snapshot_times: list = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.constellation, dict):
            try:
                self.constellation = ConstellationConfig(**self.constellation)
            except TypeError as exc:
                raise ConfigurationError(f"constellation: {exc}") from None
        self.algorithms = tuple(self.algorithms)
        self.pairs = [tuple(p) for p in self.pairs]
        self.snapshot_times = [float(t) for t in self.snapshot_times]
        self.validate()

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.start, self.end, self.slot)

    def validate(self) -> None:
        for alg in (self.algorithm, *self.algorithms):
            if alg not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {alg!r}; expected one of {ALGORITHMS}")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.e_m < 90.0:
            raise ConfigurationError(f"e_m must be in [0, 90), got {self.e_m}")
        TimeGrid(self.start, self.end, self.slot)
        slot_ms = self.slot * 1000.0
        if self.route_update_ms <= 0 or not math.isclose(slot_ms, round(slot_ms)):
            raise ConfigurationError("slot must be a whole number of milliseconds and route_update_ms positive")
        slot_ms = int(round(slot_ms))
        if slot_ms % self.route_update_ms and self.route_update_ms % slot_ms:
            raise ConfigurationError(
                f"route_update_ms={self.route_update_ms} and slot={slot_ms} ms must divide one another"
            )
        for p in self.pairs:
            if len(p) != 2:
                raise ConfigurationError(f"pair {p!r} must name exactly two stations")
        for name in ("tle_path", "stations_path"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigurationError(f"{name}: file {path} not found")
        if self.sweep_count < 1 or not 0 <= self.sweep_min_km < self.sweep_max_km:
            raise ConfigurationError("sweep needs count >= 1 and 0 <= min_km < max_km")
        if self.orbit_multiplier < 1:
            raise ConfigurationError("orbit_multiplier must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = list(self.algorithms)
        d["pairs"] = [list(p) for p in self.pairs]
        d.pop("output_dir")
        return d


CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def load_config(path, **overrides) -> RunConfig:
    """YAML mapping of RunConfig fields; ``overrides`` win over the file."""
    data = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config root must be a mapping")
    data.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    return RunConfig(**data)


def scale(config: RunConfig, orbit_multiplier: int) -> RunConfig:
    """Same run with ``orbit_multiplier`` times as many orbital planes."""
    if config.tle_path is not None:
        raise ConfigurationError("cannot scale a TLE-defined constellation")
    return replace(config, constellation=config.constellation.scaled(orbit_multiplier))


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def load_constellation(config: RunConfig) -> Constellation:
    if config.tle_path is None:
        return Constellation.from_config(config.constellation)
    els = load_tle_file(config.tle_path)
    if len(els) != config.constellation.size:
        raise ConfigurationError(
            f"TLE file has {len(els)} satellites but the grid expects "
            f"{config.constellation.orbit_count}x{config.constellation.sats_per_orbit}"
        )
    return Constellation(els, config.constellation)


def load_stations(config: RunConfig):
    return ingest_stations(config.stations_path)


def resolve_pairs(pairs, stations) -> list[tuple[int, int]]:
    out = []
    for a, b in pairs:
        try:
            sa, sb = find_station(stations, a), find_station(stations, b)
        except KeyError as exc:
            raise ConfigurationError(str(exc.args[0])) from None
        if sa.station_id == sb.station_id:
            raise ConfigurationError(f"pair {a!r}-{b!r} names the same station twice")
        out.append((sa.station_id, sb.station_id))
    return out


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _num(x, digits=6) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.{digits}f}"


def _clean(obj):
    """JSON-safe copy with NaN mapped to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


class Outputs:
    """Collects CSV files of one output directory and their schema sidecar."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.schema: dict[str, list[dict]] = {}

    def csv(self, name, columns, rows) -> Path:
        """``columns`` is a list of ``(name, type)``; type is integer, number or string."""
        path = self.dir / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([c for c, _ in columns])
            w.writerows(rows)
        self.schema[name] = [{"name": c, "type": t} for c, t in columns]
        return path

    def declare(self, name, header, types):
        self.schema[name] = [{"name": c, "type": t} for c, t in zip(header, types)]

    def json(self, name, obj) -> Path:
        path = self.dir / name
        write_json(path, obj)
        return path

    def close(self) -> None:
        write_json(self.dir / "schema.json", {"files": self.schema})


_PATTERNS = {"integer": int, "number": float, "string": str}


def validate_csv(path, columns) -> int:
    """Check ``path`` against schema ``columns``; returns the row count.

    Empty cells are allowed for numeric columns (unreachable or undefined).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [c["name"] for c in columns]
    if not rows or rows[0] != header:
        raise ValueError(f"{path}: header {rows[0] if rows else None} != {header}")
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns):
            raise ValueError(f"{path}:{i}: expected {len(columns)} fields")
        for cell, col in zip(row, columns):
            if cell == "" or col["type"] == "string":
                continue
            try:
                _PATTERNS[col["type"]](cell)
            except ValueError:
                raise ValueError(f"{path}:{i}: {col['name']}={cell!r} is not {col['type']}") from None
    return len(rows) - 1


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


EVENT_COLUMNS = [
    ("algorithm", "string"),
    ("t", "number"),
    ("station_id", "integer"),
    ("slot", "integer"),
    ("old_satellite", "integer"),
    ("new_satellite", "integer"),
]


def gen(config: RunConfig, out_dir=None) -> Path:
    """Constellation elements, +Grid ISLs and a TLE rendering of the shell."""
    out = Outputs(out_dir or config.output_dir)
    c = load_constellation(config)
    m = c.config.sats_per_orbit
    rows = []
    for el in c:
        sid = el.satellite_id
        rows.append(
            [
                sid,
                sid // m,
                sid % m,
                _num(el.semi_major_axis, 6),
                _num(el.eccentricity, 7),
                _num(math.degrees(el.inclination), 6),
                _num(math.degrees(el.raan), 6),
                _num(math.degrees(el.arg_perigee), 6),
                _num(math.degrees(el.mean_anomaly_at_epoch), 6),
                _num(el.mean_motion, 12),
            ]
        )
    out.csv(
        "constellation.csv",
        [
            ("satellite_id", "integer"),
            ("orbit", "integer"),
            ("index", "integer"),
            ("a_km", "number"),
            ("eccentricity", "number"),
            ("inclination_deg", "number"),
            ("raan_deg", "number"),
            ("arg_perigee_deg", "number"),
            ("mean_anomaly_deg", "number"),
            ("mean_motion_rad_s", "number"),
        ],
        rows,
    )
    edges = build_plus_grid(c.config)
    out.csv(
        "isls.csv",
        [("sat_a", "integer"), ("sat_b", "integer"), ("kind", "string")],
        [[e.sat_a, e.sat_b, e.kind] for e in edges],
    )
    lines = []
    for el in c:
        l1, l2 = format_tle(el)
        lines += [f"SAT-{el.satellite_id:05d}", l1, l2]
    (out.dir / "constellation.tle").write_text("\n".join(lines) + "\n")
    out.json("summary.json", {"config": config.to_dict(), "satellites": len(c), "isl_edges": len(edges)})
    out.close()
    return out.dir


def _pair_stats_block(series, run, pair, grid):
    st = metrics.switching_stats(run.events, pair, (grid.start, grid.end), run.algorithm, metrics.pair_id(*pair))
    return st, {
        "mean_rtt_ms": series.mean_rtt,
        "coverage": series.coverage,
        "switch_count": st.count,
        "mean_switch_interval_s": st.mean_interval,
        "median_switch_interval_s": st.median_interval,
        "path_changes": series.path_changes,
        "disruption_score": metrics.disruption_score(series),
    }


def run(config: RunConfig, out_dir=None) -> Path:
    """Full pipeline for ``config.algorithm``, ``config.mode`` and ``config.pairs``."""
    out = Outputs(out_dir or config.output_dir)
    c = load_constellation(config)
    stations = load_stations(config)
    pairs = resolve_pairs(config.pairs, stations)
    grid = config.grid
    by_id = {s.station_id: s for s in stations}
    if config.mode == "isl":
        members = [by_id[i] for i in sorted({i for p in pairs for i in p})]
    else:
        members = list(stations)

    gsl = simulate(config.algorithm, members, c, config.e_m, grid)
    edges = build_plus_grid(c.config)
    scenarios = [Scenario(config.mode, gsl, p, config.algorithm) for p in pairs]
    series = route_many(scenarios, c, members, grid, config.route_update_ms, edges)

    out.csv(
        "events.csv",
        EVENT_COLUMNS,
        [[gsl.algorithm, _num(e.t, 3), e.station_id, e.slot, e.old_satellite, e.new_satellite] for e in gsl.events],
    )

    path_rows, rtt_rows, switch_rows, cdf_rows, changes = [], [], [], [], []
    per_pair = {}
    for p, s in zip(pairs, series):
        pid = metrics.pair_id(*p)
        rtt = s.rtt_ms
        for r, t_ms in enumerate(s.t_ms.tolist()):
            nodes = s.paths[r]
            ok = nodes is not None
            path_rows.append(
                [
                    pid,
                    t_ms,
                    _num(rtt[r], 6),
                    int(s.hops[r]) if ok else "",
                    int(s.gsls[r]) if ok else "",
                    path_digest(nodes) if ok else "",
                ]
            )
            rtt_rows.append([pid, t_ms, _num(rtt[r], 6), int(ok)])
        for value, frac in metrics.cdf(rtt[s.reachable]):
            cdf_rows.append([pid, _num(value, 6), _num(frac, 9)])
        for t_ms in s.change_ms:
            r = int(np.searchsorted(s.t_ms, t_ms))
            nodes = s.paths[r]
            changes.append({"pair_id": pid, "t_ms": t_ms, "nodes": list(nodes) if nodes else None})
        st, block = _pair_stats_block(s, gsl, p, grid)
        prev = None
        for i, e in enumerate(st.events):
            switch_rows.append(
                [pid, i, _num(e.t, 3), e.station_id, e.slot, e.old_satellite, e.new_satellite,
                 "" if prev is None else _num(e.t - prev, 3)]
            )
            prev = e.t
        block["great_circle_km"] = metrics.great_circle_distance(by_id[p[0]].point, by_id[p[1]].point)
        block["chord_km"] = metrics.chord_distance(by_id[p[0]].point, by_id[p[1]].point)
        block["stations"] = [by_id[p[0]].name, by_id[p[1]].name]
        per_pair[pid] = block

    out.csv(
        "paths.csv",
        [("pair_id", "string"), ("t_ms", "integer"), ("rtt_ms", "number"), ("hops", "integer"),
         ("gsls", "integer"), ("path_hash", "string")],
        path_rows,
    )
    out.csv("rtt.csv", [("pair_id", "string"), ("t_ms", "integer"), ("rtt_ms", "number"), ("reachable", "integer")], rtt_rows)
    out.csv(
        "switching.csv",
        [("pair_id", "string"), ("index", "integer"), ("t", "number"), ("station_id", "integer"), ("slot", "integer"),
         ("old_satellite", "integer"), ("new_satellite", "integer"), ("interval_s", "number")],
        switch_rows,
    )
    out.csv("rtt_cdf.csv", [("pair_id", "string"), ("rtt_ms", "number"), ("fraction", "number")], cdf_rows)
    out.json("path_changes.json", changes)

    if config.visibility_trace:
        recs = []
        for s in members:
            for t in grid.times().tolist():
                recs += visible_set(s, c, t, config.e_m)
        write_visibility_trace(recs, out.dir / "visibility.csv")
        out.declare("visibility.csv", TRACE_HEADER, ["number", "integer", "integer", "number", "string", "number"])
    if config.snapshot_times:
        graphs = []
        for t in config.snapshot_times:
            k = min(max(int((t - grid.start) // grid.slot), 0), max(gsl.times.size - 1, 0))
            if gsl.times.size == 0:
                continue
            states = gsl.states_at(k)
            for p in pairs if config.mode == "isl" else pairs[:1]:
                graphs.append(build_snapshot(config.mode, t, c, members, states, p, edges))
        write_snapshot_csv(graphs, out.dir / "snapshots.csv")
        out.declare("snapshots.csv", ["t", "node_a", "node_b", "kind", "delay_ms"], ["number", "integer", "integer", "string", "number"])

    reach = [s for s in series if s.reachable.any()]
    agg = {
        "mean_rtt_ms": float(np.mean([s.mean_rtt for s in reach])) if reach else math.nan,
        "switch_count": int(sum(b["switch_count"] for b in per_pair.values())),
        "path_changes": int(sum(b["path_changes"] for b in per_pair.values())),
        "disruption_score": float(np.mean([b["disruption_score"] for b in per_pair.values()])) if per_pair else math.nan,
        "station_switch_count": len([e for e in gsl.events if e.t > grid.start]),
        "service_time_check": metrics.service_time_check(
            metrics.switch_service_times(gsl.events, members, c, config.e_m)
        ),
    }
    out.json(
        "summary.json",
        {
            "config": config.to_dict(),
            "satellites": len(c),
            "route_instants": int(series[0].t_ms.size) if series else 0,
            "algorithms": {config.algorithm: {"aggregate": agg, "pairs": per_pair}},
        },
    )
    out.close()
    return out.dir


def _sweep_rows(config, c, stations, pairs):
    rows, fits, _ = metrics.pair_sweep(
        pairs, config.algorithms, config.grid, c, stations, config.e_m, config.route_update_ms, config.mode
    )
    return rows, fits


SWEEP_COLUMNS = [
    ("pair_id", "string"),
    ("algorithm", "string"),
    ("station_a", "integer"),
    ("station_b", "integer"),
    ("great_circle_km", "number"),
    ("chord_km", "number"),
    ("mean_rtt_ms", "number"),
    ("coverage", "number"),
    ("switch_count", "integer"),
    ("path_changes", "integer"),
]


def _sweep_pairs(config, stations):
    if config.pairs and list(config.pairs) != [DEFAULT_PAIR]:
        return resolve_pairs(config.pairs, stations)
    return metrics.select_pairs(stations, config.sweep_count, config.sweep_min_km, config.sweep_max_km, config.seed)


def _fit_dict(fits, lo, hi):
    out = {}
    for alg, f in fits.items():
        out[alg] = None if f is None else {"slope": f.slope, "intercept": f.intercept, "n": f.n,
                                           "rtt_at_min_km": float(f(lo)), "rtt_at_max_km": float(f(hi))}
    return out


def sweep(config: RunConfig, out_dir=None) -> Path:
    """Mean RTT versus distance for several pairs and algorithms."""
    out = Outputs(out_dir or config.output_dir)
    c = load_constellation(config)
    stations = load_stations(config)
    pairs = _sweep_pairs(config, stations)
    rows, fits = _sweep_rows(config, c, stations, pairs)
    out.csv("sweep.csv", SWEEP_COLUMNS, [_sweep_row(r) for r in rows])
    km = [r.great_circle_km for r in rows]
    lo, hi = (min(km), max(km)) if km else (0.0, 0.0)
    out.json(
        "summary.json",
        {
            "config": config.to_dict(),
            "pairs": [list(p) for p in pairs],
            "distance_range_km": [lo, hi],
            "fits": _fit_dict(fits, lo, hi),
            "algorithms": {
                alg: {
                    "mean_rtt_ms": float(np.nanmean([r.mean_rtt_ms for r in rows if r.algorithm == alg])),
                    "switch_count": int(sum(r.switch_count for r in rows if r.algorithm == alg)),
                }
                for alg in config.algorithms
            },
        },
    )
    out.close()
    return out.dir


def _sweep_row(r):
    return [r.pair_id, r.algorithm, r.station_a, r.station_b, _num(r.great_circle_km, 3), _num(r.chord_km, 3),
            _num(r.mean_rtt_ms, 6), _num(r.coverage, 6), r.switch_count, r.path_changes]


def scale_compare(config: RunConfig, out_dir=None, multiplier=None):
    """Sweep the base shell and an orbit-multiplied copy; per-pair RTT ratios.

    Returns ``(directory, rows)`` where each row is a dict per pair and algorithm.
    """
    mult = config.orbit_multiplier if multiplier is None else multiplier
    out = Outputs(out_dir or config.output_dir)
    stations = load_stations(config)
    pairs = _sweep_pairs(config, stations)
    base_rows, _ = _sweep_rows(config, load_constellation(config), stations, pairs)
    big = scale(config, mult)
    big_rows, _ = _sweep_rows(big, load_constellation(big), stations, pairs)
    result = []
    for a, b in zip(base_rows, big_rows):
        rel = abs(b.mean_rtt_ms - a.mean_rtt_ms) / a.mean_rtt_ms if a.mean_rtt_ms else math.nan
        result.append(
            {
                "pair_id": a.pair_id,
                "algorithm": a.algorithm,
                "great_circle_km": a.great_circle_km,
                "base_rtt_ms": a.mean_rtt_ms,
                "scaled_rtt_ms": b.mean_rtt_ms,
                "relative_difference": rel,
            }
        )
    out.csv(
        "scale_compare.csv",
        [("pair_id", "string"), ("algorithm", "string"), ("great_circle_km", "number"), ("base_rtt_ms", "number"),
         ("scaled_rtt_ms", "number"), ("relative_difference", "number")],
        [[r["pair_id"], r["algorithm"], _num(r["great_circle_km"], 3), _num(r["base_rtt_ms"], 6),
          _num(r["scaled_rtt_ms"], 6), _num(r["relative_difference"], 6)] for r in result],
    )
    rels = [r["relative_difference"] for r in result]
    out.json(
        "summary.json",
        {
            "config": config.to_dict(),
            "orbit_multiplier": mult,
            "base_satellites": config.constellation.size,
            "scaled_satellites": big.constellation.size,
            "max_relative_difference": max(rels) if rels else None,
            "pairs": [list(p) for p in pairs],
        },
    )
    out.close()
    return out.dir, result


def verify(config: RunConfig, out_dir=None, simulation=True):
    """Closed-form and Monte Carlo checks, optionally with the simulation cross-checks.

    Returns ``(report, path)``; ``report["passed"]`` drives the exit code.
    """
    report = analysis.verify_report(config.verify_samples, config.seed)
    if simulation:
        stations = load_stations(config)
        c = load_constellation(config)
        north, south = analysis.sample_service_times(
            stations, c, config.e_m, config.verify_probes, config.seed, max(config.end - config.start, 1.0)
        )
        d = analysis.direction_distribution_compare(north, south)
        report["direction"] = asdict(d)
        cross = metrics.service_time_check(np.concatenate([north, south]))
        report["service_time_cross_check"] = cross
        report["passed"] = bool(report["passed"] and d.passed and cross["passed"])
    path = None
    if out_dir is not None or config.output_dir:
        directory = Path(out_dir or config.output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "verify.json"
        write_json(path, report)
    return report, path


__all__ = [
    "DEFAULT_PAIR",
    "RunConfig",
    "bundled_stations_path",
    "gen",
    "load_config",
    "run",
    "scale",
    "scale_compare",
    "sweep",
    "validate_csv",
    "verify",
]
