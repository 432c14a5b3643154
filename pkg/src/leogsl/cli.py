"""Command line entry point: ``leogsl {gen,run,verify,sweep,scale-compare}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .errors import ConfigurationError, IngestionError, TleParseError
from .interconnect import ALGORITHMS
from .kernels import BACKEND
from .topology import MODES

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("leogsl")


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("pair must be A,B (station ids or name prefixes)")
    return tuple(p.strip() for p in parts)


def _shell(text):
    try:
        n, m, f = (int(x) for x in text.split("/")[:3])
        rest = text.split("/")[3:]
        inc = float(rest[0]) if rest else 53.0
        alt = float(rest[1]) if len(rest) > 1 else 550.0
    except ValueError:
        raise argparse.ArgumentTypeError("shell must look like N/M/F[/inc_deg[/alt_km]]") from None
    return {"orbit_count": n, "sats_per_orbit": m, "phase_factor": f, "inclination_deg": inc, "altitude_km": alt}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="YAML file of RunConfig fields")
    common.add_argument("-o", "--output-dir", dest="output_dir")
    common.add_argument("--shell", dest="constellation", type=_shell, help="Walker shell N/M/F[/inc[/alt]]")
    common.add_argument("--tle", dest="tle_path", help="TLE file ordered orbit-major like the shell grid")
    common.add_argument("--stations", dest="stations_path", help="station CSV (id,name,lat_deg,lon_deg,alt_km)")
    common.add_argument("--algorithm", choices=ALGORITHMS)
    common.add_argument("--algorithms", type=lambda s: tuple(s.split(",")), help="comma list for sweeps")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--e-m", dest="e_m", type=float, help="minimum elevation, degrees")
    common.add_argument("--start", type=float)
    common.add_argument("--end", type=float)
    common.add_argument("--slot", type=float, help="GSL slot length, seconds")
    common.add_argument("--route-update-ms", dest="route_update_ms", type=int)
    common.add_argument("--pair", dest="pairs", type=_pair, action="append", help="A,B; repeatable")
    common.add_argument("--sweep-count", dest="sweep_count", type=int)
    common.add_argument("--sweep-min-km", dest="sweep_min_km", type=float)
    common.add_argument("--sweep-max-km", dest="sweep_max_km", type=float)
    common.add_argument("--orbit-multiplier", dest="orbit_multiplier", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--verify-samples", dest="verify_samples", type=int)
    common.add_argument("--verify-probes", dest="verify_probes", type=int)
    common.add_argument("--snapshot-at", dest="snapshot_times", type=float, action="append")
    common.add_argument("--visibility-trace", dest="visibility_trace", action="store_true", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="leogsl", description="LEO ground-satellite link switching simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write constellation, ISL and TLE files")
    sub.add_parser("run", parents=[common], help="simulate one algorithm and mode over the pairs")
    v = sub.add_parser("verify", parents=[common], help="closed-form and Monte Carlo checks")
    v.add_argument("--analytic-only", action="store_true", help="skip the simulation cross-checks")
    sub.add_parser("sweep", parents=[common], help="mean RTT against pair distance")
    sub.add_parser("scale-compare", parents=[common], help="sweep at base and multiplied orbit count")
    return p


_NOT_CONFIG = {"command", "config", "verbose", "analytic_only"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        cfg = pipeline.load_config(args.config, **overrides)
    except (ConfigurationError, IngestionError, TleParseError) as exc:
        return _fail(EXIT_CONFIG, exc)
    log.info("kernel backend: %s", BACKEND)
    try:
        if args.command == "gen":
            print(pipeline.gen(cfg))
        elif args.command == "run":
            print(pipeline.run(cfg))
        elif args.command == "sweep":
            print(pipeline.sweep(cfg))
        elif args.command == "scale-compare":
            print(pipeline.scale_compare(cfg)[0])
        elif args.command == "verify":
            report, path = pipeline.verify(cfg, simulation=not args.analytic_only)
            for check in report["checks"]:
                log.info("%s: %s", check["name"], "pass" if check["passed"] else "FAIL")
            print(path)
            if not report["passed"]:
                return _fail(EXIT_VERIFY, RuntimeError(f"verification failed, see {path}"))
    except (ConfigurationError, IngestionError, TleParseError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        return _fail(EXIT_RUNTIME, exc)
    return EXIT_OK


def _fail(code, exc) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
