"""Time the numba kernels against the numpy fallback on shell-1 workloads.

    python benchmarks/bench_kernels.py [--repeat 5]

Numba timings exclude the first (compiling) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from leogsl.kernels import _numpy_impl as npk
from leogsl.kernels import numba_backend
from leogsl.orbits import STARLINK_SHELL1, Constellation
from leogsl.stations import ingest_stations, station_matrix
from leogsl.topology import build_plus_grid, delay_ms, isl_arrays


def _workloads(k):
    c = Constellation.from_config(STARLINK_SHELL1)
    elem = np.ascontiguousarray(c.elements)
    st = station_matrix(ingest_stations())
    station = st[84]
    pos = k.ecef_positions(elem, 0.0)
    iu, iv = isl_arrays(build_plus_grid(STARLINK_SHELL1))
    w = delay_ms(np.linalg.norm(pos[iu] - pos[iv], axis=1))
    indptr, indices, weights = k.build_csr(len(c), iu, iv, w)
    return {
        "ecef_positions": lambda: k.ecef_positions(elem, 123.4),
        "flight_directions": lambda: k.flight_directions(elem, 123.4, 1.0),
        "select_longest": lambda: k.select_longest(station, elem, 123.0, 25.0, -1, -1, 1.0, 1000),
        "nearest_visible_many": lambda: k.nearest_visible_many(st, pos, 25.0),
        "build_csr": lambda: k.build_csr(len(c), iu, iv, w),
        "dijkstra": lambda: k.dijkstra(indptr, indices, weights, 0),
    }


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    nb = numba_backend()
    backends = {"numpy": npk}
    if nb is not None:
        backends["numba"] = nb
    results = {}
    for name, mod in backends.items():
        for op, fn in _workloads(mod).items():
            fn()  # warm-up / compile
            results.setdefault(op, {})[name] = _time(fn, args.repeat)
    print(f"{'kernel':24s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for op, r in results.items():
        a, b = r["numpy"] * 1e3, r.get("numba", float("nan")) * 1e3
        print(f"{op:24s} {a:10.3f} {b:10.3f} {a / b:8.1f}")


if __name__ == "__main__":
    main()
