"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``LEOGSL_DISABLE_NUMBA`` is
unset (or ``0``).  Set ``LEOGSL_DISABLE_NUMBA=1`` to force the numpy path;
the flag is read once at import time.  Both backends stay importable as
``kernels.numpy_backend`` / ``kernels.numba_backend()`` for comparison.
"""

import importlib
import os

from . import _numpy_impl as numpy_backend

__all__ = [
    "BACKEND",
    "numpy_backend",
    "numba_backend",
    "eci_positions",
    "eci_to_ecef",
    "ecef_positions",
    "elevations_deg",
    "latitudes",
    "flight_directions",
    "service_times",
    "select_longest",
    "nearest_visible",
    "nearest_visible_many",
    "dijkstra",
    "extract_path",
    "build_csr",
]


def _numba_requested():
    flag = os.environ.get("LEOGSL_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


def numba_backend():
    """Return the numba backend module, or None if numba is unavailable."""
    try:
        return importlib.import_module("._numba_impl", __name__)
    except ImportError:
        return None


_impl = numba_backend() if _numba_requested() else None
if _impl is None:
    _impl = numpy_backend
BACKEND = "numba" if _impl is not numpy_backend else "numpy"

eci_positions = _impl.eci_positions
eci_to_ecef = _impl.eci_to_ecef
ecef_positions = _impl.ecef_positions
elevations_deg = _impl.elevations_deg
latitudes = _impl.latitudes
flight_directions = _impl.flight_directions
service_times = _impl.service_times
select_longest = _impl.select_longest
nearest_visible = _impl.nearest_visible
nearest_visible_many = _impl.nearest_visible_many
dijkstra = _impl.dijkstra
extract_path = _impl.extract_path
build_csr = _impl.build_csr
