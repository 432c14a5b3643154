"""Physical and model constants shared across the simulator.

All lengths are in km and all times in seconds unless a name says otherwise.
"""

import math

EARTH_RADIUS_KM = 6371.0  # spherical Earth
EARTH_MU = 398600.4418  # km^3/s^2
EARTH_ROTATION_RAD_S = 7.2921159e-5
SPEED_OF_LIGHT_KM_S = 299792.458
SIDEREAL_DAY_S = 2.0 * math.pi / EARTH_ROTATION_RAD_S

DEFAULT_MIN_ELEVATION_DEG = 25.0
DIRECTION_DELTA_S = 1.0
SERVICE_SCAN_STEP_MS = 1000
SERVICE_RESOLUTION_S = 1e-3

# latitude differences at or below this (rad) count as a flat track
DIRECTION_TIE_TOL_RAD = 1e-12

UNSET = -1
NORTH = 0
SOUTH = 1
