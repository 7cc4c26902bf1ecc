"""Backend selection for the hot loops.

The numba kernels are used unless numba is missing or the environment
variable ``KHCERT_DISABLE_NUMBA`` is set to a truthy value, in which case
the vectorised numpy fallbacks take over. Both backends expose the same
function names; import them from here, never from the submodules.
"""

import os

from . import _numpy

_FLAG = os.environ.get("KHCERT_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no", "off")

try:
    if _DISABLED:
        raise ImportError("numba disabled by KHCERT_DISABLE_NUMBA")
    from . import _numba as _impl

    BACKEND = "numba"
except ImportError:
    _impl = _numpy
    BACKEND = "numpy"

radical_inverse = _impl.radical_inverse
star_disc_1d = _impl.star_disc_1d
star_disc_2d = _impl.star_disc_2d
star_disc_3d = _impl.star_disc_3d
box_sums = _impl.box_sums
periodic_box_sums = _impl.periodic_box_sums
periodic_ball_sums = _impl.periodic_ball_sums
cap_sums = _impl.cap_sums
polygon_box_areas = _impl.polygon_box_areas
disc_box_areas = _impl.disc_box_areas
bessel_j = _impl.bessel_j
bessel_j_scalar = _impl.bessel_j_scalar
bessel_scan = _impl.bessel_scan
legendre_table = _impl.legendre_table

__all__ = [
    "BACKEND",
    "radical_inverse",
    "star_disc_1d",
    "star_disc_2d",
    "star_disc_3d",
    "box_sums",
    "periodic_box_sums",
    "periodic_ball_sums",
    "cap_sums",
    "polygon_box_areas",
    "disc_box_areas",
    "bessel_j",
    "bessel_j_scalar",
    "bessel_scan",
    "legendre_table",
]
