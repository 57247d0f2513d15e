"""Bit-packed cell codes for n-dimensional digital topology.

Every cell of a finite cubical grid is one integer word; sets of cells are
characteristic bit arrays; boundaries of binary objects are extracted by
scanning or by tracking bel adjacencies, in any dimension.
"""

from .cellset import CellFamily, CharSet, LUTCharSet, MinCharSet, OrderedCellSet, make_lut_charset, make_min_charset
from .errors import *  # noqa: F401,F403
from .kspace import Space, make_space
from .oriented import (
    SignedCellSet,
    interior_exterior,
    lower_boundary,
    lower_boundary_along,
    merge_cancel,
    object_boundary,
    opposite,
    scode,
    sign_of,
    unsign,
    upper_boundary,
    upper_boundary_along,
    with_sign,
)
from .shapes import VolumeImage, digital_ball, export_mesh, read_volume, threshold_import, write_volume
from .tracking import (
    BelAdjacency,
    TrackResult,
    direct_adjacent_bel,
    direct_followers,
    find_start_bel,
    indirect_adjacent_bel,
    indirect_followers,
    scan_box,
    scan_full,
    track_any,
    track_closed,
    track_closed_tail,
)

__version__ = "0.1.0"
