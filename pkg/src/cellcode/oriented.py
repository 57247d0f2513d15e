"""Signed cells, lower/upper boundary operators and object boundaries.

A signed code inserts the orientation bit between the topology word and the
coordinate field::

    (topology << (coord_width + 1)) | (s << coord_width) | coords

with ``s = 0`` for a positive cell. Signs are exposed as ``+1`` / ``-1``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .cellset import CellFamily, CharSet, LUTCharSet, coord_pattern_words
from .errors import CoordOutOfRange, DuplicateOrientation, NotABel, ObjectTouchesBorder
from .kspace import Space

__all__ = [
    "scode",
    "sign_of",
    "opposite",
    "unsign",
    "with_sign",
    "signed_topology",
    "lower_boundary_along",
    "lower_boundary",
    "upper_boundary_along",
    "upper_boundary",
    "SignedCellSet",
    "merge_cancel",
    "object_boundary",
    "interior_exterior",
    "is_bel",
]


def _sign_bit(sign: int) -> int:
    if sign == 1:
        return 0
    if sign == -1:
        return 1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def scode(space: Space, topology: int, sign: int, coords: Sequence[int]) -> int:
    """Signed code of the cell ``sign * (topology, coords)``."""
    w = space.coord_width
    return (space.ucode(topology, coords) >> w << (w + 1)) | (_sign_bit(sign) << w) | space.pack(coords)


def signed_topology(space: Space, c: int) -> int:
    return c >> (space.coord_width + 1)


def sign_of(space: Space, c: int) -> int:
    return -1 if (c >> space.coord_width) & 1 else 1


def opposite(space: Space, c: int) -> int:
    return c ^ (1 << space.coord_width)


def unsign(space: Space, c: int) -> int:
    w = space.coord_width
    return (c >> (w + 1) << w) | (c & space.coord_mask)


def with_sign(space: Space, c: int, sign: int) -> int:
    """Signed code of unsigned cell ``c`` with the given orientation."""
    w = space.coord_width
    return (c >> w << (w + 1)) | (_sign_bit(sign) << w) | (c & space.coord_mask)


def _shift_coord(space: Space, c: int, i: int, delta: int) -> int:
    v = ((c & space.axis_masks[i]) >> space.shifts[i]) + delta
    if not 0 <= v <= space.coordmax[i]:
        raise CoordOutOfRange(f"coordinate {v} outside [0, {space.coordmax[i]}] on axis {i}")
    return c + delta * space.units[i]


def lower_boundary_along(space: Space, c: int, i: int) -> tuple[int, int]:
    """The two oppositely signed cells of the lower boundary of ``c`` along open axis ``i``.

    With ``tau = (-1)**(number of open axes above i)``, returns
    ``(s*tau*(beta, x), -s*tau*(beta, x + e_i))`` where ``beta`` closes axis ``i``.
    """
    w = space.coord_width
    topo = c >> (w + 1)
    if not (topo >> i) & 1:
        raise ValueError(f"axis {i} is closed for this cell; lower boundary undefined")
    flip = ((topo >> (i + 1)).bit_count() & 1) << w
    low = (c ^ (1 << (w + 1 + i))) ^ flip
    high = _shift_coord(space, low ^ (1 << w), i, 1)
    return low, high


def upper_boundary_along(space: Space, c: int, i: int) -> tuple[int, int]:
    """Transpose of :func:`lower_boundary_along` on closed axis ``i``.

    Returns ``(s*tau*(beta, x), -s*tau*(beta, x - e_i))`` where ``beta`` opens axis ``i``.
    """
    w = space.coord_width
    topo = c >> (w + 1)
    if (topo >> i) & 1:
        raise ValueError(f"axis {i} is open for this cell; upper boundary undefined")
    flip = ((topo >> (i + 1)).bit_count() & 1) << w
    high = (c | (1 << (w + 1 + i))) ^ flip
    low = _shift_coord(space, high ^ (1 << w), i, -1)
    return high, low


def lower_boundary(space: Space, c: int) -> list[int]:
    """Lower boundary over every open axis, increasing code order."""
    topo = c >> (space.coord_width + 1)
    out: list[int] = []
    for i in range(space.n):
        if (topo >> i) & 1:
            out.extend(lower_boundary_along(space, c, i))
    return sorted(out)


def upper_boundary(space: Space, c: int) -> list[int]:
    """Upper boundary over every closed axis, increasing code order."""
    topo = c >> (space.coord_width + 1)
    out: list[int] = []
    for i in range(space.n):
        if not (topo >> i) & 1:
            out.extend(upper_boundary_along(space, c, i))
    return sorted(out)


class SignedCellSet:
    """Set of signed cells of one dimension, merged with cancellation.

    Merging ``s*c`` removes ``-s*c`` when present and inserts ``s*c``
    otherwise. Merging a cell already held with the same sign raises
    :class:`DuplicateOrientation`. Backed by a signed :class:`LUTCharSet`.
    """

    def __init__(self, space: Space, dim: int, max_bytes: int | None = None):
        self.space = space
        self.dim = dim
        self.charset = LUTCharSet(space, CellFamily(dim, signed=True), max_bytes)

    def merge(self, c: int) -> None:
        cs = self.charset
        if cs.contains(c):
            raise DuplicateOrientation(f"{self._str(c)} already present with the same orientation")
        neg = opposite(self.space, c)
        if cs.contains(neg):
            cs.discard(neg)
        else:
            cs.add(c)

    def merge_many(self, codes: Iterable[int] | np.ndarray) -> None:
        """Vectorized :meth:`merge` over a sequence, same result as merging one by one."""
        codes = np.asarray(codes, dtype=np.int64).ravel()
        if codes.size == 0:
            return
        w = self.space.coord_width
        sign_bit = np.int64(1 << w)
        bare = codes & ~sign_bit
        signs = (codes >> w) & 1
        order = np.argsort(bare, kind="stable")
        bare = bare[order]
        signs = signs[order]
        first = np.ones(bare.size, dtype=bool)
        first[1:] = bare[1:] != bare[:-1]
        if np.any(~first[1:] & (signs[1:] == signs[:-1])):
            raise DuplicateOrientation("a cell is merged twice with the same orientation")
        starts = np.flatnonzero(first)
        ends = np.append(starts[1:], bare.size) - 1
        keys = bare[starts]
        pos_held = self.charset.contains_many(keys)
        neg_held = self.charset.contains_many(keys | sign_bit)
        held = pos_held | neg_held
        held_sign = neg_held.astype(np.int64)
        if np.any(held & (held_sign == signs[starts])):
            raise DuplicateOrientation("a merged cell is already present with the same orientation")
        self.charset.discard_many(keys[held] | (held_sign[held] << w))
        survive = ((ends - starts + 1) + held) % 2 == 1
        self.charset.add_many(keys[survive] | (signs[ends][survive] << w))

    def __contains__(self, c: int) -> bool:
        return self.charset.contains(c)

    def __len__(self) -> int:
        return len(self.charset)

    def __iter__(self) -> Iterator[int]:
        return iter(self.charset)

    def codes(self) -> np.ndarray:
        return self.charset.codes()

    def unsigned(self) -> LUTCharSet:
        """The same cells with orientation dropped."""
        out = LUTCharSet(self.space, CellFamily(self.dim))
        codes = self.codes()
        w = self.space.coord_width
        out.add_many((codes >> (w + 1) << w) | (codes & self.space.coord_mask))
        return out

    def _str(self, c: int) -> str:
        sign = "+" if sign_of(self.space, c) > 0 else "-"
        return sign + self.space.cell_str(unsign(self.space, c))

    def __repr__(self) -> str:
        return f"SignedCellSet(dim={self.dim}, |S|={len(self)})"


def merge_cancel(target: SignedCellSet, cells: Iterable[int]) -> SignedCellSet:
    """Merge ``cells`` into ``target`` one at a time with cancellation of opposite cells."""
    for c in cells:
        target.merge(int(c))
    return target


def _spels_of(obj) -> CharSet:
    occupancy = getattr(obj, "occupancy", obj)
    if occupancy.family != CellFamily.spels(occupancy.space):
        raise ValueError(f"expected a set of unsigned spels, got family {occupancy.family.tag}")
    return occupancy


def check_interior(obj) -> CharSet:
    """Return the spel set of ``obj`` after checking it avoids the image border."""
    spels = _spels_of(obj)
    border = coord_pattern_words(spels.space, "border")
    if np.any(spels.words[: border.size] & border):
        raise ObjectTouchesBorder("object has spels on the border of the image")
    return spels


def object_boundary(obj, chunk: int = 1 << 20) -> SignedCellSet:
    """Boundary of an object: merge of the lower boundaries of its positively oriented spels.

    ``obj`` is a spel :class:`~cellcode.cellset.CharSet` (or anything with an
    ``occupancy`` attribute holding one) that does not touch the image border.
    """
    spels = check_interior(obj)
    space = spels.space
    w, n = space.coord_width, space.n
    out = SignedCellSet(space, n - 1)
    codes = spels.codes()
    for start in range(0, codes.size, chunk):
        coords = codes[start : start + chunk] & space.coord_mask
        faces = []
        for i in range(n):
            topo = space.full_topology ^ (1 << i)
            t = (n - 1 - i) & 1
            base = topo << (w + 1)
            faces.append(base | (t << w) | coords)
            faces.append(base | ((t ^ 1) << w) | (coords + space.units[i]))
        out.merge_many(np.concatenate(faces))
    return out


def interior_exterior(b: int, obj) -> tuple[int, int]:
    """Unsigned codes ``(p, q)`` of the spels with upper boundary ``{+p, -q}`` of bel ``b``.

    Raises :class:`NotABel` unless ``p`` is in the object and ``q`` is not.
    """
    spels = _spels_of(obj)
    space = spels.space
    p, q = _incident_spels(space, b)
    if not spels.contains(p) or spels.contains(q):
        raise NotABel(f"{space.cell_str(unsign(space, b))} does not separate the object from its complement")
    return p, q


def is_bel(b: int, obj) -> bool:
    spels = _spels_of(obj)
    try:
        p, q = _incident_spels(spels.space, b)
    except CoordOutOfRange:
        return False
    return spels.contains(p) and not spels.contains(q)


def _incident_spels(space: Space, b: int) -> tuple[int, int]:
    k = space.orth_dir(unsign(space, b))
    first, second = upper_boundary_along(space, b, k)
    if sign_of(space, first) < 0:
        first, second = second, first
    return unsign(space, first), unsign(space, second)
