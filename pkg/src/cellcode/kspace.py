"""Finite cubical cellular space and the unsigned cell code.

A cell of an ``n``-dimensional image is stored as one integer word::

    (topology << coord_width) | x_{n-1} ... x_1 x_0

where ``x_i`` is the digital coordinate (Khalimsky coordinate div 2) of axis
``i``, axis 0 taking the least-significant bits, and bit ``i`` of ``topology``
is the parity of the Khalimsky coordinate along axis ``i`` (1 = open).
Spels have every topology bit set, pointels none, surfels all but one.

Codes are plain Python ints. A :class:`Space` carries the bit layout and
provides the O(1) accessors and neighbourhood primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Literal, Sequence

import numpy as np

from .errors import CoordOutOfRange, NotASurfel, SpaceTooLarge

__all__ = ["Space", "make_space"]

WORD_BITS = 64


@dataclass(frozen=True)
class Space:
    """Bit layout of a finite parallelepipedic image ``[0, coordmax[i]]``.

    Parameters
    ----------
    coordmax : sequence of int
        Inclusive upper bound of every spel coordinate, axis 0 first.
    word_bits : int
        Width of the machine word the codes must fit in. One bit is kept
        for the orientation of signed codes.

    Raises
    ------
    SpaceTooLarge
        If ``n + 1 + sum(nbits)`` exceeds ``word_bits``.
    """

    coordmax: tuple[int, ...]
    word_bits: int = WORD_BITS
    n: int = field(init=False)
    nbits: tuple[int, ...] = field(init=False)
    shifts: tuple[int, ...] = field(init=False)
    coord_width: int = field(init=False)
    coord_mask: int = field(init=False)
    axis_masks: tuple[int, ...] = field(init=False, repr=False)
    units: tuple[int, ...] = field(init=False, repr=False)
    full_topology: int = field(init=False, repr=False)

    def __post_init__(self):
        coordmax = tuple(int(m) for m in self.coordmax)
        if not coordmax:
            raise ValueError("a space needs at least one axis")
        if any(m < 1 for m in coordmax):
            raise ValueError(f"every coordinate bound must be >= 1, got {coordmax}")
        n = len(coordmax)
        nbits = tuple(m.bit_length() for m in coordmax)
        shifts = tuple(sum(nbits[:i]) for i in range(n))
        width = sum(nbits)
        if n + 1 + width > self.word_bits:
            raise SpaceTooLarge(
                f"{n} topology bits + 1 sign bit + {width} coordinate bits "
                f"exceed a {self.word_bits}-bit word"
            )
        setattr_ = object.__setattr__
        setattr_(self, "coordmax", coordmax)
        setattr_(self, "n", n)
        setattr_(self, "nbits", nbits)
        setattr_(self, "shifts", shifts)
        setattr_(self, "coord_width", width)
        setattr_(self, "coord_mask", (1 << width) - 1)
        setattr_(self, "axis_masks", tuple(((1 << b) - 1) << s for b, s in zip(nbits, shifts)))
        setattr_(self, "units", tuple(1 << s for s in shifts))
        setattr_(self, "full_topology", (1 << n) - 1)

    @property
    def sizes(self) -> tuple[int, ...]:
        """Number of spels along each axis."""
        return tuple(m + 1 for m in self.coordmax)

    # -- packing -------------------------------------------------------------

    def _check_coord(self, i: int, v: int) -> None:
        if not 0 <= v <= self.coordmax[i]:
            raise CoordOutOfRange(f"coordinate {v} outside [0, {self.coordmax[i]}] on axis {i}")

    def pack(self, coords: Sequence[int]) -> int:
        """Pack digital coordinates into the coordinate field (no topology)."""
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(coords)}")
        word = 0
        for i, v in enumerate(coords):
            v = int(v)
            self._check_coord(i, v)
            word |= v << self.shifts[i]
        return word

    def ucode(self, topology: int, coords: Sequence[int]) -> int:
        """Unsigned code of the cell with the given topology word and digital coordinates."""
        if not 0 <= topology <= self.full_topology:
            raise ValueError(f"topology {topology:#b} is not an {self.n}-bit word")
        return (topology << self.coord_width) | self.pack(coords)

    def spel(self, coords: Sequence[int]) -> int:
        return self.ucode(self.full_topology, coords)

    def pointel(self, coords: Sequence[int]) -> int:
        return self.ucode(0, coords)

    def surfel(self, orth: int, coords: Sequence[int]) -> int:
        """Surfel orthogonal to axis ``orth``."""
        return self.ucode(self.full_topology ^ (1 << orth), coords)

    # -- accessors -----------------------------------------------------------

    def topology(self, c: int) -> int:
        return c >> self.coord_width

    def dim(self, c: int) -> int:
        return (c >> self.coord_width).bit_count()

    def coord(self, c: int, i: int) -> int:
        return (c & self.axis_masks[i]) >> self.shifts[i]

    def coords(self, c: int) -> tuple[int, ...]:
        return tuple((c & m) >> s for m, s in zip(self.axis_masks, self.shifts))

    def set_coord(self, c: int, i: int, v: int) -> int:
        """Copy of ``c`` with its ``i``-th digital coordinate replaced by ``v``."""
        self._check_coord(i, v)
        return (c & ~self.axis_masks[i]) | (v << self.shifts[i])

    def khalimsky_coord(self, c: int, i: int) -> int:
        return 2 * self.coord(c, i) + ((c >> (self.coord_width + i)) & 1)

    def khalimsky_coords(self, c: int) -> tuple[int, ...]:
        return tuple(self.khalimsky_coord(c, i) for i in range(self.n))

    def from_khalimsky(self, kcoords: Sequence[int]) -> int:
        """Code of the cell at the given Khalimsky coordinates."""
        topo = sum((k & 1) << i for i, k in enumerate(kcoords))
        return self.ucode(topo, [k >> 1 for k in kcoords])

    def orth_dir(self, c: int) -> int:
        """Axis orthogonal to surfel ``c``: the only axis where it is closed."""
        closed = self.full_topology ^ self.topology(c)
        if closed == 0 or closed & (closed - 1):
            raise NotASurfel(f"{self.cell_str(c)} has dimension {self.dim(c)}, not {self.n - 1}")
        return closed.bit_length() - 1

    def is_valid(self, c: int) -> bool:
        """True if ``c`` decodes to a cell of this space."""
        if c < 0 or self.topology(c) > self.full_topology:
            return False
        return all(self.coord(c, i) <= m for i, m in enumerate(self.coordmax))

    # -- neighbourhood -------------------------------------------------------

    def translate(self, c: int, i: int, delta: int) -> int:
        """Same-topology neighbour one step along axis ``i`` (``delta`` is +1 or -1)."""
        v = self.coord(c, i) + delta
        self._check_coord(i, v)
        return c + delta * self.units[i]

    def l_adjacent(self, p: int, q: int, l: int) -> bool:
        """``l``-adjacency: same topology, per-axis offsets in {-1, 0, 1}, at most ``l`` of them nonzero."""
        if p == q or self.topology(p) != self.topology(q):
            return False
        moved = 0
        for i in range(self.n):
            d = self.coord(p, i) - self.coord(q, i)
            if d < -1 or d > 1:
                return False
            moved += d != 0
        return moved <= l

    def incident_kind(self, c: int, i: int) -> Literal["low", "up"]:
        """Whether the 1-incident cells of ``c`` along ``i`` bound it ("low") or are bounded by it ("up")."""
        return "low" if (c >> (self.coord_width + i)) & 1 else "up"

    def incident_1(self, c: int, i: int, which: int) -> int:
        """First (``which=0``) or second (``which=1``) 1-incident cell of ``c`` along axis ``i``.

        Along an open axis these are the two low-incident cells at ``x_i`` and
        ``x_i + 1``; along a closed axis the two up-incident cells at ``x_i - 1``
        and ``x_i``.
        """
        if not 0 <= i < self.n:
            raise IndexError(f"axis {i} outside [0, {self.n})")
        flip = 1 << (self.coord_width + i)
        if c & flip:
            step = which
        else:
            step = which - 1
        d = c ^ flip
        if step:
            d = self.translate(d, i, step)
        return d

    def incident_pair(self, c: int, i: int) -> tuple[int, int]:
        return self.incident_1(c, i, 0), self.incident_1(c, i, 1)

    def _incidence_closure(self, c: int, bit_value: int) -> list[int]:
        seen = {c}
        frontier = [c]
        while frontier:
            d = frontier.pop()
            topo = self.topology(d)
            for i in range(self.n):
                if (topo >> i) & 1 == bit_value:
                    for e in self.incident_pair(d, i):
                        if e not in seen:
                            seen.add(e)
                            frontier.append(e)
        return sorted(seen)

    def closure(self, c: int) -> list[int]:
        """``c`` and every cell low incident to it, in increasing code order."""
        return self._incidence_closure(c, 1)

    def star(self, c: int) -> list[int]:
        """``c`` and every cell up incident to it, in increasing code order."""
        return self._incidence_closure(c, 0)

    # -- enumeration and vector helpers -------------------------------------

    def cells(self, dim: int | None = None) -> Iterator[int]:
        """All cells of the space (optionally of one dimension), increasing code order."""
        for topo in range(self.full_topology + 1):
            if dim is not None and topo.bit_count() != dim:
                continue
            for xs in product(*(range(m + 1) for m in reversed(self.coordmax))):
                yield self.ucode(topo, xs[::-1])

    def pack_array(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`pack` over an ``(m, n)`` integer array (no range check)."""
        coords = np.asarray(coords, dtype=np.int64)
        out = np.zeros(coords.shape[0], dtype=np.int64)
        for i, s in enumerate(self.shifts):
            out |= coords[:, i] << s
        return out

    def unpack_array(self, codes: np.ndarray) -> np.ndarray:
        """Digital coordinates of an array of codes, shape ``(m, n)``."""
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty((codes.shape[0], self.n), dtype=np.int64)
        for i, (m, s) in enumerate(zip(self.axis_masks, self.shifts)):
            out[:, i] = (codes & m) >> s
        return out

    def cell_str(self, c: int) -> str:
        """Debug rendering ``(alpha-bits; x_{n-1},...,x_0)``."""
        bits = format(self.topology(c), f"0{self.n}b")
        xs = ",".join(str(x) for x in reversed(self.coords(c)))
        return f"({bits}; {xs})"


def make_space(coordmax: Sequence[int], word_bits: int = WORD_BITS) -> Space:
    """Build the layout of the image whose spel coordinates range over ``[0, coordmax[i]]``."""
    return Space(tuple(coordmax), word_bits)
