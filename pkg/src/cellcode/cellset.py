"""Characteristic bit-array sets of cells.

Both containers assign one bit to every cell of a *family* (all spels, all
unoriented surfels, all oriented r-cells, ...) of a space, so their memory
depends only on the image size. ``MinCharSet`` indexes a cell by its code
minus the smallest code of the family; ``LUTCharSet`` stores one contiguous
block per admissible topology word and indexes a cell by
``lut[topology] + sign_coords``. Bits live in little-endian 64-bit words,
so the atomic operations are ``tbl[k >> 6] & (1 << (k & 63))``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import BadMagic, FamilyMismatch, HeaderMismatch, NotInFamily, SpaceTooLarge, TruncatedPayload
from .kspace import Space

__all__ = [
    "CellFamily",
    "CharSet",
    "MinCharSet",
    "LUTCharSet",
    "OrderedCellSet",
    "make_min_charset",
    "make_lut_charset",
    "charset_from_bytes",
    "MAX_SET_BYTES",
]

MAX_SET_BYTES = 4 << 30
WORD = np.dtype("<u8")
_ONE = np.uint64(1)


@dataclass(frozen=True)
class CellFamily:
    """Cells of one dimension ``dim``, oriented (``signed``) or not."""

    dim: int
    signed: bool = False

    @classmethod
    def spels(cls, space: Space, signed: bool = False) -> "CellFamily":
        return cls(space.n, signed)

    @classmethod
    def surfels(cls, space: Space, signed: bool = False) -> "CellFamily":
        return cls(space.n - 1, signed)

    @property
    def tag(self) -> str:
        return f"{'s' if self.signed else 'u'}{self.dim}"

    @classmethod
    def from_tag(cls, tag: str) -> "CellFamily":
        if len(tag) < 2 or tag[0] not in "su" or not tag[1:].isdigit():
            raise ValueError(f"bad family tag {tag!r}")
        return cls(int(tag[1:]), tag[0] == "s")

    def topologies(self, space: Space) -> tuple[int, ...]:
        """Admissible topology words, increasing."""
        if not 0 <= self.dim <= space.n:
            raise ValueError(f"no {self.dim}-cells in a {space.n}-dimensional space")
        return tuple(t for t in range(space.full_topology + 1) if t.bit_count() == self.dim)

    def block_bits(self, space: Space) -> int:
        """Width of the (sign +) coordinate field below the topology word."""
        return space.coord_width + int(self.signed)


@lru_cache(maxsize=32)
def _coord_pattern(space: Space, kind: str) -> np.ndarray:
    """Boolean pattern over the packed coordinate field (``2**coord_width`` entries).

    ``kind="valid"`` marks coordinate words that decode inside the image,
    ``kind="border"`` the valid ones lying on the first or last slice of an axis.
    """
    out = np.ones((), dtype=bool)
    border = np.zeros((), dtype=bool)
    for i in reversed(range(space.n)):
        xs = np.arange(1 << space.nbits[i])
        ok = xs <= space.coordmax[i]
        edge = (xs == 0) | (xs == space.coordmax[i])
        out = out[..., None] & ok
        border = border[..., None] | edge
    if kind == "valid":
        return out.ravel()
    return (out & border).ravel()


def _pack_bits(flags: np.ndarray) -> np.ndarray:
    raw = np.packbits(flags, bitorder="little")
    pad = (-raw.size) % 8
    if pad:
        raw = np.concatenate([raw, np.zeros(pad, dtype=np.uint8)])
    return raw.view(WORD).copy()


@lru_cache(maxsize=32)
def coord_pattern_words(space: Space, kind: str) -> np.ndarray:
    """Packed version of the coordinate pattern (read-only)."""
    if kind == "valid" and space.coord_width >= 6 and all(m + 1 == 1 << b for m, b in zip(space.coordmax, space.nbits)):
        words = np.full((1 << space.coord_width) >> 6, np.iinfo(np.uint64).max, dtype=WORD)
    else:
        words = _pack_bits(_coord_pattern(space, kind))
    words.flags.writeable = False
    return words


class CharSet:
    """Common machinery of the characteristic-set containers.

    Subclasses define how a cell code maps to a bit index. Set algebra is
    done word-wise; complement is relative to the valid cells of the family.
    """

    kind = "abstract"

    def __init__(self, space: Space, family: CellFamily, size_bits: int, max_bytes: int | None = None):
        cap = MAX_SET_BYTES if max_bytes is None else max_bytes
        if size_bits > 8 * cap:
            raise SpaceTooLarge(f"{size_bits} bits exceed the {cap}-byte allocation cap")
        self.space = space
        self.family = family
        self.size_bits = size_bits
        self._words = np.zeros((size_bits + 63) >> 6, dtype=WORD)
        self._card: int | None = 0
        self._topo_shift = family.block_bits(space)
        topos = family.topologies(space)
        self._in_family = np.zeros(space.full_topology + 1, dtype=bool)
        self._in_family[list(topos)] = True
        # per-axis bounds only need checking when some axis is not a power of two
        self._ragged = [
            (mask, m << sh)
            for mask, sh, m, b in zip(space.axis_masks, space.shifts, space.coordmax, space.nbits)
            if m + 1 != 1 << b
        ]

    # -- indexing (per subclass) ---------------------------------------------

    def _index(self, c: int) -> int:
        raise NotImplementedError

    def _indices(self, codes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _codes(self, indices: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_topology(self, c: int) -> int:
        t = c >> self._topo_shift
        if c < 0 or t > self.space.full_topology or not self._in_family[t]:
            raise NotInFamily(f"code {c:#x} is not a {self.family.tag} cell of {self.space.coordmax}")
        for mask, top in self._ragged:
            if c & mask > top:
                raise NotInFamily(f"code {c:#x} has a coordinate beyond {self.space.coordmax}")
        return t

    def _check_topologies(self, codes: np.ndarray) -> np.ndarray:
        t = codes >> self._topo_shift
        if codes.size and (codes.min() < 0 or t.max() > self.space.full_topology or not self._in_family[t].all()):
            raise NotInFamily(f"codes outside the {self.family.tag} family")
        for mask, top in self._ragged:
            if codes.size and (codes & mask).max() > top:
                raise NotInFamily(f"codes with a coordinate beyond {self.space.coordmax}")
        return t

    # -- sizes ---------------------------------------------------------------

    @property
    def nbytes(self) -> int:
        """Size of the bit array in bytes (``size_bits / 8`` rounded up)."""
        return (self.size_bits + 7) >> 3

    @property
    def words(self) -> np.ndarray:
        """The underlying word array (shared, not copied)."""
        return self._words

    # -- atomic operations ---------------------------------------------------

    def contains(self, c: int) -> bool:
        k = self._index(c)
        return (int(self._words[k >> 6]) >> (k & 63)) & 1 == 1

    __contains__ = contains

    def add(self, c: int) -> None:
        k = self._index(c)
        self._words[k >> 6] |= _ONE << np.uint64(k & 63)
        self._card = None

    def discard(self, c: int) -> None:
        k = self._index(c)
        self._words[k >> 6] &= ~(_ONE << np.uint64(k & 63))
        self._card = None

    def remove(self, c: int) -> None:
        if not self.contains(c):
            raise KeyError(c)
        self.discard(c)

    def toggle(self, c: int) -> bool:
        """Flip membership of ``c``; return whether it was a member before."""
        k = self._index(c)
        w = k >> 6
        bit = _ONE << np.uint64(k & 63)
        was = bool(self._words[w] & bit)
        self._words[w] ^= bit
        self._card = None
        return was

    # -- bulk operations -----------------------------------------------------

    def _bulk(self, codes, op) -> None:
        idx = self._indices(np.asarray(codes, dtype=np.int64).ravel())
        op.at(self._words, idx >> 6, _ONE << (idx & 63).astype(np.uint64))
        self._card = None

    def add_many(self, codes: Iterable[int] | np.ndarray) -> None:
        self._bulk(codes, np.bitwise_or)

    def toggle_many(self, codes: Iterable[int] | np.ndarray) -> None:
        self._bulk(codes, np.bitwise_xor)

    def discard_many(self, codes: Iterable[int] | np.ndarray) -> None:
        idx = self._indices(np.asarray(codes, dtype=np.int64).ravel())
        np.bitwise_and.at(self._words, idx >> 6, ~(_ONE << (idx & 63).astype(np.uint64)))
        self._card = None

    def contains_many(self, codes: Iterable[int] | np.ndarray) -> np.ndarray:
        idx = self._indices(np.asarray(codes, dtype=np.int64).ravel())
        return ((self._words[idx >> 6] >> (idx & 63).astype(np.uint64)) & _ONE).astype(bool)

    # -- global operations ---------------------------------------------------

    def cardinality(self) -> int:
        if self._card is None:
            self._card = int(np.bitwise_count(self._words).sum(dtype=np.int64))
        return self._card

    __len__ = cardinality

    def __bool__(self) -> bool:
        return self._card != 0 if self._card is not None else bool(self._words.any())

    def _indices_of_members(self) -> np.ndarray:
        nz = np.flatnonzero(self._words)
        if nz.size == 0:
            return np.empty(0, dtype=np.int64)
        bits = np.unpackbits(self._words[nz].view(np.uint8), bitorder="little").reshape(-1, 64)
        rows, cols = np.nonzero(bits)
        return nz[rows].astype(np.int64) * 64 + cols

    def codes(self) -> np.ndarray:
        """Member codes as an increasing ``int64`` array."""
        return self._codes(self._indices_of_members())

    def __iter__(self) -> Iterator[int]:
        return (int(c) for c in self.codes())

    def universe_words(self) -> np.ndarray:
        """Word mask of every valid cell of the family (cached per layout)."""
        return _universe(type(self), self.space, self.family)

    def _check_same(self, other: "CharSet") -> None:
        if type(self) is not type(other) or self.space != other.space or self.family != other.family:
            raise FamilyMismatch(
                f"{type(self).__name__}[{self.family.tag}] vs {type(other).__name__}[{other.family.tag}]"
            )

    def copy(self) -> "CharSet":
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new._words = self._words.copy()
        return new

    def clear(self) -> None:
        self._words[:] = 0
        self._card = 0

    def update(self, other: "CharSet") -> "CharSet":
        self._check_same(other)
        np.bitwise_or(self._words, other._words, out=self._words)
        self._card = None
        return self

    def intersection_update(self, other: "CharSet") -> "CharSet":
        self._check_same(other)
        np.bitwise_and(self._words, other._words, out=self._words)
        self._card = None
        return self

    def difference_update(self, other: "CharSet") -> "CharSet":
        self._check_same(other)
        np.bitwise_and(self._words, ~other._words, out=self._words)
        self._card = None
        return self

    def complement_update(self) -> "CharSet":
        np.bitwise_xor(self._words, self.universe_words(), out=self._words)
        self._card = None
        return self

    def union(self, other: "CharSet") -> "CharSet":
        return self.copy().update(other)

    def intersection(self, other: "CharSet") -> "CharSet":
        return self.copy().intersection_update(other)

    def difference(self, other: "CharSet") -> "CharSet":
        return self.copy().difference_update(other)

    def complement(self) -> "CharSet":
        return self.copy().complement_update()

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __invert__ = complement
    __ior__ = update
    __iand__ = intersection_update
    __isub__ = difference_update

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CharSet):
            return NotImplemented
        return (
            type(self) is type(other)
            and self.space == other.space
            and self.family == other.family
            and np.array_equal(self._words, other._words)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.family.tag}, {self.space.coordmax}, |S|={len(self)})"

    # -- snapshot ------------------------------------------------------------

    def to_bytes(self) -> bytes:
        """``CSET1 <kind>-<tag> <n> <coordmax...>`` header line, then the raw word array."""
        header = " ".join(
            ["CSET1", f"{self.kind}-{self.family.tag}", str(self.space.n), *map(str, self.space.coordmax)]
        )
        return header.encode("ascii") + b"\n" + self._words.tobytes()


class MinCharSet(CharSet):
    """One bit per code between the smallest and largest code of the family."""

    kind = "min"

    def __init__(self, space: Space, family: CellFamily, max_bytes: int | None = None):
        topos = family.topologies(space)
        shift = family.block_bits(space)
        self.min_code = topos[0] << shift
        self.max_code = ((topos[-1] + 1) << shift) - 1
        super().__init__(space, family, self.max_code - self.min_code + 1, max_bytes)

    def _index(self, c: int) -> int:
        self._check_topology(c)
        return c - self.min_code

    def _indices(self, codes: np.ndarray) -> np.ndarray:
        self._check_topologies(codes)
        return codes - self.min_code

    def _codes(self, indices: np.ndarray) -> np.ndarray:
        return indices + self.min_code


class LUTCharSet(CharSet):
    """One block of ``2**block_bits`` bits per admissible topology, found through a lookup table."""

    kind = "lut"

    def __init__(self, space: Space, family: CellFamily, max_bytes: int | None = None):
        topos = family.topologies(space)
        shift = family.block_bits(space)
        self.lut = np.full(space.full_topology + 1, -1, dtype=np.int64)
        for rank, t in enumerate(topos):
            self.lut[t] = rank << shift
        self._topos = np.array(topos, dtype=np.int64)
        self._low_mask = (1 << shift) - 1
        super().__init__(space, family, len(topos) << shift, max_bytes)

    def _index(self, c: int) -> int:
        t = self._check_topology(c)
        return int(self.lut[t]) + (c & self._low_mask)

    def _indices(self, codes: np.ndarray) -> np.ndarray:
        t = self._check_topologies(codes)
        return self.lut[t] + (codes & self._low_mask)

    def _codes(self, indices: np.ndarray) -> np.ndarray:
        topo = self._topos[indices >> self._topo_shift]
        return (topo << self._topo_shift) | (indices & self._low_mask)


@lru_cache(maxsize=32)
def _universe(cls: type, space: Space, family: CellFamily) -> np.ndarray:
    topos = family.topologies(space)
    if cls is MinCharSet:
        blocks = [t.bit_count() == family.dim for t in range(topos[0], topos[-1] + 1)]
    else:
        blocks = [True] * len(topos)
    if space.coord_width >= 6:
        block = coord_pattern_words(space, "valid")
        if family.signed:
            block = np.concatenate([block, block])
        zero = np.zeros_like(block)
        words = np.concatenate([block if b else zero for b in blocks])
    else:
        pattern = _coord_pattern(space, "valid")
        if family.signed:
            pattern = np.concatenate([pattern, pattern])
        flags = np.concatenate([pattern if b else np.zeros_like(pattern) for b in blocks])
        words = _pack_bits(flags)
    words.flags.writeable = False
    return words


def make_min_charset(space: Space, family: CellFamily, max_bytes: int | None = None) -> MinCharSet:
    return MinCharSet(space, family, max_bytes)


def make_lut_charset(space: Space, family: CellFamily, max_bytes: int | None = None) -> LUTCharSet:
    return LUTCharSet(space, family, max_bytes)


def charset_from_bytes(data: bytes, max_bytes: int | None = None) -> CharSet:
    """Inverse of :meth:`CharSet.to_bytes`."""
    head, sep, payload = data.partition(b"\n")
    if not sep:
        raise BadMagic("missing header line")
    fields = head.decode("ascii", errors="replace").split()
    if not fields or fields[0] != "CSET1":
        raise BadMagic(f"expected CSET1, got {fields[:1]}")
    try:
        kind, tag = fields[1].split("-", 1)
        n = int(fields[2])
        coordmax = tuple(int(v) for v in fields[3:])
        family = CellFamily.from_tag(tag)
        cls = {"min": MinCharSet, "lut": LUTCharSet}[kind]
    except (IndexError, ValueError, KeyError) as exc:
        raise HeaderMismatch(f"unreadable CSET1 header {head!r}") from exc
    if len(coordmax) != n:
        raise HeaderMismatch(f"header declares n={n} but lists {len(coordmax)} bounds")
    out = cls(Space(coordmax), family, max_bytes)
    need = out._words.nbytes
    if len(payload) < need:
        raise TruncatedPayload(f"payload has {len(payload)} bytes, expected {need}")
    if len(payload) > need:
        raise HeaderMismatch(f"payload has {len(payload)} bytes, expected {need}")
    out._words[:] = np.frombuffer(payload, dtype=WORD)
    out._card = None
    return out


class OrderedCellSet:
    """Sorted-list set of codes with binary search membership.

    Kept as an independent reference container for differential tests of
    the characteristic sets; it knows nothing about families or layouts.
    """

    def __init__(self, codes: Iterable[int] = ()):
        self._items: list[int] = sorted(set(int(c) for c in codes))

    def contains(self, c: int) -> bool:
        k = bisect.bisect_left(self._items, c)
        return k < len(self._items) and self._items[k] == c

    __contains__ = contains

    def add(self, c: int) -> None:
        k = bisect.bisect_left(self._items, c)
        if k == len(self._items) or self._items[k] != c:
            self._items.insert(k, c)

    def discard(self, c: int) -> None:
        k = bisect.bisect_left(self._items, c)
        if k < len(self._items) and self._items[k] == c:
            del self._items[k]

    def remove(self, c: int) -> None:
        if c not in self:
            raise KeyError(c)
        self.discard(c)

    def toggle(self, c: int) -> bool:
        was = c in self
        if was:
            self.discard(c)
        else:
            self.add(c)
        return was

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[int]:
        return iter(list(self._items))

    def union(self, other: "OrderedCellSet") -> "OrderedCellSet":
        return OrderedCellSet(set(self._items) | set(other._items))

    def intersection(self, other: "OrderedCellSet") -> "OrderedCellSet":
        return OrderedCellSet(set(self._items) & set(other._items))

    def difference(self, other: "OrderedCellSet") -> "OrderedCellSet":
        return OrderedCellSet(set(self._items) - set(other._items))
