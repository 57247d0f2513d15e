"""Followers, bel adjacencies and boundary extraction by scanning or tracking.

Five extractors are provided:

``scan_full``          examines every pair of axis-adjacent spels of the image,
``scan_box``           only those inside a box around the object,
``track_any``          follows direct and indirect bel adjacencies,
``track_closed``       follows direct adjacencies only (closed boundaries),
``track_closed_tail``  same, bookkeeping re-encounters in a tail multiset
                       instead of querying the visited set.

Trackers run in compiled code by default (``engine="numba"``); the
``"python"`` engine walks the same definitions cell by cell and serves as a
reference.
"""

from __future__ import annotations

import time
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .cellset import CellFamily, CharSet, LUTCharSet
from .errors import BoxOutOfBounds, CoordOutOfRange, NotABel, NotInObject, ObjectTouchesBorder
from .kspace import Space
from .oriented import (
    _spels_of,
    check_interior,
    is_bel,
    lower_boundary,
    lower_boundary_along,
    opposite,
    sign_of,
    unsign,
    upper_boundary_along,
    with_sign,
)
from .shapes import field_array

__all__ = [
    "BelAdjacency",
    "TrackResult",
    "is_direct_follower",
    "direct_followers",
    "indirect_followers",
    "direct_adjacent_bel",
    "indirect_adjacent_bel",
    "find_start_bel",
    "track_closed",
    "track_closed_tail",
    "track_any",
    "scan_full",
    "scan_box",
]


class BelAdjacency:
    """Interior/exterior choice for every pair of axes.

    ``BelAdjacency.interior(3)`` gives the (6,18) bel adjacency in 3D,
    ``BelAdjacency.exterior(3)`` the (18,6) one.
    """

    def __init__(self, n: int, interior: bool = True):
        self.n = n
        self._table = np.full((n, n), interior, dtype=bool)

    @classmethod
    def interior(cls, n: int) -> "BelAdjacency":
        return cls(n, True)

    @classmethod
    def exterior(cls, n: int) -> "BelAdjacency":
        return cls(n, False)

    @classmethod
    def parse(cls, n: int, text: str) -> "BelAdjacency":
        """Parse ``interior``, ``exterior`` or ``i,j=interior;k,l=exterior;...``.

        Pairs not listed default to interior.
        """
        text = text.strip()
        if text in ("interior", "exterior"):
            return cls(n, text == "interior")
        adj = cls(n, True)
        for item in filter(None, (part.strip() for part in text.split(";"))):
            try:
                pair, mode = item.split("=")
                i, j = (int(v) for v in pair.split(","))
            except ValueError as exc:
                raise ValueError(f"bad adjacency item {item!r}; expected 'i,j=interior|exterior'") from exc
            if mode.strip() not in ("interior", "exterior") or i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad adjacency item {item!r}")
            adj.set(i, j, mode.strip() == "interior")
        return adj

    def set(self, i: int, j: int, interior: bool) -> None:
        self._table[i, j] = self._table[j, i] = interior

    def is_interior(self, i: int, j: int) -> bool:
        return bool(self._table[i, j])

    @property
    def table(self) -> np.ndarray:
        out = self._table.copy()
        out.flags.writeable = False
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BelAdjacency) and np.array_equal(self._table, other._table)

    def __repr__(self) -> str:
        pairs = ";".join(
            f"{i},{j}={'interior' if self._table[i, j] else 'exterior'}"
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )
        return f"BelAdjacency({self.n}, {pairs!r})"


@dataclass
class TrackResult:
    """Output of a boundary extractor.

    ``surfels`` holds the extracted surfels (signed unless requested
    otherwise), ``visited`` the number of bels processed. The remaining
    fields are tracking statistics: re-encounters of known bels, how many
    moves went to the first/second/third direct follower, and how many
    occurrences remained in the tail multiset of Track C (always 0 on a
    closed boundary).
    """

    surfels: CharSet
    visited: int
    hits: int = 0
    moves: tuple[int, int, int] = (0, 0, 0)
    tail_left: int = 0
    seconds: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.surfels)


# -- followers (literal definitions) -----------------------------------------


def is_direct_follower(space: Space, p: int, q: int) -> bool:
    """True if some cell is positive in the lower boundary of ``p`` and negative in that of ``q``."""
    if unsign(space, p) == unsign(space, q):
        return False
    dq = set(_representable_faces(space, q))
    return any(sign_of(space, d) > 0 and opposite(space, d) in dq for d in lower_boundary(space, p))


def _representable_faces(space: Space, c: int) -> list[int]:
    # faces beyond the far border cannot be shared with a representable cell
    w = space.coord_width
    topo = c >> (w + 1)
    out = []
    for i in range(space.n):
        if (topo >> i) & 1:
            try:
                out.extend(lower_boundary_along(space, c, i))
            except CoordOutOfRange:
                flip = ((topo >> (i + 1)).bit_count() & 1) << w
                out.append((c ^ (1 << (w + 1 + i))) ^ flip)
    return out


def _interior_exterior_signed(space: Space, b: int) -> tuple[int, int]:
    k = space.orth_dir(unsign(space, b))
    first, second = upper_boundary_along(space, b, k)
    return (first, second) if sign_of(space, first) > 0 else (second, first)


def direct_followers(space: Space, b: int, j: int) -> tuple[int, int, int]:
    """The three ordered direct followers of surfel ``b`` along axis ``j``.

    With upper boundary ``{+p, -q}`` of ``b``: the first lies in the lower
    boundary of ``+p`` along ``j``, the third in the lower boundary of ``-q``
    along ``j``. The second is ``b`` translated along ``j`` past its direct
    link ``+l`` (positive cell of the lower boundary of ``b`` along ``j``);
    it lies in the upper boundary of ``-l``, since the one of ``+l`` holds
    ``+b`` itself.
    """
    k = space.orth_dir(unsign(space, b))
    if j == k or not 0 <= j < space.n:
        raise ValueError(f"axis {j} is not tangent to the surfel (orthogonal axis {k})")
    plus_p, minus_q = _interior_exterior_signed(space, b)
    link = next(c for c in lower_boundary_along(space, b, j) if sign_of(space, c) > 0)
    pairs = (
        lower_boundary_along(space, plus_p, j),
        upper_boundary_along(space, opposite(space, link), j),
        lower_boundary_along(space, minus_q, j),
    )
    out = []
    for pair in pairs:
        hits = [c for c in pair if is_direct_follower(space, b, c)]
        assert len(hits) == 1, "exactly one element of each pair follows the surfel"
        out.append(hits[0])
    return out[0], out[1], out[2]


def indirect_followers(space: Space, b: int, j: int) -> tuple[int, int, int]:
    """Cells of which ``b`` is a direct follower: negated direct followers of ``-b``."""
    f1, f2, f3 = direct_followers(space, opposite(space, b), j)
    return opposite(space, f1), opposite(space, f2), opposite(space, f3)


# -- bel adjacency ------------------------------------------------------------


def _mode(adjacency: BelAdjacency | str | None, k: int, j: int) -> bool:
    if adjacency is None:
        return True
    if isinstance(adjacency, str):
        return adjacency == "interior"
    return adjacency.is_interior(k, j)


def _direct_move(spels: CharSet, b: int, j: int, adjacency) -> tuple[int, int]:
    space = spels.space
    if not is_bel(b, spels):
        raise NotABel(f"{space.cell_str(unsign(space, b))} is not a bel of the object")
    f1, f2, f3 = direct_followers(space, b, j)
    delta = space.coord(unsign(space, f2), j) - space.coord(unsign(space, b), j)
    plus_p, minus_q = _interior_exterior_signed(space, b)
    p_next = space.translate(unsign(space, plus_p), j, delta)
    q_next = space.translate(unsign(space, minus_q), j, delta)
    k = space.orth_dir(unsign(space, b))
    if _mode(adjacency, k, j):
        if not spels.contains(p_next):
            return f1, 0
        if not spels.contains(q_next):
            return f2, 1
        return f3, 2
    if spels.contains(q_next):
        return f3, 2
    if spels.contains(p_next):
        return f2, 1
    return f1, 0


def direct_adjacent_bel(obj, b: int, j: int, adjacency: BelAdjacency | str | None = None) -> int:
    """Interior (first) or exterior (last) direct follower of bel ``b`` along ``j`` that is a bel.

    Decided with at most two spel membership queries on the spels following
    the interior and exterior spels of ``b`` in the direct direction.
    ``adjacency`` is a :class:`BelAdjacency`, ``"interior"``/``"exterior"``,
    or ``None`` for interior.
    """
    return _direct_move(_spels_of(obj), b, j, adjacency)[0]


def indirect_adjacent_bel(obj, b: int, j: int, adjacency: BelAdjacency | str | None = None) -> int | None:
    """Bel whose direct adjacent bel in the plane ``{orth(b), j}`` is ``b``.

    Returns ``None`` when no indirect follower qualifies (open boundary).
    """
    spels = _spels_of(obj)
    space = spels.space
    if not is_bel(b, spels):
        raise NotABel(f"{space.cell_str(unsign(space, b))} is not a bel of the object")
    k = space.orth_dir(unsign(space, b))
    for g in indirect_followers(space, b, j):
        if not is_bel(g, spels):
            continue
        axis = j if space.orth_dir(unsign(space, g)) == k else k
        if _direct_move(spels, g, axis, adjacency)[0] == b:
            return g
    return None


def find_start_bel(obj, inside: int | Sequence[int]) -> int:
    """Signed bel met when walking along ``+x_0`` from spel ``inside`` until leaving the object."""
    spels = _spels_of(obj)
    space = spels.space
    p = inside if isinstance(inside, (int, np.integer)) else space.spel(inside)
    p = int(p)
    if not spels.contains(p):
        raise NotInObject(f"{space.cell_str(p)} is not in the object")
    while True:
        if space.coord(p, 0) == space.coordmax[0]:
            raise ObjectTouchesBorder("object reaches the upper border along axis 0")
        q = p + space.units[0]
        if not spels.contains(q):
            return lower_boundary_along(space, with_sign(space, p, 1), 0)[1]
        p = q


# -- trackers -----------------------------------------------------------------


@lru_cache(maxsize=16)
def _layout_tables(space: Space) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = space.n
    units = np.array(space.units, dtype=np.int64)
    parity = np.zeros((1 << n, n), dtype=np.int64)
    orth = np.full(1 << n, -1, dtype=np.int64)
    for t in range(1 << n):
        for j in range(n):
            parity[t, j] = (t >> (j + 1)).bit_count() & 1
        closed = space.full_topology ^ t
        if closed and not closed & (closed - 1):
            orth[t] = closed.bit_length() - 1
    for arr in (units, parity, orth):
        arr.flags.writeable = False
    return units, parity, orth


def _adj_table(adjacency, n: int) -> np.ndarray:
    if adjacency is None:
        adjacency = BelAdjacency.interior(n)
    elif isinstance(adjacency, str):
        adjacency = BelAdjacency.parse(n, adjacency)
    return adjacency.table.astype(np.int8)


def _prepare(obj, b: int):
    spels = check_interior(obj)
    if not is_bel(b, spels):
        space = spels.space
        raise NotABel(f"{space.cell_str(unsign(space, b))} is not a bel of the object")
    return spels


def _run(kind: int, obj, b: int, adjacency, signed: bool, engine: str) -> TrackResult:
    spels = _prepare(obj, b)
    space = spels.space
    out = LUTCharSet(space, CellFamily.surfels(space, signed=signed))
    t0 = time.perf_counter()
    if engine == "auto":
        engine = "numba" if space.n + 1 + space.coord_width < 64 else "python"
    if engine == "numba":
        units, parity, orth = _layout_tables(space)
        processed, hits, moves, left = _kernels.track(
            kind, b, space.n, space.coord_width, units, parity, orth,
            _adj_table(adjacency, space.n), spels.words, out.words, out.lut, signed,
        )
        out._card = None
        res = TrackResult(out, int(processed), int(hits), tuple(int(m) for m in moves), int(left))
    elif engine == "python":
        res = _track_python(kind, spels, b, adjacency, out, signed)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    res.seconds = time.perf_counter() - t0
    return res


def _track_python(kind: int, spels: CharSet, b: int, adjacency, out: CharSet, signed: bool) -> TrackResult:
    space = spels.space
    n = space.n

    def key(c: int) -> int:
        return c if signed else unsign(space, c)

    queue = deque([b])
    out.add(key(b))
    tails: Counter[int] = Counter()
    if kind == _kernels.TRACK_C:
        tails[b] = n - 1
    moves = [0, 0, 0]
    processed = hits = 0
    while queue:
        p = queue.popleft()
        processed += 1
        k = space.orth_dir(unsign(space, p))
        for j in range(n):
            if j == k:
                continue
            q, m = _direct_move(spels, p, j, adjacency)
            moves[m] += 1
            found = [q]
            if kind == _kernels.TRACK_C:
                if tails[q] > 0:
                    hits += 1
                    tails[q] -= 1
                    continue
                tails[q] += n - 2
            elif kind == _kernels.TRACK_A:
                r = indirect_adjacent_bel(spels, p, j, adjacency)
                if r is not None:
                    found.append(r)
            for c in found:
                if out.contains(key(c)) and kind != _kernels.TRACK_C:
                    hits += 1
                    continue
                out.add(key(c))
                queue.append(c)
    return TrackResult(out, processed, hits, (moves[0], moves[1], moves[2]), sum(tails.values()))


def track_closed(obj, b: int, adjacency: BelAdjacency | str | None = None, *,
                 signed: bool = True, engine: str = "auto") -> TrackResult:
    """Bels of the closed boundary component of bel ``b``, following direct adjacencies (Track B).

    Breadth-first; a bel is queued the first time it is found missing from
    the output set.
    """
    return _run(_kernels.TRACK_B, obj, b, adjacency, signed, engine)


def track_closed_tail(obj, b: int, adjacency: BelAdjacency | str | None = None, *,
                      signed: bool = True, engine: str = "auto") -> TrackResult:
    """Same output as :func:`track_closed`, without membership queries on the output (Track C).

    Every bel is reached once per tangent axis. The start bel enters the
    tail multiset ``n - 1`` times and each newly found bel ``n - 2`` times;
    a bel found in the tail is consumed instead of being queued again.
    """
    return _run(_kernels.TRACK_C, obj, b, adjacency, signed, engine)


def track_any(obj, b: int, adjacency: BelAdjacency | str | None = None, *,
              signed: bool = True, engine: str = "auto") -> TrackResult:
    """Bels reachable from ``b`` through direct and indirect adjacencies (Track A)."""
    return _run(_kernels.TRACK_A, obj, b, adjacency, signed, engine)


# -- scanners -----------------------------------------------------------------


def _emit_faces(space: Space, dense: np.ndarray, offset: Sequence[int], out: CharSet, signed: bool) -> None:
    """Add to ``out`` every surfel between two axis-adjacent spels of ``dense`` with different membership.

    ``dense`` is indexed ``[x_{n-1}, ..., x_0]`` and its origin sits at
    digital coordinates ``offset``.
    """
    n, w = space.n, space.coord_width
    for i in range(n):
        a = n - 1 - i
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[a] = slice(None, -1)
        hi[a] = slice(1, None)
        low_in = dense[tuple(lo)]
        change = low_in != dense[tuple(hi)]
        nz = np.nonzero(change)
        if nz[0].size == 0:
            continue
        packed = np.zeros(nz[0].size, dtype=np.int64)
        for ax in range(n):
            coord = nz[n - 1 - ax].astype(np.int64) + offset[ax] + (1 if ax == i else 0)
            packed |= coord << space.shifts[ax]
        topo = space.full_topology ^ (1 << i)
        if signed:
            t = (n - 1 - i) & 1
            inside_below = low_in[nz]
            sign_bits = np.where(inside_below, t ^ 1, t).astype(np.int64)
            out.add_many((topo << (w + 1)) | (sign_bits << w) | packed)
        else:
            out.add_many((topo << w) | packed)


def scan_full(obj, *, signed: bool = False) -> LUTCharSet:
    """Boundary surfels found by sweeping every axis-adjacent spel pair of the image (Scan A)."""
    spels = check_interior(obj)
    space = spels.space
    out = LUTCharSet(space, CellFamily.surfels(space, signed=signed))
    _emit_faces(space, field_array(spels), (0,) * space.n, out, signed)
    return out


def scan_box(obj, lo: Sequence[int], hi: Sequence[int], *, signed: bool = False) -> LUTCharSet:
    """Like :func:`scan_full` restricted to the box ``[lo, hi]`` (inclusive) holding the object (Scan B).

    The sweep covers the box grown by one spel on each side, which must lie
    inside the image.
    """
    spels = check_interior(obj)
    space = spels.space
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    if len(lo) != space.n or len(hi) != space.n:
        raise BoxOutOfBounds(f"box corners must have {space.n} coordinates")
    for i in range(space.n):
        if not 1 <= lo[i] <= hi[i] <= space.coordmax[i] - 1:
            raise BoxOutOfBounds(f"box [{lo[i]}, {hi[i]}] plus margin leaves the image on axis {i}")
    dense = field_array(spels)
    region = tuple(slice(lo[i] - 1, hi[i] + 2) for i in reversed(range(space.n)))
    sub = dense[region]
    inner = tuple(slice(1, -1) for _ in range(space.n))
    if int(np.count_nonzero(sub[inner])) != len(spels):
        raise BoxOutOfBounds("object is not contained in the box")
    out = LUTCharSet(space, CellFamily.surfels(space, signed=signed))
    _emit_faces(space, sub, [v - 1 for v in lo], out, signed)
    return out


def bounding_box(obj) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Smallest box ``(lo, hi)`` holding every spel of the object."""
    spels = _spels_of(obj)
    dense = field_array(spels)
    lo, hi = [], []
    n = spels.space.n
    for i in range(n):
        a = n - 1 - i
        others = tuple(ax for ax in range(n) if ax != a)
        hit = np.flatnonzero(dense.any(axis=others))
        if hit.size == 0:
            raise NotInObject("empty object has no bounding box")
        lo.append(int(hit[0]))
        hi.append(int(hit[-1]))
    return tuple(lo), tuple(hi)
