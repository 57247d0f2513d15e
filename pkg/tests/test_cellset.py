from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellcode import (
    BadMagic,
    CellFamily,
    FamilyMismatch,
    HeaderMismatch,
    LUTCharSet,
    MinCharSet,
    NotInFamily,
    OrderedCellSet,
    Space,
    SpaceTooLarge,
    TruncatedPayload,
)
from cellcode.cellset import charset_from_bytes

from conftest import random_codes, run_trace

MiB = 1 << 20
KINDS = (MinCharSet, LUTCharSet)


def all_codes(space, family):
    w = space.coord_width
    out = []
    for c in space.cells(family.dim):
        if family.signed:
            base = (c >> w << (w + 1)) | (c & space.coord_mask)
            out += [base, base | (1 << w)]
        else:
            out.append(c)
    return sorted(out)


# -- sizes -------------------------------------------------------------------


def test_memory_of_256_cube_families():
    space = Space((255,) * 3)
    assert LUTCharSet(space, CellFamily(3)).nbytes == 2 * MiB
    surfels = LUTCharSet(space, CellFamily(2))
    assert surfels.nbytes == 6 * MiB
    assert surfels.size_bits == 50_331_648
    assert LUTCharSet(space, CellFamily(1, signed=True)).nbytes == 12 * MiB
    assert LUTCharSet(space, CellFamily(2, signed=True)).nbytes == 12 * MiB
    assert MinCharSet(space, CellFamily(3)).nbytes == 2 * MiB
    assert MinCharSet(space, CellFamily(2)).nbytes == 8 * MiB


@pytest.mark.parametrize("coordmax", [(1,), (3, 3), (4, 2), (7, 1, 5), (3, 3, 3, 3), (15, 2, 1, 6)])
def test_size_law(coordmax):
    space = Space(coordmax)
    n, w = space.n, space.coord_width
    for r in range(n + 1):
        lut = LUTCharSet(space, CellFamily(r))
        assert lut.size_bits == comb(n, r) << w
        for cls in KINDS:
            unsigned = cls(space, CellFamily(r))
            signed = cls(space, CellFamily(r, signed=True))
            assert signed.size_bits == 2 * unsigned.size_bits


def test_allocation_cap():
    space = Space((255,) * 3)
    with pytest.raises(SpaceTooLarge):
        LUTCharSet(space, CellFamily(2), max_bytes=MiB)


def test_full_512_spel_set():
    full = LUTCharSet(Space((511,) * 3), CellFamily(3)).complement()
    assert len(full) == 134_217_728


# -- atomic operations --------------------------------------------------------


@pytest.mark.parametrize("cls", KINDS)
def test_atomic_ops(cls):
    space = Space((4, 5, 3))
    s = cls(space, CellFamily(2))
    c = space.surfel(1, (4, 5, 3))
    assert c not in s
    s.add(c)
    assert c in s and len(s) == 1
    assert s.toggle(c) is True and c not in s
    assert s.toggle(c) is False and c in s
    s.remove(c)
    with pytest.raises(KeyError):
        s.remove(c)
    with pytest.raises(NotInFamily):
        s.contains(space.spel((1, 1, 1)))
    # codes whose coordinate field overflows the image bounds
    topo = space.full_topology ^ 0b010
    with pytest.raises(NotInFamily):
        s.add((topo << space.coord_width) | 5)
    with pytest.raises(NotInFamily):
        s.add_many([(topo << space.coord_width) | (6 << space.shifts[1])])


@pytest.mark.parametrize("tag", ["u3", "u2", "s2", "u1", "s1", "s0"])
def test_differential_trace(tag):
    rng = np.random.default_rng([ord(ch) for ch in tag])
    run_trace(rng, Space((5, 6, 3)), CellFamily.from_tag(tag), 100_000)


@pytest.mark.parametrize("cls", KINDS)
def test_bulk_ops_match_single_ops(rng, cls):
    space = Space((6, 4, 9))
    family = CellFamily(1, signed=True)
    a, b = cls(space, family), cls(space, family)
    codes = random_codes(rng, space, family, 500)
    a.add_many(codes)
    for c in codes:
        b.add(int(c))
    assert a == b
    a.toggle_many(codes[:100])
    for c in codes[:100]:
        b.toggle(int(c))
    assert a == b
    a.discard_many(codes[200:300])
    for c in codes[200:300]:
        b.discard(int(c))
    assert a == b
    assert a.contains_many(codes).tolist() == [b.contains(int(c)) for c in codes]


# -- algebra ------------------------------------------------------------------


SPACES = [Space((2, 2)), Space((4, 2, 1)), Space((7, 7)), Space((1, 2, 1, 2))]


@st.composite
def set_pair(draw):
    space = draw(st.sampled_from(SPACES))
    dim = draw(st.integers(0, space.n))
    family = CellFamily(dim, draw(st.booleans()))
    universe = all_codes(space, family)
    cls = draw(st.sampled_from(KINDS))
    a, b = cls(space, family), cls(space, family)
    a.add_many(draw(st.lists(st.sampled_from(universe), max_size=40)))
    b.add_many(draw(st.lists(st.sampled_from(universe), max_size=40)))
    return a, b, universe


@settings(max_examples=150, deadline=None)
@given(set_pair())
def test_algebra_laws(pair):
    a, b, universe = pair
    sa, sb = set(a), set(b)
    assert set(a | b) == sa | sb
    assert set(a & b) == sa & sb
    assert set(a - b) == sa - sb
    assert set(~a) == set(universe) - sa
    assert ~~a == a
    assert ~(a | b) == (~a & ~b)
    assert ~(a & b) == (~a | ~b)
    assert (a | a) == a and (a & a) == a
    assert len(a - a) == 0
    assert len(a | b) == len(a) + len(b - a)
    codes = a.codes()
    assert np.all(np.diff(codes) > 0) and codes.size == len(a)


def test_in_place_operators(rng):
    space = Space((9, 9))
    fam = CellFamily(1)
    a, b = LUTCharSet(space, fam), LUTCharSet(space, fam)
    a.add_many(random_codes(rng, space, fam, 30))
    b.add_many(random_codes(rng, space, fam, 30))
    union, inter, diff = a | b, a & b, a - b
    c = a.copy()
    c |= b
    assert c == union
    c = a.copy()
    c &= b
    assert c == inter
    c = a.copy()
    c -= b
    assert c == diff
    c.clear()
    assert len(c) == 0 and not c


def test_family_mismatch():
    space = Space((3, 3))
    with pytest.raises(FamilyMismatch):
        LUTCharSet(space, CellFamily(1)) | LUTCharSet(space, CellFamily(2))
    with pytest.raises(FamilyMismatch):
        LUTCharSet(space, CellFamily(1)) | MinCharSet(space, CellFamily(1))
    with pytest.raises(FamilyMismatch):
        LUTCharSet(space, CellFamily(1)) | LUTCharSet(Space((3, 4)), CellFamily(1))


@pytest.mark.parametrize("coordmax", [(2, 2), (3, 3), (31, 31), (15, 15, 15), (5, 9, 2)])
def test_complement_is_family_relative(coordmax):
    space = Space(coordmax)
    for cls in KINDS:
        for dim in range(space.n + 1):
            for signed in (False, True):
                full = ~cls(space, CellFamily(dim, signed))
                assert list(full) == all_codes(space, CellFamily(dim, signed))


# -- snapshots ----------------------------------------------------------------


@pytest.mark.parametrize("cls", KINDS)
def test_snapshot_round_trip(rng, cls):
    space = Space((10, 3, 6))
    fam = CellFamily(2, signed=True)
    s = cls(space, fam)
    s.add_many(random_codes(rng, space, fam, 200))
    data = s.to_bytes()
    assert data.startswith(f"CSET1 {cls.kind}-s2 3 10 3 6\n".encode())
    back = charset_from_bytes(data)
    assert type(back) is cls and back == s
    assert back.to_bytes() == data


def test_snapshot_errors():
    space = Space((3, 3))
    data = LUTCharSet(space, CellFamily(2)).to_bytes()
    with pytest.raises(BadMagic):
        charset_from_bytes(b"CSET2" + data[5:])
    with pytest.raises(BadMagic):
        charset_from_bytes(b"no header")
    with pytest.raises(TruncatedPayload):
        charset_from_bytes(data[:-1])
    with pytest.raises(HeaderMismatch):
        charset_from_bytes(data + b"\0")
    with pytest.raises(HeaderMismatch):
        charset_from_bytes(b"CSET1 lut-u2 3 3 3\n" + data.partition(b"\n")[2])
    with pytest.raises(HeaderMismatch):
        charset_from_bytes(b"CSET1 zip-u2 2 3 3\n")


def test_ordered_set_oracle():
    s = OrderedCellSet([5, 1, 3, 3])
    assert list(s) == [1, 3, 5]
    assert s.toggle(3) and not s.toggle(4)
    assert list(s.union(OrderedCellSet([0]))) == [0, 1, 4, 5]
    assert list(s.intersection(OrderedCellSet([4, 9]))) == [4]
    assert list(s.difference(OrderedCellSet([1]))) == [4, 5]
    with pytest.raises(KeyError):
        s.remove(99)
