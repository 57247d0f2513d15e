from itertools import product

import numpy as np
import pytest

from cellcode import (
    DuplicateOrientation,
    NotABel,
    ObjectTouchesBorder,
    SignedCellSet,
    Space,
    VolumeImage,
    interior_exterior,
    lower_boundary,
    lower_boundary_along,
    merge_cancel,
    object_boundary,
    opposite,
    scan_full,
    scode,
    sign_of,
    unsign,
    upper_boundary,
    upper_boundary_along,
    with_sign,
)
from cellcode.oriented import is_bel

from conftest import random_sizes, random_volume, volume_from_spels


def signed_cells(space, coords):
    for topo in range(space.full_topology + 1):
        for sign in (1, -1):
            yield scode(space, topo, sign, coords)


def test_signed_code_layout():
    space = Space((3, 3))
    c = scode(space, 0b10, -1, (1, 2))
    assert c == (0b10 << 5) | (1 << 4) | (2 << 2) | 1
    assert sign_of(space, c) == -1
    assert sign_of(space, opposite(space, c)) == 1
    assert unsign(space, c) == space.ucode(0b10, (1, 2))
    assert with_sign(space, unsign(space, c), -1) == c
    with pytest.raises(ValueError):
        scode(space, 0, 0, (0, 0))


def test_lower_boundary_of_a_positive_square():
    space = Space((3, 3))
    sq = scode(space, 0b11, 1, (1, 1))
    # tau is -1 along axis 0 (one open axis above it) and +1 along axis 1
    assert lower_boundary_along(space, sq, 0) == (scode(space, 0b10, -1, (1, 1)), scode(space, 0b10, 1, (2, 1)))
    assert lower_boundary_along(space, sq, 1) == (scode(space, 0b01, 1, (1, 1)), scode(space, 0b01, -1, (1, 2)))
    with pytest.raises(ValueError):
        lower_boundary_along(space, scode(space, 0b10, 1, (1, 1)), 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_boundary_of_boundary_is_empty(n):
    space = Space((3,) * n)
    for c in signed_cells(space, (1,) * n):
        dim = (c >> (space.coord_width + 1)).bit_count()
        for op in (lower_boundary, upper_boundary):
            target_dim = dim - 2 if op is lower_boundary else dim + 2
            if not 0 <= target_dim <= n:
                continue
            acc = SignedCellSet(space, target_dim)
            for d in op(space, c):
                merge_cancel(acc, op(space, d))
            assert len(acc) == 0


def test_unsigned_shadow_is_low_incidence():
    space = Space((3, 3, 3))
    for c in signed_cells(space, (1, 1, 1)):
        u = unsign(space, c)
        expected = sorted(
            d for i in range(3) if (space.topology(u) >> i) & 1 for d in space.incident_pair(u, i)
        )
        assert sorted(unsign(space, d) for d in lower_boundary(space, c)) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_transpose_duality(n):
    space = Space((3,) * n)
    inner = [range(1, 3)] * n
    for coords in product(*inner):
        for c in signed_cells(space, coords):
            topo = c >> (space.coord_width + 1)
            for i in range(n):
                if (topo >> i) & 1:
                    for d in lower_boundary_along(space, c, i):
                        assert c in upper_boundary_along(space, d, i)
                else:
                    for d in upper_boundary_along(space, c, i):
                        assert c in lower_boundary_along(space, d, i)


def test_opposite_commutes_with_boundary():
    space = Space((3, 3, 3))
    for c in signed_cells(space, (1, 1, 1)):
        assert lower_boundary(space, opposite(space, c)) == sorted(opposite(space, d) for d in lower_boundary(space, c))


def test_merge_cancels_and_rejects_duplicates():
    space = Space((3, 3))
    s = SignedCellSet(space, 1)
    a = scode(space, 0b01, 1, (1, 1))
    s.merge(a)
    assert a in s and len(s) == 1
    with pytest.raises(DuplicateOrientation):
        s.merge(a)
    s.merge(opposite(space, a))
    assert len(s) == 0
    s.merge(opposite(space, a))
    assert opposite(space, a) in s


def test_merge_many_matches_sequential_merge(rng):
    space = Space((5, 4, 6))
    for _ in range(30):
        pool = [scode(space, 0b011, 1, (int(x), int(y), int(z)))
                for x, y, z in rng.integers(0, [6, 5, 7], size=(12, 3))]
        seq = []
        for c in rng.choice(pool, size=40):
            seq.append(int(c) ^ (int(rng.integers(2)) << space.coord_width))
        one = SignedCellSet(space, 2)
        many = SignedCellSet(space, 2)
        try:
            merge_cancel(one, seq)
        except DuplicateOrientation:
            with pytest.raises(DuplicateOrientation):
                many.merge_many(seq)
            continue
        many.merge_many(seq)
        assert list(one) == list(many)


def test_domino_boundary_has_six_bels():
    space = Space((4, 3))
    obj = volume_from_spels(space.sizes, [(1, 1), (2, 1)])
    bd = object_boundary(obj)
    assert len(bd) == 6
    # the shared face cancelled
    assert unsign(space, scode(space, 0b10, 1, (2, 1))) not in bd.unsigned()


def test_single_spel_boundary_is_its_lower_boundary():
    space = Space((3, 3, 3))
    obj = volume_from_spels(space.sizes, [(1, 1, 1)])
    spel = scode(space, 0b111, 1, (1, 1, 1))
    assert sorted(object_boundary(obj)) == lower_boundary(space, spel)


def test_object_on_border_is_rejected():
    space = Space((3, 3))
    with pytest.raises(ObjectTouchesBorder):
        object_boundary(volume_from_spels(space.sizes, [(0, 1)]))
    with pytest.raises(ObjectTouchesBorder):
        object_boundary(volume_from_spels(space.sizes, [(1, 3)]))


def test_object_boundary_chunking_is_invisible(rng):
    obj = random_volume(rng, (9, 8, 7))
    assert list(object_boundary(obj)) == list(object_boundary(obj, chunk=7))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bels_separate_object_from_complement(rng, n):
    for _ in range(10):
        obj = random_volume(rng, random_sizes(rng, n))
        space = obj.space
        for b in object_boundary(obj):
            k = space.orth_dir(unsign(space, b))
            upper = upper_boundary_along(space, b, k)
            plus = [unsign(space, c) for c in upper if sign_of(space, c) > 0]
            minus = [unsign(space, c) for c in upper if sign_of(space, c) < 0]
            assert plus[0] in obj and minus[0] not in obj
            assert interior_exterior(b, obj) == (plus[0], minus[0])
            assert is_bel(b, obj) and not is_bel(opposite(space, b), obj)
            with pytest.raises(NotABel):
                interior_exterior(opposite(space, b), obj)


@pytest.mark.parametrize("n", [2, 3])
def test_paths_from_inside_to_outside_cross_the_boundary(rng, n):
    for _ in range(10):
        obj = random_volume(rng, random_sizes(rng, n))
        space = obj.space
        bd = object_boundary(obj)
        inside = obj.occupancy.codes()
        if inside.size == 0:
            continue
        for _ in range(20):
            p = int(rng.choice(inside))
            crossed = False
            q = p
            while True:
                i = int(rng.integers(n))
                step = int(rng.choice([-1, 1]))
                try:
                    q = space.translate(p, i, step)
                except IndexError:
                    break
                if q not in obj:
                    face = space.incident_pair(p, i)[1 if step > 0 else 0]
                    crossed = any(with_sign(space, face, s) in bd for s in (1, -1))
                    break
                p = q
            if q not in obj:
                assert crossed


def test_unsigned_boundary_matches_scan(rng):
    for n in (2, 3, 4):
        obj = random_volume(rng, random_sizes(rng, n))
        assert object_boundary(obj).unsigned() == scan_full(obj)


def test_boundary_of_full_cube_counts():
    dense = np.zeros((6, 6, 6), dtype=bool)
    dense[1:5, 1:5, 1:5] = True
    assert len(object_boundary(VolumeImage.from_array(dense))) == 6 * 16
