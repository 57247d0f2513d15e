"""
Cell sets as bit arrays
=======================

A set of cells is one bit per possible cell of its family. Memory depends
on the image size alone, membership is one word access, and set algebra
runs over whole words.
"""

import time

import numpy as np

from cellcode import CellFamily, LUTCharSet, MinCharSet, Space, digital_ball
from cellcode.cellset import charset_from_bytes

space = Space((255, 255, 255))
for fam in (CellFamily(3), CellFamily(2), CellFamily(2, signed=True), CellFamily(1, signed=True)):
    for cls in (MinCharSet, LUTCharSet):
        s = cls(space, fam)
        print(f"{cls.__name__:10s} {fam.tag}: {s.nbytes / 2**20:5.1f} MiB, {s.size_bits:,} bits")

# two overlapping balls as spel sets
big = Space((511, 511, 511))
a = digital_ball(big, 150, center=(200, 256, 256)).occupancy
b = digital_ball(big, 150, center=(320, 256, 256)).occupancy
for name, op in [("union", a.union), ("intersection", a.intersection), ("difference", a.difference)]:
    t0 = time.perf_counter()
    r = op(b)
    print(f"{name:12s} {len(r):>11,} spels  {1e3 * (time.perf_counter() - t0):6.1f} ms")

t0 = time.perf_counter()
inverse = ~a
dt = time.perf_counter() - t0
print(f"complement   {len(inverse):>11,} spels  {1e3 * dt:6.1f} ms  ({1e9 * dt / 512**3:.2f} ns/spel)")
assert ~inverse == a

# iteration yields codes in increasing order
small = LUTCharSet(Space((15, 15)), CellFamily(1))
rng = np.random.default_rng(0)
for _ in range(5):
    small.add(small.space.surfel(int(rng.integers(2)), tuple(int(v) for v in rng.integers(0, 16, 2))))
print([small.space.cell_str(c) for c in small])

# snapshots round trip bit for bit
data = small.to_bytes()
print(data.partition(b"\n")[0].decode())
assert charset_from_bytes(data) == small
