"""
Boundary of a digital ball
==========================

Five ways of extracting the same surface: two scans over the image and
three trackers walking from bel to bel. All must find the same surfels.
"""

import time
from pathlib import Path

from cellcode import (
    Space,
    digital_ball,
    export_mesh,
    object_boundary,
    scan_box,
    scan_full,
    track_any,
    track_closed,
    track_closed_tail,
)
from cellcode.tracking import bounding_box, find_start_bel

space = Space((127, 127, 127))
ball = digital_ball(space, 30)
print(f"ball of radius 30 in 128^3: {ball.count} voxels")

# the trackers start from a bel found by walking along +x_0 from any voxel
start = find_start_bel(ball, int(ball.occupancy.codes()[0]))
track_closed(ball, start)  # first call compiles the kernel

lo, hi = bounding_box(ball)
runs = {
    "scan A": lambda: scan_full(ball),
    "scan B": lambda: scan_box(ball, lo, hi),
    "track A": lambda: track_any(ball, start).surfels,
    "track B": lambda: track_closed(ball, start).surfels,
    "track C": lambda: track_closed_tail(ball, start).surfels,
}
found = {}
for name, run in runs.items():
    t0 = time.perf_counter()
    surfels = run()
    dt = time.perf_counter() - t0
    found[name] = surfels
    print(f"{name:8s} {len(surfels):6d} surfels  {1e3 * dt:7.2f} ms  {1e6 * dt / len(surfels):.3f} us/bel")

# scans return unsigned surfels, trackers signed ones
signed = object_boundary(ball)
assert found["scan A"] == found["scan B"] == signed.unsigned()
assert found["track A"] == found["track B"] == found["track C"] == signed.charset
print("all five agree with the oriented boundary")

# Track C never asks whether a bel was seen, it counts re-encounters instead
res = track_closed_tail(ball, start)
print("track C tail left:", res.tail_left, "moves to followers 1/2/3:", res.moves)

out = Path("ball30.off")
out.write_bytes(export_mesh(signed, "off"))
print("mesh written to", out)
