"""
Interior and exterior bel adjacency
===================================

When two voxels touch along an edge only, a tracker must decide whether the
surface goes around them separately or around both. The choice is made per
pair of axes.
"""

import numpy as np

from cellcode import BelAdjacency, VolumeImage, export_mesh, object_boundary, track_closed
from cellcode.tracking import find_start_bel

dense = np.zeros((4, 4, 4), dtype=bool)
dense[1, 1, 1] = dense[2, 2, 1] = True  # share the edge along x_2
obj = VolumeImage.from_array(dense)
start = find_start_bel(obj, (1, 1, 1))

for adjacency in ("interior", "exterior"):
    res = track_closed(obj, start, adjacency)
    print(f"{adjacency:8s}: {len(res)} bels reached from the first voxel")

# mixing: exterior only in the (x_0, x_1) plane, where the two voxels meet
mixed = BelAdjacency.parse(3, "0,1=exterior")
print(mixed)
print("mixed   :", len(track_closed(obj, start, mixed)), "bels")

# the same question in 2D, with pixels touching at a corner
img = np.zeros((5, 5), dtype=bool)
img[1, 1] = img[2, 2] = img[3, 1] = True
pix = VolumeImage.from_array(img)
bd = object_boundary(pix)
for adjacency in ("interior", "exterior"):
    left = bd.charset.copy()
    contours = []
    while len(left):
        res = track_closed(pix, int(left.codes()[0]), adjacency)
        contours.append(len(res))
        left -= res.surfels
    print(f"2D {adjacency}: contours of lengths {contours}")

with open("pixels.svg", "wb") as fh:
    fh.write(export_mesh(bd, "svg"))
print("contour segments written to pixels.svg")
