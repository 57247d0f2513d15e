"""
Cells as integer words
======================

Every cell of a cubical grid (pixel, voxel, their faces, edges and corners)
is a single integer. This walk-through builds a small 3D space, looks at
the bit layout, and plays with incidence and the signed boundary operators.
"""

from cellcode import Space, lower_boundary, opposite, scode, sign_of, unsign
from cellcode.oriented import SignedCellSet, merge_cancel

# an image of 8 x 8 x 8 voxels: coordinates 0..7 need 3 bits per axis
space = Space((7, 7, 7))
print(space)
print("coordinate bits per axis:", space.nbits, "total:", space.coord_width)

# a voxel (all axes open), one of its faces and one of its corners
voxel = space.spel((2, 5, 1))
face = space.surfel(2, (2, 5, 1))  # closed along x_2
corner = space.pointel((2, 5, 1))
for name, c in [("voxel", voxel), ("face", face), ("corner", corner)]:
    print(f"{name:7s} code={c:#06x} {space.cell_str(c)} dim={space.dim(c)} "
          f"khalimsky={space.khalimsky_coords(c)}")

# the two faces of the voxel along x_0 and the two voxels sharing a face
print("faces along x_0:", [space.cell_str(c) for c in space.incident_pair(voxel, 0)])
print("voxels of the face:", [space.cell_str(c) for c in space.incident_pair(face, 2)])

# closure and star
print("closure of the voxel:", len(space.closure(voxel)), "cells")
print("star of the corner:  ", len(space.star(corner)), "cells")

# signed cells: one more bit, just below the topology word
plus = scode(space, 0b111, 1, (2, 5, 1))
minus = opposite(space, plus)
print("signs:", sign_of(space, plus), sign_of(space, minus), "same cell:", unsign(space, plus) == unsign(space, minus))

# the boundary of a positive voxel is six signed faces...
faces = lower_boundary(space, plus)
print("boundary of +voxel:")
for f in faces:
    print("   ", "+" if sign_of(space, f) > 0 else "-", space.cell_str(unsign(space, f)))

# ...and the boundary of that boundary cancels out
edges = SignedCellSet(space, 1)
for f in faces:
    merge_cancel(edges, lower_boundary(space, f))
print("cells left in the boundary of the boundary:", len(edges))
