"""Command-line front end: ``cellcode {gen-ball,boundary,set-op,bench}``."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import bench
from .errors import CellCodeError, EmptyObject, FamilyMismatch
from .kspace import Space
from .shapes import VolumeImage, digital_ball, export_mesh, read_volume, write_volume
from .tracking import BelAdjacency


def _gen_ball(args) -> int:
    space = Space(tuple(d - 1 for d in args.dims))
    volume = digital_ball(space, args.radius, args.center, strict=args.strict)
    Path(args.out).write_bytes(write_volume(volume))
    print(volume.count)
    return 0


def _boundary(args) -> int:
    volume = read_volume(Path(args.input).read_bytes())
    if volume.count == 0:
        raise EmptyObject("the volume holds no object spel")
    adjacency = BelAdjacency.parse(volume.space.n, args.adjacency)
    t0 = time.perf_counter()
    surfels = bench.extract(volume, args.method, adjacency)
    elapsed = time.perf_counter() - t0
    count = len(surfels)
    print(count)
    per_bel = 1e6 * elapsed / count if count else 0.0
    print(f"{args.method}: {elapsed:.4f} s ({per_bel:.3f} us/bel)", file=sys.stderr)
    if args.export:
        if not args.out:
            raise SystemExit("error: --export needs --out")
        Path(args.out).write_bytes(export_mesh(surfels, args.export))
    return 0


def _set_op(args) -> int:
    a = read_volume(Path(args.a).read_bytes())
    if args.op == "complement":
        t0 = time.perf_counter()
        result = a.occupancy.complement()
    else:
        if not args.b:
            raise SystemExit(f"error: --op {args.op} needs --b")
        b = read_volume(Path(args.b).read_bytes())
        if a.space != b.space:
            raise FamilyMismatch(f"volumes have sizes {a.space.sizes} and {b.space.sizes}")
        t0 = time.perf_counter()
        result = getattr(a.occupancy, args.op)(b.occupancy)
    elapsed = time.perf_counter() - t0
    out = VolumeImage(a.space, result)
    Path(args.out).write_bytes(write_volume(out))
    total = 1
    for s in a.space.sizes:
        total *= s
    print(out.count)
    print(f"{args.op}: {elapsed:.4f} s ({1e9 * elapsed / total:.3f} ns/spel)", file=sys.stderr)
    return 0


def _bench(args) -> int:
    report = bench.run_suite(args.scale)
    sys.stdout.write(report.to_csv() if args.csv else report.to_text())
    if not report.consistent() or not report.all_match():
        print("error: surfel counts disagree", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellcode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-ball", help="write a digital ball volume and print its spel count")
    p.add_argument("--dims", type=int, nargs="+", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--center", type=int, nargs="+")
    p.add_argument("--strict", action="store_true", help="use sum of squares < r^2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_gen_ball)

    p = sub.add_parser("boundary", help="extract the boundary of a volume and print its surfel count")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=bench.METHODS, default="track-b")
    p.add_argument("--adjacency", default="interior",
                   help="interior, exterior or 'i,j=interior;k,l=exterior;...'")
    p.add_argument("--export", choices=("off", "svg", "csv"))
    p.add_argument("--out")
    p.set_defaults(func=_boundary)

    p = sub.add_parser("set-op", help="combine volumes as spel sets")
    p.add_argument("--op", choices=("union", "intersection", "difference", "complement"), required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_set_op)

    p = sub.add_parser("bench", help="reproduce the ball boundary benchmark")
    p.add_argument("--suite", choices=("table3",), default="table3")
    p.add_argument("--scale", choices=("small", "full"), default="small")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CellCodeError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
