"""Boundary extraction benchmark on digital balls.

Each case builds a centered digital ball and extracts its boundary with
every method, recording counts and wall time. Counts are checked against
the reference values of the classical benchmark; times are informative.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

from .kspace import Space
from .oriented import object_boundary
from .shapes import VolumeImage, digital_ball
from .tracking import (
    BelAdjacency,
    bounding_box,
    find_start_bel,
    scan_box,
    scan_full,
    track_any,
    track_closed,
    track_closed_tail,
)

METHODS = ("scan-a", "scan-b", "track-a", "track-b", "track-c")

# (sizes, radius) -> (spels, surfels)
REFERENCE_COUNTS = {
    ((4096, 4096), 2000): (12_566_345, 16_004),
    ((128, 128, 128), 30): (113_081, 16_926),
    ((128, 128, 128), 60): (904_089, 67_734),
    ((256, 256, 256), 120): (7_236_577, 271_350),
    ((512, 512, 512), 240): (57_902_533, 1_085_502),
    ((64, 64, 64, 64), 30): (4_000_425, 904_648),
}

SUITES = {
    "full": list(REFERENCE_COUNTS),
    "small": [((128, 128, 128), 30), ((128, 128, 128), 60), ((64, 64, 64, 64), 10)],
}


@dataclass
class BenchRow:
    sizes: tuple[int, ...]
    radius: int
    spels: int
    surfels: int
    method: str
    seconds: float
    expected: tuple[int, int] | None = None

    @property
    def per_bel_us(self) -> float:
        return 1e6 * self.seconds / self.surfels if self.surfels else 0.0

    @property
    def matches(self) -> bool | None:
        if self.expected is None:
            return None
        return (self.spels, self.surfels) == self.expected


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def consistent(self) -> bool:
        """Every method found the same surfel count on each case."""
        by_case: dict[tuple, set[int]] = {}
        for r in self.rows:
            by_case.setdefault((r.sizes, r.radius), set()).add(r.surfels)
        return all(len(v) == 1 for v in by_case.values())

    def all_match(self) -> bool:
        return all(r.matches is not False for r in self.rows)

    _COLUMNS = ("space", "radius", "spels", "surfels", "method", "seconds", "us/bel", "reference")

    def _records(self):
        for r in self.rows:
            ref = "-" if r.matches is None else ("ok" if r.matches else f"MISMATCH {r.expected}")
            yield (
                "x".join(map(str, r.sizes)), str(r.radius), str(r.spels), str(r.surfels),
                r.method, f"{r.seconds:.3f}", f"{r.per_bel_us:.3f}", ref,
            )

    def to_text(self) -> str:
        records = [self._COLUMNS, *self._records()]
        widths = [max(len(rec[i]) for rec in records) for i in range(len(self._COLUMNS))]
        return "\n".join("  ".join(v.rjust(w) for v, w in zip(rec, widths)) for rec in records) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self._COLUMNS)
        writer.writerows(self._records())
        return buf.getvalue()


def extract(volume: VolumeImage, method: str, adjacency: BelAdjacency | str | None = None):
    """Run one extraction method; returns the surfel set (signed for trackers)."""
    if method == "scan-a":
        return scan_full(volume)
    if method == "scan-b":
        lo, hi = bounding_box(volume)
        return scan_box(volume, lo, hi)
    if method == "delta":
        return object_boundary(volume)
    first = int(volume.occupancy.codes()[0])
    start = find_start_bel(volume, first)
    tracker = {"track-a": track_any, "track-b": track_closed, "track-c": track_closed_tail}[method]
    return tracker(volume, start, adjacency).surfels


def run_case(sizes, radius: int, methods=METHODS) -> list[BenchRow]:
    space = Space(tuple(s - 1 for s in sizes))
    volume = digital_ball(space, radius)
    spels = volume.count
    expected = REFERENCE_COUNTS.get((tuple(sizes), radius))
    rows = []
    for method in methods:
        t0 = time.perf_counter()
        surfels = extract(volume, method)
        elapsed = time.perf_counter() - t0
        rows.append(BenchRow(tuple(sizes), radius, spels, len(surfels), method, elapsed, expected))
    return rows


def run_suite(scale: str = "small", methods=METHODS, progress=None) -> BenchReport:
    report = BenchReport()
    for sizes, radius in SUITES[scale]:
        rows = run_case(sizes, radius, methods)
        report.rows.extend(rows)
        if progress is not None:
            for r in rows:
                progress(r)
    return report
