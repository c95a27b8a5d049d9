"""Stripes: circular arcs where the Gaussian-smoothed slope of u is negative.

v = G_sigma * u_x with G_sigma the normalised Gaussian (sigma = 2 by
default). Each time slice yields the maximal arcs with v < threshold; arcs
of consecutive slices are linked when their index ranges overlap and the
links are classified as birth, death, merge, split or continue.
"""
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ksforge.dynamics import Trajectory
from ksforge.spectral import (
    Grid,
    RealField,
    derivative,
    gaussian_multiplier,
    to_real,
    to_spectral,
)


DEFAULT_SIGMA = 2.0
EVENT_KINDS = ("birth", "death", "merge", "split", "continue")


@dataclass(frozen=True, eq=False)
class SmoothedSlope:
    grid: Grid
    values: np.ndarray
    sigma: float


@dataclass(frozen=True)
class StripeArc:
    """Grid samples start_index, ..., end_index - 1 (mod N).

    A wrapped arc has end_index <= start_index; the full circle is
    start_index=0, end_index=N.
    """

    start_index: int
    end_index: int
    n_points: int
    centroid: float
    width: float

    @property
    def length(self) -> int:
        if self.end_index == self.start_index + self.n_points:
            return self.n_points
        return (self.end_index - self.start_index) % self.n_points

    def indices(self) -> np.ndarray:
        return (self.start_index + np.arange(self.length)) % self.n_points

    def bounds(self) -> str:
        return f"{self.start_index}:{self.end_index}"

    def shifted(self, offset: int, grid: Grid) -> "StripeArc":
        return _make_arc((self.start_index + offset) % self.n_points, self.length, grid)

    def reflected(self, grid: Grid) -> "StripeArc":
        """Image of the arc under the index map j -> -j (mod N)."""
        last = (self.start_index + self.length - 1) % self.n_points
        return _make_arc((-last) % self.n_points, self.length, grid)


@dataclass(frozen=True)
class StripeSlice:
    t: float
    n_points: int
    arcs: tuple = ()

    @property
    def count(self) -> int:
        return len(self.arcs)

    def labels(self) -> np.ndarray:
        """Arc id of every grid sample, -1 outside stripes."""
        labels = np.full(self.n_points, -1)
        for arc_id, arc in enumerate(self.arcs):
            labels[arc.indices()] = arc_id
        return labels


@dataclass(frozen=True)
class StripeEvent:
    t_before: float
    t_after: float
    kind: str
    before: tuple
    after: tuple


@dataclass
class EventLog:
    events: list = field(default_factory=list)

    def __len__(self):
        return len(self.events)

    def extend(self, other: "EventLog") -> None:
        self.events.extend(other.events)

    def counts(self, t_transient=None, settled=True) -> Counter:
        """Event counts by kind, optionally only for t_before >= t_transient (or < it)."""
        selected = self.events
        if t_transient is not None:
            selected = [e for e in selected if (e.t_before >= t_transient) == settled]
        counts = Counter({kind: 0 for kind in EVENT_KINDS})
        counts.update(e.kind for e in selected)
        return counts

    def violations(self, t_transient: float):
        """Deaths and splits after the transient."""
        return [
            e for e in self.events
            if e.t_before >= t_transient and e.kind in ("death", "split")
        ]


@dataclass(frozen=True)
class StripeTracking:
    slices: tuple
    log: EventLog
    t_transient: float

    def summary(self) -> dict:
        return {
            "transient": dict(self.log.counts(self.t_transient, settled=False)),
            "settled": dict(self.log.counts(self.t_transient, settled=True)),
        }


@dataclass(frozen=True)
class DensityReport:
    L: float
    t_transient: float
    mean_count: float
    density: float
    times: np.ndarray
    counts: np.ndarray


# -------------------- Slopes -------------------- #
def smoothed_slope(u: RealField, sigma: float = DEFAULT_SIGMA) -> SmoothedSlope:
    """v = Gaussian_sigma * u_x, computed spectrally."""
    s = gaussian_multiplier(derivative(to_spectral(u), 1), sigma)
    return SmoothedSlope(u.grid, to_real(s).values, float(sigma))


def raw_slope(u: RealField) -> SmoothedSlope:
    """u_x with no smoothing (sigma recorded as 0)."""
    return SmoothedSlope(u.grid, to_real(derivative(to_spectral(u), 1)).values, 0.0)


# -------------------- Extraction -------------------- #
def _make_arc(start: int, length: int, grid: Grid) -> StripeArc:
    n_points = grid.N
    if length == n_points:
        return StripeArc(0, n_points, n_points, 0.0, grid.L)
    idx = (start + np.arange(length)) % n_points
    angle = 2.0 * np.pi * idx / n_points
    mean_angle = np.arctan2(np.sin(angle).mean(), np.cos(angle).mean()) % (2.0 * np.pi)
    return StripeArc(
        start_index=int(start),
        end_index=int((start + length) % n_points),
        n_points=n_points,
        centroid=float(mean_angle * grid.L / (2.0 * np.pi)) % grid.L,
        width=float(length * grid.dx),
    )


def extract_stripes(v: SmoothedSlope, t: float, threshold: float = 0.0, min_width: float = 0.0) -> StripeSlice:
    """Maximal circular runs of samples with v < threshold, ordered by start index."""
    grid = v.grid
    inside = np.asarray(v.values) < threshold
    if inside.all():
        arcs = [_make_arc(0, grid.N, grid)]
    elif not inside.any():
        arcs = []
    else:
        # Rotate so that sample 0 of the rotated mask lies outside every arc.
        origin = int(np.argmin(inside))
        rotated = np.roll(inside, -origin).astype(np.int8)
        edges = np.diff(np.concatenate(([0], rotated, [0])))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1)
        arcs = [
            _make_arc((start + origin) % grid.N, stop - start, grid)
            for start, stop in zip(starts, stops)
        ]
    arcs = [arc for arc in arcs if arc.width >= min_width]
    arcs.sort(key=lambda arc: arc.start_index)
    return StripeSlice(float(t), grid.N, tuple(arcs))


def stripe_mask(slices) -> np.ndarray:
    """Boolean raster (slice, grid index), True inside a stripe."""
    return np.array([s.labels() >= 0 for s in slices], dtype=bool)


# -------------------- Tracking -------------------- #
def match_slices(a: StripeSlice, b: StripeSlice) -> EventLog:
    """Classify the transition between two consecutive slices.

    Arcs are linked when their index ranges intersect. Arc ids in the events
    are positions within each slice.
    """
    if a.n_points != b.n_points:
        raise ValueError(f"Cannot match slices on {a.n_points} and {b.n_points} points.")
    if not a.t < b.t:
        raise ValueError(f"Slices must be in time order, got t={a.t} then t={b.t}.")
    labels_a = a.labels()
    successors = [set() for _ in a.arcs]
    predecessors = []
    for j, arc in enumerate(b.arcs):
        linked = np.unique(labels_a[arc.indices()])
        linked = {int(i) for i in linked if i >= 0}
        predecessors.append(linked)
        for i in linked:
            successors[i].add(j)

    log = EventLog()

    def record(kind, before, after):
        log.events.append(StripeEvent(a.t, b.t, kind, tuple(sorted(before)), tuple(sorted(after))))

    for j, preds in enumerate(predecessors):
        if not preds:
            record("birth", (), (j,))
        elif len(preds) >= 2:
            record("merge", preds, (j,))
    for i, succs in enumerate(successors):
        if not succs:
            record("death", (i,), ())
        elif len(succs) >= 2:
            record("split", (i,), succs)
        else:
            (j,) = succs
            if len(predecessors[j]) == 1:
                record("continue", (i,), (j,))
    return log


def slopes_of(trajectory: Trajectory, sigma: float = DEFAULT_SIGMA, smooth: bool = True):
    for u in trajectory.snapshots:
        yield smoothed_slope(u, sigma) if smooth else raw_slope(u)


def stripe_slices(trajectory: Trajectory, sigma=DEFAULT_SIGMA, threshold=0.0, min_width=0.0, smooth=True):
    return tuple(
        extract_stripes(v, t, threshold, min_width)
        for v, t in zip(slopes_of(trajectory, sigma, smooth), trajectory.times)
    )


def track(trajectory: Trajectory, sigma=DEFAULT_SIGMA, t_transient=50.0, threshold=0.0,
          min_width=0.0, smooth=True) -> StripeTracking:
    if len(trajectory) == 0:
        raise ValueError("Cannot track stripes on an empty trajectory.")
    slices = stripe_slices(trajectory, sigma, threshold, min_width, smooth)
    log = EventLog()
    for a, b in zip(slices, slices[1:]):
        log.extend(match_slices(a, b))
    return StripeTracking(slices, log, float(t_transient))


def density_of_slices(slices, L: float, t_transient: float) -> DensityReport:
    times = np.array([s.t for s in slices])
    counts = np.array([s.count for s in slices])
    settled = times >= t_transient
    if not settled.any():
        raise ValueError(f"No stripe slices at or after t_transient={t_transient}.")
    mean_count = float(counts[settled].mean())
    return DensityReport(L, float(t_transient), mean_count, mean_count / L,
                         times[settled], counts[settled])


def density(trajectory: Trajectory, sigma=DEFAULT_SIGMA, t_transient=50.0, threshold=0.0,
            min_width=0.0, smooth=True) -> DensityReport:
    """Mean number of stripes per unit length over the post-transient slices."""
    slices = stripe_slices(trajectory, sigma, threshold, min_width, smooth)
    return density_of_slices(slices, trajectory.grid.L, t_transient)
