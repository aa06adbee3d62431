"""Radio contact detection and bandwidth-limited transfer bookkeeping.

A contact exists whenever two nodes are within the transmission radius
(boundary inclusive: d^2 <= range^2, checked in exact float arithmetic).
Detection uses a k-d tree for the candidate pass; candidates are re-tested
exactly so the boundary rule does not depend on tree internals.

Transfers move min(bytes_remaining, per-node byte budget) each tick and
complete at tick boundaries; a job whose pair leaves radio range is aborted
and the receiver keeps nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .routing import Message


@dataclass(frozen=True)
class LinkParams:
    """Radio range (meters) and link bandwidth (bytes/second)."""

    range_m: float = 10.0
    bandwidth: float = 1_400_000.0

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError("range must be > 0")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be > 0")


def detect(positions, range_m: float) -> list[tuple[int, int]]:
    """All unordered node pairs within range, sorted, as (i, j) with i < j.

    positions: array-like of shape (n, 2) in meters.
    """
    if range_m <= 0:
        raise ValueError("range must be > 0")
    pos = np.asarray(positions, dtype=np.float64)
    n = len(pos)
    if n < 2:
        return []
    # inflate the tree radius by one part in 1e9, then re-test exactly, so a
    # pair at exactly range_m is always included regardless of tree rounding
    candidates = cKDTree(pos).query_pairs(range_m * (1.0 + 1e-9), output_type="ndarray")
    if len(candidates) == 0:
        return []
    delta = pos[candidates[:, 0]] - pos[candidates[:, 1]]
    keep = (delta * delta).sum(axis=1) <= range_m * range_m
    pairs = candidates[keep]
    pairs.sort(axis=1)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    return [tuple(row) for row in pairs.tolist()]


def detect_bruteforce(positions, range_m: float) -> list[tuple[int, int]]:
    """O(n^2) reference implementation with the same boundary rule."""
    pos = np.asarray(positions, dtype=np.float64)
    out = []
    r2 = range_m * range_m
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            if dx * dx + dy * dy <= r2:
                out.append((i, j))
    return out


def contact_diff(previous, current):
    """(came_up, went_down) between two pair sets, each sorted."""
    prev = set(previous)
    cur = set(current)
    return sorted(cur - prev), sorted(prev - cur)


def _code_diff(a, b):
    """Elements of sorted unique int array a that are missing from b."""
    if len(a) == 0 or len(b) == 0:
        return a
    pos = np.searchsorted(b, a)
    pos[pos == len(b)] = len(b) - 1
    return a[b[pos] != a]


class ContactTracker:
    """Amortized contact detection for nodes whose speed is bounded.

    Rebuilds the k-d tree only every `rebuild_every` calls, inflating the
    candidate radius by the farthest two nodes can close on each other
    between rebuilds (2 * max_speed * dt per call). Cached candidates are
    therefore a superset of every true contact pair until the next rebuild,
    and re-testing them exactly each call returns the same pair set
    detect() would, just cheaper.
    """

    def __init__(self, range_m: float, max_speed: float, dt: float, rebuild_every: int = 25):
        if range_m <= 0:
            raise ValueError("range must be > 0")
        if max_speed < 0:
            raise ValueError("max speed must be >= 0")
        if dt <= 0:
            raise ValueError("dt must be > 0")
        if rebuild_every < 1:
            raise ValueError("rebuild_every must be >= 1")
        self.range_m = float(range_m)
        self.rebuild_every = int(rebuild_every)
        self._slack = 2.0 * float(max_speed) * float(dt) * (self.rebuild_every - 1)
        self._r2 = self.range_m * self.range_m
        self._age = None  # None means no tree yet
        self._cand = None
        self._codes = None  # lexicographic pair codes for the current pairs
        self._n = -1

    def _current_codes(self, positions):
        """Sorted i*n+j codes of the pairs in range right now."""
        pos = np.asarray(positions, dtype=np.float64)
        if len(pos) != self._n:  # population changed: cached indices invalid
            self._age = None
            self._n = len(pos)
        if len(pos) < 2:
            return np.empty(0, dtype=np.int64)
        if self._age is None or self._age + 1 >= self.rebuild_every:
            radius = self.range_m * (1.0 + 1e-9) + self._slack
            cand = cKDTree(pos).query_pairs(radius, output_type="ndarray")
            cand.sort(axis=1)
            cand = cand[np.lexsort((cand[:, 1], cand[:, 0]))]
            self._cand = cand
            self._age = 0
        else:
            self._age += 1
        cand = self._cand
        if len(cand) == 0:
            return np.empty(0, dtype=np.int64)
        delta = pos[cand[:, 0]] - pos[cand[:, 1]]
        keep = (delta * delta).sum(axis=1) <= self._r2
        kept = cand[keep]
        # rows are lexsorted, so the codes come out ascending
        return kept[:, 0].astype(np.int64) * self._n + kept[:, 1]

    def pairs(self, positions) -> set[tuple[int, int]]:
        """Exact contact pair set for the current positions."""
        codes = self._current_codes(positions)
        n = self._n
        return {(c // n, c % n) for c in codes.tolist()}

    def step(self, positions):
        """(came_up, went_down) since the previous call, each a sorted list.

        Tracks the previous tick's pairs internally so per-tick work touches
        only the churned pairs, never the full contact set.
        """
        prev = self._codes if self._codes is not None else np.empty(0, dtype=np.int64)
        prev_n = self._n
        cur = self._current_codes(positions)
        if self._n != prev_n:
            prev = np.empty(0, dtype=np.int64)  # codes from another population
        self._codes = cur
        n = self._n
        ups = _code_diff(cur, prev)
        downs = _code_diff(prev, cur)
        return (
            [(c // n, c % n) for c in ups.tolist()],
            [(c // prev_n, c % prev_n) for c in downs.tolist()] if len(downs) else [],
        )


@dataclass(eq=False)  # identity semantics: the engine tracks live job objects
class TransferJob:
    """One in-progress copy of a message moving sender -> receiver."""

    message: Message
    sender: int
    receiver: int
    bytes_remaining: float
    started_at: float

    @property
    def pair(self) -> tuple[int, int]:
        a, b = self.sender, self.receiver
        return (a, b) if a < b else (b, a)


def progress_transfers(jobs, dt: float, contacts, bandwidth: float, used=None):
    """Advance active jobs by one tick of bandwidth.

    jobs are processed in list order. Each moves
    min(bytes_remaining, sender budget, receiver budget) where a node's
    budget for the tick is bandwidth*dt minus bytes it already moved
    (tracked in `used`, shared across calls within the same tick so chained
    jobs cannot exceed the per-node cap). Jobs whose pair is not in
    `contacts` abort. Returns (completed, aborted, ongoing) in order.
    """
    if used is None:
        used = {}
    budget = bandwidth * dt
    pair_set = contacts if isinstance(contacts, (set, frozenset)) else set(contacts)
    completed, aborted, ongoing = [], [], []
    for job in jobs:
        if job.pair not in pair_set:
            aborted.append(job)
            continue
        avail = min(
            job.bytes_remaining,
            budget - used.get(job.sender, 0.0),
            budget - used.get(job.receiver, 0.0),
        )
        if avail > 0.0:
            job.bytes_remaining -= avail
            used[job.sender] = used.get(job.sender, 0.0) + avail
            used[job.receiver] = used.get(job.receiver, 0.0) + avail
        if job.bytes_remaining <= 0.0:
            completed.append(job)
        else:
            ongoing.append(job)
    return completed, aborted, ongoing
