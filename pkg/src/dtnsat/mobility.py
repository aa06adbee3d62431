"""Shortest-path map-constrained movement.

Each node alternates between waiting at a vertex and walking the shortest
path to a uniformly drawn destination vertex at a per-leg uniform speed.
All randomness comes from the node's own stream, so trajectories are
deterministic per (seed, node index) regardless of other nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .mapgraph import MapDataError, RoadGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MobilityParams:
    """Walking-speed and pause bounds (meters/second, seconds)."""

    speed_min: float = 1.31
    speed_max: float = 1.72
    wait_min: float = 0.0
    wait_max: float = 120.0

    def __post_init__(self):
        if self.speed_min <= 0 or self.speed_max < self.speed_min:
            raise ValueError("need 0 < speed_min <= speed_max")
        if self.wait_min < 0 or self.wait_max < self.wait_min:
            raise ValueError("need 0 <= wait_min <= wait_max")


class MovementState:
    """One node's kinematic state on its allowed graph.

    Exactly one of two modes holds: waiting at a vertex (remaining_wait is not
    None) or walking a path (leg fields active). Draw order from the node's
    stream is fixed: initial [vertex, wait]; on wait expiry [destination(s),
    speed]; on arrival [wait].
    """

    __slots__ = (
        "graph", "params", "rng", "x", "y", "vertex", "remaining_wait",
        "path", "leg", "leg_speed", "offset",
        "_ax", "_ay", "_bx", "_by", "_edge_len", "_warned_stranded",
    )

    def __init__(self, graph: RoadGraph, params: MobilityParams, rng):
        self.graph = graph
        self.params = params
        self.rng = rng
        self.vertex = rng.randrange(graph.n_vertices)
        self.x, self.y = graph.vertex(self.vertex)
        self.remaining_wait = rng.uniform(params.wait_min, params.wait_max)
        self.path = None
        self.leg = 0
        self.leg_speed = 0.0
        self.offset = 0.0
        self._warned_stranded = False

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def waiting(self) -> bool:
        return self.remaining_wait is not None

    def choose_destination(self) -> None:
        """Pick a reachable destination (uniform, excluding the current vertex)
        and start walking its shortest path; re-waits if nowhere to go."""
        members = self.graph.component_members(self.vertex)
        if len(members) < 2:
            if not self._warned_stranded:
                log.warning("node at vertex %d has no reachable destination; waiting", self.vertex)
                self._warned_stranded = True
            self.remaining_wait = self.rng.uniform(self.params.wait_min, self.params.wait_max)
            return
        dest = self.vertex
        while dest == self.vertex:
            dest = members[self.rng.randrange(len(members))]
        path = self.graph.shortest_path(self.vertex, dest)
        self.leg_speed = self.rng.uniform(self.params.speed_min, self.params.speed_max)
        self.remaining_wait = None
        self.path = path.vertices
        self.leg = 0
        self.offset = 0.0
        self._enter_leg()

    def _enter_leg(self) -> None:
        a = self.path[self.leg]
        b = self.path[self.leg + 1]
        self._ax, self._ay = self.graph.vertex(a)
        self._bx, self._by = self.graph.vertex(b)
        self._edge_len = math.dist((self._ax, self._ay), (self._bx, self._by))

    def _arrive(self, vertex: int) -> None:
        self.vertex = vertex
        self.x, self.y = self.graph.vertex(vertex)
        self.path = None
        self.remaining_wait = self.rng.uniform(self.params.wait_min, self.params.wait_max)

    def advance(self, dt: float) -> None:
        """Advance the state by dt seconds, crossing vertices as needed.

        Arrival inside the tick converts the residual time into waiting, and
        an expiring wait starts the next leg inside the same tick, so no time
        is lost or invented at mode switches.
        """
        while dt > 0.0:
            wait = self.remaining_wait
            if wait is not None:
                if wait > dt:
                    self.remaining_wait = wait - dt
                    return
                dt -= wait
                self.remaining_wait = None
                self.choose_destination()
                if self.remaining_wait is not None:
                    # stranded: re-waiting; a zero draw would spin, so absorb the tick
                    if self.remaining_wait <= 0.0:
                        self.remaining_wait = 0.0
                        return
                continue
            step = self.leg_speed * dt
            remain = self._edge_len - self.offset
            if step < remain:
                self.offset += step
                t = self.offset / self._edge_len
                self.x = self._ax + (self._bx - self._ax) * t
                self.y = self._ay + (self._by - self._ay) * t
                return
            dt -= remain / self.leg_speed
            if dt < 0.0:
                dt = 0.0
            self.leg += 1
            if self.leg >= len(self.path) - 1:
                self._arrive(self.path[-1])
            else:
                self.vertex = self.path[self.leg]
                self.offset = 0.0
                self._enter_leg()
                self.x, self.y = self._ax, self._ay


def init_positions(graph: RoadGraph, n: int, params: MobilityParams, rngs) -> list[MovementState]:
    """Create n movement states on graph, one per provided random stream."""
    if graph.n_vertices == 0:
        raise MapDataError("movement graph has no vertices")
    rngs = list(rngs)
    if len(rngs) != n:
        raise ValueError(f"need {n} random streams, got {len(rngs)}")
    return [MovementState(graph, params, rng) for rng in rngs]
