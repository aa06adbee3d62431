"""Message workload generation.

A small set of origin nodes emits messages: one message at t=0 per origin,
then repeatedly at per-origin gaps until the creation window closes.
Destinations are uniform over all other nodes. Presets cover the three
standard intensities (single message, 300 s gaps, 30 s gaps).
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class TrafficPattern:
    """Workload shape: 'one' emits a single message; 'periodic' emits per-origin
    streams with uniform gaps in [interval_min, interval_max] inside the window."""

    kind: str
    interval_min: float | None = None
    interval_max: float | None = None
    window: float = 3600.0
    size: int = 2064
    ttl: float = 3600.0

    def __post_init__(self):
        if self.kind not in ("one", "periodic"):
            raise ValueError(f"unknown traffic kind {self.kind!r}")
        if self.kind == "periodic":
            if self.interval_min is None or self.interval_max is None:
                raise ValueError("periodic traffic needs interval bounds")
            if self.interval_min <= 0 or self.interval_max < self.interval_min:
                raise ValueError("need 0 < interval_min <= interval_max")
        if self.window <= 0:
            raise ValueError("creation window must be > 0")
        if self.size <= 0:
            raise ValueError("message size must be > 0")
        if self.ttl <= 0:
            raise ValueError("ttl must be > 0")


_PRESETS = {
    "one": TrafficPattern(kind="one"),
    "moderate": TrafficPattern(kind="periodic", interval_min=300.0, interval_max=300.0),
    "high": TrafficPattern(kind="periodic", interval_min=30.0, interval_max=30.0),
}


def preset(name: str, **overrides) -> TrafficPattern:
    """Look up a named preset, optionally overriding fields."""
    try:
        pattern = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown traffic preset {name!r}") from None
    return replace(pattern, **overrides) if overrides else pattern


@dataclass(frozen=True)
class CreationEvent:
    """One scheduled message creation."""

    time: float
    source: int
    destination: int
    message_id: str
    size: int
    ttl: float


def schedule(pattern: TrafficPattern, origin_ids, all_node_ids, rng) -> list[CreationEvent]:
    """Expand a pattern into a deterministic, time-sorted creation list.

    Event times are generated per origin (in origin order), sorted by
    (time, origin), then destinations are drawn in final order and ids
    assigned M1, M2, ... so ids are monotone in creation time.
    """
    origins = list(origin_ids)
    nodes = list(all_node_ids)
    if not origins:
        raise ValueError("traffic needs at least one origin node")
    if len(nodes) < 2:
        raise ValueError("traffic needs at least two nodes to pick destinations")

    raw: list[tuple[float, int]] = []
    if pattern.kind == "one":
        raw.append((0.0, origins[0]))
    else:
        for origin in origins:
            t = 0.0
            while t < pattern.window:
                raw.append((t, origin))
                t += rng.uniform(pattern.interval_min, pattern.interval_max)
    raw.sort()

    events = []
    for i, (t, origin) in enumerate(raw):
        dest = origin
        while dest == origin:
            dest = nodes[rng.randrange(len(nodes))]
        events.append(CreationEvent(
            time=t, source=origin, destination=dest,
            message_id=f"M{i + 1}", size=pattern.size, ttl=pattern.ttl,
        ))
    return events
