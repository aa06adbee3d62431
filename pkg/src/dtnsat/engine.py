"""Deterministic fixed-tick scenario engine.

One run = (config, seed) -> event log + occupancy samples + manifest, with
byte-identical outputs on re-execution. Each 0.1 s tick processes, in fixed
order: mobility, contact detection/diff (aborting broken transfers), router
expiry, message creation, transfer scheduling and byte progression, then
occupancy sampling. All records within a tick are stamped at the tick end;
creations scheduled at time t are injected at the first boundary >= t.

Randomness is split into independent streams: one per node for mobility,
one shared stream for the traffic schedule, all derived from the run seed.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import logging
import math
import os
from bisect import insort
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import contacts as contacts_mod
from . import mapgraph, mobility, routing, traffic
from .seeds import node_streams, stream

log = logging.getLogger(__name__)

_EPS = 1e-9

EVENT_KINDS = (
    "CREATE", "SEND_START", "RECEIVED", "ABORTED",
    "DROP_BUFFER", "DROP_TTL", "DROP_CUSTODY", "REJECT_TOO_LARGE",
)

_DROP_KIND = {"ttl": "DROP_TTL", "custody": "DROP_CUSTODY"}


class ConfigError(ValueError):
    """Bad scenario configuration (unknown key, bad value, missing input)."""


# --------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class GroupSpec:
    count: int
    region: mapgraph.Region | None
    params: mobility.MobilityParams


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved single-run scenario."""

    end_time: float
    tick: float
    seed: int
    report_interval: float
    map_grid: tuple[int, int, float] | None
    map_wkt: tuple[str, ...] | None
    snap_tolerance: float
    group1: GroupSpec
    group2: GroupSpec
    link: contacts_mod.LinkParams
    busy_scope: str
    router_kind: str
    buffer_capacity: int
    wave_immunity: float
    wave_custody_fraction: float
    traffic: traffic.TrafficPattern
    raw: tuple[tuple[str, str], ...]  # resolved key/value pairs for the manifest

    @property
    def n_nodes(self) -> int:
        return self.group1.count + self.group2.count

    def config_hash(self) -> str:
        text = "\n".join(f"{k} = {v}" for k, v in sorted(self.raw))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "ScenarioConfig":
        raw = tuple((k, (str(seed) if k == "seed" else v)) for k, v in self.raw)
        return replace(self, seed=seed, raw=raw)


_FLOAT_KEYS = {
    "end_time": 9000.0, "tick": 0.1, "report_interval": 10.0,
    "map.grid.spacing": None, "map.snap_tolerance": 0.1,
    "group1.speed_min": 1.31, "group1.speed_max": 1.72,
    "group1.wait_min": 0.0, "group1.wait_max": 120.0,
    "group2.speed_min": 1.31, "group2.speed_max": 1.72,
    "group2.wait_min": 0.0, "group2.wait_max": 120.0,
    "link.range": 10.0, "link.bandwidth": 1_400_000.0,
    "ttl": 3600.0, "wave.immunity": 9000.0, "wave.custody_fraction": 0.5,
    "traffic.interval_min": None, "traffic.interval_max": None,
    "traffic.window": 3600.0,
}

_INT_KEYS = {
    "seed": 1, "map.grid.rows": None, "map.grid.cols": None,
    "group1.count": 5, "group2.count": 95,
    "buffer": 500_000, "traffic.size": 2064,
}

_STR_KEYS = {
    "map.wkt": None, "group1.region": None, "group2.region": None,
    "link.busy_scope": "either", "router": "epidemic", "traffic": "one",
}

_ALL_KEYS = {**_FLOAT_KEYS, **_INT_KEYS, **_STR_KEYS}


def _parse_lines(text: str) -> dict[str, str | list[str]]:
    values: dict[str, str | list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if value.startswith("[") and value.endswith("]"):
            items = [v.strip() for v in value[1:-1].split(";")]
            items = [v for v in items if v]
            if not items:
                raise ConfigError(f"line {lineno}: empty sweep list for {key!r}")
            values[key] = items
        else:
            values[key] = value
    return values


def _typed(key: str, value: str):
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from None
    return value


def _canonical(key: str, value) -> str:
    if value is None:
        return ""
    if key in _FLOAT_KEYS:
        return repr(float(value))
    return str(value)


def _region_from_value(value: str | None, base_dir: str) -> mapgraph.Region | None:
    if value is None or value == "":
        return None
    lowered = value.lower()
    if lowered.startswith("bbox"):
        try:
            return mapgraph.load_region(value)
        except ValueError as exc:
            raise ConfigError(f"bad region {value!r}: {exc}") from None
    path = value if os.path.isabs(value) else os.path.join(base_dir, value)
    if not os.path.exists(path):
        raise ConfigError(f"region file not found: {path}")
    try:
        return mapgraph.load_region_file(path)
    except ValueError as exc:
        raise ConfigError(f"bad region file {path}: {exc}") from None


def _group_spec(values: dict, prefix: str, base_dir: str) -> GroupSpec:
    count = values[f"{prefix}.count"]
    if count < 0:
        raise ConfigError(f"{prefix}.count must be >= 0")
    try:
        params = mobility.MobilityParams(
            speed_min=values[f"{prefix}.speed_min"],
            speed_max=values[f"{prefix}.speed_max"],
            wait_min=values[f"{prefix}.wait_min"],
            wait_max=values[f"{prefix}.wait_max"],
        )
    except ValueError as exc:
        raise ConfigError(f"{prefix}: {exc}") from None
    region = _region_from_value(values[f"{prefix}.region"], base_dir)
    return GroupSpec(count=count, region=region, params=params)


def _traffic_pattern(values: dict) -> traffic.TrafficPattern:
    name = values["traffic"]
    overrides = {}
    if values["traffic.window"] is not None:
        overrides["window"] = values["traffic.window"]
    overrides["size"] = values["traffic.size"]
    overrides["ttl"] = values["ttl"]
    if values["traffic.interval_min"] is not None:
        overrides["interval_min"] = values["traffic.interval_min"]
    if values["traffic.interval_max"] is not None:
        overrides["interval_max"] = values["traffic.interval_max"]
    try:
        if name in ("one", "moderate", "high"):
            return traffic.preset(name, **overrides)
        if name == "periodic":
            return traffic.TrafficPattern(kind="periodic", **overrides)
    except ValueError as exc:
        raise ConfigError(f"traffic: {exc}") from None
    raise ConfigError(f"unknown traffic {name!r}")


def _scenario_from_values(values: dict, base_dir: str) -> ScenarioConfig:
    grid_keys = ("map.grid.rows", "map.grid.cols", "map.grid.spacing")
    has_grid = any(values[k] is not None for k in grid_keys)
    has_wkt = values["map.wkt"] is not None
    if has_grid and has_wkt:
        raise ConfigError("give either map.grid.* or map.wkt, not both")
    if has_grid:
        if any(values[k] is None for k in grid_keys):
            raise ConfigError("map.grid needs rows, cols and spacing")
        map_grid = (values["map.grid.rows"], values["map.grid.cols"],
                    values["map.grid.spacing"])
        map_wkt = None
    elif has_wkt:
        paths = []
        for part in values["map.wkt"].split(","):
            part = part.strip()
            if not part:
                continue
            path = part if os.path.isabs(part) else os.path.join(base_dir, part)
            if not os.path.exists(path):
                raise ConfigError(f"map file not found: {path}")
            paths.append(path)
        if not paths:
            raise ConfigError("map.wkt lists no files")
        map_grid, map_wkt = None, tuple(paths)
    else:
        raise ConfigError("missing map: set map.grid.* or map.wkt")

    if values["router"] not in routing.ROUTER_KINDS:
        raise ConfigError(f"unknown router {values['router']!r}")
    if values["link.busy_scope"] not in ("either", "sender"):
        raise ConfigError(f"unknown link.busy_scope {values['link.busy_scope']!r}")
    if values["end_time"] <= 0 or values["tick"] <= 0:
        raise ConfigError("end_time and tick must be > 0")
    n_ticks = round(values["end_time"] / values["tick"])
    if abs(n_ticks * values["tick"] - values["end_time"]) > 1e-6 or n_ticks < 1:
        raise ConfigError("end_time must be a positive multiple of tick")
    report_every = round(values["report_interval"] / values["tick"])
    if report_every < 1 or abs(report_every * values["tick"] - values["report_interval"]) > 1e-6:
        raise ConfigError("report_interval must be a positive multiple of tick")
    if values["buffer"] <= 0:
        raise ConfigError("buffer must be > 0 bytes")

    group1 = _group_spec(values, "group1", base_dir)
    group2 = _group_spec(values, "group2", base_dir)
    if group1.count + group2.count < 1:
        raise ConfigError("scenario needs at least one node")
    if group1.count < 1:
        raise ConfigError("group1 needs at least one origin node")
    try:
        link = contacts_mod.LinkParams(range_m=values["link.range"],
                                       bandwidth=values["link.bandwidth"])
    except ValueError as exc:
        raise ConfigError(f"link: {exc}") from None
    pattern = _traffic_pattern(values)
    try:
        routing.make_router(values["router"], values["buffer"],
                            immunity_time=values["wave.immunity"],
                            custody_fraction=values["wave.custody_fraction"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    raw = tuple(sorted((k, _canonical(k, values[k])) for k in _ALL_KEYS))
    return ScenarioConfig(
        end_time=values["end_time"], tick=values["tick"], seed=values["seed"],
        report_interval=values["report_interval"],
        map_grid=map_grid, map_wkt=map_wkt,
        snap_tolerance=values["map.snap_tolerance"],
        group1=group1, group2=group2, link=link,
        busy_scope=values["link.busy_scope"],
        router_kind=values["router"], buffer_capacity=values["buffer"],
        wave_immunity=values["wave.immunity"],
        wave_custody_fraction=values["wave.custody_fraction"],
        traffic=pattern, raw=raw,
    )


def parse_config_text(text: str, base_dir: str = ".") -> tuple[list[ScenarioConfig], list[str]]:
    """Expand config text into scenarios (cartesian product over sweep lists).

    Returns (configs, swept_keys). Sweeps expand with the later-listed key
    varying fastest; run index order is the expansion order.
    """
    given = _parse_lines(text)
    swept = [k for k, v in given.items() if isinstance(v, list)]
    combos: list[dict[str, str]] = [{}]
    for key in swept:
        combos = [dict(c, **{key: v}) for c in combos for v in given[key]]
    configs = []
    for combo in combos:
        values = {}
        for key, default in _ALL_KEYS.items():
            if key in combo:
                values[key] = _typed(key, combo[key])
            elif key in given:
                values[key] = _typed(key, given[key])  # type: ignore[arg-type]
            else:
                values[key] = default
        configs.append(_scenario_from_values(values, base_dir))
    return configs, swept


def load_config(path) -> tuple[list[ScenarioConfig], list[str]]:
    """Read a config file; returns (expanded scenarios, swept key names)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)))


# --------------------------------------------------------------------------
# event log output

def format_record(time: float, kind: str, message_id: str, frm: str, to: str) -> str:
    return f"{time:.4f} {kind} {message_id} {frm} {to}"


def write_event_log(records, path) -> None:
    """Write records (time, kind, message_id, from, to) as the canonical
    space-separated log: fixed 4-decimal seconds, '-' for absent nodes."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for time_s, kind, mid, frm, to in records:
            fh.write(format_record(time_s, kind, mid, frm, to) + "\n")


class _EventWriter:
    """Streams records to disk during the run; keeps only counters in memory."""

    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self.counts = {kind: 0 for kind in EVENT_KINDS}
        self.total = 0
        self._last_time = -math.inf

    def append(self, time_s: float, kind: str, mid: str, frm: str, to: str = "-") -> None:
        assert time_s >= self._last_time - _EPS, "event time went backwards"
        self._last_time = time_s
        self.counts[kind] += 1
        self.total += 1
        self._fh.write(format_record(time_s, kind, mid, frm, to) + "\n")

    def close(self) -> None:
        self._fh.close()


# --------------------------------------------------------------------------
# simulation

@dataclass
class RunResult:
    out_dir: str
    events_path: str
    occupancy_path: str
    manifest_path: str
    counts: dict


def _build_base_graph(config: ScenarioConfig) -> mapgraph.RoadGraph:
    if config.map_grid is not None:
        rows, cols, spacing = config.map_grid
        return mapgraph.generate_grid(rows, cols, spacing)
    polylines = []
    for path in config.map_wkt:
        with open(path, "r", encoding="utf-8") as fh:
            parsed = mapgraph.parse_wkt(fh.read())
        polylines.extend(parsed.polylines)
    return mapgraph.build_graph(polylines, snap_tolerance=config.snap_tolerance)


class Simulation:
    """Assembled scenario state plus the tick loop."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.graph = _build_base_graph(config)
        graphs = []
        for spec in (config.group1, config.group2):
            if spec.count and spec.region is not None:
                graphs.append(mapgraph.restrict(self.graph, spec.region))
            else:
                graphs.append(self.graph)
        n1, n2 = config.group1.count, config.group2.count
        self.n = n1 + n2
        rngs = node_streams(config.seed, self.n)
        self.moves = (
            mobility.init_positions(graphs[0], n1, config.group1.params, rngs[:n1])
            + mobility.init_positions(graphs[1], n2, config.group2.params, rngs[n1:])
        )
        self.routers = [
            routing.make_router(
                config.router_kind, config.buffer_capacity,
                immunity_time=config.wave_immunity,
                custody_fraction=config.wave_custody_fraction,
            )
            for _ in range(self.n)
        ]
        self.names = [f"n{i}" for i in range(self.n)]
        self.schedule = traffic.schedule(
            config.traffic, range(n1), range(self.n), stream(config.seed, "traffic"))
        if config.traffic.size > config.buffer_capacity:
            log.warning(
                "message size %d exceeds every buffer capacity %d; "
                "no node can store messages",
                config.traffic.size, config.buffer_capacity)

        # transfer state
        self.jobs: list[contacts_mod.TransferJob] = []
        self.sending: dict[int, contacts_mod.TransferJob] = {}
        self.receiving_count: dict[int, int] = {}
        self.receiving_ids: dict[int, set[str]] = {}
        self.pairs: set[tuple[int, int]] = set()
        self.nbrs: dict[int, list[int]] = {}
        self._dirty: set[int] = set()
        # (sender, peer) -> (sender_version, peer_version, wanted id set)
        self._edge_wanted: dict[tuple[int, int], tuple] = {}
        self._tracker = contacts_mod.ContactTracker(
            config.link.range_m,
            max(config.group1.params.speed_max, config.group2.params.speed_max),
            config.tick,
        )
        self._expiry_heap: list[tuple[float, int]] = []
        self._writer: _EventWriter | None = None
        self._occupancy: list[tuple[float, float]] = []
        self._peak_node_occupancy = 0.0
        self.messages_created = 0

    # -- helpers ------------------------------------------------------------

    def _emit(self, now, kind, mid, frm, to=-1):
        self._writer.append(now, kind, mid, self.names[frm],
                            self.names[to] if to >= 0 else "-")

    def _mark_dirty(self, idx: int) -> None:
        self._dirty.add(idx)
        for p in self.nbrs.get(idx, ()):
            self._dirty.add(p)

    def _push_expiry(self, idx: int) -> None:
        t = self.routers[idx].next_expiry_time
        if t != math.inf:
            heapq.heappush(self._expiry_heap, (t, idx))

    def _busy_send(self, i: int) -> bool:
        if i in self.sending:
            return True
        return self.config.busy_scope == "either" and self.receiving_count.get(i, 0) > 0

    def _busy_recv(self, i: int) -> bool:
        if self.config.busy_scope == "sender":
            return False
        return i in self.sending or self.receiving_count.get(i, 0) > 0

    def _protected_ids(self, i: int) -> frozenset:
        job = self.sending.get(i)
        return frozenset((job.message.id,)) if job else frozenset()

    # -- tick phases ----------------------------------------------------------

    def _phase_contacts(self, now: float) -> None:
        pos = np.empty((self.n, 2), dtype=np.float64)
        pos[:, 0] = [mv.x for mv in self.moves]
        pos[:, 1] = [mv.y for mv in self.moves]
        ups, downs = self._tracker.step(pos)
        self._apply_contact_diff(now, ups, downs)

    def _apply_contact_diff(self, now: float, ups, downs) -> None:
        self.pairs.update(ups)
        self.pairs.difference_update(downs)
        nbrs = self.nbrs  # maintained incrementally; lists stay ascending
        for a, b in ups:
            insort(nbrs.setdefault(a, []), b)
            insort(nbrs.setdefault(b, []), a)
        for a, b in downs:
            la = nbrs[a]
            la.remove(b)
            if not la:
                del nbrs[a]
            lb = nbrs[b]
            lb.remove(a)
            if not lb:
                del nbrs[b]
        if downs:
            down_set = set(downs)
            keep = []
            for job in self.jobs:
                if job.pair in down_set:
                    self._abort_job(job, now)
                else:
                    keep.append(job)
            self.jobs = keep
        for a, b in ups:
            self._dirty.add(a)
            self._dirty.add(b)
        for a, b in downs:
            self._dirty.add(a)
            self._dirty.add(b)

    def _abort_job(self, job, now: float) -> None:
        self._emit(now, "ABORTED", job.message.id, job.sender, job.receiver)
        self._detach_job(job)
        self._mark_dirty(job.sender)
        self._mark_dirty(job.receiver)

    def _detach_job(self, job) -> None:
        if self.sending.get(job.sender) is job:
            del self.sending[job.sender]
        r = job.receiver
        self.receiving_count[r] = self.receiving_count.get(r, 1) - 1
        if self.receiving_count[r] <= 0:
            self.receiving_count.pop(r, None)
        ids = self.receiving_ids.get(r)
        if ids is not None:
            ids.discard(job.message.id)
            if not ids:
                del self.receiving_ids[r]

    def _phase_expiry(self, now: float) -> None:
        heap = self._expiry_heap
        while heap and heap[0][0] <= now + _EPS:
            _, idx = heapq.heappop(heap)
            router = self.routers[idx]
            due = router.next_expiry_time
            if due > now + _EPS:
                if due != math.inf:
                    heapq.heappush(heap, (due, idx))
                continue
            before = router.version
            drops = router.tick_expiry(now)
            for drop_kind, message in drops:
                self._emit(now, _DROP_KIND[drop_kind], message.id, idx)
            if drops:
                # a sender whose payload just expired must not deliver it
                doomed = {m.id for _, m in drops}
                job = self.sending.get(idx)
                if job is not None and job.message.id in doomed:
                    self.jobs.remove(job)
                    self._abort_job(job, now)
            if router.version != before:
                self._mark_dirty(idx)
            self._push_expiry(idx)

    def _phase_create(self, now: float) -> None:
        sched = self.schedule
        while self.messages_created < len(sched) and sched[self.messages_created].time <= now + _EPS:
            ev = sched[self.messages_created]
            self.messages_created += 1
            message = routing.Message(
                id=ev.message_id, source=ev.source, destination=ev.destination,
                size=ev.size, created_at=now, ttl=ev.ttl)
            router = self.routers[ev.source]
            outcome, evicted = router.create_local(message, now, self._protected_ids(ev.source))
            for victim in evicted:
                self._emit(now, "DROP_BUFFER", victim.id, ev.source)
            self._emit(now, "CREATE", message.id, ev.source)
            if outcome == routing.REJECTED_TOO_LARGE:
                if not router.too_large_already_logged(message.id):
                    router.note_too_large_logged(message.id)
                    self._emit(now, "REJECT_TOO_LARGE", message.id, ev.source)
            elif outcome == routing.REJECTED_NO_SPACE:
                self._emit(now, "ABORTED", message.id, ev.source)
            else:
                self._push_expiry(ev.source)
            self._mark_dirty(ev.source)

    def _complete_job(self, job, now: float) -> None:
        self._detach_job(job)
        receiver = self.routers[job.receiver]
        outcome, evicted = receiver.on_receive(
            job.message, now, self._protected_ids(job.receiver))
        for victim in evicted:
            self._emit(now, "DROP_BUFFER", victim.id, job.receiver)
        if outcome in (routing.ACCEPTED, routing.DUPLICATE):
            self._emit(now, "RECEIVED", job.message.id, job.sender, job.receiver)
            self.routers[job.sender].on_send_complete(job.message, now)
            if outcome == routing.ACCEPTED:
                self._push_expiry(job.receiver)
        elif outcome == routing.REJECTED_NO_SPACE:
            self._emit(now, "ABORTED", job.message.id, job.sender, job.receiver)
        else:  # rejected_too_large; normally caught before the job starts
            if not receiver.too_large_already_logged(job.message.id):
                receiver.note_too_large_logged(job.message.id)
                self._emit(now, "REJECT_TOO_LARGE", job.message.id,
                           job.sender, job.receiver)
        self._mark_dirty(job.sender)
        self._mark_dirty(job.receiver)

    def _try_starts(self, now: float) -> int:
        started = 0
        routers = self.routers
        # receive-side busy set, kept live as starts happen below; in
        # "sender" scope receivers are never busy
        if self.config.busy_scope == "either":
            busy = set(self.sending)
            busy.update(self.receiving_count)
        else:
            busy = set()
        for s in sorted(self._dirty):
            nb = self.nbrs.get(s)
            if not nb:
                self._dirty.discard(s)
                continue
            router = routers[s]
            if len(router.buffer) == 0:
                self._dirty.discard(s)
                continue
            if self._busy_send(s):
                continue  # stays dirty; retried after its transfer ends
            avail = [p for p in nb if p not in busy]
            if not avail and router.kind != "firstcontact":
                continue  # every peer mid-transfer; stays dirty
            job, blocked = self._first_start(router, s, nb, avail, now)
            if job is not None:
                p = job.receiver
                self.jobs.append(job)
                self.sending[s] = job
                self.receiving_count[p] = self.receiving_count.get(p, 0) + 1
                self.receiving_ids.setdefault(p, set()).add(job.message.id)
                self._emit(now, "SEND_START", job.message.id, s, p)
                if self.config.busy_scope == "either":
                    busy.add(s)
                    busy.add(p)
                self._dirty.discard(s)
                started += 1
            elif not blocked and len(avail) == len(nb):
                # nothing offerable and no peer merely busy: sleep until a
                # contact change or a neighbor version change re-marks us
                self._dirty.discard(s)
        return started

    def _first_start(self, router, s: int, nb, avail, now: float):
        """First (receipt order, then ascending peer) startable transfer.

        avail lists the non-busy neighbors; cached wanted-id sets prune
        peers in bulk and wants() stays the authoritative per-offer check.
        Returns (job_or_None, blocked) where blocked means a candidate
        failed only a transient check (peer busy, copy already inbound) so
        the sender should stay dirty and retry without a version change.
        """
        routers = self.routers
        kind = router.kind
        flood = kind not in ("firstcontact", "directdelivery")
        blocked = False
        stream = router.buffer.iter_messages()
        if flood:
            # per peer, the ids it would accept from s; cached per contact
            # edge and recomputed only when either router's version moved
            cache = self._edge_wanted
            if len(cache) > 200_000:
                cache.clear()  # size cap; entries rebuild on demand
            version = router.version
            ids = router.buffer.id_view
            offerable = []
            for p in avail:
                peer = routers[p]
                key = (s, p)
                entry = cache.get(key)
                if (entry is not None and entry[0] == version
                        and entry[1] == peer.version):
                    wanted = entry[2]
                else:
                    wanted = ids - peer.refusal_ids()
                    cache[key] = (version, peer.version, wanted)
                if wanted:
                    offerable.append((p, wanted))
            if not offerable:
                return None, blocked
            if len(offerable) == 1:
                wanted_any = offerable[0][1]
            else:
                wanted_any = set().union(*(w for _, w in offerable))
            if 4 * len(wanted_any) < len(router.buffer):
                # sparse: visit just the wanted ids in receipt order instead
                # of walking the whole store past refused entries
                seq = router.buffer.receipt_seq
                stream = map(router.buffer.get,
                             sorted(wanted_any, key=seq.__getitem__))
        for message in stream:
            mid = message.id
            if flood:
                if mid not in wanted_any:
                    continue
                targets = [p for p, w in offerable if mid in w]
            elif kind == "firstcontact":
                # single copy goes to the first willing peer even if that
                # peer is busy; a busy pick just defers the message
                first = next(
                    (p for p in nb if mid not in routers[p].refusal_ids()), None)
                targets = () if first is None else (first,)
            else:  # directdelivery
                targets = [p for p in nb if p == message.destination]
            for p in targets:
                peer = routers[p]
                if message.size > peer.buffer.capacity:
                    if not peer.too_large_already_logged(mid):
                        peer.note_too_large_logged(mid)
                        self._emit(now, "REJECT_TOO_LARGE", mid, s, p)
                    continue
                if not flood and self._busy_recv(p):
                    blocked = True
                    continue
                if mid in self.receiving_ids.get(p, ()):
                    blocked = True  # already inbound from another sender
                    continue
                if not peer.wants(mid, now):
                    continue  # a version-bump event will re-mark us
                job = contacts_mod.TransferJob(
                    message=message, sender=s, receiver=p,
                    bytes_remaining=float(message.size), started_at=now)
                return job, blocked
        return None, blocked

    def _phase_transfers(self, now: float, dt: float) -> None:
        used: dict[int, float] = {}
        bandwidth = self.config.link.bandwidth
        while True:
            completed, aborted, ongoing = contacts_mod.progress_transfers(
                self.jobs, dt, self.pairs, bandwidth, used)
            self.jobs = ongoing
            for job in aborted:  # defensive; pair loss is handled in the diff phase
                self._abort_job(job, now)
            for job in completed:
                self._complete_job(job, now)
            started = self._try_starts(now)
            if not completed and not aborted and not started:
                return

    def _sample_occupancy(self, now: float) -> None:
        total = 0.0
        worst = self._peak_node_occupancy
        for router in self.routers:
            frac = router.buffer.occupied / router.buffer.capacity
            total += frac
            if frac > worst:
                worst = frac
        self._peak_node_occupancy = worst
        self._occupancy.append((now, 100.0 * total / self.n))

    # -- run ------------------------------------------------------------------

    def run(self, out_dir) -> RunResult:
        os.makedirs(out_dir, exist_ok=True)
        events_path = os.path.join(out_dir, "events.log")
        occupancy_path = os.path.join(out_dir, "occupancy.csv")
        manifest_path = os.path.join(out_dir, "manifest.txt")
        self._writer = _EventWriter(events_path)
        try:
            cfg = self.config
            dt = cfg.tick
            n_ticks = round(cfg.end_time / dt)
            report_every = round(cfg.report_interval / dt)
            self._phase_create(0.0)
            self._sample_occupancy(0.0)
            for i in range(1, n_ticks + 1):
                now = i * dt
                for mv in self.moves:
                    mv.advance(dt)
                self._phase_contacts(now)
                self._phase_expiry(now)
                self._phase_create(now)
                self._phase_transfers(now, dt)
                if i % report_every == 0:
                    self._sample_occupancy(now)
        finally:
            self._writer.close()

        with open(occupancy_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("time,mean_occupancy_pct\n")
            for t, pct in self._occupancy:
                fh.write(f"{t:.4f},{pct:.6f}\n")

        counts = dict(self._writer.counts)
        counts["records_total"] = self._writer.total
        counts["messages_created"] = self.messages_created
        counts["nodes_total"] = self.n
        with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"config_hash = {self.config.config_hash()}\n")
            for k, v in sorted(self.config.raw):
                fh.write(f"{k} = {v}\n")
            fh.write(f"nodes_total = {self.n}\n")
            fh.write(f"nodes_group1 = {cfg.group1.count}\n")
            fh.write(f"nodes_group2 = {cfg.group2.count}\n")
            fh.write(f"messages_created = {self.messages_created}\n")
            fh.write(f"peak_node_occupancy_pct = "
                     f"{100.0 * self._peak_node_occupancy:.6f}\n")
            fh.write(f"records_total = {self._writer.total}\n")
            for kind in EVENT_KINDS:
                fh.write(f"records_{kind} = {self._writer.counts[kind]}\n")
        return RunResult(
            out_dir=str(out_dir), events_path=events_path,
            occupancy_path=occupancy_path, manifest_path=manifest_path,
            counts=counts)


def run(config: ScenarioConfig, out_dir) -> RunResult:
    """Execute one scenario, writing events.log, occupancy.csv, manifest.txt."""
    return Simulation(config).run(out_dir)


# --------------------------------------------------------------------------
# batch

def _batch_worker(args):
    config, run_dir = args
    try:
        run(config, run_dir)
        return "ok", ""
    except Exception as exc:  # noqa: BLE001 - a failing run must not sink the batch
        log.exception("run failed in %s", run_dir)
        return "error", f"{type(exc).__name__}: {exc}"


def batch(config_path, out_dir, jobs: int = 1, base_seed: int | None = None) -> str:
    """Run every scenario a sweep config expands to; returns the index path.

    Per-run seeds are base seed + run index, except when the config sweeps
    seed itself: swept seeds are taken as written. Failing runs are recorded
    in the index with their error and do not stop the rest.
    """
    configs, swept = load_config(config_path)
    os.makedirs(out_dir, exist_ok=True)
    tasks = []
    rows = []
    for idx, config in enumerate(configs):
        if base_seed is not None:
            seed = base_seed + idx
        elif "seed" in swept:
            seed = config.seed
        else:
            seed = config.seed + idx
        config = config.with_seed(seed)
        run_dir = os.path.join(out_dir, f"run_{idx:03d}")
        tasks.append((config, run_dir))
        raw = dict(config.raw)
        rows.append({
            "run": f"run_{idx:03d}", "dir": run_dir, "seed": seed,
            **{key: raw[key] for key in swept},
        })

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_batch_worker, tasks))
    else:
        outcomes = [_batch_worker(task) for task in tasks]

    index_path = os.path.join(out_dir, "index.csv")
    fields = ["run", "dir", "seed", *swept, "status", "error"]
    with open(index_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row, (status, error) in zip(rows, outcomes):
            writer.writerow({**row, "status": status, "error": error})
    return index_path
