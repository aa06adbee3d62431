"""Store-carry-forward routing protocols over bounded FIFO buffers.

All four routers share the same buffer machinery: fixed byte capacity,
drop-oldest eviction in receipt order, hard TTL expiry. They differ in what
a node is willing to accept and to whom it offers copies:

  epidemic        accept anything not currently buffered (so a message evicted
                  earlier is accepted again if offered - the re-receipt loop
                  that congests small buffers)
  wave            epidemic plus a tracking list: once a message id has been
                  seen, further copies are refused for an immunity window,
                  and the buffered copy itself is only kept for a custody
                  time (a fraction of the immunity window)
  firstcontact    forward a single copy to the first willing peer, deleting
                  the local copy after the hand-off (removal is silent: the
                  event log has no record kind for it)
  directdelivery  hold until the destination itself is in range

Routers never touch the clock or RNG; the engine drives them tick by tick
and serializes all mutations, which makes runs bit-reproducible.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

_EPS = 1e-9

ACCEPTED = "accepted"
DUPLICATE = "duplicate"
REJECTED_TOO_LARGE = "rejected_too_large"
REJECTED_NO_SPACE = "rejected_no_space"

ROUTER_KINDS = ("epidemic", "wave", "firstcontact", "directdelivery")


@dataclass(frozen=True)
class Message:
    """An immutable application message; size in bytes, times in seconds."""

    id: str
    source: int
    destination: int
    size: int = 2064
    created_at: float = 0.0
    ttl: float = 3600.0

    def expires_at(self) -> float:
        return self.created_at + self.ttl


class BufferOverflowError(RuntimeError):
    """Internal invariant breach: occupied bytes exceeded capacity."""


@dataclass
class _Entry:
    message: Message
    receipt_time: float


class Buffer:
    """Bounded message store ordered by receipt (insertion) sequence."""

    __slots__ = ("capacity", "occupied", "_entries", "_seq", "_next_seq")

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError("buffer capacity must be > 0 bytes")
        self.capacity = int(capacity)
        self.occupied = 0
        self._entries: OrderedDict[str, _Entry] = OrderedDict()
        self._seq: dict[str, int] = {}
        self._next_seq = 0

    def __contains__(self, message_id: str) -> bool:
        return message_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def messages_in_order(self):
        return [e.message for e in self._entries.values()]

    def iter_messages(self):
        """Lazy receipt-order iteration; do not mutate while iterating."""
        for entry in self._entries.values():
            yield entry.message

    def entries_in_order(self):
        return list(self._entries.values())

    @property
    def id_view(self):
        """Live set-like view of buffered ids; supports set algebra."""
        return self._entries.keys()

    @property
    def receipt_seq(self):
        """Live id -> monotone insertion counter map; read only.

        Sorting ids by this key reproduces receipt order without walking
        the whole store.
        """
        return self._seq

    def get(self, message_id: str) -> Message | None:
        entry = self._entries.get(message_id)
        return entry.message if entry else None

    def receipt_time(self, message_id: str) -> float:
        return self._entries[message_id].receipt_time

    def insert(self, message: Message, now: float) -> None:
        if message.id in self._entries:
            raise ValueError(f"message {message.id} already buffered")
        self._entries[message.id] = _Entry(message, now)
        self._seq[message.id] = self._next_seq
        self._next_seq += 1
        self.occupied += message.size
        if self.occupied > self.capacity:
            raise BufferOverflowError(
                f"buffer occupancy {self.occupied} exceeds capacity {self.capacity}")

    def remove(self, message_id: str) -> Message | None:
        entry = self._entries.pop(message_id, None)
        if entry is None:
            return None
        del self._seq[message_id]
        self.occupied -= entry.message.size
        return entry.message

    def pop_oldest(self, skip=frozenset()) -> Message | None:
        """Remove and return the oldest entry whose id is not in skip."""
        for mid in self._entries:
            if mid not in skip:
                return self.remove(mid)
        return None

    def evictable_bytes(self, skip=frozenset()) -> int:
        return sum(
            e.message.size for mid, e in self._entries.items() if mid not in skip
        )

    @property
    def occupancy_fraction(self) -> float:
        return self.occupied / self.capacity


class Router:
    """Base store-carry-forward behavior: bounded buffer, drop-oldest eviction
    with in-flight sender copies protected, inclusive-boundary TTL expiry."""

    kind = "base"

    def __init__(self, capacity: int):
        self.buffer = Buffer(capacity)
        # version counts state mutations; the engine uses it to skip
        # re-evaluating offers for nodes whose neighborhood is unchanged
        self.version = 0
        self._too_large_logged: set[str] = set()
        self._next_expiry = float("inf")

    # -- receiving ---------------------------------------------------------

    def wants(self, message_id: str, now: float) -> bool:
        """Would this node accept a copy of message_id right now?"""
        return message_id not in self.buffer

    def refusal_ids(self):
        """Set-like view of ids wants() would refuse at any time this tick.

        Used by the engine to subtract unwanted ids from a neighbor's
        offers in bulk; wants() stays the authoritative per-offer check.
        """
        return self.buffer.id_view

    def on_receive(self, message: Message, now: float, protected=frozenset()):
        """Take custody of a completed transfer (or local creation).

        Returns (outcome, evicted_messages). Evictions pick the oldest
        entries first, skipping ids in `protected` (copies currently being
        transmitted by this node). If skipping makes room impossible the
        receipt is rejected with nothing evicted.
        """
        if message.size > self.buffer.capacity:
            return REJECTED_TOO_LARGE, []
        if message.id in self.buffer:
            return DUPLICATE, []
        needed = message.size - (self.buffer.capacity - self.buffer.occupied)
        if needed > 0:
            # evictable = occupied minus protected entries, without a scan
            protected_bytes = 0
            for mid in protected:
                held = self.buffer.get(mid)
                if held is not None:
                    protected_bytes += held.size
            if self.buffer.occupied - protected_bytes < needed:
                return REJECTED_NO_SPACE, []
        evicted = []
        while self.buffer.occupied + message.size > self.buffer.capacity:
            victim = self.buffer.pop_oldest(skip=protected)
            assert victim is not None  # guaranteed by the evictable_bytes check
            evicted.append(victim)
        self.buffer.insert(message, now)
        self._note_deadline(message.created_at + message.ttl)
        self.version += 1
        return ACCEPTED, evicted

    def create_local(self, message: Message, now: float, protected=frozenset()):
        """Buffer a message this node created; same semantics as on_receive
        (the creator counts as the message's first receiver)."""
        return self.on_receive(message, now, protected)

    def too_large_already_logged(self, message_id: str) -> bool:
        """True once a REJECT_TOO_LARGE was recorded for this message here."""
        return message_id in self._too_large_logged

    def note_too_large_logged(self, message_id: str) -> None:
        self._too_large_logged.add(message_id)

    # -- expiry ------------------------------------------------------------

    def _note_deadline(self, t: float) -> None:
        if t < self._next_expiry:
            self._next_expiry = t

    @property
    def next_expiry_time(self) -> float:
        """Earliest time a ttl/custody/tracking deadline can fire (may be stale
        early, never stale late)."""
        return self._next_expiry

    def tick_expiry(self, now: float):
        """Drop every buffered message past its deadline (boundary inclusive).

        Returns a list of (drop_kind, message) in buffer order; drop_kind is
        'ttl' here, subclasses may add others.
        """
        drops = self._collect_drops(now)
        for _, message in drops:
            self.buffer.remove(message.id)
        if drops:
            self.version += 1
        self._recompute_next_expiry(now)
        return drops

    def _collect_drops(self, now: float):
        drops = []
        for entry in self.buffer.entries_in_order():
            if now >= entry.message.expires_at() - _EPS:
                drops.append(("ttl", entry.message))
        return drops

    def _recompute_next_expiry(self, now: float) -> None:
        deadlines = [e.message.expires_at() for e in self.buffer.entries_in_order()]
        self._next_expiry = min(deadlines) if deadlines else float("inf")

    # -- sending -----------------------------------------------------------

    def on_send_complete(self, message: Message, now: float) -> bool:
        """Hook after a copy was delivered; returns True if the local copy
        was deleted (single-copy protocols)."""
        return False


class EpidemicRouter(Router):
    """Flood to every peer missing the message; no memory of past custody,
    so evicted messages are accepted again when re-offered."""

    kind = "epidemic"


class WaveRouter(Router):
    """Flooding damped by per-message immunity.

    Receipt (including local creation) records the message id in a tracking
    list for immunity_time seconds; tracked ids are refused even after the
    buffered copy is gone, and the buffered copy is dropped once it has been
    held for custody_time = custody_fraction * immunity_time. Entries are
    written at receipt and never refreshed by later refused offers.
    """

    kind = "wave"

    def __init__(self, capacity: int, immunity_time: float = 9000.0,
                 custody_fraction: float = 0.5):
        if immunity_time <= 0:
            raise ValueError("immunity_time must be > 0")
        if not 0.0 < custody_fraction <= 1.0:
            raise ValueError("custody_fraction must be in (0, 1]")
        super().__init__(capacity)
        self.immunity_time = immunity_time
        self.custody_time = custody_fraction * immunity_time
        self.tracking: dict[str, float] = {}
        self._refusals: set[str] = set()

    def wants(self, message_id: str, now: float) -> bool:
        if message_id in self.buffer:
            return False
        seen = self.tracking.get(message_id)
        return seen is None or now >= seen + self.immunity_time - _EPS

    def refusal_ids(self):
        # buffered or tracked; tick_expiry purges stale tracking before the
        # engine consults this, so the set never refuses an expired immunity
        return self._refusals

    def on_receive(self, message: Message, now: float, protected=frozenset()):
        outcome, evicted = super().on_receive(message, now, protected)
        if outcome == ACCEPTED:
            self.tracking[message.id] = now
            self._refusals.add(message.id)
            self._note_deadline(now + self.custody_time)
            self._note_deadline(now + self.immunity_time)
        return outcome, evicted

    def _collect_drops(self, now: float):
        drops = []
        for entry in self.buffer.entries_in_order():
            if now >= entry.message.expires_at() - _EPS:
                drops.append(("ttl", entry.message))
            elif now >= entry.receipt_time + self.custody_time - _EPS:
                drops.append(("custody", entry.message))
        return drops

    def tick_expiry(self, now: float):
        drops = super().tick_expiry(now)
        expired = [mid for mid, t in self.tracking.items()
                   if now >= t + self.immunity_time - _EPS]
        for mid in expired:
            del self.tracking[mid]
            # custody <= immunity, so the buffered copy is already gone
            self._refusals.discard(mid)
        if expired:
            self.version += 1  # refusals may flip back to wants
        return drops

    def _recompute_next_expiry(self, now: float) -> None:
        deadlines = [
            min(e.message.expires_at(), e.receipt_time + self.custody_time)
            for e in self.buffer.entries_in_order()
        ]
        deadlines.extend(t + self.immunity_time for t in self.tracking.values())
        self._next_expiry = min(deadlines) if deadlines else float("inf")


class FirstContactRouter(Router):
    """Single-copy forwarding: hand the message to the first willing peer and
    delete it locally once the transfer completes."""

    kind = "firstcontact"

    def on_send_complete(self, message: Message, now: float) -> bool:
        if self.buffer.remove(message.id) is not None:
            self.version += 1
            return True
        return False


class DirectDeliveryRouter(Router):
    """Hold every message until its destination is a direct neighbor."""

    kind = "directdelivery"


def make_router(kind: str, capacity: int, *, immunity_time: float = 9000.0,
                custody_fraction: float = 0.5) -> Router:
    if kind == "epidemic":
        return EpidemicRouter(capacity)
    if kind == "wave":
        return WaveRouter(capacity, immunity_time, custody_fraction)
    if kind == "firstcontact":
        return FirstContactRouter(capacity)
    if kind == "directdelivery":
        return DirectDeliveryRouter(capacity)
    raise ValueError(f"unknown router {kind!r}")


def select_transfers(sender: Router, peers, now: float):
    """Offers a sender would make this tick, as (message, peer_index) tuples.

    Ordered by buffer receipt order, then ascending peer index. First Contact
    yields at most one peer per message (the lowest-index willing one);
    Direct Delivery only offers to the destination. The engine executes the
    list respecting the one-active-transfer constraint.
    """
    ordered = sorted(peers, key=lambda pair: pair[0])
    offers = []
    for message in sender.buffer.messages_in_order():
        if sender.kind == "directdelivery":
            for idx, peer in ordered:
                if idx == message.destination and peer.wants(message.id, now):
                    offers.append((message, idx))
        elif sender.kind == "firstcontact":
            for idx, peer in ordered:
                if peer.wants(message.id, now):
                    offers.append((message, idx))
                    break
        else:
            for idx, peer in ordered:
                if peer.wants(message.id, now):
                    offers.append((message, idx))
    return offers
