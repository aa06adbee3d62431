"""Deterministic derivation of independent random streams from one base seed."""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    """Hash a label tuple into a 64-bit integer seed.

    sha256 keeps the derivation stable across platforms and Python versions
    (tuple hash() would depend on hash randomization for str parts).
    """
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(*parts) -> random.Random:
    """A random.Random seeded from the label tuple."""
    return random.Random(derive_seed(*parts))


def node_streams(seed: int, n: int) -> list[random.Random]:
    """One independent stream per node index, derived from (seed, node index)."""
    return [stream(seed, "node", i) for i in range(n)]
