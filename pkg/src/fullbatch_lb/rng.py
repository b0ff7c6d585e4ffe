"""Named, counter-based random streams.

Every stochastic routine in this package takes an explicit
``numpy.random.Generator``.  ``stream`` builds one from a root seed plus a
sequence of name tokens (module name, trial index, ...), so that concurrent
trials own statistically independent streams and every run is reproducible
from ``(seed, names)`` alone.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream"]


def _key_words(token) -> tuple[int, int]:
    """Map a name token to two uint32 spawn-key words, stably across runs."""
    if isinstance(token, (int, np.integer)):
        value = int(token) & 0xFFFFFFFFFFFFFFFF
    else:
        digest = hashlib.blake2b(str(token).encode("utf-8"), digest_size=8).digest()
        value = int.from_bytes(digest, "little")
    return value & 0xFFFFFFFF, (value >> 32) & 0xFFFFFFFF


def stream(seed: int, *names) -> np.random.Generator:
    """Return an independent Philox generator for ``(seed, *names)``.

    Philox is counter-based: streams with distinct spawn keys never collide,
    and the same key always reproduces the same draws.
    """
    words = tuple(w for token in names for w in _key_words(token))
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=words)
    return np.random.Generator(np.random.Philox(seq))
