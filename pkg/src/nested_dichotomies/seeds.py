"""Deterministic seed derivation.

Every randomized operation takes an integer seed and derives independent
streams through ``numpy.random.SeedSequence``, so results never depend on
call order or scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _as_entropy(parts) -> list[int]:
    out = []
    for p in parts:
        if isinstance(p, str):
            out.append(int.from_bytes(hashlib.sha256(p.encode()).digest()[:8], "big"))
        else:
            out.append(int(p))
    return out


def child_seed(*entropy) -> int:
    """Collapse integers and/or strings into a single derived 64-bit seed."""
    ss = np.random.SeedSequence(entropy=_as_entropy(entropy))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_from(*entropy) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=_as_entropy(entropy)))


def node_rng(build_seed: int, path: tuple[int, ...]) -> np.random.Generator:
    """RNG for a tree node identified by its root-to-node branch path.

    Streams depend only on (seed, path), so subtrees can be built in any
    order, or in parallel, with identical results.
    """
    ss = np.random.SeedSequence(entropy=[build_seed], spawn_key=path)
    return np.random.default_rng(ss)
