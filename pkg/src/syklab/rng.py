"""Counter-based random streams with stable (seed, tag) keying.

Each logical stream is a Philox generator keyed by a SHA-256 mix of the
64-bit seed and a purpose tag, so unrelated draws (ensemble sampling,
Lanczos start vectors, graph sparsification, ...) never share state and
every stream is reproducible across platforms and numpy threading modes.
"""

import hashlib

import numpy as np


def _key(seed, tag):
    digest = hashlib.sha256(f"{int(seed)}:{tag}".encode()).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64)


def stream(seed, tag):
    """A fresh Generator for (seed, tag); same arguments, same stream."""
    return np.random.Generator(np.random.Philox(key=_key(seed, tag)))


def derive_seed(base_seed, index):
    """Per-trial seed: base seed plus trial index (kept additive on purpose
    so published tables can cite plain integer seeds)."""
    return int(base_seed) + int(index)
