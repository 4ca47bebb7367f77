"""Deterministic random streams.

All randomness flows through the Philox counter-based generator. A
stream is identified by an integer seed plus an optional text label;
labeled streams fold an 8-byte BLAKE2b digest of the label into the
seed material, so each consumer owns an independent substream that is a
pure function of ``(seed, label)`` with no hidden global state.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import InvalidInputError


def label_entropy(label: str) -> int:
    """Stable 64-bit entropy word derived from a stream label."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise InvalidInputError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise InvalidInputError(f"seed must be nonnegative, got {seed}")
    return int(seed)


def make_rng(seed: int, label: str | None = None) -> np.random.Generator:
    """Philox generator for ``seed``, optionally branched by ``label``."""
    seed = _check_seed(seed)
    if label is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence([seed, label_entropy(label)])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(base_seed: int, trial: int, label: str) -> int:
    """Integer seed that is a pure function of (base_seed, trial, label).

    Used for every stream other than a trial's group-A sample, whose
    seed is ``base_seed + trial`` by contract.
    """
    base_seed = _check_seed(base_seed)
    if trial < 0:
        raise InvalidInputError(f"trial must be nonnegative, got {trial}")
    ss = np.random.SeedSequence([base_seed, int(trial), label_entropy(label)])
    return int(ss.generate_state(1, np.uint64)[0])
