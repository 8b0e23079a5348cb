"""
Seeded resampling plans.

Every random draw in the package comes from a :class:`SeedSpec`, a master
seed plus a stream path. The generator is numpy's PCG64 seeded through
``SeedSequence(master_seed, spawn_key=stream)``, so a draw depends only on
(master seed, stream path) and never on which worker runs it or when.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidArgumentError

BOOTSTRAP = "bootstrap"
HALF_SUBSAMPLE = "half-subsample"
SPLIT = "fractional-split"

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """
    A reproducible random stream.

    Parameters
    ----------
    master_seed : int
        Unsigned 64-bit experiment seed.
    stream : tuple of int
        Stream path. Children are made with :meth:`spawn`, so task ``k`` of
        stage ``s`` gets ``seed.spawn(s).spawn(k)``.
    """

    master_seed: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < _U64:
            raise InvalidArgumentError("master_seed must be an unsigned 64-bit integer")
        stream = tuple(int(s) for s in self.stream)
        if any(not 0 <= s < _U64 for s in stream):
            raise InvalidArgumentError("stream ids must be unsigned 64-bit integers")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream", stream)

    @classmethod
    def coerce(cls, seed) -> "SeedSpec":
        if isinstance(seed, SeedSpec):
            return seed
        if seed is None:
            return cls(0)
        return cls(int(seed))

    @property
    def stream_id(self) -> int:
        """Last component of the stream path (0 for the root stream)."""
        return self.stream[-1] if self.stream else 0

    def spawn(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream + (int(stream_id),))

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(ss))

    def to_dict(self) -> dict:
        return {"master_seed": self.master_seed, "stream": list(self.stream)}


@dataclass(frozen=True)
class ResamplePlan:
    """Row indices produced by one resampling draw.

    For bootstrap and half-subsample plans ``blocks`` holds one index
    vector; for a fractional split it holds train/selection/test blocks.
    """

    kind: str
    n: int
    blocks: tuple[np.ndarray, ...]

    @property
    def indices(self) -> np.ndarray:
        return self.blocks[0]

    def out_of_bag(self) -> np.ndarray:
        """Rows of [0, n) never drawn by the plan's first block."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.blocks[0]] = False
        return np.flatnonzero(mask)


def _as_seed(seed) -> SeedSpec:
    return SeedSpec.coerce(seed)


def bootstrap_indices(n: int, seed) -> ResamplePlan:
    """``n`` row indices drawn i.i.d. uniformly from [0, n)."""
    n = int(n)
    if n < 1:
        raise InvalidArgumentError("bootstrap needs n >= 1")
    idx = _as_seed(seed).rng().integers(0, n, size=n)
    return ResamplePlan(BOOTSTRAP, n, (idx.astype(np.intp),))


def half_subsample(n: int, seed) -> ResamplePlan:
    """``floor(n / 2)`` distinct row indices, sorted."""
    n = int(n)
    if n < 2:
        raise InvalidArgumentError("half-subsampling needs n >= 2")
    perm = _as_seed(seed).rng().permutation(n)
    return ResamplePlan(HALF_SUBSAMPLE, n, (np.sort(perm[: n // 2]).astype(np.intp),))


def split_80_10_10(n: int, seed) -> ResamplePlan:
    """Disjoint train/selection/test blocks of sizes floor(.8n), floor(.1n), rest."""
    return fractional_split(n, seed, (0.8, 0.1))


def fractional_split(n: int, seed, fractions: Sequence[float] = (0.8, 0.1)) -> ResamplePlan:
    n = int(n)
    if n < 10:
        raise InvalidArgumentError("an 80-10-10 split needs n >= 10")
    # integer arithmetic keeps floor(0.8 * 10) == 8 exact
    sizes = [int(np.floor(round(f * n, 9))) for f in fractions]
    if sum(sizes) >= n or min(sizes) < 1:
        raise InvalidArgumentError(f"fractions {tuple(fractions)} do not partition n={n}")
    perm = _as_seed(seed).rng().permutation(n).astype(np.intp)
    cuts = np.cumsum(sizes)
    blocks = tuple(np.sort(b) for b in np.split(perm, cuts))
    return ResamplePlan(SPLIT, n, blocks)
