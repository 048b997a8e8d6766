"""Corrupted tables: planted distance, per-set single flips, coordinate clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Domain, DPTable, as_bits, dp_encode, to_fraction
from .errors import InvalidArgument

KINDS = ("random-set-corruption", "per-set-single-flip", "coordinate-cluster-flip")


def corrupt_random_sets(a: Sequence[int], dom: Domain, delta, seed: int) -> DPTable:
    """Codeword of ``a`` with ceil(delta |V|) sets replaced by other values.

    Each replaced set receives a value drawn uniformly from the local values
    different from the original one.
    """
    delta = to_fraction(delta)
    if not 0 <= delta <= 1:
        raise InvalidArgument(f"delta must lie in [0, 1], got {delta}")
    base = dp_encode(a, dom)
    count = math.ceil(delta * len(dom))
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(dom), size=count, replace=False))
    full = base.full.copy()
    for s in chosen:
        coords = np.asarray(dom.sets[s]) - 1
        if coords.size == 0:
            raise InvalidArgument(f"set {int(s)} is empty and cannot be corrupted")
        flip = rng.integers(0, 2, size=coords.size, dtype=np.uint8)
        while not flip.any():
            flip = rng.integers(0, 2, size=coords.size, dtype=np.uint8)
        full[s, coords] ^= flip
    return DPTable(dom, full)


def per_set_single_flip(a: Sequence[int], dom: Domain, seed: int) -> DPTable:
    """Flip one uniformly random coordinate inside every set."""
    if np.any(dom.sizes == 0):
        raise InvalidArgument("every set must be nonempty")
    rng = np.random.default_rng(seed)
    full = dp_encode(a, dom).full.copy()
    picks = (rng.random(len(dom)) * dom.sizes).astype(np.int64)
    picks = np.minimum(picks, dom.sizes - 1)
    inside = np.nonzero(dom.membership)
    starts = np.concatenate(([0], np.cumsum(dom.sizes)[:-1]))
    cols = inside[1][starts + picks]
    full[np.arange(len(dom)), cols] ^= 1
    return DPTable(dom, full)


def coordinate_cluster_flip(a: Sequence[int], dom: Domain, i: int,
                            cluster: Sequence[int]) -> DPTable:
    """Flip coordinate ``i`` on exactly the sets listed in ``cluster``."""
    members = set(int(s) for s in dom.containing(i))
    cluster = sorted(set(int(s) for s in cluster))
    stray = [s for s in cluster if s not in members]
    if stray:
        raise InvalidArgument(f"sets {stray} do not contain coordinate {i}")
    full = dp_encode(a, dom).full.copy()
    if cluster:
        full[np.asarray(cluster), i - 1] ^= 1
    return DPTable(dom, full)


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    delta: Fraction | None = None
    coordinate: int | None = None
    # fraction of the sets containing ``coordinate`` to flip, chosen by seed
    cluster_fraction: Fraction | None = None
    cluster: tuple[int, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown corruption kind {self.kind!r}")
        if self.delta is not None:
            object.__setattr__(self, "delta", to_fraction(self.delta))
            if not 0 <= self.delta <= 1:
                raise InvalidArgument("delta must lie in [0, 1]")
        if self.cluster_fraction is not None:
            object.__setattr__(self, "cluster_fraction", to_fraction(self.cluster_fraction))

    def apply(self, a: Sequence[int], dom: Domain) -> DPTable:
        if self.kind == "random-set-corruption":
            if self.delta is None:
                raise InvalidArgument("random-set-corruption needs delta")
            return corrupt_random_sets(a, dom, self.delta, self.seed)
        if self.kind == "per-set-single-flip":
            return per_set_single_flip(a, dom, self.seed)
        if self.coordinate is None:
            raise InvalidArgument("coordinate-cluster-flip needs a coordinate")
        if self.coordinate > dom.n or self.coordinate < 1:
            raise InvalidArgument(f"coordinate {self.coordinate} outside [1, {dom.n}]")
        cluster = self.cluster
        if cluster is None:
            members = dom.containing(self.coordinate)
            frac = self.cluster_fraction if self.cluster_fraction is not None else Fraction(0)
            size = math.floor(frac * members.size)
            rng = np.random.default_rng(self.seed)
            cluster = tuple(int(s) for s in rng.choice(members, size=size, replace=False))
        return coordinate_cluster_flip(a, dom, self.coordinate, cluster)


def random_string(n: int, seed: int) -> np.ndarray:
    return as_bits(np.random.default_rng(seed).integers(0, 2, size=n))
