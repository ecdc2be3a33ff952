"""Archive-aware fitness functions.

Both functions read the archive without touching it, so candidate
fitness within one generation depends only on admissions that already
happened.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .archive import Archive, bin_index, shannon_diversity

BIN_FILLER = "bin-filler"
DIVERSITY_GAIN = "iad"


@dataclass(frozen=True)
class FitnessValue:
    value: float
    function_id: str


def bin_filler(prediction: float, archive: Archive) -> FitnessValue:
    """Reward candidates landing in underfilled bins.

    1 for an empty bin, 0 at or beyond the per-bin cap, linear between.
    """
    b = bin_index(prediction, archive.config.bin_count)
    fill = archive.bin_counts[b] / archive.config.per_bin_cap
    return FitnessValue(max(0.0, 1.0 - fill), BIN_FILLER)


def iad(prediction: float, archive: Archive) -> FitnessValue:
    """Diversity gain: change in bin entropy if this candidate joined.

    Computed on a copied histogram; negative when the candidate would
    pile onto an already heavy bin.
    """
    b = bin_index(prediction, archive.config.bin_count)
    before = shannon_diversity(archive.bin_counts)
    counts = list(archive.bin_counts)
    counts[b] += 1
    after = shannon_diversity(counts)
    return FitnessValue(after - before, DIVERSITY_GAIN)


_REGISTRY: dict[str, Callable[[float, Archive], FitnessValue]] = {
    BIN_FILLER: bin_filler,
    DIVERSITY_GAIN: iad,
}


def get_fitness_function(name: str) -> Callable[[float, Archive], FitnessValue]:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown fitness function: {name!r} (have {sorted(_REGISTRY)})") from None
