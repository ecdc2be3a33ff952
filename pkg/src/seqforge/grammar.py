"""Sampling of random genotypes under a configurable grammar.

The grammar decides which perturbation kinds are available, how many
units a genotype may carry, how large indels may grow, and how often
each kind is drawn.  All sampling respects the reference context's
restricted regions by construction, so no rejection loop on validity is
needed afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .diffs import (
    NUCLEOTIDES,
    Deletion,
    DiffUnit,
    Genotype,
    Insertion,
    ReferenceContext,
    SNV,
    resolve_overlaps,
)

KIND_SNV = "snv"
KIND_INSERTION = "insertion"
KIND_DELETION = "deletion"
ALL_KINDS = (KIND_SNV, KIND_INSERTION, KIND_DELETION)

# Bounded retries for stochastic placement; grammar sampling degrades
# gracefully instead of spinning when space is tight.
SAMPLE_ATTEMPTS = 100


class EmptySearchSpace(RuntimeError):
    """No diff unit can be produced under the given grammar and reference."""


def _canon_kind(kind: str) -> str:
    k = kind.strip().lower()
    if k == "ins":
        k = KIND_INSERTION
    if k == "del":
        k = KIND_DELETION
    if k not in ALL_KINDS:
        raise ValueError(f"unknown diff unit kind: {kind!r}")
    return k


@dataclass(frozen=True)
class GrammarConfig:
    max_diff_units: int = 6
    max_insertion_size: int = 5
    max_deletion_size: int = 5
    snv_weight: float = 1.0
    insertion_weight: float = 1.0
    deletion_weight: float = 1.0
    excluded_kinds: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.max_diff_units < 1:
            raise ValueError("max_diff_units must be >= 1")
        if self.max_insertion_size < 1 or self.max_deletion_size < 1:
            raise ValueError("indel size caps must be >= 1")
        for w in (self.snv_weight, self.insertion_weight, self.deletion_weight):
            if w < 0:
                raise ValueError("grammar weights must be >= 0")
        object.__setattr__(
            self, "excluded_kinds", frozenset(_canon_kind(k) for k in self.excluded_kinds)
        )
        usable = [
            k for k in ALL_KINDS
            if k not in self.excluded_kinds and self.kind_weight(k) > 0
        ]
        if not usable:
            raise ValueError("grammar excludes or zero-weights every diff unit kind")

    def kind_weight(self, kind: str) -> float:
        return {
            KIND_SNV: self.snv_weight,
            KIND_INSERTION: self.insertion_weight,
            KIND_DELETION: self.deletion_weight,
        }[kind]


class PositionDomain:
    """Precomputed placement choices for one reference context.

    Building the free-position lists once per run keeps sampling cheap;
    the context is immutable so the domain never goes stale.
    """

    def __init__(self, ctx: ReferenceContext, cfg: GrammarConfig):
        self.ctx = ctx
        self.cfg = cfg
        n = len(ctx.sequence)
        free = [p for p in range(n) if not ctx.is_restricted(p)]
        self.snv_positions = free
        # Insertion before any free base, or appending at the very end.
        self.insertion_positions = free + [n]
        self.deletion_positions = []
        self.deletion_caps = {}
        for p in free:
            cap = min(cfg.max_deletion_size, ctx.free_run_length(p))
            if cap >= 1:
                self.deletion_positions.append(p)
                self.deletion_caps[p] = cap

    def positions_for(self, kind: str) -> list[int]:
        return {
            KIND_SNV: self.snv_positions,
            KIND_INSERTION: self.insertion_positions,
            KIND_DELETION: self.deletion_positions,
        }[kind]


def enabled_kinds(cfg: GrammarConfig, domain: PositionDomain) -> tuple[list[str], list[float]]:
    """Kinds that can actually be drawn, with their weights."""
    kinds, weights = [], []
    for kind in ALL_KINDS:
        if kind in cfg.excluded_kinds:
            continue
        w = cfg.kind_weight(kind)
        if w <= 0 or not domain.positions_for(kind):
            continue
        kinds.append(kind)
        weights.append(w)
    return kinds, weights


def sample_unit(
    kind: str,
    cfg: GrammarConfig,
    ctx: ReferenceContext,
    rng: random.Random,
    domain: Optional[PositionDomain] = None,
) -> DiffUnit:
    """Draw one unit of the given kind uniformly over its valid placements."""
    kind = _canon_kind(kind)
    if domain is None:
        domain = PositionDomain(ctx, cfg)
    positions = domain.positions_for(kind)
    if not positions:
        raise EmptySearchSpace(f"no valid position for kind {kind!r}")
    pos = rng.choice(positions)
    if kind == KIND_SNV:
        return SNV(pos, rng.choice(NUCLEOTIDES))
    if kind == KIND_INSERTION:
        size = rng.randint(1, cfg.max_insertion_size)
        return Insertion(pos, "".join(rng.choice(NUCLEOTIDES) for _ in range(size)))
    return Deletion(pos, rng.randint(1, domain.deletion_caps[pos]))


def draw_kind(cfg: GrammarConfig, domain: PositionDomain, rng: random.Random) -> str:
    kinds, weights = enabled_kinds(cfg, domain)
    if not kinds:
        raise EmptySearchSpace("every diff unit kind is excluded or unplaceable")
    return rng.choices(kinds, weights=weights, k=1)[0]


def sample_genotype(
    cfg: GrammarConfig,
    ctx: ReferenceContext,
    rng: random.Random,
    domain: Optional[PositionDomain] = None,
) -> Genotype:
    """Draw a random genotype of 1..max_diff_units non-conflicting units.

    The target unit count is uniform; units are drawn one at a time and
    conflicts resolved as they appear, so tight references simply yield
    fewer units instead of failing.
    """
    if domain is None:
        domain = PositionDomain(ctx, cfg)
    if not enabled_kinds(cfg, domain)[0]:
        raise EmptySearchSpace("every diff unit kind is excluded or unplaceable")
    target = rng.randint(1, cfg.max_diff_units)
    accepted: list[DiffUnit] = []
    for _ in range(SAMPLE_ATTEMPTS):
        if len(accepted) >= target:
            break
        kind = draw_kind(cfg, domain, rng)
        unit = sample_unit(kind, cfg, ctx, rng, domain=domain)
        accepted = resolve_overlaps(accepted + [unit])
    return Genotype(tuple(accepted))
