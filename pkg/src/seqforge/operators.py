"""Selection and variation operators for genotype populations.

Selection works on parallel fitness / edit-weight lists and returns an
index into the population, which keeps the operators reusable for any
individual representation.  Variation operators take and return
genotypes; every offspring they produce is valid for the reference
context by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence

from . import grammar as _grammar
from .diffs import (
    Deletion,
    DiffUnit,
    Genotype,
    Insertion,
    ReferenceContext,
    SNV,
    resolve_overlaps,
    spans_overlap,
)

PLACEMENT_ATTEMPTS = 100


@dataclass(frozen=True)
class OperatorConfig:
    selection_method: str = "tournament"
    tournament_size: int = 5
    crossover_probability: float = 0.25
    mutation_probability: float = 0.7
    custom_mutation_weight: float = 0.8
    proximity_sigma: float = 4.0

    def __post_init__(self) -> None:
        if self.selection_method not in ("tournament", "lexicase"):
            raise ValueError(f"unknown selection method: {self.selection_method!r}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        for name in ("crossover_probability", "mutation_probability", "custom_mutation_weight"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.proximity_sigma <= 0:
            raise ValueError("proximity_sigma must be > 0")


def tournament_select(
    fitnesses: Sequence[float],
    weights: Sequence[int],
    k: int,
    rng: random.Random,
) -> int:
    """Pick the best of k entrants drawn with replacement.

    Ties on fitness fall to the lighter genotype, then to the earlier
    population index, so the winner is always unambiguous.
    """
    if not fitnesses:
        raise ValueError("empty population")
    entrants = [rng.randrange(len(fitnesses)) for _ in range(k)]
    return min(entrants, key=lambda i: (-fitnesses[i], weights[i], i))


def lexicase_select(
    fitnesses: Sequence[float],
    weights: Sequence[int],
    rng: random.Random,
) -> int:
    """Filter the population through both objectives in random order.

    Objectives are maximal fitness and minimal edit weight, applied with
    exact equality; whoever survives both is drawn from uniformly.
    """
    if not fitnesses:
        raise ValueError("empty population")
    survivors = list(range(len(fitnesses)))
    objectives = [
        lambda i: -fitnesses[i],
        lambda i: weights[i],
    ]
    rng.shuffle(objectives)
    for objective in objectives:
        best = min(objective(i) for i in survivors)
        survivors = [i for i in survivors if objective(i) == best]
        if len(survivors) == 1:
            break
    return survivors[rng.randrange(len(survivors))]


def _truncate_to_cap(resolved: list[DiffUnit], tail: Sequence[DiffUnit], max_units: int) -> list[DiffUnit]:
    # Drop donated tail units (last first) until the child fits its cap.
    if len(resolved) <= max_units:
        return resolved
    tail_ids = [id(u) for u in tail]
    out = list(resolved)
    for uid in reversed(tail_ids):
        if len(out) <= max_units:
            break
        for idx in range(len(out) - 1, -1, -1):
            if id(out[idx]) == uid:
                del out[idx]
                break
    return out[:max_units]


def _make_child(
    head: Sequence[DiffUnit],
    tail: Sequence[DiffUnit],
    a: Genotype,
    b: Genotype,
    max_units: int,
    rng: random.Random,
) -> Genotype:
    combined = list(head) + list(tail)
    if not combined:
        # Nothing inherited; adopt one random parental unit instead.
        pool = list(a.units) + list(b.units)
        return Genotype((pool[rng.randrange(len(pool))],))
    resolved = resolve_overlaps(combined)
    resolved = _truncate_to_cap(resolved, tail, max_units)
    return Genotype(tuple(resolved))


def crossover(
    a: Genotype,
    b: Genotype,
    ctx: ReferenceContext,
    rng: random.Random,
    max_units: int = 6,
) -> tuple[Genotype, Genotype]:
    """One-point tail swap over the two unit lists.

    Split points are drawn independently (first for ``a``, then for
    ``b``); child one takes a's head and b's tail, child two the
    opposite.  Conflicts introduced by recombination are resolved and
    the unit cap re-imposed, so children are always applicable wherever
    their parents were.
    """
    i = rng.randint(0, len(a.units))
    j = rng.randint(0, len(b.units))
    child_one = _make_child(a.units[:i], b.units[j:], a, b, max_units, rng)
    child_two = _make_child(b.units[:j], a.units[i:], a, b, max_units, rng)
    return child_one, child_two


def _placed(unit: DiffUnit, pos: int) -> DiffUnit:
    return replace(unit, pos=pos)


def _fits(unit: DiffUnit, pos: int, ctx: ReferenceContext, others: Sequence[DiffUnit]) -> bool:
    n = len(ctx.sequence)
    if isinstance(unit, Insertion):
        if not 0 <= pos <= n:
            return False
        if pos < n and ctx.is_restricted(pos):
            return False
        span = (pos, pos)
    elif isinstance(unit, SNV):
        if not 0 <= pos < n:
            return False
        if ctx.is_restricted(pos):
            return False
        span = (pos, pos)
    else:
        if not 0 <= pos <= n - unit.size:
            return False
        span = (pos, pos + unit.size - 1)
        if ctx.blocks(*span):
            return False
    return all(not spans_overlap(span, o.span) for o in others)


def mutate_proximity(
    g: Genotype,
    ctx: ReferenceContext,
    rng: random.Random,
    sigma: float = 4.0,
) -> Genotype:
    """Relocate one unit near its current position.

    The new position is a rounded Gaussian draw around the old one; after
    a bounded number of rejected draws the unit falls back to a uniformly
    random valid position, and stays put only if none exists.  Kind and
    payload never change.
    """
    units = list(g.units)
    idx = rng.randrange(len(units))
    unit = units[idx]
    others = units[:idx] + units[idx + 1 :]
    for _ in range(PLACEMENT_ATTEMPTS):
        pos = round(rng.gauss(unit.pos, sigma))
        if _fits(unit, pos, ctx, others):
            units[idx] = _placed(unit, pos)
            return Genotype(tuple(units))
    limit = len(ctx.sequence) + 1 if isinstance(unit, Insertion) else len(ctx.sequence)
    valid = [p for p in range(limit) if _fits(unit, p, ctx, others)]
    if valid:
        units[idx] = _placed(unit, valid[rng.randrange(len(valid))])
    return Genotype(tuple(units))


def mutate_standard(
    g: Genotype,
    cfg: _grammar.GrammarConfig,
    ctx: ReferenceContext,
    rng: random.Random,
    domain: _grammar.PositionDomain | None = None,
) -> Genotype:
    """Add, remove, or replace exactly one unit.

    The move is drawn uniformly over whichever of the three applies;
    fresh units come from the grammar sampler and must not conflict with
    the survivors (bounded retries, unchanged genotype as last resort).
    """
    if domain is None:
        domain = _grammar.PositionDomain(ctx, cfg)
    units = list(g.units)
    moves = []
    if len(units) < cfg.max_diff_units:
        moves.append("add")
    if len(units) > 1:
        moves.append("remove")
    moves.append("replace")
    move = moves[rng.randrange(len(moves))]
    if move == "remove":
        del units[rng.randrange(len(units))]
        return Genotype(tuple(units))
    if move == "add":
        keep = units
    else:
        idx = rng.randrange(len(units))
        keep = units[:idx] + units[idx + 1 :]
    for _ in range(PLACEMENT_ATTEMPTS):
        kind = _grammar.draw_kind(cfg, domain, rng)
        unit = _grammar.sample_unit(kind, cfg, ctx, rng, domain=domain)
        if all(not spans_overlap(unit.span, o.span) for o in keep):
            return Genotype(tuple(keep + [unit]))
    return g
