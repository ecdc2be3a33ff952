"""Perturbation diffs over a reference DNA sequence.

A genotype is a small set of edit units (single-nucleotide variants,
insertions, deletions) expressed in coordinates of the *original*
reference.  Applying a genotype replays its units left to right while
tracking the running length offset, so unit positions never need to be
rewritten after earlier edits.

Splice-site neighbourhoods can be declared off limits through the
reference context; validation and application both refuse units that
touch a restricted region.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

NUCLEOTIDES = "ACGT"


class InvalidGenotype(ValueError):
    """Raised when a genotype cannot be applied to its reference."""


class GenotypeParseError(ValueError):
    """Raised for malformed genotype text."""


def _check_nucs(nucs: str, what: str) -> None:
    if not nucs:
        raise ValueError(f"{what}: empty nucleotide string")
    for ch in nucs:
        if ch not in NUCLEOTIDES:
            raise ValueError(f"{what}: invalid nucleotide {ch!r}")


@dataclass(frozen=True)
class SNV:
    """Replace the base at ``pos`` with ``nuc``."""

    pos: int
    nuc: str

    def __post_init__(self) -> None:
        if self.pos < 0:
            raise ValueError(f"SNV position must be >= 0, got {self.pos}")
        if len(self.nuc) != 1:
            raise ValueError("SNV carries exactly one nucleotide")
        _check_nucs(self.nuc, "SNV")

    @property
    def span(self) -> tuple[int, int]:
        return (self.pos, self.pos)

    @property
    def weight(self) -> int:
        return 1


@dataclass(frozen=True)
class Insertion:
    """Insert ``nucs`` immediately before ``pos`` (``pos == len`` appends)."""

    pos: int
    nucs: str

    def __post_init__(self) -> None:
        if self.pos < 0:
            raise ValueError(f"insertion position must be >= 0, got {self.pos}")
        _check_nucs(self.nucs, "insertion")

    @property
    def span(self) -> tuple[int, int]:
        # Anchored at the insertion point only; inserted bases occupy no
        # reference coordinates.
        return (self.pos, self.pos)

    @property
    def weight(self) -> int:
        return len(self.nucs)


@dataclass(frozen=True)
class Deletion:
    """Delete ``size`` bases starting at ``pos``."""

    pos: int
    size: int

    def __post_init__(self) -> None:
        if self.pos < 0:
            raise ValueError(f"deletion position must be >= 0, got {self.pos}")
        if self.size < 1:
            raise ValueError(f"deletion size must be >= 1, got {self.size}")

    @property
    def span(self) -> tuple[int, int]:
        return (self.pos, self.pos + self.size - 1)

    @property
    def weight(self) -> int:
        return self.size


DiffUnit = Union[SNV, Insertion, Deletion]


def spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _unit_sort_key(unit: DiffUnit) -> tuple[int, int]:
    return unit.span


@dataclass(frozen=True)
class Genotype:
    """An ordered, non-empty collection of diff units.

    Units are kept sorted by span so text form and application order are
    canonical.  Structural soundness against a concrete reference (range,
    overlap, restricted regions) is checked by :func:`validate`.
    """

    units: tuple[DiffUnit, ...]

    def __post_init__(self) -> None:
        if not self.units:
            raise ValueError("genotype needs at least one diff unit")
        object.__setattr__(self, "units", tuple(sorted(self.units, key=_unit_sort_key)))

    def __len__(self) -> int:
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    @property
    def weight(self) -> int:
        return diff_weight(self)


def _merge_regions(regions: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    ordered = sorted(regions)
    merged: list[tuple[int, int]] = []
    for lo, hi in ordered:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class ReferenceContext:
    """A reference sequence plus the regions edits must not touch.

    ``restricted_regions`` are inclusive, merged, ascending intervals in
    reference coordinates.
    """

    sequence: str
    acceptor_positions: tuple[int, ...] = ()
    donor_positions: tuple[int, ...] = ()
    restricted_regions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        _check_nucs(self.sequence, "reference")

    @classmethod
    def build(
        cls,
        sequence: str,
        acceptor_positions: Sequence[int] = (),
        donor_positions: Sequence[int] = (),
        acceptor_window: tuple[int, int] = (-10, 2),
        donor_window: tuple[int, int] = (-3, 6),
    ) -> "ReferenceContext":
        """Derive restricted regions from splice-site coordinates.

        Each acceptor contributes [pos + acceptor_window[0], pos + acceptor_window[1]]
        and each donor [pos + donor_window[0], pos + donor_window[1]], clipped
        to the sequence and merged.
        """
        n = len(sequence)
        regions = []
        for pos in acceptor_positions:
            regions.append((pos + acceptor_window[0], pos + acceptor_window[1]))
        for pos in donor_positions:
            regions.append((pos + donor_window[0], pos + donor_window[1]))
        clipped = []
        for lo, hi in regions:
            lo, hi = max(lo, 0), min(hi, n - 1)
            if lo <= hi:
                clipped.append((lo, hi))
        return cls(
            sequence=sequence,
            acceptor_positions=tuple(acceptor_positions),
            donor_positions=tuple(donor_positions),
            restricted_regions=_merge_regions(clipped),
        )

    def is_restricted(self, pos: int) -> bool:
        return self.blocks(pos, pos)

    def blocks(self, start: int, end: int) -> bool:
        """True if [start, end] intersects any restricted region."""
        starts = [lo for lo, _ in self.restricted_regions]
        i = bisect_right(starts, end) - 1
        return i >= 0 and self.restricted_regions[i][1] >= start

    def free_run_length(self, pos: int) -> int:
        """Unrestricted bases available starting at ``pos`` before the next
        restricted region or the sequence end."""
        starts = [lo for lo, _ in self.restricted_regions]
        i = bisect_right(starts, pos)
        bound = self.restricted_regions[i][0] if i < len(self.restricted_regions) else len(self.sequence)
        return bound - pos


def diff_weight(genotype: Genotype) -> int:
    """Total edit weight: 1 per SNV, inserted length, deleted length."""
    return sum(u.weight for u in genotype.units)


def _affected_span(unit: DiffUnit) -> tuple[int, int]:
    return unit.span


def validate(genotype: Genotype, ctx: ReferenceContext, max_units: int | None = 6) -> list[str]:
    """Collect invariant violations; an empty list means applicable.

    ``max_units=None`` skips the unit-count check (used internally by
    :func:`apply`, whose cap belongs to grammar configuration).
    """
    n = len(ctx.sequence)
    problems: list[str] = []
    if max_units is not None and len(genotype.units) > max_units:
        problems.append(f"unit count {len(genotype.units)} exceeds cap {max_units}")
    for unit in genotype.units:
        if isinstance(unit, SNV):
            if unit.pos >= n:
                problems.append(f"SNV position {unit.pos} outside reference of length {n}")
                continue
        elif isinstance(unit, Insertion):
            if unit.pos > n:
                problems.append(f"insertion position {unit.pos} outside reference of length {n}")
                continue
        else:
            if unit.pos >= n or unit.pos + unit.size > n:
                problems.append(
                    f"deletion [{unit.pos}, {unit.pos + unit.size - 1}] outside reference of length {n}"
                )
                continue
        lo, hi = _affected_span(unit)
        if isinstance(unit, Insertion) and unit.pos == n:
            continue  # appending touches no reference base
        if ctx.blocks(lo, hi):
            problems.append(f"{_format_unit(unit)} touches a restricted region")
    units = genotype.units
    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            if spans_overlap(units[i].span, units[j].span):
                problems.append(f"{_format_unit(units[i])} overlaps {_format_unit(units[j])}")
    return problems


def apply(genotype: Genotype, ctx: ReferenceContext) -> "Phenotype":
    """Produce the perturbed sequence.

    Units are replayed in ascending reference position; ``offset`` tracks
    how much earlier edits have shifted downstream coordinates.
    """
    problems = validate(genotype, ctx, max_units=None)
    if problems:
        raise InvalidGenotype("; ".join(problems))
    seq = ctx.sequence
    offset = 0
    for unit in genotype.units:
        p = unit.pos + offset
        if isinstance(unit, SNV):
            seq = seq[:p] + unit.nuc + seq[p + 1 :]
        elif isinstance(unit, Insertion):
            seq = seq[:p] + unit.nucs + seq[p:]
            offset += len(unit.nucs)
        else:
            seq = seq[:p] + seq[p + unit.size :]
            offset -= unit.size
    return Phenotype(sequence=seq, genotype_weight=diff_weight(genotype))


@dataclass(frozen=True)
class Phenotype:
    sequence: str
    genotype_weight: int


def _interval_length(unit: DiffUnit) -> int:
    lo, hi = unit.span
    return hi - lo + 1


def _kind_rank(unit: DiffUnit) -> int:
    # Indels win ties against SNVs.
    return 1 if isinstance(unit, SNV) else 0


def resolve_overlaps(units: Sequence[DiffUnit]) -> list[DiffUnit]:
    """Reduce a unit list to a non-overlapping subset.

    Units are considered largest interval first (indels before SNVs on
    equal length, then input order); each survivor blocks everything that
    overlaps it.  Returns survivors ordered by span then input order.
    """
    order = sorted(
        range(len(units)),
        key=lambda i: (-_interval_length(units[i]), _kind_rank(units[i]), i),
    )
    kept: list[int] = []
    for i in order:
        if all(not spans_overlap(units[i].span, units[j].span) for j in kept):
            kept.append(i)
    kept.sort(key=lambda i: (units[i].span, i))
    return [units[i] for i in kept]


def _format_unit(unit: DiffUnit) -> str:
    if isinstance(unit, SNV):
        return f"SNV({unit.pos},{unit.nuc})"
    if isinstance(unit, Insertion):
        return f"Ins({unit.pos},{unit.nucs})"
    return f"Del({unit.pos},{unit.size})"


def format_genotype(genotype: Genotype) -> str:
    """Canonical text form, e.g. ``SNV(1,A);Ins(2,CG);Del(7,2)``."""
    return ";".join(_format_unit(u) for u in genotype.units)


_UNIT_RE = re.compile(r"^(SNV|Ins|Del)\((\d+),([A-Z0-9]+)\)$")


def parse_genotype(text: str) -> Genotype:
    """Inverse of :func:`format_genotype`; round-trips exactly."""
    if not text:
        raise GenotypeParseError("empty genotype text")
    units: list[DiffUnit] = []
    for part in text.split(";"):
        m = _UNIT_RE.match(part.strip())
        if not m:
            raise GenotypeParseError(f"malformed diff unit: {part!r}")
        kind, pos_text, payload = m.groups()
        pos = int(pos_text)
        try:
            if kind == "SNV":
                units.append(SNV(pos, payload))
            elif kind == "Ins":
                units.append(Insertion(pos, payload))
            else:
                if not payload.isdigit():
                    raise GenotypeParseError(f"deletion size must be an integer: {part!r}")
                units.append(Deletion(pos, int(payload)))
        except ValueError as exc:
            raise GenotypeParseError(f"bad diff unit {part!r}: {exc}") from exc
    return Genotype(tuple(units))
