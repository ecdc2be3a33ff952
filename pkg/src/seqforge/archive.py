"""Prediction-binned archive of unique perturbed sequences.

The archive spreads admitted sequences across equal-width prediction
bins with a shared per-bin cap, deduplicates on the phenotype sequence,
and scores its own state with a blend of fill, entropy over bins,
within-bin entropy, and the fraction of well-populated bins.  That
quality score is what the search engine reports and what experiment
comparisons rank.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .diffs import NUCLEOTIDES, GenotypeParseError, parse_genotype


class OutOfRangeError(ValueError):
    """Prediction outside the closed unit interval."""


class SchemaError(ValueError):
    """A dataset row that cannot be ingested; carries its line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def bin_index(prediction: float, n_bins: int) -> int:
    """Map a prediction in [0, 1] to one of ``n_bins`` equal bins.

    The top edge folds into the last bin so 1.0 is admissible.
    """
    if not 0.0 <= prediction <= 1.0:
        raise OutOfRangeError(f"prediction {prediction!r} outside [0, 1]")
    return min(int(prediction * n_bins), n_bins - 1)


def shannon_diversity(counts: Sequence[int]) -> float:
    """Shannon entropy of the count distribution, normalised to [0, 1].

    An empty distribution scores 0; a single bin cannot carry entropy and
    also scores 0.
    """
    total = sum(counts)
    if total <= 0 or len(counts) <= 1:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log(p)
    return h / math.log(len(counts))


@dataclass(frozen=True)
class ArchiveConfig:
    capacity: int = 5000
    bin_count: int = 40
    low_count_threshold: int = 10
    sub_bins_per_bin: int = 10
    size_weight: float = 0.3
    diversity_weight: float = 0.3
    intra_bin_weight: float = 0.2
    low_count_weight: float = 0.2

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.bin_count < 1:
            raise ValueError("bin_count must be >= 1")
        if self.low_count_threshold < 0:
            raise ValueError("low_count_threshold must be >= 0")
        if self.sub_bins_per_bin < 1:
            raise ValueError("sub_bins_per_bin must be >= 1")

    @property
    def bin_width(self) -> float:
        return 1.0 / self.bin_count

    @property
    def per_bin_cap(self) -> float:
        # Deliberately fractional: a bin is open while count < cap.
        return self.capacity / self.bin_count


@dataclass(frozen=True)
class ArchiveRecord:
    sequence: str
    genotype: str
    prediction: float
    bin: int
    generation: int
    seed: int


@dataclass(frozen=True)
class AdmitResult:
    admitted: bool
    reason: Optional[str] = None


REJECT_FITNESS = "non_positive_fitness"
REJECT_DUPLICATE = "duplicate"
REJECT_BIN_FULL = "bin_full"
REJECT_ARCHIVE_FULL = "archive_full"


class Archive:
    """Mutable store; all metric readers leave state untouched."""

    def __init__(self, config: ArchiveConfig | None = None):
        self.config = config or ArchiveConfig()
        self.records: list[ArchiveRecord] = []
        self.bin_counts = [0] * self.config.bin_count
        self.sub_counts = [
            [0] * self.config.sub_bins_per_bin for _ in range(self.config.bin_count)
        ]
        self._sequences: set[str] = set()

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def is_full(self) -> bool:
        return self.total >= self.config.capacity

    def contains_sequence(self, sequence: str) -> bool:
        return sequence in self._sequences

    def make_record(
        self,
        sequence: str,
        genotype: str,
        prediction: float,
        generation: int,
        seed: int,
    ) -> ArchiveRecord:
        return ArchiveRecord(
            sequence=sequence,
            genotype=genotype,
            prediction=prediction,
            bin=bin_index(prediction, self.config.bin_count),
            generation=generation,
            seed=seed,
        )

    def _sub_index(self, prediction: float, b: int) -> int:
        fine = bin_index(prediction, self.config.bin_count * self.config.sub_bins_per_bin)
        sub = fine - b * self.config.sub_bins_per_bin
        return min(max(sub, 0), self.config.sub_bins_per_bin - 1)

    def insert(self, record: ArchiveRecord) -> AdmitResult:
        """Admission without a fitness gate: dedup and caps only."""
        if record.sequence in self._sequences:
            return AdmitResult(False, REJECT_DUPLICATE)
        if self.bin_counts[record.bin] >= self.config.per_bin_cap:
            return AdmitResult(False, REJECT_BIN_FULL)
        if self.total >= self.config.capacity:
            return AdmitResult(False, REJECT_ARCHIVE_FULL)
        self.records.append(record)
        self.bin_counts[record.bin] += 1
        self.sub_counts[record.bin][self._sub_index(record.prediction, record.bin)] += 1
        self._sequences.add(record.sequence)
        return AdmitResult(True)

    def try_admit(
        self,
        record: ArchiveRecord,
        fitness_value: float,
        bootstrap: bool = False,
    ) -> AdmitResult:
        """Gated admission: requires strictly positive fitness.

        ``bootstrap`` waives the gate while the archive is empty, which
        lets diversity-gain fitness (always 0 on an empty archive) seed
        its first record.
        """
        if fitness_value <= 0.0 and not (bootstrap and self.total == 0):
            return AdmitResult(False, REJECT_FITNESS)
        return self.insert(record)

    # -- metrics ------------------------------------------------------

    def shannon(self) -> float:
        return shannon_diversity(self.bin_counts)

    def intra_bin_diversity(self) -> float:
        """Mean normalised entropy over each bin's sub-bins.

        Empty bins contribute 0, so sparse archives are penalised twice:
        once here and once in the bin-level entropy.
        """
        per_bin = [shannon_diversity(sub) for sub in self.sub_counts]
        return sum(per_bin) / self.config.bin_count

    def low_count_fraction(self) -> float:
        t = self.config.low_count_threshold
        ok = sum(1 for c in self.bin_counts if c >= t)
        return ok / self.config.bin_count

    def quality(self) -> float:
        cfg = self.config
        fill = min(self.total / cfg.capacity, 1.0)
        return (
            cfg.size_weight * fill
            + cfg.diversity_weight * self.shannon()
            + cfg.intra_bin_weight * self.intra_bin_diversity()
            + cfg.low_count_weight * self.low_count_fraction()
        )

    def metrics(self) -> dict:
        return {
            "size": self.total,
            "fill": min(self.total / self.config.capacity, 1.0),
            "bin_diversity": self.shannon(),
            "intra_bin_diversity": self.intra_bin_diversity(),
            "low_count_fraction": self.low_count_fraction(),
            "quality": self.quality(),
            "bin_counts": list(self.bin_counts),
        }


# -- dataset serialisation -------------------------------------------

DATASET_COLUMNS = ("id", "genotype", "sequence", "prediction", "bin", "generation", "seed")


def _default_meta_path(tsv_path: Path) -> Path:
    return tsv_path.with_suffix(".meta.json")


def export_dataset(
    archive: Archive,
    tsv_path: str | Path,
    metadata: Optional[Mapping] = None,
    meta_path: str | Path | None = None,
) -> Path:
    """Write the archive as TSV plus a JSON sidecar; returns the sidecar path.

    Predictions are written with ``repr`` so a reimport reproduces the
    exact floats; given identical archives the TSV bytes are identical.
    """
    tsv_path = Path(tsv_path)
    lines = ["\t".join(DATASET_COLUMNS)]
    for i, r in enumerate(archive.records):
        lines.append(
            "\t".join(
                (
                    str(i),
                    r.genotype,
                    r.sequence,
                    repr(r.prediction),
                    str(r.bin),
                    str(r.generation),
                    str(r.seed),
                )
            )
        )
    tsv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    meta_path = Path(meta_path) if meta_path else _default_meta_path(tsv_path)
    payload = dict(metadata or {})
    payload.setdefault("metrics", archive.metrics())
    payload.setdefault("archive_config", {
        "capacity": archive.config.capacity,
        "bin_count": archive.config.bin_count,
        "low_count_threshold": archive.config.low_count_threshold,
        "sub_bins_per_bin": archive.config.sub_bins_per_bin,
    })
    meta_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    return meta_path


@dataclass
class ImportStats:
    rows: int = 0
    admitted: int = 0
    duplicates: int = 0
    bin_full: int = 0
    archive_full: int = 0
    rejected: dict = field(default_factory=dict)


def import_dataset(tsv_path: str | Path, config: ArchiveConfig | None = None) -> tuple[Archive, ImportStats]:
    """Rebuild an archive from a dataset TSV.

    Malformed rows raise :class:`SchemaError` with the offending line
    number; duplicates and rows beyond the caps are skipped and counted
    so a truncated reimport still satisfies every archive invariant.
    """
    archive = Archive(config)
    stats = ImportStats()
    path = Path(tsv_path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split("\t") != list(DATASET_COLUMNS):
            raise SchemaError(1, f"bad header: {header!r}")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != len(DATASET_COLUMNS):
                raise SchemaError(lineno, f"expected {len(DATASET_COLUMNS)} fields, got {len(fields)}")
            _id, genotype_text, sequence, prediction_text, bin_text, gen_text, seed_text = fields
            try:
                parse_genotype(genotype_text)
            except GenotypeParseError as exc:
                raise SchemaError(lineno, str(exc)) from exc
            if not sequence or any(ch not in NUCLEOTIDES for ch in sequence):
                raise SchemaError(lineno, f"bad sequence: {sequence!r}")
            try:
                prediction = float(prediction_text)
            except ValueError as exc:
                raise SchemaError(lineno, f"bad prediction: {prediction_text!r}") from exc
            try:
                expected_bin = bin_index(prediction, archive.config.bin_count)
            except OutOfRangeError as exc:
                raise SchemaError(lineno, str(exc)) from exc
            try:
                b = int(bin_text)
                generation = int(gen_text)
                seed = int(seed_text)
            except ValueError as exc:
                raise SchemaError(lineno, f"bad integer field: {exc}") from exc
            if b != expected_bin:
                raise SchemaError(lineno, f"bin {b} does not match prediction (expected {expected_bin})")
            stats.rows += 1
            result = archive.insert(
                ArchiveRecord(
                    sequence=sequence,
                    genotype=genotype_text,
                    prediction=prediction,
                    bin=b,
                    generation=generation,
                    seed=seed,
                )
            )
            if result.admitted:
                stats.admitted += 1
            elif result.reason == REJECT_DUPLICATE:
                stats.duplicates += 1
            elif result.reason == REJECT_BIN_FULL:
                stats.bin_full += 1
            elif result.reason == REJECT_ARCHIVE_FULL:
                stats.archive_full += 1
    stats.rejected = {
        "duplicate": stats.duplicates,
        "bin_full": stats.bin_full,
        "archive_full": stats.archive_full,
    }
    return archive, stats


def read_dataset_sequences(tsv_path: str | Path) -> list[str]:
    """Sequence column of a dataset TSV, in file order.

    Only checks what it needs (header shape and the sequence field), so
    datasets written under any bin configuration can be read.
    """
    path = Path(tsv_path)
    sequences: list[str] = []
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if "sequence" not in header:
            raise SchemaError(1, "no sequence column")
        col = header.index("sequence")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if col >= len(fields):
                raise SchemaError(lineno, "row too short")
            seq = fields[col]
            if not seq or any(ch not in NUCLEOTIDES for ch in seq):
                raise SchemaError(lineno, f"bad sequence: {seq!r}")
            sequences.append(seq)
    return sequences
