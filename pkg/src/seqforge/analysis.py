"""Reporting helpers: dataset scoring, motif disruption, run artifacts.

Everything here is read-only over finished runs or exported datasets, so
it can be pointed at files produced by other machines or sessions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .archive import ArchiveConfig, import_dataset
from .diffs import NUCLEOTIDES, parse_genotype
from .engine import ComparisonReport, RunResult, TraceRow, run_metadata
from .oracle import Oracle, count_overlapping


def score_dataset(tsv_path: str | Path, config: ArchiveConfig | None = None) -> dict:
    """Import a dataset and report the archive metrics it reconstructs.

    Rows skipped during import (duplicates, rows beyond a cap) are part
    of the report so lossy reimports are visible.
    """
    archive, stats = import_dataset(tsv_path, config)
    report = {
        "path": str(tsv_path),
        "rows": stats.rows,
        "admitted": stats.admitted,
        "skipped": stats.rejected,
    }
    report.update(archive.metrics())
    return report


@dataclass(frozen=True)
class MotifSet:
    """Named exact motifs to watch for, e.g. ``{"GCATG": "GCATG"}``."""

    motifs: dict[str, str]

    def __post_init__(self) -> None:
        if not self.motifs:
            raise ValueError("motif set is empty")
        for name, motif in self.motifs.items():
            if not motif or any(ch not in NUCLEOTIDES for ch in motif):
                raise ValueError(f"bad motif {name!r}: {motif!r}")

    @classmethod
    def from_motifs(cls, motifs: Iterable[str]) -> "MotifSet":
        return cls({m: m for m in motifs})


@dataclass
class MotifChange:
    motif: str
    gained: int
    lost: int

    @property
    def events(self) -> int:
        return self.gained + self.lost


@dataclass
class DisruptionReport:
    dataset_size: int
    per_motif: dict[str, MotifChange]
    total_events: int
    frequency: float


def motif_disruption(
    sequences: Sequence[str],
    reference: str,
    motifs: MotifSet,
) -> DisruptionReport:
    """Count motif gains and losses of each sequence against the reference.

    A sequence's events for one motif are the absolute difference in
    overlapping occurrence counts; the report's frequency is total
    events divided by the dataset size.
    """
    ref_counts = {name: count_overlapping(m, reference) for name, m in motifs.motifs.items()}
    changes = {name: MotifChange(motif=m, gained=0, lost=0) for name, m in motifs.motifs.items()}
    for seq in sequences:
        for name, motif in motifs.motifs.items():
            delta = count_overlapping(motif, seq) - ref_counts[name]
            if delta > 0:
                changes[name].gained += delta
            elif delta < 0:
                changes[name].lost += -delta
    total = sum(c.events for c in changes.values())
    size = len(sequences)
    return DisruptionReport(
        dataset_size=size,
        per_motif=changes,
        total_events=total,
        frequency=total / size if size else 0.0,
    )


def disruption_to_dict(report: DisruptionReport) -> dict:
    return {
        "dataset_size": report.dataset_size,
        "total_events": report.total_events,
        "frequency": report.frequency,
        "per_motif": {
            name: {"motif": c.motif, "gained": c.gained, "lost": c.lost, "events": c.events}
            for name, c in report.per_motif.items()
        },
    }


TRACE_COLUMNS = (
    "generation",
    "archive_quality",
    "archive_size",
    "mean_fitness",
    "median_fitness",
    "mean_diff_weight",
    "elapsed_seconds",
    "oracle_calls",
)


def write_trace_tsv(trace: Sequence[TraceRow], path: str | Path) -> None:
    lines = ["\t".join(TRACE_COLUMNS)]
    for row in trace:
        lines.append(
            "\t".join(
                (
                    str(row.generation),
                    repr(row.archive_quality),
                    str(row.archive_size),
                    repr(row.mean_fitness),
                    repr(row.median_fitness),
                    repr(row.mean_diff_weight),
                    f"{row.elapsed_seconds:.3f}",
                    str(row.oracle_calls),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def archive_mean_diff_weight(result: RunResult) -> float:
    weights = [parse_genotype(r.genotype).weight for r in result.archive.records]
    return sum(weights) / len(weights) if weights else 0.0


def write_run_summary(result: RunResult, oracle: Oracle, path: str | Path) -> dict:
    """Summary JSON for one run: metadata plus a few derived statistics."""
    payload = run_metadata(result, oracle)
    payload["archive_mean_diff_weight"] = archive_mean_diff_weight(result)
    payload["operator_stats"] = {
        "selections": result.op_stats.selections,
        "crossovers": result.op_stats.crossovers,
        "clones": result.op_stats.clones,
        "standard_mutations": result.op_stats.standard_mutations,
        "proximity_mutations": result.op_stats.proximity_mutations,
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    return payload


def write_comparison(report: ComparisonReport, outdir: str | Path) -> dict:
    """Write per-run rows, per-name summaries, and quality curves.

    Produces ``runs.tsv``, ``summary.json``, and one ``trace_<name>_<seed>.tsv``
    per run under ``outdir``; returns the summary dict.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["\t".join(("name", "seed", "quality", "archive_size", "generations", "stop_reason", "wall_time_seconds", "error"))]
    for r in report.runs:
        lines.append(
            "\t".join(
                (
                    r.name,
                    str(r.seed),
                    repr(r.quality),
                    str(r.archive_size),
                    str(r.generations),
                    r.stop_reason,
                    f"{r.wall_time_seconds:.3f}",
                    r.error or "",
                )
            )
        )
    (outdir / "runs.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    summary = report.summary()
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    for (name, seed), trace in report.traces.items():
        write_trace_tsv(trace, outdir / f"trace_{name}_{seed}.tsv")
    return summary
