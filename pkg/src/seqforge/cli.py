"""Command-line entry points.

``generate`` runs one search and writes the dataset; ``compare`` sweeps
named configs over seeds; ``score`` recomputes metrics for an exported
dataset; ``motif-diff`` audits motif gains and losses against the
reference.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import click

from . import analysis
from .archive import ArchiveConfig, export_dataset, read_dataset_sequences
from .config import (
    ConfigError,
    FullConfig,
    OracleSpec,
    config_from_dict,
    deep_merge,
    load_config,
    make_oracle,
)
from .diffs import NUCLEOTIDES
from .engine import EvolutionConfig, compare_strategies, run, run_metadata
from .ingest import InputSpec, build_context, read_sequence_file
from .oracle import ToyOracleConfig


def _resolve_sequence(text: str) -> str:
    """A sequence argument is a file path if one exists, else inline DNA."""
    if Path(text).is_file():
        return read_sequence_file(text)
    seq = text.strip().upper()
    if seq and all(ch in NUCLEOTIDES for ch in seq):
        return seq
    raise click.BadParameter(f"{text!r} is neither a readable file nor an ACGT sequence")


def _parse_positions(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.replace(" ", "").split(",") if p != "")
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}")


def _parse_seeds(text: str) -> list[int]:
    """Seed lists: ``1,2,3`` or ranges like ``1..10`` (inclusive)."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise click.BadParameter("empty seed list")
    return out


def _parse_oracle_flag(text: str, fallback: OracleSpec) -> OracleSpec:
    if text == "toy":
        # Keep any motif table the config file set up.
        return OracleSpec(kind="toy", toy=fallback.toy)
    if text.startswith("subprocess:"):
        command = text[len("subprocess:") :].strip()
        if not command:
            raise click.BadParameter("subprocess oracle needs a command after the colon")
        return OracleSpec(kind="subprocess", command=command)
    raise click.BadParameter(f"expected 'toy' or 'subprocess:<command>', got {text!r}")


def _load_full_config(config_path: str | None) -> FullConfig:
    if config_path is None:
        return config_from_dict({})
    try:
        return load_config(config_path)
    except ConfigError as exc:
        raise click.ClickException(str(exc))


def _build_ctx(sequence: str, acceptors: str, donors: str, window: int | None):
    return build_context(
        InputSpec(
            sequence=sequence,
            acceptor_positions=_parse_positions(acceptors),
            donor_positions=_parse_positions(donors),
            window=window,
        )
    )


@click.group()
def main() -> None:
    """Evolve archives of perturbed DNA sequences with graded predictions."""


@main.command()
@click.option("--sequence", "sequence_arg", required=True, help="Reference sequence: file path (plain text or FASTA) or inline ACGT.")
@click.option("--acceptors", default="", help="Comma-separated acceptor positions (0-based).")
@click.option("--donors", default="", help="Comma-separated donor positions (0-based).")
@click.option("--window", type=int, default=None, help="Fit the reference to this length before searching.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON run configuration.")
@click.option("--strategy", type=click.Choice(["gggp", "rs"]), default=None, help="Override the configured search strategy.")
@click.option("--fitness", type=click.Choice(["bin-filler", "iad"]), default=None, help="Override the configured fitness function.")
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.option("--time-budget", type=float, default=None, help="Override the time budget in seconds.")
@click.option("--max-generations", type=int, default=None, help="Stop after this many generations.")
@click.option("--custom-mutation-rate", type=click.FloatRange(0.0, 1.0), default=None, help="Override the fraction of mutations using the proximity operator.")
@click.option("--oracle", "oracle_flag", default=None, help="'toy' or 'subprocess:<command>'.")
@click.option("--out", "outdir", required=True, type=click.Path(file_okay=False), help="Output directory.")
def generate(
    sequence_arg: str,
    acceptors: str,
    donors: str,
    window: int | None,
    config_path: str | None,
    strategy: str | None,
    fitness: str | None,
    seed: int | None,
    time_budget: float | None,
    max_generations: int | None,
    custom_mutation_rate: float | None,
    oracle_flag: str | None,
    outdir: str,
) -> None:
    """Run one search and export dataset, trace, and summary."""
    full = _load_full_config(config_path)
    cfg = full.evolution
    if strategy is not None:
        cfg = replace(cfg, strategy=strategy)
    if fitness is not None:
        cfg = replace(cfg, fitness_function=fitness)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if time_budget is not None:
        cfg = replace(cfg, stopping=replace(cfg.stopping, time_budget_seconds=time_budget))
    if max_generations is not None:
        cfg = replace(cfg, stopping=replace(cfg.stopping, max_generations=max_generations))
    if custom_mutation_rate is not None:
        cfg = replace(cfg, operators=replace(cfg.operators, custom_mutation_weight=custom_mutation_rate))
    oracle_spec = full.oracle
    if oracle_flag is not None:
        oracle_spec = _parse_oracle_flag(oracle_flag, full.oracle)

    ctx = _build_ctx(_resolve_sequence(sequence_arg), acceptors, donors, window)
    oracle = make_oracle(oracle_spec)
    try:
        result = run(ctx, cfg, oracle)
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        export_dataset(result.archive, out / "dataset.tsv", metadata=run_metadata(result, oracle))
        analysis.write_trace_tsv(result.trace, out / "trace.tsv")
        analysis.write_run_summary(result, oracle, out / "summary.json")
    finally:
        closer = getattr(oracle, "close", None)
        if closer is not None:
            closer()
    click.echo(
        f"{result.stop_reason}: archive {result.archive.total}/{cfg.archive.capacity}, "
        f"quality {result.archive.quality():.4f}, "
        f"{result.generations} generations, {result.oracle_calls} oracle calls "
        f"in {result.wall_time_seconds:.1f}s -> {outdir}"
    )


@main.command()
@click.option("--sequence", "sequence_arg", required=True, help="Reference sequence: file path or inline ACGT.")
@click.option("--acceptors", default="")
@click.option("--donors", default="")
@click.option("--window", type=int, default=None)
@click.option("--configs", "configs_path", required=True, type=click.Path(exists=True, dir_okay=False), help="JSON file: {'base': <config>, 'variants': {name: <overrides>}}.")
@click.option("--seeds", default="1..10", help="Seed list, e.g. '1,2,3' or '1..10'.")
@click.option("--oracle", "oracle_flag", default=None, help="'toy' or 'subprocess:<command>'; applies to every run.")
@click.option("--out", "outdir", required=True, type=click.Path(file_okay=False))
def compare(
    sequence_arg: str,
    acceptors: str,
    donors: str,
    window: int | None,
    configs_path: str,
    seeds: str,
    oracle_flag: str | None,
    outdir: str,
) -> None:
    """Run every variant over the seed list and summarise final quality."""
    try:
        spec = json.loads(Path(configs_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{configs_path}: {exc}")
    if not isinstance(spec, dict) or not isinstance(spec.get("variants"), dict) or not spec["variants"]:
        raise click.ClickException("configs file needs a non-empty 'variants' object")
    base = spec.get("base", {})
    variants: dict[str, EvolutionConfig] = {}
    oracle_spec: OracleSpec | None = None
    for name, overrides in spec["variants"].items():
        try:
            full = config_from_dict(deep_merge(base, overrides or {}))
        except ConfigError as exc:
            raise click.ClickException(f"variant {name!r}: {exc}")
        variants[name] = full.evolution
        if oracle_spec is None:
            oracle_spec = full.oracle
    if oracle_flag is not None:
        oracle_spec = _parse_oracle_flag(oracle_flag, oracle_spec)

    ctx = _build_ctx(_resolve_sequence(sequence_arg), acceptors, donors, window)
    seed_list = _parse_seeds(seeds)
    try:
        report = compare_strategies(ctx, variants, seed_list, lambda: make_oracle(oracle_spec))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    summary = analysis.write_comparison(report, outdir)
    for name, entry in summary.items():
        if "median_quality" in entry:
            q1, q3 = entry["iqr"]
            click.echo(
                f"{name}: median quality {entry['median_quality']:.4f} "
                f"(IQR {q1:.4f}..{q3:.4f}, {entry['runs']} runs, {entry['failed']} failed)"
            )
        else:
            click.echo(f"{name}: no successful runs ({entry['failed']} failed)")


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset TSV to score.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON config supplying the archive section.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Also write the report as JSON.")
def score(dataset: str, config_path: str | None, out_path: str | None) -> None:
    """Recompute archive metrics for an exported dataset."""
    archive_cfg: ArchiveConfig | None = None
    if config_path is not None:
        archive_cfg = _load_full_config(config_path).evolution.archive
    try:
        report = analysis.score_dataset(dataset, archive_cfg)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


def _load_motif_file(path: str) -> analysis.MotifSet:
    motifs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        motif = line.strip().upper()
        if motif:
            motifs.append(motif)
    if not motifs:
        raise click.ClickException(f"{path}: no motifs")
    return analysis.MotifSet.from_motifs(motifs)


@main.command("motif-diff")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset TSV.")
@click.option("--reference", "reference_arg", required=True, help="Reference sequence: file path or inline ACGT.")
@click.option("--motifs", "motifs_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Motif file, one motif per line; defaults to the toy oracle's table.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def motif_diff(dataset: str, reference_arg: str, motifs_path: str | None, out_path: str | None) -> None:
    """Report motif gains and losses of dataset sequences vs the reference."""
    reference = _resolve_sequence(reference_arg)
    if motifs_path:
        motifs = _load_motif_file(motifs_path)
    else:
        motifs = analysis.MotifSet.from_motifs(ToyOracleConfig().motif_weights)
    try:
        sequences = read_dataset_sequences(dataset)
        report = analysis.disruption_to_dict(analysis.motif_disruption(sequences, reference, motifs))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


if __name__ == "__main__":
    main(prog_name="seqforge")
