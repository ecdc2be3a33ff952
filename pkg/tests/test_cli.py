from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from seqforge.archive import DATASET_COLUMNS
from seqforge.cli import main
from test_oracle import WORKER_OK, worker_command

REF = "TACGGAGTCCATTGACGTTACGGAGTCAGTTGACCGTAAGCTGTACGGAGTCCATTGACG"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps(
            {
                "evolution": {
                    "population_size": 20,
                    "max_generations": 2,
                    "time_budget_seconds": 60,
                },
                "archive": {"capacity": 100, "bin_count": 10},
            }
        )
    )
    return str(path)


def run_generate(runner, tmp_path, small_config, *extra, name="out"):
    outdir = tmp_path / name
    result = runner.invoke(
        main,
        [
            "generate",
            "--sequence",
            REF,
            "--config",
            small_config,
            "--out",
            str(outdir),
            *extra,
        ],
    )
    assert result.exit_code == 0, result.output
    return outdir, result


# -- generate ---------------------------------------------------------


def test_generate_writes_artifacts(runner, tmp_path, small_config):
    outdir, result = run_generate(runner, tmp_path, small_config)
    dataset = outdir / "dataset.tsv"
    meta = outdir / "dataset.meta.json"
    assert dataset.is_file() and meta.is_file()
    assert (outdir / "trace.tsv").is_file()
    assert (outdir / "summary.json").is_file()

    lines = dataset.read_text().splitlines()
    assert lines[0].split("\t") == list(DATASET_COLUMNS)
    payload = json.loads(meta.read_text())
    assert payload["metrics"]["size"] == len(lines) - 1
    assert payload["stop_reason"] == "max_generations"
    assert "max_generations" in result.output
    assert "quality" in result.output


def test_generate_is_deterministic(runner, tmp_path, small_config):
    a, _ = run_generate(runner, tmp_path, small_config, "--seed", "5", name="a")
    b, _ = run_generate(runner, tmp_path, small_config, "--seed", "5", name="b")
    assert (a / "dataset.tsv").read_bytes() == (b / "dataset.tsv").read_bytes()
    meta_a = json.loads((a / "dataset.meta.json").read_text())
    meta_b = json.loads((b / "dataset.meta.json").read_text())
    meta_a.pop("timings")
    meta_b.pop("timings")
    assert meta_a == meta_b


def test_generate_seed_and_strategy_overrides(runner, tmp_path, small_config):
    outdir, _ = run_generate(
        runner, tmp_path, small_config, "--seed", "9", "--strategy", "rs"
    )
    summary = json.loads((outdir / "summary.json").read_text())
    assert summary["seed"] == 9
    assert summary["config"]["strategy"] == "rs"
    assert all(v == 0 for v in summary["operator_stats"].values())


def test_generate_custom_mutation_rate_zero(runner, tmp_path, small_config):
    outdir, _ = run_generate(
        runner, tmp_path, small_config, "--custom-mutation-rate", "0.0"
    )
    summary = json.loads((outdir / "summary.json").read_text())
    assert summary["operator_stats"]["proximity_mutations"] == 0


def test_generate_from_fasta_with_sites(runner, tmp_path, small_config):
    fasta = tmp_path / "ref.fa"
    fasta.write_text(">ref\n" + REF + "\n")
    outdir = tmp_path / "fasta_out"
    result = runner.invoke(
        main,
        [
            "generate",
            "--sequence",
            str(fasta),
            "--acceptors",
            "30",
            "--donors",
            "45",
            "--config",
            small_config,
            "--out",
            str(outdir),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (outdir / "dataset.tsv").is_file()


def test_generate_with_subprocess_oracle(runner, tmp_path, small_config):
    cmd = worker_command(tmp_path, WORKER_OK, "worker.py")
    outdir, _ = run_generate(
        runner, tmp_path, small_config, "--oracle", f"subprocess:{cmd}"
    )
    summary = json.loads((outdir / "summary.json").read_text())
    assert summary["oracle"]["kind"] == "subprocess"
    assert json.loads((outdir / "dataset.meta.json").read_text())["metrics"]["size"] > 0


def test_generate_rejects_bad_sequence(runner, tmp_path, small_config):
    result = runner.invoke(
        main,
        ["generate", "--sequence", "ACGTX", "--config", small_config, "--out", str(tmp_path / "x")],
    )
    assert result.exit_code != 0
    assert "neither" in result.output


def test_generate_rejects_bad_oracle_flag(runner, tmp_path, small_config):
    result = runner.invoke(
        main,
        [
            "generate",
            "--sequence",
            REF,
            "--config",
            small_config,
            "--oracle",
            "rest:http://x",
            "--out",
            str(tmp_path / "x"),
        ],
    )
    assert result.exit_code != 0


# -- compare ----------------------------------------------------------


def test_compare_writes_reports(runner, tmp_path):
    configs = tmp_path / "configs.json"
    configs.write_text(
        json.dumps(
            {
                "base": {
                    "evolution": {
                        "population_size": 12,
                        "max_generations": 2,
                        "time_budget_seconds": 60,
                    },
                    "archive": {"capacity": 100, "bin_count": 10},
                },
                "variants": {
                    "gggp": {},
                    "random": {"evolution": {"strategy": "rs"}},
                },
            }
        )
    )
    outdir = tmp_path / "cmp"
    result = runner.invoke(
        main,
        [
            "compare",
            "--sequence",
            REF,
            "--configs",
            str(configs),
            "--seeds",
            "1..2",
            "--out",
            str(outdir),
        ],
    )
    assert result.exit_code == 0, result.output
    runs = (outdir / "runs.tsv").read_text().splitlines()
    assert len(runs) == 1 + 4
    summary = json.loads((outdir / "summary.json").read_text())
    assert set(summary) == {"gggp", "random"}
    for name in ("gggp", "random"):
        assert summary[name]["runs"] == 2
        assert f"{name}: median quality" in result.output
    for name in ("gggp", "random"):
        for seed in (1, 2):
            assert (outdir / f"trace_{name}_{seed}.tsv").is_file()


def test_compare_requires_variants(runner, tmp_path):
    configs = tmp_path / "configs.json"
    configs.write_text(json.dumps({"base": {}}))
    result = runner.invoke(
        main,
        ["compare", "--sequence", REF, "--configs", str(configs), "--out", str(tmp_path / "c")],
    )
    assert result.exit_code != 0
    assert "variants" in result.output


def test_compare_rejects_empty_seed_list(runner, tmp_path):
    configs = tmp_path / "configs.json"
    configs.write_text(json.dumps({"variants": {"a": {}}}))
    result = runner.invoke(
        main,
        [
            "compare",
            "--sequence",
            REF,
            "--configs",
            str(configs),
            "--seeds",
            ",",
            "--out",
            str(tmp_path / "c"),
        ],
    )
    assert result.exit_code != 0


# -- score ------------------------------------------------------------


def test_score_roundtrip_matches_run_quality(runner, tmp_path, small_config):
    outdir, _ = run_generate(runner, tmp_path, small_config, name="for_score")
    report_path = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "score",
            "--dataset",
            str(outdir / "dataset.tsv"),
            "--config",
            small_config,
            "--out",
            str(report_path),
        ],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(report_path.read_text())
    summary = json.loads((outdir / "summary.json").read_text())
    assert report["quality"] == summary["metrics"]["quality"]
    assert report["size"] == summary["metrics"]["size"]
    assert json.loads(result.output) == report


def test_score_under_wrong_binning_fails_loudly(runner, tmp_path, small_config):
    outdir, _ = run_generate(runner, tmp_path, small_config, name="for_bad_score")
    # Default archive config has 40 bins; the dataset was binned with 10.
    result = runner.invoke(main, ["score", "--dataset", str(outdir / "dataset.tsv")])
    assert result.exit_code != 0
    assert "line" in result.output


# -- motif-diff -------------------------------------------------------


def write_plain_dataset(path: Path, sequences: list[str]) -> None:
    lines = ["\t".join(DATASET_COLUMNS)]
    for i, seq in enumerate(sequences):
        lines.append(f"{i}\tSNV(0,A)\t{seq}\t0.5\t20\t0\t1")
    path.write_text("\n".join(lines) + "\n")


def test_motif_diff_with_motif_file(runner, tmp_path):
    dataset = tmp_path / "d.tsv"
    write_plain_dataset(dataset, ["GCATGAAAA", "AAAAAAAAA"])
    motif_file = tmp_path / "motifs.txt"
    motif_file.write_text("gcatg\n\nTTTCT\n")
    out_path = tmp_path / "diff.json"
    result = runner.invoke(
        main,
        [
            "motif-diff",
            "--dataset",
            str(dataset),
            "--reference",
            "AAAAAAAAA",
            "--motifs",
            str(motif_file),
            "--out",
            str(out_path),
        ],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(out_path.read_text())
    assert report["dataset_size"] == 2
    assert report["per_motif"]["GCATG"]["gained"] == 1
    assert report["per_motif"]["TTTCT"] == {
        "motif": "TTTCT",
        "gained": 0,
        "lost": 0,
        "events": 0,
    }
    assert report["frequency"] == 0.5


def test_motif_diff_defaults_to_toy_table(runner, tmp_path):
    dataset = tmp_path / "d.tsv"
    write_plain_dataset(dataset, ["GCATGAAAA"])
    result = runner.invoke(
        main,
        ["motif-diff", "--dataset", str(dataset), "--reference", "AAAAAAAAA"],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert set(report["per_motif"]) == {"GCATG", "TTTCT", "GAAGAA", "CTCTCT"}


def test_motif_diff_rejects_empty_motif_file(runner, tmp_path):
    dataset = tmp_path / "d.tsv"
    write_plain_dataset(dataset, ["ACGT"])
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    result = runner.invoke(
        main,
        [
            "motif-diff",
            "--dataset",
            str(dataset),
            "--reference",
            "ACGT",
            "--motifs",
            str(empty),
        ],
    )
    assert result.exit_code != 0
    assert "no motifs" in result.output
