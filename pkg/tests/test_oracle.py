from __future__ import annotations

import math
import random
import sys
import textwrap

import pytest

from seqforge.oracle import (
    BadAlphabet,
    OracleProtocolError,
    OracleRequest,
    OracleScore,
    ScoreCache,
    SubprocessOracle,
    ToyOracle,
    ToyOracleConfig,
    batch_eval,
    count_overlapping,
    logistic,
    toy_score,
)
from support import random_sequence


# -- motif counting ---------------------------------------------------


def test_count_overlapping_examples():
    assert count_overlapping("GCATG", "GCATGGCATG") == 2
    # Overlaps count: TTTCT at offsets 0 and 4.
    assert count_overlapping("TTTCT", "TTTCTTTCT") == 2
    assert count_overlapping("AA", "AAAA") == 3
    assert count_overlapping("GCATG", "ACGT") == 0


def test_count_overlapping_rejects_empty_motif():
    with pytest.raises(ValueError):
        count_overlapping("", "ACGT")


# -- logistic ---------------------------------------------------------


def test_logistic_midpoint_and_symmetry():
    assert logistic(0.0) == 0.5
    for x in (0.3, 1.6, 7.0):
        assert logistic(-x) == pytest.approx(1.0 - logistic(x), abs=1e-15)


def test_logistic_stable_at_extremes():
    assert logistic(1000.0) == 1.0
    assert logistic(-1000.0) == 0.0
    assert 0.0 < logistic(-30.0) < logistic(30.0) < 1.0


# -- toy oracle -------------------------------------------------------


def test_toy_score_frozen_examples():
    assert toy_score("AAAA") == 0.5
    assert toy_score("GCATGGCATG") == pytest.approx(0.8320183851339245, abs=1e-15)
    assert toy_score("TTTCTTTCT") == pytest.approx(0.19781611144141825, abs=1e-15)
    assert toy_score("GCATGAAAA") == pytest.approx(0.6899744811276125, abs=1e-15)


def test_toy_score_custom_table_and_bias():
    cfg = ToyOracleConfig(motif_weights={"GG": 1.0}, bias=-2.0)
    assert toy_score("AAAA", cfg) == pytest.approx(logistic(-2.0), abs=1e-15)
    assert toy_score("GGG", cfg) == pytest.approx(logistic(0.0), abs=1e-15)


def test_toy_config_rejects_bad_motifs():
    with pytest.raises(ValueError):
        ToyOracleConfig(motif_weights={"GCXTG": 1.0})
    with pytest.raises(ValueError):
        ToyOracleConfig(motif_weights={"": 1.0})


def test_toy_oracle_scores_batch_and_checks_alphabet():
    oracle = ToyOracle()
    out = oracle.score_batch([OracleRequest(3, "AAAA"), OracleRequest(1, "GCATGGCATG")])
    assert out == [
        OracleScore(3, 0.5),
        OracleScore(1, pytest.approx(0.8320183851339245)),
    ]
    with pytest.raises(BadAlphabet):
        oracle.score_batch([OracleRequest(0, "ACGU")])
    with pytest.raises(BadAlphabet):
        oracle.score_batch([OracleRequest(0, "")])


def test_toy_oracle_describe():
    d = ToyOracle().describe()
    assert d["kind"] == "toy"
    assert d["bias"] == 0.0
    assert d["motif_weights"]["GCATG"] == 0.8
    assert len(d["motif_weights"]) == 4


def test_toy_scores_always_in_unit_interval():
    rng = random.Random(8)
    oracle = ToyOracle()
    for _ in range(200):
        s = toy_score(random_sequence(rng, rng.randint(5, 120)))
        assert 0.0 <= s <= 1.0


# -- batch contract ---------------------------------------------------


class _ListOracle:
    def __init__(self, scores):
        self._scores = scores

    def score_batch(self, requests):
        return list(self._scores)

    def describe(self):
        return {"kind": "list"}


def test_batch_eval_orders_by_request():
    oracle = _ListOracle([OracleScore(2, 0.3), OracleScore(7, 0.9)])
    out = batch_eval(oracle, [OracleRequest(7, "ACGT"), OracleRequest(2, "ACGT")])
    assert [s.id for s in out] == [7, 2]
    assert [s.prediction for s in out] == [0.9, 0.3]


def test_batch_eval_rejects_empty_and_duplicate_requests():
    with pytest.raises(ValueError):
        batch_eval(ToyOracle(), [])
    with pytest.raises(ValueError):
        batch_eval(ToyOracle(), [OracleRequest(1, "ACGT"), OracleRequest(1, "ACGT")])


def test_batch_eval_rejects_protocol_violations():
    reqs = [OracleRequest(1, "ACGT"), OracleRequest(2, "ACGT")]
    with pytest.raises(OracleProtocolError, match="do not match"):
        batch_eval(_ListOracle([OracleScore(1, 0.5)]), reqs)
    with pytest.raises(OracleProtocolError, match="duplicate score"):
        batch_eval(_ListOracle([OracleScore(1, 0.5), OracleScore(1, 0.6)]), reqs)
    with pytest.raises(OracleProtocolError, match="outside"):
        batch_eval(_ListOracle([OracleScore(1, 0.5), OracleScore(2, 1.2)]), reqs)
    with pytest.raises(OracleProtocolError, match="outside"):
        batch_eval(_ListOracle([OracleScore(1, math.nan), OracleScore(2, 0.5)]), reqs)


# -- score cache ------------------------------------------------------


def test_score_cache_behaviour():
    cache = ScoreCache()
    assert "ACGT" not in cache
    cache.put("ACGT", 0.25)
    assert "ACGT" in cache
    assert cache["ACGT"] == 0.25
    cache.put("ACGT", 0.75)
    assert cache["ACGT"] == 0.75
    assert len(cache) == 1
    assert cache.hits == 0 and cache.misses == 0


# -- subprocess oracle ------------------------------------------------

WORKER_OK = textwrap.dedent(
    """
    import sys
    print("READY", flush=True)
    pending = []
    for line in sys.stdin:
        line = line.rstrip("\\n")
        if line == "QUIT":
            sys.exit(0)
        if line == "FLUSH":
            # Answer in reverse to prove order independence.
            for ident, seq in reversed(pending):
                score = (seq.count("G") + 1) / (len(seq) + 2)
                print(f"{ident}\\t{score!r}", flush=True)
            print("DONE", flush=True)
            pending = []
            continue
        _, ident, seq = line.split("\\t")
        pending.append((ident, seq))
    """
)

WORKER_ERROR = textwrap.dedent(
    """
    import sys
    print("READY", flush=True)
    for line in sys.stdin:
        line = line.rstrip("\\n")
        if line == "QUIT":
            sys.exit(0)
        if line == "FLUSH":
            print("ERROR\\t0\\tscorer exploded", flush=True)
            continue
    """
)

WORKER_RUDE = 'print("HELLO", flush=True)\nimport time\ntime.sleep(5)\n'


def worker_command(tmp_path, source: str, name: str) -> str:
    path = tmp_path / name
    path.write_text(source)
    return f"{sys.executable} {path}"


def test_subprocess_oracle_round_trip(tmp_path):
    cmd = worker_command(tmp_path, WORKER_OK, "ok.py")
    with SubprocessOracle(cmd) as oracle:
        reqs = [OracleRequest(i, "ACGT" * (i + 1)) for i in range(5)]
        out = batch_eval(oracle, reqs)
        assert [s.id for s in out] == [0, 1, 2, 3, 4]
        for req, score in zip(reqs, out):
            expected = (req.sequence.count("G") + 1) / (len(req.sequence) + 2)
            assert score.prediction == expected
        # A second batch reuses the live worker.
        again = batch_eval(oracle, [OracleRequest(9, "GGGG")])
        assert again[0].prediction == (4 + 1) / (4 + 2)
        proc = oracle._proc
    assert proc.poll() == 0  # QUIT honoured on close


def test_subprocess_oracle_error_line_aborts_batch(tmp_path):
    cmd = worker_command(tmp_path, WORKER_ERROR, "err.py")
    with SubprocessOracle(cmd) as oracle:
        with pytest.raises(OracleProtocolError, match="scorer exploded"):
            oracle.score_batch([OracleRequest(0, "ACGT")])


def test_subprocess_oracle_rejects_bad_greeting(tmp_path):
    cmd = worker_command(tmp_path, WORKER_RUDE, "rude.py")
    oracle = SubprocessOracle(cmd)
    with pytest.raises(OracleProtocolError, match="READY"):
        oracle.score_batch([OracleRequest(0, "ACGT")])
    oracle.close()


def test_subprocess_oracle_describe():
    oracle = SubprocessOracle("scorer --flag value")
    assert oracle.describe() == {
        "kind": "subprocess",
        "command": ["scorer", "--flag", "value"],
    }
