"""Prediction oracles: the built-in motif toy and an external subprocess.

An oracle maps DNA sequences to scores in [0, 1] in batches.  The toy
oracle is a deterministic logistic over weighted motif counts and exists
so experiments can run hermetically.  The subprocess oracle speaks a
line protocol over stdin/stdout, which is how real predictors (or any
other language) plug in without linking against this package.
"""

from __future__ import annotations

import math
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Dict, Protocol, Sequence

from .diffs import NUCLEOTIDES


class BadAlphabet(ValueError):
    """Sequence contains characters outside ACGT."""


class OracleProtocolError(RuntimeError):
    """The external scorer broke the wire protocol or returned bad scores."""


@dataclass(frozen=True)
class OracleRequest:
    id: int
    sequence: str


@dataclass(frozen=True)
class OracleScore:
    id: int
    prediction: float


class Oracle(Protocol):
    def score_batch(self, requests: Sequence[OracleRequest]) -> list[OracleScore]: ...

    def describe(self) -> dict: ...


def count_overlapping(motif: str, sequence: str) -> int:
    """Occurrences of ``motif`` in ``sequence``, overlaps included."""
    if not motif:
        raise ValueError("empty motif")
    n = 0
    start = sequence.find(motif)
    while start != -1:
        n += 1
        start = sequence.find(motif, start + 1)
    return n


def logistic(x: float) -> float:
    # Branch on sign so exp never overflows.
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _default_motif_weights() -> Dict[str, float]:
    return {
        "GCATG": 0.8,
        "TTTCT": -0.7,
        "GAAGAA": 0.5,
        "CTCTCT": -0.4,
    }


@dataclass(frozen=True)
class ToyOracleConfig:
    motif_weights: Dict[str, float] = field(default_factory=_default_motif_weights)
    bias: float = 0.0

    def __post_init__(self) -> None:
        for motif in self.motif_weights:
            if not motif or any(ch not in NUCLEOTIDES for ch in motif):
                raise ValueError(f"bad motif: {motif!r}")


def toy_score(sequence: str, config: ToyOracleConfig | None = None) -> float:
    """Logistic of the motif-weighted sum; iteration order of the motif
    table is part of the definition (float addition is not associative)."""
    cfg = config or ToyOracleConfig()
    total = cfg.bias
    for motif, weight in cfg.motif_weights.items():
        total += weight * count_overlapping(motif, sequence)
    return logistic(total)


def _check_sequence(sequence: str) -> None:
    if not sequence or any(ch not in NUCLEOTIDES for ch in sequence):
        raise BadAlphabet(f"sequence must be non-empty ACGT, got {sequence[:30]!r}")


class ToyOracle:
    def __init__(self, config: ToyOracleConfig | None = None):
        self.config = config or ToyOracleConfig()

    def score_batch(self, requests: Sequence[OracleRequest]) -> list[OracleScore]:
        out = []
        for req in requests:
            _check_sequence(req.sequence)
            out.append(OracleScore(req.id, toy_score(req.sequence, self.config)))
        return out

    def describe(self) -> dict:
        return {
            "kind": "toy",
            "bias": self.config.bias,
            "motif_weights": dict(self.config.motif_weights),
        }


def batch_eval(oracle: Oracle, requests: Sequence[OracleRequest]) -> list[OracleScore]:
    """Score a batch and enforce the oracle contract.

    Returns scores in request order; raises if any id is missing or
    duplicated, or any score is non-finite or outside [0, 1].
    """
    if not requests:
        raise ValueError("empty oracle batch")
    ids = [r.id for r in requests]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate request ids in batch")
    raw = oracle.score_batch(requests)
    by_id: dict[int, float] = {}
    for score in raw:
        if score.id in by_id:
            raise OracleProtocolError(f"duplicate score for id {score.id}")
        by_id[score.id] = score.prediction
    missing = [i for i in ids if i not in by_id]
    if missing or len(by_id) != len(ids):
        raise OracleProtocolError(
            f"score ids do not match request ids (missing {missing[:5]}, got {len(by_id)})"
        )
    out = []
    for i in ids:
        p = by_id[i]
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise OracleProtocolError(f"score for id {i} outside [0, 1]: {p!r}")
        out.append(OracleScore(i, p))
    return out


class ScoreCache:
    """Sequence -> prediction memo for one run."""

    def __init__(self) -> None:
        self._scores: dict[str, float] = {}
        self.hits = 0
        self.misses = 0

    def __contains__(self, sequence: str) -> bool:
        return sequence in self._scores

    def __getitem__(self, sequence: str) -> float:
        return self._scores[sequence]

    def put(self, sequence: str, prediction: float) -> None:
        self._scores[sequence] = prediction

    def __len__(self) -> int:
        return len(self._scores)


class SubprocessOracle:
    """Scores sequences through an external worker process.

    Protocol (newline-delimited UTF-8, child speaks first):

      child:  READY
      parent: EVAL\\t<id>\\t<sequence>   (repeated)
      parent: FLUSH
      child:  <id>\\t<score>             (one per EVAL, any order)
      child:  DONE
      parent: QUIT                        (at shutdown)

    The child may answer ``ERROR\\t<id>\\t<message>`` instead of scores;
    that aborts the batch.  Responses are only expected after FLUSH so
    neither side can deadlock on a full pipe.
    """

    def __init__(self, command: str | Sequence[str], startup_timeout: float = 30.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self._startup_timeout = startup_timeout
        self._proc: subprocess.Popen | None = None

    def _ensure_started(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
            greeting = self._proc.stdout.readline()
            if greeting.strip() != "READY":
                raise OracleProtocolError(f"worker did not say READY, got {greeting!r}")
        return self._proc

    def score_batch(self, requests: Sequence[OracleRequest]) -> list[OracleScore]:
        proc = self._ensure_started()
        for req in requests:
            _check_sequence(req.sequence)
            if "\t" in req.sequence or "\n" in req.sequence:
                raise BadAlphabet("sequence contains protocol delimiters")
            proc.stdin.write(f"EVAL\t{req.id}\t{req.sequence}\n")
        proc.stdin.write("FLUSH\n")
        proc.stdin.flush()
        scores: list[OracleScore] = []
        while True:
            line = proc.stdout.readline()
            if not line:
                raise OracleProtocolError("worker closed its output mid-batch")
            line = line.rstrip("\n")
            if line == "DONE":
                break
            parts = line.split("\t")
            if parts[0] == "ERROR":
                ident = parts[1] if len(parts) > 1 else "?"
                message = parts[2] if len(parts) > 2 else ""
                raise OracleProtocolError(f"worker error for id {ident}: {message}")
            if len(parts) != 2:
                raise OracleProtocolError(f"malformed score line: {line!r}")
            try:
                scores.append(OracleScore(int(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise OracleProtocolError(f"malformed score line: {line!r}") from exc
        return scores

    def describe(self) -> dict:
        return {"kind": "subprocess", "command": self.command}

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.write("QUIT\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, ValueError):
                pass
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc = None

    def __enter__(self) -> "SubprocessOracle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
