"""The worker side of the oracle wire protocol.

Newline-delimited UTF-8, worker speaks first:

    worker: READY
    engine: EVAL\t<id>\t<sequence>    (repeated)
    engine: FLUSH
    worker: <id>\t<score>             (one line per EVAL)
    worker: DONE
    engine: QUIT                      (at shutdown)

Scores are printed with 17 significant digits so the float survives the
text round trip exactly.  Any scorer failure turns into a single
``ERROR\t<id>\t<message>`` line and a nonzero exit; the engine treats
that as a fatal batch abort, so no score lines precede it.
"""

from __future__ import annotations

import sys
from typing import Callable, TextIO

Scorer = Callable[[str], float]


def _sanitize(message: str) -> str:
    # The error message rides inside a tab-delimited line.
    return " ".join(str(message).split()) or "unspecified error"


def _fail(out: TextIO, ident: str, message: str) -> int:
    out.write(f"ERROR\t{ident}\t{_sanitize(message)}\n")
    out.flush()
    return 1


def serve(scorer: Scorer, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    """Run the protocol loop until QUIT or EOF; returns the exit code.

    Each batch is fully scored before anything is written back, so a
    failure mid-batch produces exactly one ERROR line and nothing else.
    """
    inp = stdin if stdin is not None else sys.stdin
    out = stdout if stdout is not None else sys.stdout

    out.write("READY\n")
    out.flush()

    batch: list[tuple[str, str]] = []
    for raw in inp:
        line = raw.rstrip("\n")
        if line == "QUIT":
            return 0
        if line == "FLUSH":
            results: list[tuple[str, float]] = []
            for ident, sequence in batch:
                try:
                    value = float(scorer(sequence))
                except Exception as exc:
                    return _fail(out, ident, f"{type(exc).__name__}: {exc}")
                if not (0.0 <= value <= 1.0):
                    return _fail(out, ident, f"score {value!r} outside [0, 1]")
                results.append((ident, value))
            for ident, value in results:
                out.write(f"{ident}\t{value:.17g}\n")
            out.write("DONE\n")
            out.flush()
            batch = []
        elif line.startswith("EVAL\t"):
            parts = line.split("\t")
            if len(parts) != 3:
                return _fail(out, "?", f"malformed EVAL line: {line!r}")
            batch.append((parts[1], parts[2]))
        else:
            return _fail(out, "?", f"unexpected line: {line!r}")
    # Engine hung up without QUIT; nothing owed to anyone.
    return 0
