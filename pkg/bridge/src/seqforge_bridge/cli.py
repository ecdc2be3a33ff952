"""Command line entry: pick a scorer, run the protocol loop.

Meant to be handed to the engine as the subprocess oracle command, e.g.

    seqforge generate ref.fa --oracle 'subprocess:seqforge-bridge toy'
"""

from __future__ import annotations

import argparse
import sys

from .protocol import serve
from .scorers import constant, load_plugin, toy_equivalent


def build_scorer(spec: str):
    if spec == "toy":
        return toy_equivalent
    if spec.startswith("constant:"):
        return constant(float(spec.partition(":")[2]))
    if spec.startswith("plugin:"):
        return load_plugin(spec.partition(":")[2])
    raise SystemExit(
        f"unknown scorer {spec!r}; expected 'toy', 'constant:<x>' or 'plugin:<module>:<attr>'"
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="seqforge-bridge",
        description="Serve a sequence scorer over the oracle wire protocol.",
    )
    parser.add_argument(
        "scorer",
        help="'toy', 'constant:<x>', or 'plugin:<module>:<attr>' naming a "
        "callable mapping an ACGT sequence to a float in [0, 1]",
    )
    args = parser.parse_args(argv)
    return serve(build_scorer(args.scorer))


if __name__ == "__main__":
    sys.exit(main())
