"""Reference worker process for the seqforge subprocess oracle protocol.

The engine talks to external scorers over a line protocol on
stdin/stdout.  This package is the other side of that pipe: it wraps any
``sequence -> float`` callable in the protocol loop and ships a scorer
that reproduces the engine's built-in toy oracle bit for bit, so the two
processes can be checked against each other.
"""

from .protocol import serve
from .scorers import constant, load_plugin, toy_equivalent

__all__ = ["serve", "constant", "load_plugin", "toy_equivalent"]
