"""Turning raw sequence input into a ready reference context.

Accepts plain text or single-record FASTA, checks splice-site
coordinates, and optionally fits the sequence to a fixed window: short
input is padded symmetrically, long input is trimmed around the centre
of the splice-site span (or the sequence centre when no sites are
given).  Site coordinates are remapped into the windowed frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .diffs import NUCLEOTIDES, ReferenceContext


class CoordinateOutOfBounds(ValueError):
    """A splice-site coordinate falls outside the sequence."""


class CassetteDoesNotFit(ValueError):
    """The splice-site span is wider than the requested window."""


@dataclass(frozen=True)
class InputSpec:
    sequence: str
    acceptor_positions: tuple[int, ...] = ()
    donor_positions: tuple[int, ...] = ()
    window: int | None = None
    padding_symbol: str = "A"
    acceptor_window: tuple[int, int] = (-10, 2)
    donor_window: tuple[int, int] = (-3, 6)

    def __post_init__(self) -> None:
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")
        if len(self.padding_symbol) != 1 or self.padding_symbol not in NUCLEOTIDES:
            raise ValueError(f"padding symbol must be one of {NUCLEOTIDES}")


def read_sequence_file(path: str | Path) -> str:
    """Load one sequence from plain text or single-record FASTA.

    Whitespace is stripped, case is folded to upper; multiple FASTA
    records are rejected rather than silently concatenated.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty sequence file")
    if lines[0].startswith(">"):
        if any(ln.startswith(">") for ln in lines[1:]):
            raise ValueError(f"{path}: expected a single FASTA record")
        lines = lines[1:]
    seq = "".join(lines).upper()
    if not seq:
        raise ValueError(f"{path}: empty sequence")
    bad = {ch for ch in seq if ch not in NUCLEOTIDES}
    if bad:
        raise ValueError(f"{path}: invalid characters {sorted(bad)}")
    return seq


def _window_start(length: int, window: int, sites: tuple[int, ...]) -> int:
    if not sites:
        return (length - window) // 2
    lo, hi = min(sites), max(sites)
    if hi - lo + 1 > window:
        raise CassetteDoesNotFit(
            f"splice sites span {hi - lo + 1} nt but the window is only {window} nt"
        )
    start = (lo + hi) // 2 - window // 2
    return min(max(start, 0), length - window)


def build_context(spec: InputSpec) -> ReferenceContext:
    """Validate, window, and remap an input into a reference context."""
    seq = spec.sequence.upper()
    bad = {ch for ch in seq if ch not in NUCLEOTIDES}
    if bad:
        raise ValueError(f"invalid characters in sequence: {sorted(bad)}")
    n = len(seq)
    sites = tuple(spec.acceptor_positions) + tuple(spec.donor_positions)
    for pos in sites:
        if not 0 <= pos < n:
            raise CoordinateOutOfBounds(f"splice site {pos} outside sequence of length {n}")

    acceptors = tuple(spec.acceptor_positions)
    donors = tuple(spec.donor_positions)
    if spec.window is not None and spec.window != n:
        w = spec.window
        if n < w:
            left = (w - n) // 2
            right = w - n - left
            seq = spec.padding_symbol * left + seq + spec.padding_symbol * right
            acceptors = tuple(p + left for p in acceptors)
            donors = tuple(p + left for p in donors)
        else:
            start = _window_start(n, w, sites)
            seq = seq[start : start + w]
            acceptors = tuple(p - start for p in acceptors)
            donors = tuple(p - start for p in donors)
    return ReferenceContext.build(
        seq,
        acceptor_positions=acceptors,
        donor_positions=donors,
        acceptor_window=spec.acceptor_window,
        donor_window=spec.donor_window,
    )
