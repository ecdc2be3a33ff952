"""Shared brute-force oracles and helpers for the test suite.

Everything here is deliberately naive: independent reference
implementations the production code is checked against.
"""

from __future__ import annotations

import random

from seqforge.diffs import Deletion, DiffUnit, Genotype, Insertion, ReferenceContext, SNV

NUCS = "ACGT"


def levenshtein(a: str, b: str) -> int:
    """Textbook dynamic-programming edit distance."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def random_sequence(rng: random.Random, length: int) -> str:
    return "".join(rng.choice(NUCS) for _ in range(length))


def anchored_sequence(rng: random.Random, length: int) -> str:
    """Random sequence with no adjacent equal bases and no repeated 4-mer.

    Such sequences have no local self-similarity, so shifted alignments
    across any window are expensive; used where edit-distance equality
    must not be spoiled by content aliasing.
    """
    while True:
        chars: list[str] = []
        seen: set[str] = set()
        ok = True
        for _ in range(length):
            options = [c for c in NUCS if not chars or c != chars[-1]]
            rng.shuffle(options)
            placed = False
            for c in options:
                kmer = "".join(chars[-3:]) + c
                if len(kmer) < 4 or kmer not in seen:
                    if len(kmer) == 4:
                        seen.add(kmer)
                    chars.append(c)
                    placed = True
                    break
            if not placed:
                ok = False
                break
        if ok:
            return "".join(chars)


def random_separated_genotype(
    rng: random.Random,
    ctx: ReferenceContext,
    gap: int = 2,
    kinds: tuple[str, ...] = ("snv", "ins", "del"),
) -> Genotype:
    """Random genotype whose units are pairwise separated by >= gap
    untouched reference positions.  SNVs always change the base."""
    n = len(ctx.sequence)
    units: list[DiffUnit] = []
    pos = rng.randint(0, 4)
    while pos < n and len(units) < 6:
        kind = rng.choice(kinds)
        if kind == "snv":
            new = rng.choice([c for c in NUCS if c != ctx.sequence[pos]])
            units.append(SNV(pos, new))
            end = pos
        elif kind == "ins":
            size = rng.randint(1, 5)
            units.append(Insertion(pos, "".join(rng.choice(NUCS) for _ in range(size))))
            end = pos
        else:
            size = rng.randint(1, min(5, n - pos))
            units.append(Deletion(pos, size))
            end = pos + size - 1
        pos = end + gap + 1 + rng.randint(0, 5)
    if not units:
        units.append(SNV(0, rng.choice([c for c in NUCS if c != ctx.sequence[0]])))
    return Genotype(tuple(units))


class ScriptedRng:
    """Stand-in rng returning queued values; fails loudly when exhausted.

    ``randint``/``randrange`` pop from the script; ``choice`` pops an index;
    ``random``/``gauss``/``shuffle`` are unsupported on purpose so a test
    knows exactly which entropy a code path consumes.
    """

    def __init__(self, script: list[int]):
        self.script = list(script)

    def _pop(self) -> int:
        if not self.script:
            raise AssertionError("scripted rng exhausted")
        return self.script.pop(0)

    def randint(self, lo: int, hi: int) -> int:
        value = self._pop()
        assert lo <= value <= hi, f"scripted value {value} outside [{lo}, {hi}]"
        return value

    def randrange(self, n: int) -> int:
        value = self._pop()
        assert 0 <= value < n, f"scripted value {value} outside [0, {n})"
        return value

    def choice(self, seq):
        return seq[self.randrange(len(seq))]
