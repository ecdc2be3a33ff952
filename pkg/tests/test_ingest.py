from __future__ import annotations

import random

import pytest

from seqforge.ingest import (
    CassetteDoesNotFit,
    CoordinateOutOfBounds,
    InputSpec,
    build_context,
    read_sequence_file,
)
from support import random_sequence


# -- file reading -----------------------------------------------------


def test_read_plain_text_multiline(tmp_path):
    p = tmp_path / "seq.txt"
    p.write_text("acgt\nACGT\n  tt  \n")
    assert read_sequence_file(p) == "ACGTACGTTT"


def test_read_single_fasta_record(tmp_path):
    p = tmp_path / "seq.fa"
    p.write_text(">chr17 fragment\nACGTAC\nGTTA\n")
    assert read_sequence_file(p) == "ACGTACGTTA"


def test_read_rejects_multi_record_fasta(tmp_path):
    p = tmp_path / "two.fa"
    p.write_text(">one\nACGT\n>two\nGGCC\n")
    with pytest.raises(ValueError, match="single FASTA record"):
        read_sequence_file(p)


def test_read_rejects_empty_inputs(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("\n  \n")
    with pytest.raises(ValueError, match="empty"):
        read_sequence_file(p)
    p.write_text(">header only\n")
    with pytest.raises(ValueError, match="empty"):
        read_sequence_file(p)


def test_read_rejects_bad_characters(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("ACGTNNACGT\n")
    with pytest.raises(ValueError, match="invalid characters"):
        read_sequence_file(p)


# -- spec validation --------------------------------------------------


def test_input_spec_validation():
    with pytest.raises(ValueError):
        InputSpec("ACGT", window=0)
    with pytest.raises(ValueError):
        InputSpec("ACGT", padding_symbol="X")
    with pytest.raises(ValueError):
        InputSpec("ACGT", padding_symbol="AA")


def test_build_context_rejects_bad_sequence_and_sites():
    with pytest.raises(ValueError, match="invalid characters"):
        build_context(InputSpec("ACGTN"))
    with pytest.raises(CoordinateOutOfBounds):
        build_context(InputSpec("ACGTACGT", acceptor_positions=(8,)))
    with pytest.raises(CoordinateOutOfBounds):
        build_context(InputSpec("ACGTACGT", donor_positions=(-1,)))


# -- windowing --------------------------------------------------------


def test_no_window_passes_through():
    ctx = build_context(InputSpec("acgtacgt", acceptor_positions=(5,)))
    assert ctx.sequence == "ACGTACGT"
    assert ctx.acceptor_positions == (5,)
    # Acceptor at 5 restricts [max(0, -5), 7].
    assert ctx.restricted_regions == ((0, 7),)


def test_window_equal_to_length_is_identity():
    seq = "ACGTACGTAC"
    ctx = build_context(InputSpec(seq, donor_positions=(4,), window=10))
    assert ctx.sequence == seq
    assert ctx.donor_positions == (4,)


def test_padding_is_symmetric_and_remaps_sites():
    seq = "ACGTACGTAC"
    ctx = build_context(InputSpec(seq, acceptor_positions=(5,), window=16))
    assert ctx.sequence == "AAA" + seq + "AAA"
    assert ctx.acceptor_positions == (8,)
    # Restricted window follows the site into the padded frame.
    assert ctx.restricted_regions == ((0, 10),)


def test_padding_odd_remainder_goes_right():
    seq = "ACGTACGTAC"
    ctx = build_context(InputSpec(seq, window=15, padding_symbol="G"))
    assert ctx.sequence == "GG" + seq + "GGG"


def test_trim_centres_on_splice_span():
    rng = random.Random(1)
    seq = random_sequence(rng, 100)
    ctx = build_context(
        InputSpec(seq, acceptor_positions=(30,), donor_positions=(45,), window=20)
    )
    assert ctx.sequence == seq[27:47]
    assert ctx.acceptor_positions == (3,)
    assert ctx.donor_positions == (18,)


def test_trim_without_sites_centres_on_sequence():
    rng = random.Random(2)
    seq = random_sequence(rng, 50)
    ctx = build_context(InputSpec(seq, window=10))
    assert ctx.sequence == seq[20:30]


def test_trim_clamps_at_sequence_edges():
    rng = random.Random(3)
    seq = random_sequence(rng, 50)
    left = build_context(InputSpec(seq, acceptor_positions=(2,), window=10))
    assert left.sequence == seq[0:10]
    assert left.acceptor_positions == (2,)
    right = build_context(InputSpec(seq, donor_positions=(48,), window=10))
    assert right.sequence == seq[40:50]
    assert right.donor_positions == (8,)


def test_trim_rejects_span_wider_than_window():
    seq = "ACGT" * 20
    with pytest.raises(CassetteDoesNotFit, match="36 nt"):
        build_context(
            InputSpec(seq, acceptor_positions=(5,), donor_positions=(40,), window=20)
        )


def test_custom_restriction_windows_pass_through():
    ctx = build_context(
        InputSpec(
            "A" * 30,
            acceptor_positions=(15,),
            acceptor_window=(-2, 2),
        )
    )
    assert ctx.restricted_regions == ((13, 17),)


def test_windowing_preserves_content():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(20, 120)
        seq = random_sequence(rng, n)
        w = rng.randint(10, 140)
        sites = (rng.randrange(n),)
        try:
            ctx = build_context(InputSpec(seq, acceptor_positions=sites, window=w))
        except CassetteDoesNotFit:
            continue
        if w <= n:
            assert ctx.sequence in seq
        else:
            assert seq in ctx.sequence
        assert len(ctx.sequence) == w
        # The remapped site still points at the same base when inside
        # the window.
        (site,) = sites
        (mapped,) = ctx.acceptor_positions
        if 0 <= mapped < w:
            assert ctx.sequence[mapped] == seq[site]
