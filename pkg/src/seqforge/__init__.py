"""seqforge: grammar-guided evolution of perturbed DNA sequence datasets.

Builds archives of sequence variants whose predicted scores spread
evenly over [0, 1], by evolving small edit diffs against a reference
under splice-site constraints.
"""

from .archive import Archive, ArchiveConfig, ArchiveRecord, bin_index, shannon_diversity
from .diffs import (
    Deletion,
    DiffUnit,
    Genotype,
    Insertion,
    InvalidGenotype,
    Phenotype,
    ReferenceContext,
    SNV,
    apply,
    diff_weight,
    format_genotype,
    parse_genotype,
    resolve_overlaps,
    validate,
)
from .engine import EvolutionConfig, RunResult, StoppingConfig, compare_strategies, run
from .fitness import bin_filler, iad
from .grammar import EmptySearchSpace, GrammarConfig, sample_genotype, sample_unit
from .ingest import InputSpec, build_context, read_sequence_file
from .operators import OperatorConfig, crossover, lexicase_select, mutate_proximity, mutate_standard, tournament_select
from .oracle import SubprocessOracle, ToyOracle, ToyOracleConfig, batch_eval, toy_score

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "ArchiveConfig",
    "ArchiveRecord",
    "Deletion",
    "DiffUnit",
    "EmptySearchSpace",
    "EvolutionConfig",
    "Genotype",
    "GrammarConfig",
    "InputSpec",
    "Insertion",
    "InvalidGenotype",
    "OperatorConfig",
    "Phenotype",
    "ReferenceContext",
    "RunResult",
    "SNV",
    "StoppingConfig",
    "SubprocessOracle",
    "ToyOracle",
    "ToyOracleConfig",
    "apply",
    "batch_eval",
    "bin_filler",
    "bin_index",
    "build_context",
    "compare_strategies",
    "crossover",
    "diff_weight",
    "format_genotype",
    "iad",
    "lexicase_select",
    "mutate_proximity",
    "mutate_standard",
    "parse_genotype",
    "read_sequence_file",
    "resolve_overlaps",
    "run",
    "sample_genotype",
    "sample_unit",
    "shannon_diversity",
    "tournament_select",
    "toy_score",
    "validate",
]
