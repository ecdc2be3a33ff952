"""JSON run configuration.

A config file holds up to five sections (grammar, operators, evolution,
archive, oracle); every key is optional and falls back to the package
defaults.  Several keys accept a long-form alias (the names used in
experiment write-ups, e.g. ``snv_grammar_weight``) next to the short
field name, so configs can be pasted between tools without renaming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .archive import ArchiveConfig
from .engine import EvolutionConfig, StoppingConfig
from .grammar import GrammarConfig
from .operators import OperatorConfig
from .oracle import Oracle, SubprocessOracle, ToyOracle, ToyOracleConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OracleSpec:
    kind: str = "toy"
    command: tuple[str, ...] | str | None = None
    toy: ToyOracleConfig = field(default_factory=ToyOracleConfig)

    def __post_init__(self) -> None:
        if self.kind not in ("toy", "subprocess"):
            raise ConfigError(f"unknown oracle kind: {self.kind!r}")
        if self.kind == "subprocess" and not self.command:
            raise ConfigError("subprocess oracle needs a command")


@dataclass(frozen=True)
class FullConfig:
    evolution: EvolutionConfig
    oracle: OracleSpec


def make_oracle(spec: OracleSpec) -> Oracle:
    if spec.kind == "subprocess":
        return SubprocessOracle(spec.command)
    return ToyOracle(spec.toy)


_GRAMMAR_ALIASES = {
    "snv_grammar_weight": "snv_weight",
    "insertion_grammar_weight": "insertion_weight",
    "deletion_grammar_weight": "deletion_weight",
    "excluded_node_kinds": "excluded_kinds",
}
_OPERATOR_ALIASES = {
    "custom_mutation_operator_weight": "custom_mutation_weight",
}
_STRATEGY_ALIASES = {
    "gggp": "gggp",
    "rs": "rs",
    "random-search": "rs",
    "random_search": "rs",
}


def _apply_aliases(section: Mapping[str, Any], aliases: Mapping[str, str]) -> dict:
    out = {}
    for key, value in section.items():
        canonical = aliases.get(key, key)
        if canonical in out and out[canonical] != value:
            raise ConfigError(f"conflicting values for {canonical!r}")
        out[canonical] = value
    return out


def _take(section: dict, keys: tuple[str, ...]) -> dict:
    unknown = set(section) - set(keys)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return section


def _grammar_from(section: Mapping[str, Any]) -> GrammarConfig:
    data = _apply_aliases(section, _GRAMMAR_ALIASES)
    _take(data, ("max_diff_units", "max_insertion_size", "max_deletion_size",
                 "snv_weight", "insertion_weight", "deletion_weight", "excluded_kinds"))
    if "excluded_kinds" in data:
        data["excluded_kinds"] = frozenset(data["excluded_kinds"])
    return GrammarConfig(**data)


def _operators_from(section: Mapping[str, Any]) -> OperatorConfig:
    data = _apply_aliases(section, _OPERATOR_ALIASES)
    # use_custom_mutation_operator=false is shorthand for weight 0.
    use_custom = data.pop("use_custom_mutation_operator", True)
    _take(data, ("selection_method", "tournament_size", "crossover_probability",
                 "mutation_probability", "custom_mutation_weight", "proximity_sigma"))
    if not use_custom:
        data["custom_mutation_weight"] = 0.0
    return OperatorConfig(**data)


def _archive_from(section: Mapping[str, Any]) -> ArchiveConfig:
    data = _take(dict(section), ("capacity", "bin_count", "low_count_threshold",
                                 "sub_bins_per_bin", "size_weight", "diversity_weight",
                                 "intra_bin_weight", "low_count_weight"))
    return ArchiveConfig(**data)


def _evolution_from(
    section: Mapping[str, Any],
    grammar: GrammarConfig,
    operators: OperatorConfig,
    archive: ArchiveConfig,
) -> EvolutionConfig:
    data = dict(section)
    stopping_keys = {}
    for key in ("time_budget_seconds", "max_generations", "max_evaluations"):
        if key in data:
            stopping_keys[key] = data.pop(key)
    _take(data, ("strategy", "population_size", "genetic_operators_weight",
                 "elitism_weight", "novelty_weight", "fitness_function", "seed"))
    if "strategy" in data:
        raw = str(data["strategy"]).lower()
        if raw not in _STRATEGY_ALIASES:
            raise ConfigError(f"unknown strategy: {data['strategy']!r}")
        data["strategy"] = _STRATEGY_ALIASES[raw]
    return EvolutionConfig(
        grammar=grammar,
        operators=operators,
        archive=archive,
        stopping=StoppingConfig(**stopping_keys),
        **data,
    )


def _oracle_from(section: Mapping[str, Any]) -> OracleSpec:
    data = dict(section)
    kind = data.pop("kind", "toy")
    command = data.pop("command", None)
    toy_keys = {}
    if "motif_weights" in data:
        toy_keys["motif_weights"] = dict(data.pop("motif_weights"))
    if "bias" in data:
        toy_keys["bias"] = data.pop("bias")
    if data:
        raise ConfigError(f"unknown oracle keys: {sorted(data)}")
    return OracleSpec(kind=kind, command=command, toy=ToyOracleConfig(**toy_keys))


SECTIONS = ("grammar", "operators", "evolution", "archive", "oracle")


def config_from_dict(data: Mapping[str, Any]) -> FullConfig:
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        grammar = _grammar_from(data.get("grammar", {}))
        operators = _operators_from(data.get("operators", {}))
        archive = _archive_from(data.get("archive", {}))
        evolution = _evolution_from(data.get("evolution", {}), grammar, operators, archive)
        oracle = _oracle_from(data.get("oracle", {}))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return FullConfig(evolution=evolution, oracle=oracle)


def load_config(path: str | Path) -> FullConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data)


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict:
    """Recursive dict merge; override wins, sub-dicts merge key-wise."""
    out = dict(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], Mapping) and isinstance(value, Mapping):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = value
    return out
