"""Generational search loop over perturbation genotypes.

One run owns a single seeded RNG consumed in a fixed order, so a given
(seed, config, oracle) triple reproduces its dataset byte for byte when
stopping does not depend on wall time.  Random search is the same loop
with replacement forced to fresh sampling, which makes strategy
comparisons differ only in the knobs under test.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

from .archive import Archive, ArchiveConfig
from .diffs import Genotype, ReferenceContext, apply, format_genotype
from .fitness import DIVERSITY_GAIN, get_fitness_function
from .grammar import GrammarConfig, PositionDomain, sample_genotype
from .operators import OperatorConfig, crossover, lexicase_select, mutate_proximity, mutate_standard, tournament_select
from .oracle import Oracle, OracleRequest, ScoreCache, batch_eval

STRATEGY_GGGP = "gggp"
STRATEGY_RANDOM = "rs"

STOP_CAPACITY = "capacity"
STOP_TIME = "time"
STOP_GENERATIONS = "max_generations"
STOP_EVALUATIONS = "max_evaluations"


@dataclass(frozen=True)
class StoppingConfig:
    time_budget_seconds: float = 300.0
    max_generations: Optional[int] = None
    max_evaluations: Optional[int] = None

    def __post_init__(self) -> None:
        if self.time_budget_seconds <= 0:
            raise ValueError("time_budget_seconds must be > 0")
        if self.max_generations is not None and self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")


@dataclass(frozen=True)
class EvolutionConfig:
    strategy: str = STRATEGY_GGGP
    population_size: int = 500
    genetic_operators_weight: float = 0.8
    elitism_weight: float = 0.0
    novelty_weight: float = 0.1
    fitness_function: str = "bin-filler"
    seed: int = 0
    grammar: GrammarConfig = field(default_factory=GrammarConfig)
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    archive: ArchiveConfig = field(default_factory=ArchiveConfig)
    stopping: StoppingConfig = field(default_factory=StoppingConfig)

    def __post_init__(self) -> None:
        if self.strategy not in (STRATEGY_GGGP, STRATEGY_RANDOM):
            raise ValueError(f"unknown strategy: {self.strategy!r}")
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        for name in ("genetic_operators_weight", "elitism_weight", "novelty_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def normalized_weights(self) -> tuple[float, float, float]:
        """(operators, elitism, novelty) fractions of each new population.

        Random search always replaces everything with fresh samples.  A
        GGGP config with all weights zero degenerates to operators only.
        """
        if self.strategy == STRATEGY_RANDOM:
            return (0.0, 0.0, 1.0)
        total = self.genetic_operators_weight + self.elitism_weight + self.novelty_weight
        if total == 0:
            return (1.0, 0.0, 0.0)
        return (
            self.genetic_operators_weight / total,
            self.elitism_weight / total,
            self.novelty_weight / total,
        )


def replacement_counts(population_size: int, weights: tuple[float, float, float]) -> tuple[int, int, int]:
    """Split a population between elites, fresh samples, and offspring.

    ``weights`` is the normalised (operators, elitism, novelty) triple;
    returns (elite_n, novelty_n, operators_n).  Elite and novelty counts
    round half-to-even; operators absorb the remainder so the three
    always sum to the population size.
    """
    _, w_elite, w_novelty = weights
    elite_n = round(w_elite * population_size)
    novelty_n = round(w_novelty * population_size)
    operators_n = population_size - elite_n - novelty_n
    if operators_n < 0:
        # Rounding overshoot; trim novelty first, then elites.
        give_back = -operators_n
        take = min(give_back, novelty_n)
        novelty_n -= take
        give_back -= take
        elite_n -= give_back
        operators_n = 0
    return elite_n, novelty_n, operators_n


@dataclass
class Individual:
    genotype: Genotype
    origin: str
    sequence: Optional[str] = None
    weight: Optional[int] = None
    prediction: Optional[float] = None
    fitness: Optional[float] = None


@dataclass
class OperatorStats:
    selections: int = 0
    crossovers: int = 0
    clones: int = 0
    standard_mutations: int = 0
    proximity_mutations: int = 0

    @property
    def total(self) -> int:
        return (
            self.selections
            + self.crossovers
            + self.clones
            + self.standard_mutations
            + self.proximity_mutations
        )


@dataclass
class TraceRow:
    generation: int
    archive_quality: float
    archive_size: int
    mean_fitness: float
    median_fitness: float
    mean_diff_weight: float
    elapsed_seconds: float
    oracle_calls: int


@dataclass
class RunResult:
    archive: Archive
    trace: list[TraceRow]
    stop_reason: str
    generations: int
    oracle_calls: int
    wall_time_seconds: float
    op_stats: OperatorStats
    config: EvolutionConfig
    cache_hits: int
    cache_misses: int


Observer = Callable[[int, Sequence[Individual], Archive], None]


def _select_index(
    fitnesses: Sequence[float],
    weights: Sequence[int],
    opcfg: OperatorConfig,
    rng: random.Random,
    stats: OperatorStats,
) -> int:
    stats.selections += 1
    if opcfg.selection_method == "lexicase":
        return lexicase_select(fitnesses, weights, rng)
    return tournament_select(fitnesses, weights, opcfg.tournament_size, rng)


def _offspring(
    population: Sequence[Individual],
    n: int,
    config: EvolutionConfig,
    ctx: ReferenceContext,
    domain: PositionDomain,
    rng: random.Random,
    stats: OperatorStats,
) -> list[Individual]:
    opcfg = config.operators
    fitnesses = [ind.fitness for ind in population]
    weights = [ind.weight for ind in population]
    out: list[Individual] = []
    while len(out) < n:
        if rng.random() < opcfg.crossover_probability:
            p1 = _select_index(fitnesses, weights, opcfg, rng, stats)
            p2 = _select_index(fitnesses, weights, opcfg, rng, stats)
            children = list(
                crossover(
                    population[p1].genotype,
                    population[p2].genotype,
                    ctx,
                    rng,
                    max_units=config.grammar.max_diff_units,
                )
            )
            stats.crossovers += 1
            origin = "crossover"
        else:
            p1 = _select_index(fitnesses, weights, opcfg, rng, stats)
            children = [population[p1].genotype]
            origin = "clone"
            stats.clones += 1
        for genotype in children[: n - len(out)]:
            child_origin = origin
            if rng.random() < opcfg.mutation_probability:
                if rng.random() < opcfg.custom_mutation_weight:
                    genotype = mutate_proximity(genotype, ctx, rng, sigma=opcfg.proximity_sigma)
                    stats.proximity_mutations += 1
                    child_origin = origin + "+proximity"
                else:
                    genotype = mutate_standard(genotype, config.grammar, ctx, rng, domain=domain)
                    stats.standard_mutations += 1
                    child_origin = origin + "+standard"
            out.append(Individual(genotype=genotype, origin=child_origin))
    return out


def run(
    ctx: ReferenceContext,
    config: EvolutionConfig,
    oracle: Oracle,
    observer: Optional[Observer] = None,
) -> RunResult:
    """Execute one search run to its stopping condition.

    Per generation: realise phenotypes, score unseen sequences through
    the oracle in one batch, then walk the population in index order
    computing fitness against the live archive and offering each
    candidate for admission.  The wall clock is checked between
    generations and between admission turns.
    """
    rng = random.Random(config.seed)
    domain = PositionDomain(ctx, config.grammar)
    archive = Archive(config.archive)
    fitness_fn = get_fitness_function(config.fitness_function)
    cache = ScoreCache()
    stats = OperatorStats()
    trace: list[TraceRow] = []
    stopping = config.stopping
    start = time.perf_counter()
    elapsed = lambda: time.perf_counter() - start

    elite_n, novelty_n, operators_n = replacement_counts(
        config.population_size, config.normalized_weights()
    )
    population = [
        Individual(genotype=sample_genotype(config.grammar, ctx, rng, domain=domain), origin="init")
        for _ in range(config.population_size)
    ]
    oracle_calls = 0
    generation = 0
    stop_reason: Optional[str] = None
    while True:
        for ind in population:
            if ind.sequence is None:
                phenotype = apply(ind.genotype, ctx)
                ind.sequence = phenotype.sequence
                ind.weight = phenotype.genotype_weight
        pending: list[str] = []
        seen: set[str] = set()
        for ind in population:
            s = ind.sequence
            if s not in cache and s not in seen:
                pending.append(s)
                seen.add(s)
        cache.misses += len(pending)
        cache.hits += len(population) - len(pending)
        if pending:
            requests = [OracleRequest(i, s) for i, s in enumerate(pending)]
            for request, score in zip(requests, batch_eval(oracle, requests)):
                cache.put(request.sequence, score.prediction)
            oracle_calls += len(pending)
        for ind in population:
            ind.prediction = cache[ind.sequence]
        for ind in population:
            if elapsed() >= stopping.time_budget_seconds:
                stop_reason = STOP_TIME
                break
            value = fitness_fn(ind.prediction, archive).value
            ind.fitness = value
            record = archive.make_record(
                sequence=ind.sequence,
                genotype=format_genotype(ind.genotype),
                prediction=ind.prediction,
                generation=generation,
                seed=config.seed,
            )
            bootstrap = config.fitness_function == DIVERSITY_GAIN and archive.total == 0
            archive.try_admit(record, value, bootstrap=bootstrap)
        evaluated = [ind.fitness for ind in population if ind.fitness is not None]
        trace.append(
            TraceRow(
                generation=generation,
                archive_quality=archive.quality(),
                archive_size=archive.total,
                mean_fitness=statistics.fmean(evaluated) if evaluated else 0.0,
                median_fitness=statistics.median(evaluated) if evaluated else 0.0,
                mean_diff_weight=statistics.fmean(ind.weight for ind in population),
                elapsed_seconds=elapsed(),
                oracle_calls=oracle_calls,
            )
        )
        if observer is not None:
            observer(generation, population, archive)
        if stop_reason is None:
            if archive.is_full:
                stop_reason = STOP_CAPACITY
            elif elapsed() >= stopping.time_budget_seconds:
                stop_reason = STOP_TIME
            elif stopping.max_generations is not None and generation + 1 >= stopping.max_generations:
                stop_reason = STOP_GENERATIONS
            elif stopping.max_evaluations is not None and oracle_calls >= stopping.max_evaluations:
                stop_reason = STOP_EVALUATIONS
        if stop_reason is not None:
            break

        fitness_order = sorted(
            range(len(population)),
            key=lambda i: (-population[i].fitness, population[i].weight, i),
        )
        elites = [
            Individual(genotype=population[i].genotype, origin="elite")
            for i in fitness_order[:elite_n]
        ]
        fresh = [
            Individual(genotype=sample_genotype(config.grammar, ctx, rng, domain=domain), origin="novelty")
            for _ in range(novelty_n)
        ]
        children = _offspring(population, operators_n, config, ctx, domain, rng, stats)
        population = elites + fresh + children
        generation += 1

    return RunResult(
        archive=archive,
        trace=trace,
        stop_reason=stop_reason,
        generations=generation + 1,
        oracle_calls=oracle_calls,
        wall_time_seconds=elapsed(),
        op_stats=stats,
        config=config,
        cache_hits=cache.hits,
        cache_misses=cache.misses,
    )


def config_snapshot(config: EvolutionConfig) -> dict:
    """JSON-safe dump of every knob that shaped a run."""
    snap = asdict(config)
    snap["grammar"]["excluded_kinds"] = sorted(config.grammar.excluded_kinds)
    return snap


def run_metadata(result: RunResult, oracle: Oracle) -> dict:
    """Sidecar payload for a dataset export.

    Everything here is reproducible from (seed, config, oracle) except
    the ``timings`` block, which callers must ignore when comparing.
    """
    return {
        "config": config_snapshot(result.config),
        "oracle": oracle.describe(),
        "metrics": result.archive.metrics(),
        "stop_reason": result.stop_reason,
        "generations": result.generations,
        "oracle_calls": result.oracle_calls,
        "cache_hits": result.cache_hits,
        "cache_misses": result.cache_misses,
        "seed": result.config.seed,
        "timings": {"wall_time_seconds": result.wall_time_seconds},
    }


@dataclass
class RunSummary:
    name: str
    seed: int
    quality: float
    archive_size: int
    generations: int
    stop_reason: str
    wall_time_seconds: float
    error: Optional[str] = None


@dataclass
class ComparisonReport:
    runs: list[RunSummary]
    traces: dict[tuple[str, int], list[TraceRow]]

    def qualities(self, name: str) -> list[float]:
        return [r.quality for r in self.runs if r.name == name and r.error is None]

    def summary(self) -> dict:
        out = {}
        names = []
        for r in self.runs:
            if r.name not in names:
                names.append(r.name)
        for name in names:
            qs = self.qualities(name)
            entry: dict = {"runs": sum(1 for r in self.runs if r.name == name), "failed": sum(1 for r in self.runs if r.name == name and r.error is not None)}
            if qs:
                entry["median_quality"] = statistics.median(qs)
                if len(qs) >= 2:
                    q1, _, q3 = statistics.quantiles(qs, n=4, method="inclusive")
                    entry["iqr"] = (q1, q3)
                else:
                    entry["iqr"] = (qs[0], qs[0])
            out[name] = entry
        return out


def compare_strategies(
    ctx: ReferenceContext,
    configs: dict[str, EvolutionConfig],
    seeds: Sequence[int],
    oracle_factory: Callable[[], Oracle],
) -> ComparisonReport:
    """Run each named config across the seed list under one shared budget.

    Configs must agree on the time budget (otherwise the comparison is
    meaningless); a run that raises is recorded as failed rather than
    sinking the whole comparison.
    """
    budgets = {cfg.stopping.time_budget_seconds for cfg in configs.values()}
    if len(budgets) > 1:
        raise ValueError(f"configs disagree on time budget: {sorted(budgets)}")
    runs: list[RunSummary] = []
    traces: dict[tuple[str, int], list[TraceRow]] = {}
    for name, cfg in configs.items():
        for seed in seeds:
            seeded = replace(cfg, seed=seed)
            oracle = oracle_factory()
            try:
                result = run(ctx, seeded, oracle)
                runs.append(
                    RunSummary(
                        name=name,
                        seed=seed,
                        quality=result.archive.quality(),
                        archive_size=result.archive.total,
                        generations=result.generations,
                        stop_reason=result.stop_reason,
                        wall_time_seconds=result.wall_time_seconds,
                    )
                )
                traces[(name, seed)] = result.trace
            except Exception as exc:  # noqa: BLE001 - failed runs must not sink the sweep
                runs.append(
                    RunSummary(
                        name=name,
                        seed=seed,
                        quality=float("nan"),
                        archive_size=0,
                        generations=0,
                        stop_reason="error",
                        wall_time_seconds=0.0,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
            finally:
                closer = getattr(oracle, "close", None)
                if closer is not None:
                    closer()
    return ComparisonReport(runs=runs, traces=traces)
