"""
NSGA-II over box-bounded genomes in [-1, 1]^d.

Objectives are minimization-oriented vectors. Every evaluation is logged and
fed to a history-wide Pareto archive; the population itself only drives the
search.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from mechanism.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

LOWER = -1.0
UPPER = 1.0
# parents closer than this in a coordinate are not recombined there
SBX_MIN_GAP = 1e-14


class EvolutionError(RuntimeError):
    """The evaluation callback failed; the run is aborted"""

    def __init__(self, trial: int, genome, message: str):
        super().__init__(f"Evaluation of trial {trial} failed: {message}")
        self.trial = trial
        self.genome = np.array(genome)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 50
    generations: int = 600
    crossover_prob: float = 0.9
    crossover_eta: float = 20.0
    mutation_prob: float | None = None
    mutation_eta: float = 20.0
    rng_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ConfigurationError(f"population_size must be even and at least 4, got {self.population_size}")
        if self.generations < 1:
            raise ConfigurationError(f"generations must be at least 1, got {self.generations}")
        for name in ('crossover_prob', 'mutation_prob'):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        if not (self.crossover_eta > 0 and self.mutation_eta > 0):
            raise ConfigurationError("Distribution indices must be positive")
        if self.rng_seed < 0:
            raise ConfigurationError(f"rng_seed must be non-negative, got {self.rng_seed}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}")

    @property
    def evaluations(self) -> int:
        return self.population_size * self.generations

    def mutation_rate(self, genome_length: int) -> float:
        return 1.0 / genome_length if self.mutation_prob is None else self.mutation_prob


@dataclass
class Individual:
    genome: np.ndarray
    objectives: np.ndarray
    trial: int
    rank: int = 0
    crowding: float = 0.0


@dataclass(frozen=True)
class Sample:
    """One logged evaluation: trial number, generation, genome, objectives and the callback's result"""
    trial: int
    generation: int
    genome: np.ndarray
    objectives: tuple[float, ...]
    result: Any = None


@dataclass
class ParetoArchive:
    """Mutually non-dominated samples seen over a whole run, in order of arrival"""
    entries: list[Sample] = field(default_factory=list)

    def add(self, sample: Sample) -> bool:
        candidate = np.asarray(sample.objectives)
        for entry in self.entries:
            current = np.asarray(entry.objectives)
            if dominates(current, candidate) or np.array_equal(current, candidate):
                return False
        self.entries = [entry for entry in self.entries if not dominates(candidate, np.asarray(entry.objectives))]
        self.entries.append(sample)
        return True

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def dominates(a, b) -> bool:
    """a is no worse than b everywhere and strictly better somewhere (minimization)"""
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_sort(objectives) -> list[list[int]]:
    """Fast non-dominated sort; returns fronts as lists of indices into `objectives`"""
    values = np.asarray(objectives, dtype=float)
    if values.ndim != 2:
        raise ConfigurationError(f"Objectives must have shape (n, m), got {values.shape}")
    count = values.shape[0]
    if count == 0:
        return []
    no_worse = np.all(values[:, None, :] <= values[None, :, :], axis=2)
    better = np.any(values[:, None, :] < values[None, :, :], axis=2)
    # dom[i, j]: i dominates j
    dom = no_worse & better
    dominated_by = dom.sum(axis=0)
    fronts = []
    current = [i for i in range(count) if dominated_by[i] == 0]
    while current:
        fronts.append(current)
        following = []
        for i in current:
            for j in np.flatnonzero(dom[i]):
                dominated_by[j] -= 1
                if dominated_by[j] == 0:
                    following.append(int(j))
        current = sorted(following)
    return fronts


def crowding_distance(objectives) -> np.ndarray:
    """
    Crowding distance of every member of one front.

    Boundary members of each objective get +inf, interior members the sum of
    normalized neighbour gaps. An objective with zero range contributes
    nothing.
    """
    values = np.asarray(objectives, dtype=float)
    count = values.shape[0]
    if count <= 2:
        return np.full(count, np.inf)
    distance = np.zeros(count)
    for m in range(values.shape[1]):
        order = np.argsort(values[:, m], kind='stable')
        column = values[order, m]
        spread = column[-1] - column[0]
        if spread <= 0.0:
            continue
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        distance[order[1:-1]] += (column[2:] - column[:-2]) / spread
    return distance


def _assign_rank_and_crowding(population: list[Individual]) -> list[list[int]]:
    fronts = non_dominated_sort([ind.objectives for ind in population])
    for rank, front in enumerate(fronts):
        crowding = crowding_distance([population[i].objectives for i in front])
        for i, value in zip(front, crowding):
            population[i].rank = rank
            population[i].crowding = float(value)
    return fronts


def _tournament(population: list[Individual], rng: np.random.Generator) -> Individual:
    a, b = (population[i] for i in rng.integers(0, len(population), size=2))
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    return b if b.crowding > a.crowding else a


def _sbx_spread(rand: float, beta: float, eta: float) -> float:
    alpha = 2.0 - beta ** -(eta + 1.0)
    if rand <= 1.0 / alpha:
        return (rand * alpha) ** (1.0 / (eta + 1.0))
    return (1.0 / (2.0 - rand * alpha)) ** (1.0 / (eta + 1.0))


def simulated_binary_crossover(first, second, rng: np.random.Generator, eta: float, prob: float):
    """Bounded SBX; each coordinate is recombined with probability 0.5"""
    child_a, child_b = np.array(first, dtype=float), np.array(second, dtype=float)
    if rng.random() > prob:
        return child_a, child_b
    for i in range(child_a.shape[0]):
        if rng.random() > 0.5 or abs(first[i] - second[i]) <= SBX_MIN_GAP:
            continue
        low, high = min(first[i], second[i]), max(first[i], second[i])
        rand = rng.random()
        gap = high - low
        lower_child = 0.5 * ((low + high) - _sbx_spread(rand, 1.0 + 2.0 * (low - LOWER) / gap, eta) * gap)
        upper_child = 0.5 * ((low + high) + _sbx_spread(rand, 1.0 + 2.0 * (UPPER - high) / gap, eta) * gap)
        lower_child = min(max(lower_child, LOWER), UPPER)
        upper_child = min(max(upper_child, LOWER), UPPER)
        if rng.random() <= 0.5:
            child_a[i], child_b[i] = upper_child, lower_child
        else:
            child_a[i], child_b[i] = lower_child, upper_child
    return child_a, child_b


def polynomial_mutation(genome, rng: np.random.Generator, eta: float, prob: float) -> np.ndarray:
    """Bounded polynomial mutation, result clamped to [-1, 1]"""
    mutated = np.array(genome, dtype=float)
    span = UPPER - LOWER
    power = 1.0 / (eta + 1.0)
    for i in range(mutated.shape[0]):
        if rng.random() > prob:
            continue
        value = mutated[i]
        rand = rng.random()
        if rand <= 0.5:
            slack = 1.0 - (value - LOWER) / span
            delta = (2.0 * rand + (1.0 - 2.0 * rand) * slack ** (eta + 1.0)) ** power - 1.0
        else:
            slack = 1.0 - (UPPER - value) / span
            delta = 1.0 - (2.0 * (1.0 - rand) + 2.0 * (rand - 0.5) * slack ** (eta + 1.0)) ** power
        mutated[i] = min(max(value + delta * span, LOWER), UPPER)
    return mutated


def _objective_vector(result) -> np.ndarray:
    values = getattr(result, 'objectives', result)
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.size == 0 or not np.all(np.isfinite(vector)):
        raise ValueError(f"Objective vector must be finite and non-empty, got {values!r}")
    return vector


def _evaluate_batch(problem: Callable, genomes: list[np.ndarray], first_trial: int, workers: int) -> list[tuple[Any, np.ndarray]]:
    """Evaluate genomes, results in input order whatever the worker count"""

    def run(item):
        index, genome = item
        trial = first_trial + index
        try:
            result = problem(genome)
            return result, _objective_vector(result)
        except Exception as exc:
            logger.error(f"Evaluation of trial {trial} raised {exc!r}")
            raise EvolutionError(trial, genome, str(exc)) from exc

    items = list(enumerate(genomes))
    if workers <= 1:
        return [run(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, items))


def _select_survivors(combined: list[Individual], size: int) -> list[Individual]:
    fronts = _assign_rank_and_crowding(combined)
    survivors = []
    for front in fronts:
        if len(survivors) + len(front) <= size:
            survivors.extend(combined[i] for i in front)
            continue
        by_crowding = sorted(front, key=lambda i: -combined[i].crowding)
        survivors.extend(combined[i] for i in by_crowding[:size - len(survivors)])
        break
    return survivors


def evolve(
    problem: Callable[[np.ndarray], Any],
    genome_length: int,
    ga: GAConfig,
    on_generation: Callable[[int, list[Individual]], None] | None = None,
) -> tuple[ParetoArchive, list[Sample]]:
    """
    Run NSGA-II for ga.generations generations of ga.population_size evaluations.

    The random initial population is generation 1. `problem` maps a genome to
    either an objective vector or an object with an `objectives` attribute.
    Returns the history-wide Pareto archive and the log of every evaluation.
    """
    if genome_length < 1:
        raise ConfigurationError(f"genome_length must be at least 1, got {genome_length}")
    rng = np.random.default_rng(ga.rng_seed)
    mutation_rate = ga.mutation_rate(genome_length)
    archive = ParetoArchive()
    samples: list[Sample] = []

    def evaluate_all(genomes, generation):
        first_trial = len(samples)
        individuals = []
        for index, (genome, (result, objectives)) in enumerate(
            zip(genomes, _evaluate_batch(problem, genomes, first_trial, ga.workers))
        ):
            sample = Sample(first_trial + index, generation, genome, tuple(float(v) for v in objectives), result)
            samples.append(sample)
            archive.add(sample)
            individuals.append(Individual(genome, objectives, sample.trial))
        return individuals

    logger.info(f"Starting NSGA-II: {ga.population_size} x {ga.generations} evaluations, genome length {genome_length}, seed {ga.rng_seed}")
    genomes = [rng.uniform(LOWER, UPPER, genome_length) for _ in range(ga.population_size)]
    population = evaluate_all(genomes, 1)
    _assign_rank_and_crowding(population)
    _log_generation(1, ga.generations, population, archive)
    if on_generation:
        on_generation(1, population)

    for generation in range(2, ga.generations + 1):
        offspring = []
        while len(offspring) < ga.population_size:
            first, second = _tournament(population, rng), _tournament(population, rng)
            child_a, child_b = simulated_binary_crossover(first.genome, second.genome, rng, ga.crossover_eta, ga.crossover_prob)
            offspring.append(polynomial_mutation(child_a, rng, ga.mutation_eta, mutation_rate))
            offspring.append(polynomial_mutation(child_b, rng, ga.mutation_eta, mutation_rate))
        population = _select_survivors(population + evaluate_all(offspring, generation), ga.population_size)
        _assign_rank_and_crowding(population)
        _log_generation(generation, ga.generations, population, archive)
        if on_generation:
            on_generation(generation, population)

    return archive, samples


def _log_generation(generation: int, total: int, population: list[Individual], archive: ParetoArchive):
    best = np.min([ind.objectives for ind in population], axis=0)
    logger.info(f"Generation {generation}/{total}: archive size {len(archive)}, best objectives {np.round(best, 6).tolist()}")
