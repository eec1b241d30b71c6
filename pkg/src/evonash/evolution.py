"""Genetic-algorithm driver: shuffle, fitness, selection, reproduction."""

import time
from dataclasses import dataclass, field

import numpy as np

from .game import MixedStrategy
from .interaction import InteractionConfig, interaction, factored_step
from .smm import MutationParams, mutate, random_smm


class ConfigError(Exception):
    """Invalid evolution configuration."""


@dataclass(frozen=True)
class EvolutionConfig:
    """All parameters of one evolution run.

    Defaults follow the benchmark setup: 1000 generations, 10 agents,
    2 machine states, 5-step horizon, truncation selection on both sides
    with half the population reproducing each generation.

    ``reactive`` controls whether agents' state transitions may condition
    on the opponent's observed action. Non-reactive (opponent-blind)
    agents are the default: reactive populations discover within-match
    reciprocity and anti-coordination, which pays better than the stage
    game's mixed equilibrium and pulls the population away from it.
    """
    generations: int = 1000
    population_size: int = 10
    state_size: int = 2
    reactive: bool = False
    interaction: InteractionConfig = field(default_factory=InteractionConfig)
    reproductive_mode: str = "truncation"
    survival_mode: str = "truncation"
    num_parents: int = 5
    overlap: bool = False
    mutation: MutationParams = field(default_factory=MutationParams)
    seed: int = 0

    def __post_init__(self):
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.population_size < 1:
            raise ConfigError("population_size must be >= 1")
        if self.state_size < 1:
            raise ConfigError("state_size must be >= 1")
        if self.reproductive_mode not in ("truncation", "roulette"):
            raise ConfigError("reproductive_mode must be 'truncation' or 'roulette'")
        if self.survival_mode not in ("truncation", "uniform"):
            raise ConfigError("survival_mode must be 'truncation' or 'uniform'")
        if self.num_parents < 1 or self.num_parents > self.population_size:
            raise ConfigError(
                "num_parents (%d) must be in [1, population_size=%d]"
                % (self.num_parents, self.population_size))
        if not self.overlap and self.num_parents > self.population_size:
            raise ConfigError("num_children (%d) exceeds population_size" % self.num_parents)
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        if "interaction" in doc:
            doc["interaction"] = InteractionConfig(**doc["interaction"])
        if "mutation" in doc:
            doc["mutation"] = MutationParams(**doc["mutation"])
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError("bad config field: %s" % exc) from exc

    def to_dict(self):
        return {
            "generations": self.generations,
            "population_size": self.population_size,
            "state_size": self.state_size,
            "reactive": self.reactive,
            "interaction": {
                "k_steps": self.interaction.k_steps,
                "method": self.interaction.method,
                "horizon_mode": self.interaction.horizon_mode,
            },
            "reproductive_mode": self.reproductive_mode,
            "survival_mode": self.survival_mode,
            "num_parents": self.num_parents,
            "overlap": self.overlap,
            "mutation": {"rate": self.mutation.rate, "sigma": self.mutation.sigma},
            "seed": self.seed,
        }


@dataclass
class GenerationRecord:
    generation: int
    fitness: np.ndarray
    mean_fitness: float
    max_fitness: float
    mean_action_probs: np.ndarray
    millis: float


@dataclass
class RunHistory:
    records: list = field(default_factory=list)
    final_population: list = field(default_factory=list)


def shuffle(population, rng):
    """Uniformly random reordering of the population."""
    order = rng.permutation(len(population))
    return [population[i] for i in order]


def _truncation_indices(fitness, n):
    # Stable sort on negated fitness: ties broken by lower position index.
    order = np.argsort(-np.asarray(fitness), kind="stable")
    return [int(i) for i in order[:n]]


def _roulette_weights(fitness):
    # Proportional to fitness, shifted just enough to make every weight
    # positive (payoffs can be negative); all-positive vectors are used
    # as-is so the proportions stay 3:1 for fitness (1, 3).
    f = np.asarray(fitness, dtype=float)
    eps = 1e-9 * max(1.0, float(np.max(np.abs(f))) if f.size else 1.0)
    w = f - min(0.0, float(f.min())) + eps
    return w / w.sum()


def reproductive_selection(population, fitness, mode, n_parents, rng):
    """Pick the agents allowed to reproduce; returns their indices."""
    scores = fitness.scores if hasattr(fitness, "scores") else np.asarray(fitness)
    if n_parents > len(population):
        raise ConfigError("n_parents (%d) exceeds population size (%d)"
                          % (n_parents, len(population)))
    if mode == "truncation":
        return _truncation_indices(scores, n_parents)
    if mode == "roulette":
        w = _roulette_weights(scores)
        return [int(i) for i in rng.choice(len(population), size=n_parents, p=w)]
    raise ConfigError("unknown reproductive mode %r" % mode)


def survival_selection(population, fitness, mode, n_survivors, rng):
    """Pick the agents that survive into the next generation."""
    scores = fitness.scores if hasattr(fitness, "scores") else np.asarray(fitness)
    if n_survivors > len(population):
        raise ConfigError("n_survivors (%d) exceeds population size (%d)"
                          % (n_survivors, len(population)))
    if mode == "truncation":
        return _truncation_indices(scores, n_survivors)
    if mode == "uniform":
        chosen = rng.choice(len(population), size=n_survivors, replace=False)
        return [int(i) for i in chosen]
    raise ConfigError("unknown survival mode %r" % mode)


def make_children(parents, mutation, num_children, rng, opponent_blind=False):
    """Round-robin copies of the parents with mutation applied."""
    if num_children > 0 and not parents:
        raise ConfigError("cannot make children without parents")
    children = []
    for c in range(num_children):
        child_rng = np.random.Generator(np.random.PCG64(rng.integers(2 ** 63)))
        children.append(mutate(parents[c % len(parents)], mutation, child_rng,
                               opponent_blind=opponent_blind))
    return children


def _mean_action_probs(population):
    # Cheap population summary: initial-state-weighted emission average.
    dists = [m.initial @ m.emission for m in population]
    return np.mean(dists, axis=0)


def evolve(config, game, counters=None, workers=1, progress=None):
    """Run the full G-generation loop; returns (population, RunHistory)."""
    if not game.is_square:
        raise ConfigError("population play needs a square game, got %dx%d"
                          % (game.actions_row, game.actions_col))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    p = config.population_size
    blind = not config.reactive
    population = [random_smm(config.state_size, game.actions_row, rng,
                             opponent_blind=blind)
                  for _ in range(p)]
    history = RunHistory()
    for gen in range(config.generations):
        t0 = time.perf_counter()
        population = shuffle(population, rng)
        fitness = interaction(population, game, config.interaction,
                              counters=counters, workers=workers)
        parent_idx = reproductive_selection(
            population, fitness, config.reproductive_mode, config.num_parents, rng)
        parents = [population[i] for i in parent_idx]
        num_children = config.num_parents
        children = make_children(parents, config.mutation, num_children, rng,
                                 opponent_blind=blind)
        if config.overlap:
            # Parents stay candidates: extend, then cut back to P with
            # children inheriting their parent's latest fitness.
            pool = population + children
            pool_fitness = np.concatenate(
                [fitness.scores, fitness.scores[parent_idx]])
            survivor_idx = survival_selection(
                pool, pool_fitness, config.survival_mode, p, rng)
            population = [pool[i] for i in survivor_idx]
        else:
            survivor_idx = survival_selection(
                population, fitness, config.survival_mode, p - num_children, rng)
            population = [population[i] for i in survivor_idx] + children
        assert len(population) == p
        millis = (time.perf_counter() - t0) * 1000.0
        history.records.append(GenerationRecord(
            generation=gen,
            fitness=fitness.scores,
            mean_fitness=float(fitness.scores.mean()),
            max_fitness=float(fitness.scores.max()),
            mean_action_probs=_mean_action_probs(population),
            millis=millis,
        ))
        if progress is not None:
            progress(gen, history.records[-1])
    history.final_population = population
    return population, history


def extract_population_strategy(population, game, cfg):
    """Mean horizon action distribution of the population.

    Each agent's action distribution is read at the horizon of a K-step
    factored interaction against every other agent (round-robin averaged),
    then averaged across the population.
    """
    if not population:
        raise ConfigError("population is empty")
    per_agent = []
    for i, m in enumerate(population):
        opponents = [population[j] for j in range(len(population)) if j != i]
        if not opponents:
            opponents = [m]
        dists = []
        for opp in opponents:
            d1 = np.array(m.initial)
            d2 = np.array(opp.initial)
            for _ in range(cfg.k_steps):
                d1, d2 = factored_step(d1, d2, m, opp)
            dists.append(d1 @ m.emission)
        per_agent.append(np.mean(dists, axis=0))
    mean = np.mean(per_agent, axis=0)
    return MixedStrategy(mean / mean.sum())
