"""Evolutionary approximation of Nash equilibria for normal-form games.

Populations of stochastic Moore machine agents play K-step horizon
matches against each other and evolve under genetic selection; an exact
support-enumeration oracle validates the strategies the population
converges to, and a benchmark harness measures the algorithm's empirical
scaling.
"""

from .evolution import (EvolutionConfig, RunHistory, evolve,
                        extract_population_strategy)
from .game import (MixedStrategy, NormalFormGame, builtin_game,
                   expected_payoff, load_game, save_game)
from .interaction import (FitnessVector, InteractionConfig,
                          InteractionCounters, horizon_values, interaction,
                          simulate_match)
from .nash_oracle import (Equilibrium, distance_to_nearest_equilibrium,
                          is_epsilon_equilibrium, regret, support_enumeration)
from .smm import MutationParams, Smm, load_smm, mutate, random_smm, save_smm

__version__ = "0.1.0"

__all__ = [
    "EvolutionConfig", "RunHistory", "evolve", "extract_population_strategy",
    "MixedStrategy", "NormalFormGame", "builtin_game", "expected_payoff",
    "load_game", "save_game",
    "FitnessVector", "InteractionConfig", "InteractionCounters",
    "horizon_values", "interaction", "simulate_match",
    "Equilibrium", "distance_to_nearest_equilibrium",
    "is_epsilon_equilibrium", "regret", "support_enumeration",
    "MutationParams", "Smm", "load_smm", "mutate", "random_smm", "save_smm",
]
