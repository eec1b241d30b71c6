"""Pairwise K-step horizon payoffs and population fitness aggregation.

A match between two machines is scored without explicit round-by-round
simulation: the coupled state chain is advanced K steps by matrix
operations and the expected per-round payoff is read off the resulting
state distribution. ``simulate_match`` provides an independent Monte-Carlo
estimate of the same quantity for cross-checking.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np


class InteractionError(Exception):
    """Shape mismatch between machines, distributions or game."""


class JointDistribution:
    """Joint distribution over the two machines' states."""

    def __init__(self, probs):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 2:
            raise InteractionError("joint distribution must be a matrix")
        if np.any(p < -1e-12):
            raise InteractionError("joint distribution has negative entry %g" % p.min())
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > 1e-9:
            raise InteractionError("joint distribution sums to %.12g" % p.sum())
        self.probs = p
        self.probs.setflags(write=False)

    @classmethod
    def from_initials(cls, m1, m2):
        return cls(np.outer(m1.initial, m2.initial))


@dataclass(frozen=True)
class InteractionConfig:
    """Horizon length and evaluation method for pairwise matches."""
    k_steps: int = 5
    method: str = "joint"
    horizon_mode: str = "last"

    def __post_init__(self):
        if self.k_steps < 1:
            raise InteractionError("k_steps must be >= 1, got %d" % self.k_steps)
        if self.method not in ("joint", "factored"):
            raise InteractionError("method must be 'joint' or 'factored'")
        if self.horizon_mode not in ("last", "average"):
            raise InteractionError("horizon_mode must be 'last' or 'average'")


@dataclass
class InteractionCounters:
    """Instrumentation for the benchmark harness."""
    pair_evaluations: int = 0
    chain_steps: int = 0


@dataclass
class FitnessVector:
    """Per-agent accumulated payoff from all pairwise matches."""
    scores: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return self.scores.size


def _check_pair(m1, m2):
    if m1.num_actions != m2.num_actions:
        raise InteractionError(
            "machines have different action counts: %d vs %d"
            % (m1.num_actions, m2.num_actions))


def _check_game(game, m1):
    if not game.is_square or game.actions_row != m1.num_actions:
        raise InteractionError(
            "game is %dx%d but machines have %d actions"
            % (game.actions_row, game.actions_col, m1.num_actions))


def _coupling_kernels(m1, m2):
    """Per-pair step kernels, constant across the K steps.

    a1[t, s, s'] marginalizes machine 1's transition over machine 2's
    emitted action in state t; b2[s, t, t'] is the mirror image.
    """
    a1 = np.einsum("ta,sap->tsp", m2.emission, m1.transition)
    b2 = np.einsum("sa,taq->stq", m1.emission, m2.transition)
    return a1, b2


def joint_step(d, m1, m2):
    """Exact one-step evolution of the coupled state chain."""
    _check_pair(m1, m2)
    probs = d.probs if isinstance(d, JointDistribution) else np.asarray(d, dtype=float)
    if probs.shape != (m1.num_states, m2.num_states):
        raise InteractionError(
            "joint distribution shape %s does not match machines (%d, %d)"
            % (probs.shape, m1.num_states, m2.num_states))
    a1, b2 = _coupling_kernels(m1, m2)
    nxt = np.einsum("st,tsp,stq->pq", probs, a1, b2)
    return JointDistribution(nxt / nxt.sum())


def factored_step(d1, d2, m1, m2):
    """Mean-field update of the two marginal state distributions.

    Exact when neither machine's transitions depend on the observed action;
    otherwise an approximation that drops state correlations.
    """
    _check_pair(m1, m2)
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if d1.shape != (m1.num_states,) or d2.shape != (m2.num_states,):
        raise InteractionError(
            "marginal shapes %s, %s do not match machines (%d, %d)"
            % (d1.shape, d2.shape, m1.num_states, m2.num_states))
    q1 = d1 @ m1.emission
    q2 = d2 @ m2.emission
    d1_next = np.einsum("s,a,sap->p", d1, q2, m1.transition)
    d2_next = np.einsum("t,a,taq->q", d2, q1, m2.transition)
    # Without renormalization the two sums multiply into each other every
    # step and float drift compounds doubly exponentially.
    return d1_next / d1_next.sum(), d2_next / d2_next.sum()


def stage_payoff(d, m1, m2, game):
    """Expected per-round payoffs under the current state distribution.

    ``d`` is either a JointDistribution (or raw joint matrix) or a
    ``(d1, d2)`` pair of marginals.
    """
    _check_pair(m1, m2)
    _check_game(game, m1)
    # e1 @ payoff @ e2.T gives the per-joint-state expected payoff matrix.
    r1 = m1.emission @ game.payoff_row @ m2.emission.T
    r2 = m1.emission @ game.payoff_col @ m2.emission.T
    if isinstance(d, tuple):
        d1, d2 = (np.asarray(x, dtype=float) for x in d)
        return float(d1 @ r1 @ d2), float(d1 @ r2 @ d2)
    probs = d.probs if isinstance(d, JointDistribution) else np.asarray(d, dtype=float)
    if probs.shape != r1.shape:
        raise InteractionError(
            "distribution shape %s does not match state shape %s"
            % (probs.shape, r1.shape))
    return float(np.sum(probs * r1)), float(np.sum(probs * r2))


def horizon_values(m1, m2, game, cfg, counters=None):
    """Deterministic K-step horizon payoffs for one machine pair."""
    _check_pair(m1, m2)
    _check_game(game, m1)
    if counters is not None:
        counters.pair_evaluations += 1
        counters.chain_steps += cfg.k_steps
    if cfg.method == "joint":
        return _horizon_joint(m1, m2, game, cfg)
    return _horizon_factored(m1, m2, game, cfg)


def _horizon_joint(m1, m2, game, cfg):
    s1, s2 = m1.num_states, m2.num_states
    a1, b2 = _coupling_kernels(m1, m2)
    # Flattened joint transition matrix over (s, t) state pairs.
    step_matrix = np.einsum("tsp,stq->stpq", a1, b2).reshape(s1 * s2, s1 * s2)
    r1 = (m1.emission @ game.payoff_row @ m2.emission.T).ravel()
    r2 = (m1.emission @ game.payoff_col @ m2.emission.T).ravel()
    d = np.outer(m1.initial, m2.initial).ravel()
    if cfg.horizon_mode == "last":
        for _ in range(cfg.k_steps):
            d = d @ step_matrix
        return float(d @ r1), float(d @ r2)
    acc1 = acc2 = 0.0
    for _ in range(cfg.k_steps):
        d = d @ step_matrix
        acc1 += d @ r1
        acc2 += d @ r2
    return float(acc1 / cfg.k_steps), float(acc2 / cfg.k_steps)


def _factored_payoff(d1, d2, m1, m2, game):
    q1 = d1 @ m1.emission
    q2 = d2 @ m2.emission
    return float(q1 @ game.payoff_row @ q2), float(q1 @ game.payoff_col @ q2)


def _horizon_factored(m1, m2, game, cfg):
    d1 = np.array(m1.initial)
    d2 = np.array(m2.initial)
    if cfg.horizon_mode == "last":
        for _ in range(cfg.k_steps):
            d1, d2 = factored_step(d1, d2, m1, m2)
        return _factored_payoff(d1, d2, m1, m2, game)
    acc1 = acc2 = 0.0
    for _ in range(cfg.k_steps):
        d1, d2 = factored_step(d1, d2, m1, m2)
        v1, v2 = _factored_payoff(d1, d2, m1, m2, game)
        acc1 += v1
        acc2 += v2
    return acc1 / cfg.k_steps, acc2 / cfg.k_steps


def _sample_rows(rng, row_dists, indices):
    """Vectorized categorical draw: one sample per row picked by indices."""
    cum = np.cumsum(row_dists[indices], axis=1)
    u = rng.random(indices.size)
    return np.minimum((u[:, None] > cum).sum(axis=1), row_dists.shape[-1] - 1)


def simulate_match(m1, m2, game, k_steps, rollouts, rng, horizon_mode="last"):
    """Monte-Carlo estimate of horizon payoffs by explicit play.

    Each rollout advances the pair through k_steps observed-action
    transitions; payoffs are read from the states reached after each
    transition, matching the chain computation step for step. Returns
    (mean1, mean2, stderr1, stderr2).
    """
    _check_pair(m1, m2)
    _check_game(game, m1)
    if rollouts < 1:
        raise InteractionError("rollouts must be >= 1")
    n = rollouts
    flat_t1 = m1.transition.reshape(-1, m1.num_states)
    flat_t2 = m2.transition.reshape(-1, m2.num_states)
    s1 = _sample_rows(rng, m1.initial[np.newaxis, :], np.zeros(n, dtype=int))
    s2 = _sample_rows(rng, m2.initial[np.newaxis, :], np.zeros(n, dtype=int))
    a = m1.num_actions
    act1 = _sample_rows(rng, m1.emission, s1)
    act2 = _sample_rows(rng, m2.emission, s2)
    sum1 = np.zeros(n)
    sum2 = np.zeros(n)
    for _ in range(k_steps):
        s1 = _sample_rows(rng, flat_t1, s1 * a + act2)
        s2 = _sample_rows(rng, flat_t2, s2 * a + act1)
        act1 = _sample_rows(rng, m1.emission, s1)
        act2 = _sample_rows(rng, m2.emission, s2)
        if horizon_mode == "average":
            sum1 += game.payoff_row[act1, act2]
            sum2 += game.payoff_col[act1, act2]
    if horizon_mode == "average":
        p1 = sum1 / k_steps
        p2 = sum2 / k_steps
    else:
        p1 = game.payoff_row[act1, act2].astype(float)
        p2 = game.payoff_col[act1, act2].astype(float)
    stderr1 = float(p1.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    stderr2 = float(p2.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return float(p1.mean()), float(p2.mean()), stderr1, stderr2


def interaction(population, game, cfg, counters=None, workers=1):
    """Round-robin fitness: every unordered pair is evaluated exactly once.

    Results are accumulated in pair-index order, so the fitness vector is
    identical regardless of worker count.
    """
    if not population:
        raise InteractionError("population is empty")
    p = len(population)
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]

    def evaluate(pair):
        i, j = pair
        return horizon_values(population[i], population[j], game, cfg)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, pairs))
    else:
        results = [evaluate(pair) for pair in pairs]

    if counters is not None:
        counters.pair_evaluations += len(pairs)
        counters.chain_steps += len(pairs) * cfg.k_steps

    scores = np.zeros(p)
    for (i, j), (v1, v2) in zip(pairs, results):
        scores[i] += v1
        scores[j] += v2
    return FitnessVector(scores)
