"""Stochastic Moore machine agents: construction, validation, mutation, I/O."""

import json
from dataclasses import dataclass

import numpy as np

SIMPLEX_TOL = 1e-9
ENTRY_TOL = 1e-12


class SmmError(Exception):
    """Invalid machine definition or agent file."""


class Smm:
    """A finite-state agent with stochastic emissions and transitions.

    In each state the agent emits an action drawn from the state's emission
    distribution; after observing the opponent's action it moves to a next
    state drawn from ``transition[state][opponent_action]``. Deterministic
    Moore machines are the special case of one-hot rows.
    """

    def __init__(self, initial, emission, transition):
        self.initial = _clamped(np.asarray(initial, dtype=float))
        self.emission = _clamped(np.asarray(emission, dtype=float))
        self.transition = _clamped(np.asarray(transition, dtype=float))
        if self.initial.ndim != 1 or self.emission.ndim != 2 or self.transition.ndim != 3:
            raise SmmError("expected initial vector, emission matrix, transition tensor")
        s = self.initial.size
        if s < 1:
            raise SmmError("state count must be >= 1")
        a = self.emission.shape[1]
        if self.emission.shape != (s, a) or self.transition.shape != (s, a, s):
            raise SmmError(
                "inconsistent shapes: initial %s, emission %s, transition %s"
                % (self.initial.shape, self.emission.shape, self.transition.shape))
        for arr in (self.initial, self.emission, self.transition):
            arr.setflags(write=False)

    @property
    def num_states(self):
        return self.initial.size

    @property
    def num_actions(self):
        return self.emission.shape[1]

    def equals(self, other):
        """Entry-for-entry equality with another machine."""
        return (self.initial.shape == other.initial.shape
                and self.emission.shape == other.emission.shape
                and np.array_equal(self.initial, other.initial)
                and np.array_equal(self.emission, other.emission)
                and np.array_equal(self.transition, other.transition))

    def __repr__(self):
        return "Smm(S=%d, A=%d)" % (self.num_states, self.num_actions)


def _clamped(arr):
    # Entries a hair outside [0, 1] (within ENTRY_TOL) are snapped back;
    # grossly out-of-range entries are left for validate to report via row sums.
    near_low = (arr < 0.0) & (arr >= -ENTRY_TOL)
    near_high = (arr > 1.0) & (arr <= 1.0 + ENTRY_TOL)
    if near_low.any() or near_high.any():
        arr = np.where(near_low, 0.0, arr)
        arr = np.where(near_high, 1.0, arr)
    return arr


@dataclass(frozen=True)
class MutationParams:
    """Per-row perturbation probability and Gaussian noise scale."""
    rate: float = 0.1
    sigma: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise SmmError("mutation rate must be in [0, 1], got %g" % self.rate)
        if self.sigma < 0.0:
            raise SmmError("mutation sigma must be >= 0, got %g" % self.sigma)


def random_smm(num_states, num_actions, rng, opponent_blind=False):
    """Draw a machine with every distribution row flat-Dirichlet distributed.

    Each row is built from independent unit-exponential draws normalized to
    sum 1, which is uniform on the simplex. With ``opponent_blind`` the
    transition rows are tied across observed opponent actions, so the
    machine's state evolves independently of the co-player.
    """
    if num_states < 1 or num_actions < 1:
        raise SmmError("num_states and num_actions must be >= 1")
    s, a = num_states, num_actions
    initial = _dirichlet_rows(rng, (s,))
    emission = _dirichlet_rows(rng, (s, a))
    if opponent_blind:
        rows = _dirichlet_rows(rng, (s, s))
        transition = np.repeat(rows[:, np.newaxis, :], a, axis=1)
    else:
        transition = _dirichlet_rows(rng, (s, a, s))
    return Smm(initial, emission, transition)


def _dirichlet_rows(rng, shape):
    draws = rng.exponential(1.0, size=shape)
    return draws / draws.sum(axis=-1, keepdims=True)


def validate(m):
    """Return None if all stochasticity invariants hold, else a report string."""
    for label, arr in (("initial", m.initial), ("emission", m.emission),
                       ("transition", m.transition)):
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            return "%s has entry outside [0, 1]: range [%g, %g]" % (
                label, arr.min(), arr.max())
    total = m.initial.sum()
    if abs(total - 1.0) > SIMPLEX_TOL:
        return "initial distribution sums to %.12g" % total
    for s in range(m.num_states):
        total = m.emission[s].sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            return "emission row %d sums to %.12g" % (s, total)
    for s in range(m.num_states):
        for a in range(m.num_actions):
            total = m.transition[s, a].sum()
            if abs(total - 1.0) > SIMPLEX_TOL:
                return "transition row (%d, %d) sums to %.12g" % (s, a, total)
    return None


def mutate(parent, params, rng, opponent_blind=False):
    """Gaussian-perturb, clamp and renormalize each row with probability rate.

    A row whose entries all clamp to zero is reset to uniform so a run can
    never abort on a degenerate mutation. The parent is unchanged. With
    ``opponent_blind`` the transition rows stay tied across observed
    actions: one row per state is perturbed and broadcast.
    """
    initial = _mutate_rows(parent.initial[np.newaxis, :], params, rng)[0]
    emission = _mutate_rows(parent.emission, params, rng)
    if opponent_blind:
        rows = _mutate_rows(parent.transition[:, 0, :], params, rng)
        transition = np.repeat(rows[:, np.newaxis, :], parent.num_actions, axis=1)
    else:
        flat_t = parent.transition.reshape(-1, parent.num_states)
        transition = _mutate_rows(flat_t, params, rng).reshape(parent.transition.shape)
    return Smm(initial, emission, transition)


def _mutate_rows(rows, params, rng):
    out = np.array(rows, dtype=float)
    n_rows, width = out.shape
    selected = rng.random(n_rows) < params.rate
    if params.sigma == 0.0:
        return out
    noise = rng.normal(0.0, params.sigma, size=(n_rows, width))
    out[selected] += noise[selected]
    # Only the perturbed rows are clamped and renormalized; untouched rows
    # pass through bit-identical so a zero-rate mutation is the identity.
    sub = np.clip(out[selected], 0.0, None)
    sums = sub.sum(axis=1)
    dead = sums <= 0.0
    sub[dead] = 1.0 / width
    sums[dead] = 1.0
    out[selected] = sub / sums[:, np.newaxis]
    return out


def save_smm(m, path):
    """Write an agent to its JSON file format."""
    doc = {
        "num_states": m.num_states,
        "num_actions": m.num_actions,
        "initial": m.initial.tolist(),
        "emission": m.emission.tolist(),
        "transition": m.transition.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_smm(path):
    """Load and validate an agent from its JSON file format."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SmmError("cannot parse %s: %s" % (path, exc)) from exc
    try:
        initial = doc["initial"]
        emission = doc["emission"]
        transition = doc["transition"]
    except (KeyError, TypeError) as exc:
        raise SmmError("agent file %s missing field: %s" % (path, exc)) from exc
    try:
        m = Smm(initial, emission, transition)
    except (ValueError, TypeError) as exc:
        raise SmmError("malformed agent file %s: %s" % (path, exc)) from exc
    if "num_states" in doc and doc["num_states"] != m.num_states:
        raise SmmError("agent file %s declares %s states but stores %d"
                       % (path, doc["num_states"], m.num_states))
    if "num_actions" in doc and doc["num_actions"] != m.num_actions:
        raise SmmError("agent file %s declares %s actions but stores %d"
                       % (path, doc["num_actions"], m.num_actions))
    report = validate(m)
    if report is not None:
        raise SmmError("agent file %s fails validation: %s" % (path, report))
    return m
