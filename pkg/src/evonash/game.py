"""Bimatrix normal-form games and mixed strategies."""

import json

import numpy as np

SIMPLEX_TOL = 1e-9
NEG_TOL = -1e-12


class GameError(Exception):
    """Invalid game definition or game file."""


class NormalFormGame:
    """A two-player game given by a pair of payoff matrices.

    ``payoff_row[i, j]`` is the row player's payoff when the row player
    plays action i and the column player plays action j; ``payoff_col``
    is the column player's payoff for the same joint action.
    """

    def __init__(self, name, payoff_row, payoff_col,
                 action_labels_row=None, action_labels_col=None):
        self.name = str(name)
        self.payoff_row = np.asarray(payoff_row, dtype=float)
        self.payoff_col = np.asarray(payoff_col, dtype=float)
        if self.payoff_row.ndim != 2 or self.payoff_col.ndim != 2:
            raise GameError("payoff matrices must be 2-dimensional")
        if self.payoff_row.shape != self.payoff_col.shape:
            raise GameError(
                "payoff matrix shapes differ: row %s vs col %s"
                % (self.payoff_row.shape, self.payoff_col.shape))
        if self.payoff_row.shape[0] < 1 or self.payoff_row.shape[1] < 1:
            raise GameError("payoff matrices must be at least 1x1")
        if not (np.all(np.isfinite(self.payoff_row))
                and np.all(np.isfinite(self.payoff_col))):
            raise GameError("payoff entries must be finite")
        self.payoff_row.setflags(write=False)
        self.payoff_col.setflags(write=False)
        self.action_labels_row = (
            list(action_labels_row) if action_labels_row is not None else None)
        self.action_labels_col = (
            list(action_labels_col) if action_labels_col is not None else None)

    @property
    def actions_row(self):
        return self.payoff_row.shape[0]

    @property
    def actions_col(self):
        return self.payoff_row.shape[1]

    @property
    def is_square(self):
        return self.actions_row == self.actions_col

    def __repr__(self):
        return "NormalFormGame(%r, %dx%d)" % (
            self.name, self.actions_row, self.actions_col)


class MixedStrategy:
    """A probability distribution over a player's actions."""

    def __init__(self, probs):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise GameError("strategy must be a nonempty vector")
        if np.any(p < NEG_TOL):
            raise GameError("strategy has negative entry %g" % p.min())
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > SIMPLEX_TOL:
            raise GameError("strategy sums to %.12g, expected 1" % p.sum())
        self.probs = p
        self.probs.setflags(write=False)

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return "MixedStrategy(%s)" % np.array2string(self.probs, precision=6)


# Canonical payoff matrices for the four benchmark 2x2 games. Row action 0
# is the cooperative/first-named action in each case.
_BUILTINS = {
    "prisoners_dilemma": dict(
        payoff_row=[[3.0, 0.0], [5.0, 1.0]],
        labels_row=["Cooperate", "Defect"],
        symmetric=True,
    ),
    "stag_hunt": dict(
        payoff_row=[[4.0, 0.0], [3.0, 3.0]],
        labels_row=["Stag", "Hare"],
        symmetric=True,
    ),
    "chicken": dict(
        payoff_row=[[0.0, -1.0], [1.0, -10.0]],
        labels_row=["Swerve", "Dare"],
        symmetric=True,
    ),
    "battle": dict(
        payoff_row=[[2.0, 0.0], [0.0, 1.0]],
        payoff_col=[[1.0, 0.0], [0.0, 2.0]],
        labels_row=["Opera", "Football"],
        symmetric=False,
    ),
}


def builtin_game(name):
    """Return one of the four canonical benchmark games by identifier."""
    if name not in _BUILTINS:
        raise GameError(
            "unknown game %r; valid identifiers: %s"
            % (name, ", ".join(sorted(_BUILTINS))))
    spec = _BUILTINS[name]
    row = np.asarray(spec["payoff_row"])
    col = row.T if spec["symmetric"] else np.asarray(spec["payoff_col"])
    return NormalFormGame(name, row, col,
                          action_labels_row=spec["labels_row"],
                          action_labels_col=spec["labels_row"])


def load_game(path):
    """Load a game from its JSON file format."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameError("cannot parse %s: %s" % (path, exc)) from exc
    try:
        name = doc["name"]
        payoff_row = doc["payoff_row"]
        payoff_col = doc["payoff_col"]
    except (KeyError, TypeError) as exc:
        raise GameError("game file %s missing field: %s" % (path, exc)) from exc
    try:
        row = np.asarray(payoff_row, dtype=float)
        col = np.asarray(payoff_col, dtype=float)
    except (ValueError, TypeError) as exc:
        raise GameError("non-numeric payoff entry in %s: %s" % (path, exc)) from exc
    if row.ndim != 2 or col.ndim != 2 or row.shape != col.shape:
        raise GameError(
            "shape mismatch in %s: payoff_row %s vs payoff_col %s"
            % (path, _shape_of(payoff_row), _shape_of(payoff_col)))
    return NormalFormGame(name, row, col,
                          action_labels_row=doc.get("action_labels_row"),
                          action_labels_col=doc.get("action_labels_col"))


def _shape_of(nested):
    shape = []
    while isinstance(nested, list):
        shape.append(len(nested))
        nested = nested[0] if nested else None
    return "x".join(str(n) for n in shape)


def save_game(game, path):
    """Write a game in the same JSON format ``load_game`` reads."""
    doc = {
        "name": game.name,
        "payoff_row": game.payoff_row.tolist(),
        "payoff_col": game.payoff_col.tolist(),
    }
    if game.action_labels_row is not None:
        doc["action_labels_row"] = game.action_labels_row
    if game.action_labels_col is not None:
        doc["action_labels_col"] = game.action_labels_col
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def expected_payoff(game, sigma_row, sigma_col):
    """Expected payoffs (row, col) of a mixed-strategy profile."""
    x = sigma_row.probs if isinstance(sigma_row, MixedStrategy) else np.asarray(sigma_row, dtype=float)
    y = sigma_col.probs if isinstance(sigma_col, MixedStrategy) else np.asarray(sigma_col, dtype=float)
    if x.size != game.actions_row or y.size != game.actions_col:
        raise GameError(
            "strategy lengths (%d, %d) do not match game %dx%d"
            % (x.size, y.size, game.actions_row, game.actions_col))
    return float(x @ game.payoff_row @ y), float(x @ game.payoff_col @ y)
