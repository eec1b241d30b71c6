"""Exact bimatrix equilibria via support enumeration, plus regret metrics."""

import itertools
from dataclasses import dataclass

import numpy as np

from .game import MixedStrategy, expected_payoff

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-7


class OracleError(Exception):
    """Game outside the oracle's capabilities or bad arguments."""


@dataclass(frozen=True)
class Equilibrium:
    sigma_row: MixedStrategy
    sigma_col: MixedStrategy
    payoff_row: float
    payoff_col: float
    support_row: tuple
    support_col: tuple

    def to_dict(self):
        return {
            "sigma_row": self.sigma_row.probs.tolist(),
            "sigma_col": self.sigma_col.probs.tolist(),
            "payoff_row": self.payoff_row,
            "payoff_col": self.payoff_col,
            "support_row": list(self.support_row),
            "support_col": list(self.support_col),
        }


def _solve_support(payoff, support_own, support_opp):
    """Opponent probabilities making the player indifferent on its support.

    Solves payoff[i, J] @ y = v for i in support_own together with
    sum(y) = 1. Returns (y over support_opp, v) or None if singular.
    """
    k = len(support_own)
    mat = np.zeros((k + 1, k + 1))
    mat[:k, :k] = payoff[np.ix_(support_own, support_opp)]
    mat[:k, k] = -1.0
    mat[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    return sol[:k], float(sol[k])


def _enumerate(game, max_actions):
    nr, nc = game.actions_row, game.actions_col
    if nr > max_actions or nc > max_actions:
        raise OracleError(
            "game is %dx%d, above the enumeration cap %d" % (nr, nc, max_actions))
    row_pay = game.payoff_row
    col_pay = game.payoff_col
    found = []
    skipped = 0
    for k in range(1, min(nr, nc) + 1):
        for sup_r in itertools.combinations(range(nr), k):
            for sup_c in itertools.combinations(range(nc), k):
                col_sol = _solve_support(row_pay, sup_r, sup_c)
                row_sol = _solve_support(col_pay.T, sup_c, sup_r)
                if col_sol is None or row_sol is None:
                    skipped += 1
                    continue
                y_sup, v_row = col_sol
                x_sup, v_col = row_sol
                if np.any(y_sup < -FEAS_TOL) or np.any(x_sup < -FEAS_TOL):
                    continue
                x = np.zeros(nr)
                x[list(sup_r)] = np.clip(x_sup, 0.0, None)
                y = np.zeros(nc)
                y[list(sup_c)] = np.clip(y_sup, 0.0, None)
                x /= x.sum()
                y /= y.sum()
                # No profitable pure deviation outside the support.
                row_resp = row_pay @ y
                col_resp = x @ col_pay
                if np.any(row_resp > v_row + FEAS_TOL):
                    continue
                if np.any(col_resp > v_col + FEAS_TOL):
                    continue
                found.append(Equilibrium(
                    sigma_row=MixedStrategy(x),
                    sigma_col=MixedStrategy(y),
                    payoff_row=float(x @ row_pay @ y),
                    payoff_col=float(x @ col_pay @ y),
                    support_row=tuple(int(i) for i in np.flatnonzero(x > FEAS_TOL)),
                    support_col=tuple(int(j) for j in np.flatnonzero(y > FEAS_TOL)),
                ))
    return _dedup(found), skipped


def _dedup(equilibria):
    kept = []
    for eq in equilibria:
        duplicate = False
        for other in kept:
            if (np.max(np.abs(eq.sigma_row.probs - other.sigma_row.probs)) <= DEDUP_TOL
                    and np.max(np.abs(eq.sigma_col.probs - other.sigma_col.probs)) <= DEDUP_TOL):
                duplicate = True
                break
        if not duplicate:
            kept.append(eq)
    return kept


def support_enumeration(game, max_actions=8):
    """All equilibria of a nondegenerate bimatrix game within the cap.

    Degenerate supports whose indifference systems are singular are skipped;
    for such games the result is a representative subset.
    """
    equilibria, _ = _enumerate(game, max_actions)
    return equilibria


def equilibrium_report(game, max_actions=8):
    """JSON-ready equilibrium report including a degeneracy flag."""
    equilibria, skipped = _enumerate(game, max_actions)
    return {
        "game": game.name,
        "equilibria": [eq.to_dict() for eq in equilibria],
        "degenerate_supports_skipped": skipped,
        "degenerate": skipped > 0,
    }


def regret(game, sigma_row, sigma_col):
    """Best pure-response gain over the current profile, per player."""
    x = sigma_row.probs if isinstance(sigma_row, MixedStrategy) else np.asarray(sigma_row, dtype=float)
    y = sigma_col.probs if isinstance(sigma_col, MixedStrategy) else np.asarray(sigma_col, dtype=float)
    cur_row, cur_col = expected_payoff(game, x, y)
    best_row = float(np.max(game.payoff_row @ y))
    best_col = float(np.max(x @ game.payoff_col))
    return max(best_row - cur_row, 0.0), max(best_col - cur_col, 0.0)


def is_epsilon_equilibrium(game, sigma_row, sigma_col, epsilon):
    """True iff neither player can gain more than epsilon by deviating."""
    if epsilon < 0:
        raise OracleError("epsilon must be >= 0, got %g" % epsilon)
    r_row, r_col = regret(game, sigma_row, sigma_col)
    return r_row <= epsilon and r_col <= epsilon


def distance_to_nearest_equilibrium(strategy_pair, equilibria):
    """Min over equilibria of the L1 distance summed over both players."""
    if not equilibria:
        raise OracleError("equilibrium list is empty")
    sr, sc = strategy_pair
    x = sr.probs if isinstance(sr, MixedStrategy) else np.asarray(sr, dtype=float)
    y = sc.probs if isinstance(sc, MixedStrategy) else np.asarray(sc, dtype=float)
    best = np.inf
    for eq in equilibria:
        dist = (np.abs(x - eq.sigma_row.probs).sum()
                + np.abs(y - eq.sigma_col.probs).sum())
        best = min(best, float(dist))
    return best
