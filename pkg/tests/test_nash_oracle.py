import numpy as np
import pytest

from evonash.game import MixedStrategy, NormalFormGame, builtin_game
from evonash.nash_oracle import (OracleError, distance_to_nearest_equilibrium,
                                 equilibrium_report, is_epsilon_equilibrium,
                                 regret, support_enumeration)

EPS = 1e-9


def matching_pennies():
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return NormalFormGame("matching_pennies", a, -a)


def test_matching_pennies_unique_mixed():
    eqs = support_enumeration(matching_pennies())
    assert len(eqs) == 1
    assert np.allclose(eqs[0].sigma_row.probs, [0.5, 0.5], atol=EPS)
    assert np.allclose(eqs[0].sigma_col.probs, [0.5, 0.5], atol=EPS)
    assert eqs[0].payoff_row == pytest.approx(0.0, abs=EPS)


def test_prisoners_dilemma_unique_pure():
    eqs = support_enumeration(builtin_game("prisoners_dilemma"))
    assert len(eqs) == 1
    assert np.allclose(eqs[0].sigma_row.probs, [0.0, 1.0])
    assert np.allclose(eqs[0].sigma_col.probs, [0.0, 1.0])
    assert eqs[0].payoff_row == pytest.approx(1.0)
    assert eqs[0].support_row == (1,)


def test_chicken_three_equilibria_with_mixed():
    eqs = support_enumeration(builtin_game("chicken"))
    assert len(eqs) == 3
    mixed = [e for e in eqs if len(e.support_row) == 2]
    assert len(mixed) == 1
    # indifference: -y1 = y0 - 10 y1 gives Dare probability 1/10
    assert mixed[0].sigma_row.probs[1] == pytest.approx(0.1, abs=EPS)
    assert mixed[0].sigma_col.probs[1] == pytest.approx(0.1, abs=EPS)
    pure_rows = sorted(e.support_row[0] for e in eqs if len(e.support_row) == 1)
    assert pure_rows == [0, 1]


def test_stag_hunt_equilibria():
    eqs = support_enumeration(builtin_game("stag_hunt"))
    supports = sorted((e.support_row, e.support_col) for e in eqs)
    assert ((0,), (0,)) in supports
    assert ((1,), (1,)) in supports
    assert len(eqs) == 3


def test_battle_of_the_sexes():
    eqs = support_enumeration(builtin_game("battle"))
    assert len(eqs) == 3
    mixed = [e for e in eqs if len(e.support_row) == 2][0]
    # row mixes to make column indifferent: (2/3, 1/3)
    assert np.allclose(mixed.sigma_row.probs, [2 / 3, 1 / 3], atol=EPS)
    assert np.allclose(mixed.sigma_col.probs, [1 / 3, 2 / 3], atol=EPS)


def test_all_returned_equilibria_are_sound():
    for name in ("prisoners_dilemma", "stag_hunt", "chicken", "battle"):
        g = builtin_game(name)
        for eq in support_enumeration(g):
            assert is_epsilon_equilibrium(g, eq.sigma_row, eq.sigma_col, EPS)


def test_random_games_soundness_and_existence():
    rng = np.random.default_rng(2024)
    for n in (2, 3):
        for _ in range(30):
            g = NormalFormGame("rand", rng.normal(size=(n, n)),
                               rng.normal(size=(n, n)))
            eqs = support_enumeration(g)
            assert eqs, "no equilibrium found for a generic game"
            for eq in eqs:
                assert is_epsilon_equilibrium(g, eq.sigma_row, eq.sigma_col, EPS)


def test_oracle_cap_enforced():
    g = NormalFormGame("big", np.zeros((9, 9)), np.zeros((9, 9)))
    with pytest.raises(OracleError, match="cap"):
        support_enumeration(g, max_actions=8)


def test_rectangular_game_supported():
    # 2x3 zero-sum game; supports of unequal total size never match, but
    # equal-size supports up to min(n, m) are still enumerated
    a = np.array([[1.0, -1.0, 0.5], [-1.0, 1.0, 0.5]])
    g = NormalFormGame("rect", a, -a)
    eqs = support_enumeration(g)
    assert eqs
    for eq in eqs:
        assert is_epsilon_equilibrium(g, eq.sigma_row, eq.sigma_col, EPS)


def test_equilibrium_report_degeneracy_flag():
    report = equilibrium_report(builtin_game("chicken"))
    assert report["game"] == "chicken"
    assert len(report["equilibria"]) == 3
    assert report["degenerate"] is False
    # constant game: every support system is singular beyond the pure ones
    flat = NormalFormGame("flat", np.ones((2, 2)), np.ones((2, 2)))
    report = equilibrium_report(flat)
    assert report["degenerate"] is True


def test_regret_values():
    g = builtin_game("prisoners_dilemma")
    # both cooperate: each gains 5 - 3 = 2 by defecting
    assert regret(g, [1, 0], [1, 0]) == (2.0, 2.0)
    # equilibrium profile has zero regret
    assert regret(g, [0, 1], [0, 1]) == (0.0, 0.0)


def test_regret_accepts_mixed_strategy_objects():
    g = builtin_game("chicken")
    s = MixedStrategy([0.9, 0.1])
    r_row, r_col = regret(g, s, s)
    assert r_row == pytest.approx(0.0, abs=EPS)
    assert r_col == pytest.approx(0.0, abs=EPS)


def test_regret_never_negative():
    rng = np.random.default_rng(7)
    for _ in range(50):
        g = NormalFormGame("rand", rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
        x = rng.dirichlet(np.ones(3))
        y = rng.dirichlet(np.ones(3))
        r_row, r_col = regret(g, x, y)
        assert r_row >= 0.0 and r_col >= 0.0


def test_is_epsilon_equilibrium_threshold():
    g = builtin_game("prisoners_dilemma")
    assert is_epsilon_equilibrium(g, [1, 0], [1, 0], 2.0)
    assert not is_epsilon_equilibrium(g, [1, 0], [1, 0], 1.999)
    with pytest.raises(OracleError):
        is_epsilon_equilibrium(g, [1, 0], [1, 0], -1.0)


def test_distance_to_nearest_equilibrium():
    g = builtin_game("prisoners_dilemma")
    eqs = support_enumeration(g)
    pair = (MixedStrategy([0.0, 1.0]), MixedStrategy([0.0, 1.0]))
    assert distance_to_nearest_equilibrium(pair, eqs) == pytest.approx(0.0)
    pair = (MixedStrategy([0.1, 0.9]), MixedStrategy([0.0, 1.0]))
    assert distance_to_nearest_equilibrium(pair, eqs) == pytest.approx(0.2)
    with pytest.raises(OracleError):
        distance_to_nearest_equilibrium(pair, [])


def test_distance_picks_nearest():
    g = builtin_game("chicken")
    eqs = support_enumeration(g)
    # profile near the (Swerve, Dare) pure equilibrium
    pair = (MixedStrategy([0.95, 0.05]), MixedStrategy([0.05, 0.95]))
    d = distance_to_nearest_equilibrium(pair, eqs)
    assert d == pytest.approx(0.2, abs=1e-12)
