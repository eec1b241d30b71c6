import csv
import json

import pytest

from evonash.evolution import evolve, EvolutionConfig
from evonash.game import builtin_game
from evonash.reporting import (write_history_csv, write_summary_json,
                               write_timings_csv)


@pytest.fixture(scope="module")
def history():
    cfg = EvolutionConfig(generations=4, population_size=4, num_parents=2, seed=2)
    _, hist = evolve(cfg, builtin_game("prisoners_dilemma"))
    return hist


def test_history_csv_layout(history, tmp_path):
    path = tmp_path / "history.csv"
    write_history_csv(history, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert list(rows[0]) == ["generation", "mean_fitness", "max_fitness",
                             "action_prob_0", "action_prob_1"]
    for gen, row in enumerate(rows):
        assert int(row["generation"]) == gen
        assert float(row["max_fitness"]) >= float(row["mean_fitness"])
        total = float(row["action_prob_0"]) + float(row["action_prob_1"])
        assert total == pytest.approx(1.0, abs=1e-9)


def test_history_csv_has_no_wall_clock_column(history, tmp_path):
    path = tmp_path / "history.csv"
    write_history_csv(history, path)
    assert "millis" not in path.read_text()


def test_history_csv_identical_across_reruns(tmp_path):
    cfg = EvolutionConfig(generations=3, population_size=4, num_parents=2, seed=8)
    g = builtin_game("chicken")
    paths = []
    for i in range(2):
        _, hist = evolve(cfg, g)
        p = tmp_path / ("h%d.csv" % i)
        write_history_csv(hist, p)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_history_csv_empty_history(tmp_path):
    from evonash.evolution import RunHistory
    with pytest.raises(ValueError):
        write_history_csv(RunHistory(), tmp_path / "h.csv")


def test_timings_csv(history, tmp_path):
    path = tmp_path / "timings.csv"
    write_timings_csv(history, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert all(float(r["millis"]) >= 0.0 for r in rows)


def test_summary_json_round_trip(tmp_path):
    path = tmp_path / "summary.json"
    doc = {"b": [1, 2], "a": {"nested": True}}
    write_summary_json(doc, path)
    assert json.loads(path.read_text()) == doc
    # keys are sorted for stable diffs
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
