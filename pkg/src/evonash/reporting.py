"""Run-history exports: per-generation CSV, timings, summary JSON."""

import csv
import json


def write_history_csv(history, path):
    """Per-generation statistics, deterministic for a given config and seed.

    Wall-clock durations are deliberately kept out of this file (see
    ``write_timings_csv``) so reruns of the same seed are byte-identical
    regardless of worker count.
    """
    if not history.records:
        raise ValueError("history has no records")
    num_actions = history.records[0].mean_action_probs.size
    header = (["generation", "mean_fitness", "max_fitness"]
              + ["action_prob_%d" % a for a in range(num_actions)])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in history.records:
            writer.writerow([rec.generation, repr(rec.mean_fitness),
                             repr(rec.max_fitness)]
                            + [repr(float(p)) for p in rec.mean_action_probs])


def write_timings_csv(history, path):
    """Per-generation wall-clock durations (non-deterministic companion)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "millis"])
        for rec in history.records:
            writer.writerow([rec.generation, "%.3f" % rec.millis])


def write_summary_json(summary, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
