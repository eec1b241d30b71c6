"""Timing sweeps and log-log scaling fits for the evolution driver."""

import csv
import dataclasses
import logging
import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from .evolution import ConfigError, EvolutionConfig, evolve
from .game import NormalFormGame
from .interaction import InteractionConfig, InteractionCounters

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("G", "P", "K", "S", "A")

# Acceptance bands for the wall-clock scaling exponents. S and A scaling is
# reported as measured without a declared band (the joint-method step cost
# grows faster than linearly in S).
EXPONENT_BANDS = {"G": (0.85, 1.15), "P": (1.8, 2.25), "K": (0.85, 1.15)}

NOISE_FLOOR_MS = 50.0


class BenchError(Exception):
    """Invalid sweep specification or unusable fit input."""


@dataclass(frozen=True)
class SweepSpec:
    base_config: EvolutionConfig
    sweep_variable: str
    values: tuple
    repetitions: int = 5
    game: NormalFormGame = None
    workers: int = 1

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise BenchError("sweep_variable must be one of %s" % (SWEEP_VARIABLES,))
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 3:
            raise BenchError("need at least 3 sweep values, got %d" % len(vals))
        if any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
            raise BenchError("sweep values must be strictly ascending positive integers")
        if self.repetitions < 1:
            raise BenchError("repetitions must be >= 1")
        if self.game is None and self.sweep_variable != "A":
            raise BenchError("a game is required except for A sweeps")


@dataclass(frozen=True)
class BenchRecord:
    sweep_variable: str
    value: int
    median_ms: float
    pair_count: int
    step_count: int
    seed: int
    method: str
    repetitions: int


def _config_for_value(spec, value, seed):
    cfg = spec.base_config
    if spec.sweep_variable == "G":
        cfg = replace(cfg, generations=value, seed=seed)
    elif spec.sweep_variable == "P":
        cfg = replace(cfg, population_size=value,
                      num_parents=max(1, value // 2), seed=seed)
    elif spec.sweep_variable == "K":
        cfg = replace(cfg, interaction=dataclasses.replace(
            cfg.interaction, k_steps=value), seed=seed)
    elif spec.sweep_variable == "S":
        cfg = replace(cfg, state_size=value, seed=seed)
    else:
        cfg = replace(cfg, seed=seed)
    return cfg


def _game_for_value(spec, value, seed):
    if spec.sweep_variable != "A":
        return spec.game
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, value])))
    return NormalFormGame(
        "synthetic_%dx%d" % (value, value),
        rng.random((value, value)), rng.random((value, value)))


def run_sweep(spec):
    """Time one evolve run per (value, repetition); one record per value.

    Repetitions use distinct derived seeds; the recorded timing is the
    median. Points whose derived configuration is invalid are skipped with
    a logged error and the sweep continues.
    """
    records = []
    base_seed = spec.base_config.seed
    for point, value in enumerate(spec.values):
        timings = []
        counters = None
        first_seed = None
        try:
            for rep in range(spec.repetitions):
                seed = int(np.random.SeedSequence(
                    [base_seed, point, rep]).generate_state(1, np.uint64)[0])
                if first_seed is None:
                    first_seed = seed
                cfg = _config_for_value(spec, value, seed)
                game = _game_for_value(spec, value, seed)
                counters = InteractionCounters()
                t0 = time.perf_counter()
                evolve(cfg, game, counters=counters, workers=spec.workers)
                timings.append((time.perf_counter() - t0) * 1000.0)
        except (ConfigError, BenchError) as exc:
            logger.error("sweep point %s=%d failed: %s", spec.sweep_variable, value, exc)
            continue
        records.append(BenchRecord(
            sweep_variable=spec.sweep_variable,
            value=value,
            median_ms=statistics.median(timings),
            pair_count=counters.pair_evaluations,
            step_count=counters.chain_steps,
            seed=first_seed,
            method=spec.base_config.interaction.method,
            repetitions=spec.repetitions,
        ))
    return records


def fit_scaling_exponent(records, noise_floor_ms=NOISE_FLOOR_MS, field="median_ms"):
    """OLS slope of log(field) against log(value); returns (exponent, r²).

    Records whose timing is below the noise floor are excluded (raise G to
    push every point above it). ``field`` may be any positive BenchRecord
    metric, e.g. "step_count" for a noise-free counter fit (use floor 0).
    """
    points = [(r.value, getattr(r, field)) for r in records
              if getattr(r, field) > noise_floor_ms]
    if len(points) < 3:
        raise BenchError(
            "need >= 3 records above the %.0f ms floor, have %d"
            % (noise_floor_ms, len(points)))
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r_squared


def write_sweep_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep_variable", "value", "median_ms", "pair_count",
                         "step_count", "seed", "method", "repetitions"])
        for r in records:
            writer.writerow([r.sweep_variable, r.value, "%.6f" % r.median_ms,
                             r.pair_count, r.step_count, r.seed, r.method,
                             r.repetitions])


def write_sweep_svg(records, path, exponent=None, r_squared=None):
    """Log-log scatter of the sweep with the fitted power law."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    values = np.array([r.value for r in records], dtype=float)
    times = np.array([r.median_ms for r in records], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(values, times, "o", label="median wall-clock")
    if exponent is not None and len(records) >= 2:
        anchor = times[-1] / values[-1] ** exponent
        xs = np.linspace(values[0], values[-1], 50)
        label = "fit: exponent %.3f" % exponent
        if r_squared is not None:
            label += " (r²=%.4f)" % r_squared
        ax.loglog(xs, anchor * xs ** exponent, "-", label=label)
    var = records[0].sweep_variable if records else "?"
    ax.set_xlabel(var)
    ax.set_ylabel("median ms")
    ax.set_title("Scaling sweep over %s" % var)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def verdict(records, sweep_variable, noise_floor_ms=NOISE_FLOOR_MS):
    """Exponent fit plus pass/fail against the declared band, JSON-ready."""
    exponent, r_squared = fit_scaling_exponent(records, noise_floor_ms)
    band = EXPONENT_BANDS.get(sweep_variable)
    result = {
        "sweep_variable": sweep_variable,
        "exponent": exponent,
        "r_squared": r_squared,
        "band": list(band) if band else None,
        "passed": (band[0] <= exponent <= band[1]) if band else None,
    }
    try:
        step_exp, step_r2 = fit_scaling_exponent(records, 0.0, "step_count")
        result["step_count_exponent"] = step_exp
        result["step_count_r_squared"] = step_r2
    except BenchError:
        pass
    return result
