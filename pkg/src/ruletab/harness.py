"""Evaluation harness: split accuracy, baselines, per-axis ablation
reports, column-scrambling runs, and noise-degradation sweeps."""

from __future__ import annotations

import random
from statistics import pstdev
from typing import Callable, Iterable, Sequence

from .entail import NoisyBackend, ScoreBackend, predict, symbolic_backend_for_task
from .linearize import sample_scramble_permutation, scramble
from .taskgen import Benchmark, Example, Task
from .seeding import derive_rng

Predictor = Callable[[Example], str]
BackendFactory = Callable[[Task], ScoreBackend]


class HarnessError(ValueError):
    """Empty split or axis group; nothing to evaluate."""


def make_predictor(task: Task, backend: ScoreBackend) -> Predictor:
    """Bind a task's explanations and labels to a scoring backend."""
    explanations = task.explanations
    labels = task.labels

    def run(example: Example) -> str:
        return predict(example, explanations, labels, backend)[0]

    return run


def symbolic_predictor(task: Task, mode: str = "algorithm") -> Predictor:
    return make_predictor(task, symbolic_backend_for_task(task, mode=mode))


def evaluate_task(task: Task, predictor: Predictor, split: str = "test",
                  transform: Callable[[Example], Example] | None = None) -> float:
    """Fraction of split examples where the predictor matches the stored label."""
    rows = task.split_examples(split)
    if not rows:
        raise HarnessError(f"split {split!r} of task {task.id} is empty")
    hits = 0
    for example, label in rows:
        if transform is not None:
            example = transform(example)
        if predictor(example) == label:
            hits += 1
    return hits / len(rows)


def compute_baselines(task: Task, split: str = "test") -> dict[str, float]:
    """Analytic uniform-guess expectation and the empirical majority rate."""
    rows = task.split_examples(split)
    if not rows:
        raise HarnessError(f"split {split!r} of task {task.id} is empty")
    counts: dict[str, int] = {}
    for _, label in rows:
        counts[label] = counts.get(label, 0) + 1
    return {
        "random": 1.0 / len(task.labels),
        "majority": max(counts.values()) / len(rows),
    }


def label_frequency_baseline(task: Task, split: str = "test") -> float:
    """Accuracy of a guesser that samples labels at their split frequency."""
    rows = task.split_examples(split)
    counts: dict[str, int] = {}
    for _, label in rows:
        counts[label] = counts.get(label, 0) + 1
    n = len(rows)
    return sum((c / n) ** 2 for c in counts.values())


# ------------------------------------------------------------------ #
# ablation over task-type axes
# ------------------------------------------------------------------ #

ABLATION_AXES = ("negation", "structure", "quantifier", "arity")


def _axis_value(task: Task, axis: str) -> str:
    tt = task.task_type
    if tt is None:
        raise HarnessError(f"task {task.id} has no task type")
    if axis == "negation":
        return tt.negation
    if axis == "structure":
        return tt.structure
    if axis == "quantifier":
        return "quantified" if tt.quantified else "unquantified"
    if axis == "arity":
        return tt.label_arity
    raise HarnessError(f"unknown axis {axis!r}; choose from {ABLATION_AXES}")


def ablation_report(benchmark: Benchmark, backend_factory: BackendFactory,
                    axes: Sequence[str] = ABLATION_AXES,
                    split: str = "test") -> list[dict]:
    """Mean accuracy and relative gain over the majority baseline, grouped
    by each requested task-type axis value.

    The relative gain of one task is (accuracy - majority) / majority; the
    neural reference the original ablation compared against is out of
    scope, so the majority baseline stands in and only signs/orderings are
    comparable.
    """
    if not benchmark.tasks:
        raise HarnessError("benchmark has no tasks")
    per_task: list[tuple[Task, float, float]] = []
    for task in benchmark.tasks:
        accuracy = evaluate_task(task, make_predictor(task, backend_factory(task)), split)
        majority = compute_baselines(task, split)["majority"]
        per_task.append((task, accuracy, (accuracy - majority) / majority))

    rows = []
    for axis in axes:
        groups: dict[str, list[tuple[float, float]]] = {}
        for task, accuracy, gain in per_task:
            groups.setdefault(_axis_value(task, axis), []).append((accuracy, gain))
        for value, stats in sorted(groups.items()):
            if not stats:
                raise HarnessError(f"axis {axis}={value} has no tasks")
            rows.append({
                "axis": axis,
                "value": value,
                "tasks": len(stats),
                "mean_accuracy": sum(a for a, _ in stats) / len(stats),
                "mean_relative_gain": sum(g for _, g in stats) / len(stats),
            })
    return rows


# ------------------------------------------------------------------ #
# column-scrambling experiment
# ------------------------------------------------------------------ #

def scramble_transform(task: Task, seed: int) -> Callable[[Example], Example]:
    """The task's reproducible column derangement for one seed."""
    rng = derive_rng(seed, task.id, "scramble")
    permutation = sample_scramble_permutation(task.selected_attrs, rng)
    return lambda example: scramble(example, permutation)


def scrambling_experiment(tasks: Sequence[Task], backend_factory: BackendFactory,
                          seeds: Iterable[int] = range(42, 47),
                          split: str = "test") -> dict:
    """Evaluate with scrambled column names for each seed.

    Returns the grand mean, the population std over per-seed means, and
    both random baselines (uniform-guess and label-frequency-weighted).
    """
    seeds = list(seeds)
    if not seeds:
        raise HarnessError("need at least one seed")
    if not tasks:
        raise HarnessError("need at least one task")
    per_seed: dict[int, float] = {}
    for seed in seeds:
        accuracies = []
        for task in tasks:
            predictor = make_predictor(task, backend_factory(task))
            accuracies.append(
                evaluate_task(task, predictor, split, transform=scramble_transform(task, seed))
            )
        per_seed[seed] = sum(accuracies) / len(accuracies)
    means = list(per_seed.values())
    return {
        "mean_accuracy": sum(means) / len(means),
        "std_accuracy": pstdev(means),
        "per_seed": per_seed,
        "random_baseline": sum(compute_baselines(t, split)["random"] for t in tasks) / len(tasks),
        "frequency_baseline": sum(label_frequency_baseline(t, split) for t in tasks) / len(tasks),
    }


# ------------------------------------------------------------------ #
# noise degradation
# ------------------------------------------------------------------ #

def noise_degradation(tasks: Sequence[Task], widths: Sequence[float] = (0.0, 0.1, 0.3, 1.0),
                      n_seeds: int = 20, split: str = "test",
                      mode: str = "algorithm") -> dict[float, float]:
    """Mean accuracy as zero-mean uniform noise of each width perturbs the
    symbolic scores, averaged over ``n_seeds`` noise draws."""
    if not tasks:
        raise HarnessError("need at least one task")
    results: dict[float, float] = {}
    for width in widths:
        seed_means = []
        for seed in range(n_seeds):
            accuracies = []
            for task in tasks:
                rng = derive_rng("noise", seed, width, task.id)
                backend = NoisyBackend(symbolic_backend_for_task(task, mode=mode), width, rng)
                accuracies.append(evaluate_task(task, make_predictor(task, backend), split))
            seed_means.append(sum(accuracies) / len(accuracies))
        results[width] = sum(seed_means) / len(seed_means)
    return results
