import random

import pytest

from ruletab.entail import symbolic_backend_for_task
from ruletab.harness import (
    HarnessError,
    ablation_report,
    compute_baselines,
    evaluate_task,
    label_frequency_baseline,
    make_predictor,
    noise_degradation,
    scramble_transform,
    scrambling_experiment,
    symbolic_predictor,
)
from ruletab.rules import TaskType
from ruletab.schema import schema_by_name
from ruletab.taskgen import Benchmark, BenchmarkConfig, generate_benchmark, generate_task


def quantifier_free_task(seed=3):
    tt = TaskType("binary", "conj_disj", False, "none")
    return generate_task(tt, schema_by_name("rainfall"), task_seed=seed)


class TestEvaluateTask:
    def test_oracle_scores_one_on_quantifier_free(self):
        task = quantifier_free_task()
        assert evaluate_task(task, symbolic_predictor(task), "test") == 1.0

    def test_stored_labels_predictor_scores_one(self):
        task = quantifier_free_task()
        lookup = {tuple(sorted(ex.items())): label for ex, label in task.examples}
        predictor = lambda ex: lookup[tuple(sorted(ex.items()))]
        assert evaluate_task(task, predictor, "val") == 1.0

    def test_constant_predictor_scores_majority(self):
        task = quantifier_free_task()
        rows = task.split_examples("test")
        counts = {}
        for _, label in rows:
            counts[label] = counts.get(label, 0) + 1
        best = max(counts, key=counts.get)
        assert evaluate_task(task, lambda ex: best, "test") \
            == pytest.approx(counts[best] / len(rows))

    def test_unknown_split_rejected(self):
        with pytest.raises(Exception):
            evaluate_task(quantifier_free_task(), lambda ex: "yes", "nope")


class TestBaselines:
    def test_binary_random_half(self):
        task = quantifier_free_task()
        assert compute_baselines(task, "test")["random"] == 0.5

    def test_majority_at_least_random(self):
        bench = generate_benchmark(BenchmarkConfig(seed=5, tasks_per_type=1))
        for task in bench.tasks:
            b = compute_baselines(task, "test")
            assert b["majority"] >= b["random"]

    def test_majority_counts(self):
        task = quantifier_free_task()
        rows = task.split_examples("train")
        counts = {}
        for _, label in rows:
            counts[label] = counts.get(label, 0) + 1
        assert compute_baselines(task, "train")["majority"] \
            == pytest.approx(max(counts.values()) / len(rows))

    def test_frequency_baseline_bounds(self):
        task = quantifier_free_task()
        freq = label_frequency_baseline(task, "test")
        b = compute_baselines(task, "test")
        assert b["random"] <= freq <= b["majority"]


@pytest.fixture(scope="module")
def bench():
    return generate_benchmark(BenchmarkConfig(seed=6, tasks_per_type=1))


@pytest.fixture(scope="module")
def novel_tasks():
    return generate_benchmark(BenchmarkConfig(seed=6, tasks_per_type=3)).novel_tasks()


class TestAblationReport:
    def test_axis_groups_complete(self, bench):
        rows = ablation_report(bench, symbolic_backend_for_task)
        by_axis = {}
        for r in rows:
            by_axis.setdefault(r["axis"], set()).add(r["value"])
        assert by_axis["negation"] == {"none", "clause_only", "label_only", "clause_or_label"}
        assert by_axis["structure"] == {"simple", "conj_disj", "nested"}
        assert by_axis["quantifier"] == {"quantified", "unquantified"}
        assert by_axis["arity"] == {"binary", "multiclass"}

    def test_unquantified_oracle_gains_positive(self, bench):
        rows = ablation_report(bench, symbolic_backend_for_task, axes=("quantifier",))
        gains = {r["value"]: r["mean_relative_gain"] for r in rows}
        assert gains["unquantified"] > 0
        assert gains["unquantified"] > gains["quantified"]

    def test_unquantified_oracle_accuracy_is_one(self, bench):
        rows = ablation_report(bench, symbolic_backend_for_task, axes=("quantifier",))
        acc = {r["value"]: r["mean_accuracy"] for r in rows}
        assert acc["unquantified"] == 1.0
        assert acc["quantified"] < 1.0

    def test_empty_benchmark_rejected(self):
        with pytest.raises(HarnessError):
            ablation_report(Benchmark(BenchmarkConfig(), []), symbolic_backend_for_task)


class TestScrambling:
    def test_transform_reproducible(self, novel_tasks):
        task = novel_tasks[0]
        t1, t2 = scramble_transform(task, 42), scramble_transform(task, 42)
        example = task.examples[0][0]
        assert t1(example) == t2(example)

    def test_identity_free_evaluation_unchanged(self, novel_tasks):
        task = novel_tasks[0]
        predictor = symbolic_predictor(task)
        plain = evaluate_task(task, predictor, "test")
        same = evaluate_task(task, predictor, "test", transform=lambda ex: dict(ex))
        assert plain == same

    def test_five_seeds_recorded(self, novel_tasks):
        result = scrambling_experiment(novel_tasks[:6], symbolic_backend_for_task,
                                       seeds=range(42, 47))
        assert sorted(result["per_seed"]) == [42, 43, 44, 45, 46]
        assert 0.0 <= result["mean_accuracy"] <= 1.0
        assert result["std_accuracy"] >= 0.0

    def test_scrambling_degrades_the_oracle(self, novel_tasks):
        quantifier_free = [t for t in novel_tasks if not t.task_type.quantified][:8]
        result = scrambling_experiment(quantifier_free, symbolic_backend_for_task,
                                       seeds=(42,))
        assert result["mean_accuracy"] < 1.0

    def test_requires_tasks_and_seeds(self, novel_tasks):
        with pytest.raises(HarnessError):
            scrambling_experiment([], symbolic_backend_for_task)
        with pytest.raises(HarnessError):
            scrambling_experiment(novel_tasks[:1], symbolic_backend_for_task, seeds=())


class TestNoiseDegradation:
    def test_zero_width_matches_oracle(self):
        task = quantifier_free_task()
        result = noise_degradation([task], widths=(0.0,), n_seeds=2)
        assert result[0.0] == 1.0

    def test_heavy_noise_hurts(self):
        task = quantifier_free_task()
        result = noise_degradation([task], widths=(0.0, 2.0), n_seeds=3)
        assert result[2.0] < result[0.0]

    def test_deterministic(self):
        task = quantifier_free_task()
        a = noise_degradation([task], widths=(0.3,), n_seeds=2)
        b = noise_degradation([task], widths=(0.3,), n_seeds=2)
        assert a == b
