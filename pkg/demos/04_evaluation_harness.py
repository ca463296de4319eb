"""Zero-shot evaluation, ablations over task-type axes, scrambled inputs,
and graceful degradation under score noise.

Run:  python3 demos/04_evaluation_harness.py     (about a minute)
"""

from ruletab import BenchmarkConfig, generate_benchmark, symbolic_backend_for_task
from ruletab.harness import (
    ablation_report,
    compute_baselines,
    evaluate_task,
    make_predictor,
    noise_degradation,
    scrambling_experiment,
)

bench = generate_benchmark(BenchmarkConfig(seed=42, tasks_per_type=3))
novel = bench.novel_tasks()
print(f"benchmark: {len(bench.tasks)} tasks, evaluating the {len(novel)} novel ones")

# ---- per-task accuracy vs baselines -----------------------------------------
print("\nfirst five novel tasks (test split):")
for task in novel[:5]:
    accuracy = evaluate_task(task, make_predictor(task, symbolic_backend_for_task(task)))
    base = compute_baselines(task)
    print(f"  {task.id:55s} acc={accuracy:.3f} "
          f"random={base['random']:.3f} majority={base['majority']:.3f}")

# ---- ablation over the task-type axes ----------------------------------------
print("\nablation (relative gain over the per-task majority baseline):")
for row in ablation_report(bench, symbolic_backend_for_task,
                           axes=("quantifier", "structure", "negation", "arity")):
    print(f"  {row['axis']:10s} {row['value']:16s} n={row['tasks']:3d} "
          f"acc={row['mean_accuracy']:.3f} gain={row['mean_relative_gain']:+.3f}")

# ---- column scrambling ---------------------------------------------------------
result = scrambling_experiment(novel, symbolic_backend_for_task, seeds=range(42, 47))
print(f"\nscrambled column names, seeds 42-46:")
print(f"  accuracy {result['mean_accuracy']:.4f} (std {result['std_accuracy']:.4f})")
print(f"  uniform-guess baseline    {result['random_baseline']:.4f}")
print(f"  frequency-guess baseline  {result['frequency_baseline']:.4f}")

# ---- noise sweep ----------------------------------------------------------------
sweep = noise_degradation(novel, widths=(0.0, 0.1, 0.3, 1.0), n_seeds=5)
print("\nuniform score noise (5 seeds):")
for width, accuracy in sweep.items():
    print(f"  width {width:<4} mean accuracy {accuracy:.4f}")
