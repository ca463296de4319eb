"""Walk through benchmark generation: schemas, task types, one task, a full run.

Run:  python3 demos/01_build_a_benchmark.py
"""

import collections

from ruletab import (
    BenchmarkConfig,
    TaskType,
    builtin_schemas,
    generate_benchmark,
    generate_task,
    schema_by_name,
)

# ---- the five bundled table schemas --------------------------------------
print("bundled schemas:")
for schema in builtin_schemas():
    kinds = collections.Counter(a.kind for a in schema.attributes)
    print(f"  {schema.name:15s} {len(schema.attributes):2d} attributes "
          f"({kinds['categorical']} categorical / {kinds['numeric']} numeric), "
          f"{len(schema.target_labels)} labels for {schema.target_name!r}")

# ---- one task, fully inspectable ------------------------------------------
ttype = TaskType(label_arity="binary", structure="nested", quantified=False,
                 negation="clause_or_label")
task = generate_task(ttype, schema_by_name("rainfall"), task_seed=2024)
print(f"\none generated task ({task.id}):")
print(f"  features: {task.selected_attrs}")
print(f"  labels:   {task.labels}")
for text, meta in task.explanations:
    print(f"  explanation: {text!r}")
    print(f"               meta = mentions {meta.l_exp!r}, "
          f"{'assign' if meta.assign else 'do not assign'}, quantifier={meta.quantifier}")
example, label = task.examples[0]
print(f"  first example: {example} -> {label}")
print(f"  splits: {len(task.splits['train'])}/{len(task.splits['val'])}/"
      f"{len(task.splits['test'])}")

# ---- a full benchmark ------------------------------------------------------
bench = generate_benchmark(BenchmarkConfig(seed=42, tasks_per_type=3))
avg = sum(len(t.explanations) for t in bench.tasks) / len(bench.tasks)
print(f"\nfull benchmark: {len(bench.tasks)} tasks "
      f"({len(bench.seen_tasks())} seen / {len(bench.novel_tasks())} novel), "
      f"{avg:.2f} explanations per task")

by_schema = collections.Counter(t.schema_name for t in bench.tasks)
print("tasks per schema:", dict(by_schema))
