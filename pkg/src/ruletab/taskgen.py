"""Assemble full tasks and benchmarks: vote-based label assignment with
quantifier noise, example generation, splits, and seeded reproducibility."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .explanations import ExplanationMeta, render_explanation
from .rules import (
    QUANTIFIER_PROBS,
    Rule,
    TaskType,
    eval_antecedent,
    enumerate_task_types,
    sample_ruleset,
)
from .schema import SchemaSpec, Value, sample_example, schema_by_name
from .seeding import derive_rng, stable_seed

Example = dict[str, Value]

DEFAULT_SEEN_SCHEMAS = ("bird-species", "animal-species", "rainfall")
DEFAULT_NOVEL_SCHEMAS = ("bond-relevance", "league-rank")

EXAMPLES_PER_TASK = 1000
FEATURES_PER_TASK = 5
SPLIT_SIZES = {"train": 700, "val": 100, "test": 200}

# Degenerate-task guard: reject rule sets whose induced label distribution
# (on quantifier-free probe rows) is nearly constant, then redraw.
GUARD_PROBE_ROWS = 200
GUARD_MAJORITY_CAP = 0.9
GUARD_MAX_ATTEMPTS = 100


class TaskGenError(ValueError):
    """Schema too small for the requested task type, or bad configuration."""


@dataclass
class Task:
    """One classification task: a schema slice, rules, labeled rows, and
    the rendered explanations the classifier sees."""

    id: str
    task_type: TaskType | None
    schema_name: str
    schema: SchemaSpec                      # slice: selected attributes + task labels
    labels: list[str]
    rules: list[Rule]
    examples: list[tuple[Example, str]]
    explanations: list[tuple[str, ExplanationMeta]]
    splits: dict[str, list[int]]
    seed: int | None = None

    @property
    def selected_attrs(self) -> list[str]:
        return list(self.schema.attribute_names)

    def split_examples(self, split: str) -> list[tuple[Example, str]]:
        try:
            indices = self.splits[split]
        except KeyError:
            raise TaskGenError(f"unknown split {split!r}") from None
        return [self.examples[i] for i in indices]


@dataclass(frozen=True)
class BenchmarkConfig:
    seed: int = 42
    tasks_per_type: int = 3
    seen_schemas: tuple[str, ...] = DEFAULT_SEEN_SCHEMAS
    novel_schemas: tuple[str, ...] = DEFAULT_NOVEL_SCHEMAS
    degenerate_guard: bool = True

    def __post_init__(self) -> None:
        if self.tasks_per_type < 1:
            raise TaskGenError("tasks_per_type must be >= 1")
        overlap = set(self.seen_schemas) & set(self.novel_schemas)
        if overlap:
            raise TaskGenError(f"seen and novel schema sets overlap: {sorted(overlap)}")


@dataclass
class Benchmark:
    config: BenchmarkConfig
    tasks: list[Task]

    def seen_tasks(self) -> list[Task]:
        return [t for t in self.tasks if t.schema_name in self.config.seen_schemas]

    def novel_tasks(self) -> list[Task]:
        return [t for t in self.tasks if t.schema_name in self.config.novel_schemas]


def tie_break_argmax(values: Sequence[float], example: Mapping[str, Value]) -> int:
    """Index of the maximum; exact ties resolved by a stable hash of the
    example over the tied candidates.

    The label assigner and the entailment predictor share this rule, which
    keeps them in exact agreement whenever their tie sets coincide (they do
    on coherent rows), while rows whose scores collapse to a full tie (e.g.
    scrambled inputs) spread over the label set instead of piling onto a
    fixed position.
    """
    best = max(values)
    tied = [i for i, v in enumerate(values) if v == best]
    if len(tied) == 1:
        return tied[0]
    key = stable_seed("tie-break", tuple(sorted((k, repr(v)) for k, v in example.items())))
    return tied[key % len(tied)]


def assign_label(example: Mapping[str, Value], rules: Sequence[Rule],
                 labels: Sequence[str], rng: random.Random) -> str:
    """Vote-based label assignment.

    Per rule: with a quantifier, the rule's label is first rerouted to a
    uniformly random other label with probability 1 - p_quant. A satisfied
    antecedent votes for the (possibly rerouted) label; an unsatisfied one
    votes for every other label. A negated consequent swaps those two
    targets. The winner is the argmax of votes (see ``tie_break_argmax``).

    Without quantifiers this never touches ``rng``.
    """
    if not rules:
        raise TaskGenError("rule set must be non-empty")
    index = {label: i for i, label in enumerate(labels)}
    votes = [0] * len(labels)
    for rule in rules:
        if rule.label not in index:
            raise TaskGenError(f"rule label {rule.label!r} not in task labels")
        target = rule.label
        if rule.quantifier is not None:
            p_quant = QUANTIFIER_PROBS[rule.quantifier]
            if rng.random() < 1.0 - p_quant:
                others = [l for l in labels if l != target]
                target = others[rng.randrange(len(others))]
        satisfied = eval_antecedent(rule.antecedent, example)
        if satisfied != rule.label_negated:
            votes[index[target]] += 1
        else:
            for i, label in enumerate(labels):
                if label != target:
                    votes[i] += 1
    return labels[tie_break_argmax(votes, example)]


def _strip_quantifiers(rules: Sequence[Rule]) -> list[Rule]:
    return [replace(r, quantifier=None) for r in rules]


def _majority_fraction(labels: Sequence[str]) -> float:
    counts: dict[str, int] = {}
    for l in labels:
        counts[l] = counts.get(l, 0) + 1
    return max(counts.values()) / len(labels)


def _sample_task_labels(ttype: TaskType, schema: SchemaSpec, rng: random.Random) -> list[str]:
    targets = list(schema.target_labels)
    if ttype.label_arity == "binary":
        if len(targets) < 2:
            raise TaskGenError(f"schema {schema.name!r} has too few labels for a binary task")
        return rng.sample(targets, 2)
    if len(targets) < 3:
        raise TaskGenError(f"schema {schema.name!r} has too few labels for a multiclass task")
    k = rng.randint(3, min(5, len(targets)))
    return rng.sample(targets, k)


def _sample_rules_guarded(ttype: TaskType, schema: SchemaSpec, attrs: Sequence[str],
                          labels: Sequence[str], rng: random.Random,
                          guard: bool) -> list[Rule]:
    best_rules: list[Rule] | None = None
    best_majority = 2.0
    attempts = GUARD_MAX_ATTEMPTS if guard else 1
    for _ in range(attempts):
        rules = sample_ruleset(ttype, schema, attrs, labels, rng)
        if not guard:
            return rules
        probe_rules = _strip_quantifiers(rules)
        probe_labels = []
        for _ in range(GUARD_PROBE_ROWS):
            row = sample_example(schema, attrs, rng)
            probe_labels.append(assign_label(row, probe_rules, labels, rng))
        majority = _majority_fraction(probe_labels)
        if majority <= GUARD_MAJORITY_CAP:
            return rules
        if majority < best_majority:
            best_majority, best_rules = majority, rules
    assert best_rules is not None
    return best_rules


def generate_task(ttype: TaskType, schema: SchemaSpec, task_seed: int,
                  config: BenchmarkConfig | None = None,
                  task_id: str | None = None) -> Task:
    """Build one task: pick 5 attributes, draw rules, label 1000 rows,
    render explanations, and split 700/100/200."""
    config = config or BenchmarkConfig()
    if len(schema.attributes) < FEATURES_PER_TASK:
        raise TaskGenError(
            f"schema {schema.name!r} has {len(schema.attributes)} attributes; "
            f"need {FEATURES_PER_TASK}"
        )
    rng = random.Random(task_seed)
    attrs = rng.sample(list(schema.attribute_names), FEATURES_PER_TASK)
    labels = _sample_task_labels(ttype, schema, rng)
    rules = _sample_rules_guarded(ttype, schema, attrs, labels, rng,
                                  guard=config.degenerate_guard)

    examples: list[tuple[Example, str]] = []
    for _ in range(EXAMPLES_PER_TASK):
        row = sample_example(schema, attrs, rng)
        examples.append((row, assign_label(row, rules, labels, rng)))

    explanations = [render_explanation(r) for r in rules]

    indices = list(range(EXAMPLES_PER_TASK))
    rng.shuffle(indices)
    n_train, n_val = SPLIT_SIZES["train"], SPLIT_SIZES["val"]
    splits = {
        "train": sorted(indices[:n_train]),
        "val": sorted(indices[n_train:n_train + n_val]),
        "test": sorted(indices[n_train + n_val:]),
    }

    return Task(
        id=task_id or f"{ttype.slug}-{schema.name}-{task_seed & 0xFFFF:05d}",
        task_type=ttype,
        schema_name=schema.name,
        schema=schema.slice(attrs, labels),
        labels=list(labels),
        rules=rules,
        examples=examples,
        explanations=explanations,
        splits=splits,
        seed=task_seed,
    )


def _eligible_schemas(ttype: TaskType, pool: Sequence[str]) -> list[SchemaSpec]:
    needed = 2 if ttype.label_arity == "binary" else 3
    eligible = [s for s in (schema_by_name(name) for name in pool)
                if len(s.target_labels) >= needed]
    if not eligible:
        raise TaskGenError(f"no schema in {list(pool)} supports {ttype.label_arity} tasks")
    return eligible


def generate_benchmark(config: BenchmarkConfig | None = None) -> Benchmark:
    """``tasks_per_type`` tasks for each of the 48 types.

    Replica indices with ``i % 3 == 2`` draw from the novel schema pool and
    the rest from the seen pool, giving the 96 seen / 48 novel split at the
    default three replicas per type. Each task's seed is a stable hash of
    (benchmark seed, type index, replica index), so any task can be
    regenerated on its own.
    """
    config = config or BenchmarkConfig()
    tasks = []
    for type_index, ttype in enumerate(enumerate_task_types()):
        for replica in range(config.tasks_per_type):
            pool = config.novel_schemas if replica % 3 == 2 else config.seen_schemas
            eligible = _eligible_schemas(ttype, pool)
            picker = derive_rng(config.seed, type_index, replica, "schema")
            schema = eligible[picker.randrange(len(eligible))]
            task_seed = stable_seed(config.seed, type_index, replica)
            task_id = f"t{type_index:02d}-r{replica:03d}-{ttype.slug}-{schema.name}"
            tasks.append(generate_task(ttype, schema, task_seed, config, task_id=task_id))
    return Benchmark(config=config, tasks=tasks)
