"""Benchmark persistence, real-dataset ingestion, and mutual-information
feature selection.

A task directory holds::

    schema.json          # description / column_names / targets document
    task.json            # id, schema name, task type, seed
    rules.json           # canonical tagged rule ASTs (empty for real tasks)
    explanations.jsonl   # one {text, l_exp, assign, quantifier} per line
    examples.csv         # header = attributes + target, one row per example
    splits.json          # train / val / test index lists

Export is deterministic: identical tasks produce byte-identical trees.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .explanations import ExplanationMeta
from .rules import rule_from_obj, rule_to_obj, task_type_from_slug
from .schema import (
    CATEGORICAL,
    AttributeSpec,
    SchemaSpec,
    Value,
    load_schema,
    schema_from_doc,
    schema_to_doc,
)
from .taskgen import Benchmark, BenchmarkConfig, Example, Task


class DataIOError(ValueError):
    """Missing or inconsistent files in a task/benchmark directory."""


_TASK_FILES = ("schema.json", "task.json", "rules.json", "explanations.jsonl",
               "examples.csv", "splits.json")


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Path):
    if not path.exists():
        raise DataIOError(f"missing file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataIOError(f"corrupt JSON in {path}: {exc}") from None


def _format_value(value: Value | None) -> str:
    return "" if value is None else str(value)


def _parse_value(spec: AttributeSpec, text: str) -> Value | None:
    """Invert ``str(value)`` using the attribute's declared domain."""
    if text == "":
        return None
    if spec.kind == CATEGORICAL:
        for v in spec.categorical_domain:
            if str(v) == text:
                return v
        raise DataIOError(f"value {text!r} not in the domain of {spec.name!r}")
    try:
        return int(text)
    except ValueError:
        raise DataIOError(f"expected an integer for {spec.name!r}, got {text!r}") from None


def export_task(task: Task, directory: str | Path) -> Path:
    """Write one task directory (see module docstring for the layout)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    _dump_json(directory / "schema.json", schema_to_doc(task.schema))
    _dump_json(directory / "task.json", {
        "id": task.id,
        "schema_name": task.schema_name,
        "task_type": None if task.task_type is None else task.task_type.slug,
        "seed": task.seed,
    })
    _dump_json(directory / "rules.json", [rule_to_obj(r) for r in task.rules])

    with (directory / "explanations.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for text, meta in task.explanations:
            fh.write(json.dumps({"text": text, **meta.to_obj()}) + "\n")

    attrs = task.selected_attrs
    with (directory / "examples.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(attrs + [task.schema.target_name])
        for example, label in task.examples:
            writer.writerow([_format_value(example.get(a)) for a in attrs] + [label])

    _dump_json(directory / "splits.json", task.splits)
    return directory


def import_task(directory: str | Path) -> Task:
    """Inverse of :func:`export_task`."""
    directory = Path(directory)
    for name in _TASK_FILES:
        if not (directory / name).exists():
            raise DataIOError(f"missing file: {directory / name}")

    schema = schema_from_doc(_read_json(directory / "schema.json"))
    meta = _read_json(directory / "task.json")
    schema = SchemaSpec(
        description=schema.description,
        attributes=schema.attributes,
        target_name=schema.target_name,
        target_labels=schema.target_labels,
        name=meta.get("schema_name", ""),
    )
    task_type = None
    if meta.get("task_type"):
        task_type = task_type_from_slug(meta["task_type"])

    rules = [rule_from_obj(obj) for obj in _read_json(directory / "rules.json")]

    explanations = []
    with (directory / "explanations.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            explanations.append((obj["text"], ExplanationMeta.from_obj(obj)))

    specs = {a.name: a for a in schema.attributes}
    labels = list(schema.target_labels)
    examples: list[tuple[Example, str]] = []
    with (directory / "examples.csv").open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataIOError(f"empty examples.csv in {directory}")
        expected = list(schema.attribute_names) + [schema.target_name]
        if header != expected:
            raise DataIOError(f"examples.csv header {header!r} does not match schema {expected!r}")
        for row in reader:
            if len(row) != len(header):
                raise DataIOError(f"ragged row in examples.csv: {row!r}")
            example = {name: _parse_value(specs[name], cell)
                       for name, cell in zip(header[:-1], row[:-1])}
            label = row[-1]
            if label not in labels:
                raise DataIOError(f"label {label!r} outside target set {labels!r}")
            examples.append((example, label))

    splits = {k: list(v) for k, v in _read_json(directory / "splits.json").items()}

    return Task(
        id=meta.get("id", directory.name),
        task_type=task_type,
        schema_name=meta.get("schema_name", ""),
        schema=schema,
        labels=labels,
        rules=rules,
        examples=examples,
        explanations=explanations,
        splits=splits,
        seed=meta.get("seed"),
    )


def export_benchmark(benchmark: Benchmark, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for task in benchmark.tasks:
        export_task(task, directory / task.id)
    cfg = benchmark.config
    _dump_json(directory / "manifest.json", {
        "seed": cfg.seed,
        "tasks_per_type": cfg.tasks_per_type,
        "seen_schemas": list(cfg.seen_schemas),
        "novel_schemas": list(cfg.novel_schemas),
        "degenerate_guard": cfg.degenerate_guard,
        "tasks": [t.id for t in benchmark.tasks],
    })
    return directory


def import_benchmark(directory: str | Path) -> Benchmark:
    directory = Path(directory)
    manifest = _read_json(directory / "manifest.json")
    config = BenchmarkConfig(
        seed=manifest["seed"],
        tasks_per_type=manifest["tasks_per_type"],
        seen_schemas=tuple(manifest["seen_schemas"]),
        novel_schemas=tuple(manifest["novel_schemas"]),
        degenerate_guard=manifest.get("degenerate_guard", True),
    )
    tasks = [import_task(directory / task_id) for task_id in manifest["tasks"]]
    return Benchmark(config=config, tasks=tasks)


# ------------------------------------------------------------------ #
# real-dataset ingestion
# ------------------------------------------------------------------ #

def load_real_task(csv_path: str | Path, explanations_path: str | Path,
                   schema_text: str, name: str = "") -> Task:
    """Build a task from a real CSV, pre-annotated explanations, and a
    schema document.

    Real tasks have no generative rules; explanation meta-information is
    taken from the explanations file as-is. Missing CSV cells become
    explicit ``None`` values. Every row goes into the test split (the
    artifact only evaluates real tasks zero-shot).
    """
    schema = load_schema(schema_text, name=name or Path(csv_path).stem)
    specs = {a.name: a for a in schema.attributes}
    labels = list(schema.target_labels)

    examples: list[tuple[Example, str]] = []
    with Path(csv_path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataIOError(f"empty CSV {csv_path}")
        expected = list(schema.attribute_names) + [schema.target_name]
        if header != expected:
            raise DataIOError(f"CSV header {header!r} does not match schema {expected!r}")
        for row in reader:
            if len(row) != len(header):
                raise DataIOError(f"ragged CSV row: {row!r}")
            example: Example = {}
            for spec_name, cell in zip(header[:-1], row[:-1]):
                example[spec_name] = _parse_value(specs[spec_name], cell)  # type: ignore[assignment]
            label = row[-1]
            if label not in labels:
                raise DataIOError(f"label {label!r} outside target set {labels!r}")
            examples.append((example, label))

    explanations: list[tuple[str, ExplanationMeta]] = []
    with Path(explanations_path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            meta = ExplanationMeta.from_obj(obj)
            if meta.l_exp not in labels:
                raise DataIOError(f"explanation references unknown label {meta.l_exp!r}")
            explanations.append((obj["text"], meta))

    return Task(
        id=name or Path(csv_path).stem,
        task_type=None,
        schema_name=schema.name,
        schema=schema,
        labels=labels,
        rules=[],
        examples=examples,
        explanations=explanations,
        splits={"train": [], "val": [], "test": list(range(len(examples)))},
    )


# ------------------------------------------------------------------ #
# mutual-information feature selection
# ------------------------------------------------------------------ #

def _discretize(values: Sequence[object], max_bins: int = 10) -> np.ndarray:
    """Codes for one column; numeric columns get equal-frequency bins."""
    numeric = [v for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)]
    if len(numeric) == len([v for v in values if v is not None]) and numeric:
        arr = np.array([float(v) if v is not None else np.nan for v in values])
        finite = arr[~np.isnan(arr)]
        quantiles = np.quantile(finite, np.linspace(0, 1, max_bins + 1)[1:-1])
        edges = np.unique(quantiles)
        codes = np.searchsorted(edges, arr, side="right")
        codes[np.isnan(arr)] = max_bins + 1  # missing values form their own bin
        return codes.astype(int)
    mapping: dict[str, int] = {}
    codes = np.empty(len(values), dtype=int)
    for i, v in enumerate(values):
        key = "\0missing" if v is None else str(v)
        codes[i] = mapping.setdefault(key, len(mapping))
    return codes


def _mutual_information(x: np.ndarray, y: np.ndarray) -> float:
    """Plug-in discrete MI (natural log) from joint counts."""
    n = len(x)
    joint: dict[tuple[int, int], int] = {}
    mx: dict[int, int] = {}
    my: dict[int, int] = {}
    for a, b in zip(x.tolist(), y.tolist()):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        mx[a] = mx.get(a, 0) + 1
        my[b] = my.get(b, 0) + 1
    mi = 0.0
    for (a, b), c in joint.items():
        p_ab = c / n
        mi += p_ab * math.log(p_ab * n * n / (mx[a] * my[b]))
    return max(mi, 0.0)


def select_features_mi(rows: Sequence[Mapping[str, object]], labels: Sequence[str],
                       k: int = 5) -> list[str]:
    """Top-k attributes by estimated mutual information with the labels.

    Numeric columns are discretized into at most 10 equal-frequency bins;
    ties break toward the original column order.
    """
    if not rows:
        raise DataIOError("no rows")
    columns = list(rows[0].keys())
    if k > len(columns):
        raise DataIOError(f"k={k} exceeds the {len(columns)} available attributes")
    y = _discretize(list(labels))
    scored = []
    for order, name in enumerate(columns):
        x = _discretize([row.get(name) for row in rows])
        scored.append((-_mutual_information(x, y), order, name))
    scored.sort()
    return [name for _, _, name in scored[:k]]


def mutual_information_scores(rows: Sequence[Mapping[str, object]],
                              labels: Sequence[str]) -> dict[str, float]:
    """The raw per-attribute MI estimates behind :func:`select_features_mi`."""
    if not rows:
        raise DataIOError("no rows")
    y = _discretize(list(labels))
    return {
        name: _mutual_information(_discretize([row.get(name) for row in rows]), y)
        for name in rows[0].keys()
    }
