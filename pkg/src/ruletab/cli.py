"""Command-line entry point.

Subcommands: generate, render-expl, parse-expl, linearize, evaluate,
ablate, scramble-exp. All randomness flows from ``--seed``; two runs with
the same flags produce byte-identical output trees.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import dataio, harness
from .entail import ExternalBackend, symbolic_backend_for_task
from .explanations import parse_explanation, render_explanation
from .linearize import linearize, sample_scramble_permutation, scramble
from .rules import rule_from_obj, rule_to_obj
from .schema import load_schema
from .seeding import derive_rng
from .taskgen import Benchmark, BenchmarkConfig, generate_benchmark


class CLIError(RuntimeError):
    pass


def _load_tasks(path: str) -> list:
    """Accept either a benchmark root (manifest.json) or one task directory."""
    root = Path(path)
    if (root / "manifest.json").exists():
        return dataio.import_benchmark(root).tasks
    if (root / "task.json").exists():
        return [dataio.import_task(root)]
    raise CLIError(f"{path} is neither a benchmark (manifest.json) nor a task (task.json)")


def _filter_tasks(tasks, only: str):
    if only == "all":
        return tasks
    seen = set(BenchmarkConfig().seen_schemas)
    novel = set(BenchmarkConfig().novel_schemas)
    wanted = seen if only == "seen" else novel
    chosen = [t for t in tasks if t.schema_name in wanted]
    if not chosen:
        raise CLIError(f"no {only} tasks under the given directory")
    return chosen


def _make_backend_factory(spec: str):
    if spec == "symbolic":
        return lambda task: symbolic_backend_for_task(task, mode="algorithm"), None
    if spec == "strict":
        return lambda task: symbolic_backend_for_task(task, mode="strict"), None
    if spec.startswith("external:"):
        addr = spec[len("external:"):]
        host, _, port = addr.rpartition(":")
        if not host or not port.isdigit():
            raise CLIError(f"bad external backend address {addr!r}; expected HOST:PORT")
        backend = ExternalBackend.connect_tcp(host, int(port))
        return (lambda task: backend), backend
    raise CLIError(f"unknown backend {spec!r}; use symbolic, strict, or external:HOST:PORT")


def _emit_rows(rows: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    if fmt == "csv":
        if rows:
            writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return
    if not rows:
        return
    headers = list(rows[0].keys())
    formatted = [[_fmt_cell(r[h]) for h in headers] for r in rows]
    widths = [max(len(h), *(len(row[i]) for row in formatted)) for i, h in enumerate(headers)]
    out.write("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip() + "\n")
    for row in formatted:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _fmt_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _parse_seeds(text: str) -> list[int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


# ------------------------------------------------------------------ #
# subcommands
# ------------------------------------------------------------------ #

def _cmd_generate(args) -> int:
    config = BenchmarkConfig(
        seed=args.seed,
        tasks_per_type=args.tasks_per_type,
        degenerate_guard=not args.no_degenerate_guard,
    )
    benchmark = generate_benchmark(config)
    dataio.export_benchmark(benchmark, args.out)
    expl = sum(len(t.explanations) for t in benchmark.tasks) / len(benchmark.tasks)
    print(f"wrote {len(benchmark.tasks)} tasks to {args.out} "
          f"(seed {config.seed}, {config.tasks_per_type} per type, "
          f"{expl:.2f} explanations/task)")
    return 0


def _cmd_render_expl(args) -> int:
    objs = json.loads(Path(args.rules).read_text(encoding="utf-8"))
    rows = []
    for obj in objs:
        text, meta = render_explanation(rule_from_obj(obj))
        rows.append({"text": text, **meta.to_obj()})
    if args.format == "table":
        for row in rows:
            print(row["text"])
    else:
        _emit_rows(rows, args.format)
    return 0


def _cmd_parse_expl(args) -> int:
    schema = load_schema(Path(args.schema).read_text(encoding="utf-8"))
    rule, meta = parse_explanation(args.text, schema.attributes, schema.target_labels)
    payload = {"rule": rule_to_obj(rule), "meta": meta.to_obj()}
    json.dump(payload, sys.stdout, indent=2)
    print()
    return 0


def _cmd_linearize(args) -> int:
    tasks = _load_tasks(args.task)
    for task in tasks:
        transform = None
        if args.scramble_seed is not None:
            rng = derive_rng(args.scramble_seed, task.id, "scramble")
            permutation = sample_scramble_permutation(task.selected_attrs, rng)
            transform = lambda ex: scramble(ex, permutation)  # noqa: E731
        for example, _ in task.examples:
            print(linearize(transform(example) if transform else example))
    return 0


def _cmd_evaluate(args) -> int:
    tasks = _filter_tasks(_load_tasks(args.tasks), args.only)
    factory, backend = _make_backend_factory(args.backend)
    try:
        rows = []
        for task in sorted(tasks, key=lambda t: t.id):
            accuracy = harness.evaluate_task(
                task, harness.make_predictor(task, factory(task)), args.split)
            baselines = harness.compute_baselines(task, args.split)
            rows.append({
                "task": task.id,
                "accuracy": accuracy,
                "random": baselines["random"],
                "majority": baselines["majority"],
            })
    finally:
        if backend is not None:
            backend.close()
    mean = sum(r["accuracy"] for r in rows) / len(rows)
    mean_random = sum(r["random"] for r in rows) / len(rows)
    mean_majority = sum(r["majority"] for r in rows) / len(rows)
    rows.append({"task": "MEAN", "accuracy": mean,
                 "random": mean_random, "majority": mean_majority})
    _emit_rows(rows, args.format)
    if args.format == "table":
        print(f"accuracy {mean:.3f}")
    return 0


def _cmd_ablate(args) -> int:
    tasks = _load_tasks(args.tasks)
    factory, backend = _make_backend_factory(args.backend)
    try:
        axes = [args.axis] if args.axis else list(harness.ABLATION_AXES)
        report = harness.ablation_report(Benchmark(BenchmarkConfig(), tasks), factory,
                                         axes=axes, split=args.split)
    finally:
        if backend is not None:
            backend.close()
    _emit_rows(report, args.format)
    return 0


def _cmd_scramble_exp(args) -> int:
    tasks = _filter_tasks(_load_tasks(args.tasks), args.only)
    factory, backend = _make_backend_factory(args.backend)
    try:
        result = harness.scrambling_experiment(tasks, factory,
                                               seeds=_parse_seeds(args.seeds),
                                               split=args.split)
    finally:
        if backend is not None:
            backend.close()
    rows = [{"seed": seed, "accuracy": acc} for seed, acc in result["per_seed"].items()]
    rows.append({"seed": "MEAN", "accuracy": result["mean_accuracy"]})
    rows.append({"seed": "STD", "accuracy": result["std_accuracy"]})
    rows.append({"seed": "RANDOM_BASELINE", "accuracy": result["random_baseline"]})
    rows.append({"seed": "FREQUENCY_BASELINE", "accuracy": result["frequency_baseline"]})
    _emit_rows(rows, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruletab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate and export a benchmark")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tasks-per-type", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--no-degenerate-guard", action="store_true",
                   help="accept rule sets even when one label dominates")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("render-expl", help="render explanations from a rules file")
    p.add_argument("--rules", required=True)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_render_expl)

    p = sub.add_parser("parse-expl", help="parse an explanation back into a rule")
    p.add_argument("--text", required=True)
    p.add_argument("--schema", required=True)
    p.set_defaults(func=_cmd_parse_expl)

    p = sub.add_parser("linearize", help="print rows in features-as-text form")
    p.add_argument("--task", required=True)
    p.add_argument("--scramble-seed", type=int, default=None)
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("evaluate", help="accuracy of a backend on stored tasks")
    p.add_argument("--tasks", required=True)
    p.add_argument("--backend", default="symbolic")
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--only", choices=("all", "seen", "novel"), default="all")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ablate", help="per-axis accuracy and relative gain")
    p.add_argument("--tasks", required=True)
    p.add_argument("--axis", choices=harness.ABLATION_AXES, default=None)
    p.add_argument("--backend", default="symbolic")
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("scramble-exp", help="evaluate with scrambled column names")
    p.add_argument("--tasks", required=True)
    p.add_argument("--seeds", default="42..46")
    p.add_argument("--backend", default="symbolic")
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--only", choices=("all", "seen", "novel"), default="novel")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_scramble_exp)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:  # surface module errors with a nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
