"""Entailment-score classification: map per-explanation (entail,
contradict, neutral) scores onto class logits, average them, and predict.

Backends produce the scores. The symbolic backend re-parses the templated
explanation and evaluates it directly against the row, so with no
quantifiers its predictions provably coincide with the generative labels.
An external backend speaks line-delimited JSON so any scoring process
(e.g. an NLI model server) can plug in.
"""

from __future__ import annotations

import itertools
import json
import random
import socket
import subprocess
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Protocol, Sequence

from .explanations import ExplanationMeta, parse_explanation
from .linearize import linearize
from .rules import QUANTIFIER_PROBS, eval_antecedent
from .schema import AttributeSpec, Value
from .taskgen import tie_break_argmax


class BackendError(RuntimeError):
    """External scoring backend failed or broke the protocol."""


@dataclass(frozen=True)
class EntailmentScores:
    p_e: float
    p_c: float
    p_n: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_e, self.p_c, self.p_n)


class ScoreBackend(Protocol):
    def score(self, example: Mapping[str, Value], explanation: str) -> EntailmentScores: ...


def scores_to_logits(scores: EntailmentScores, meta: ExplanationMeta,
                     labels: Sequence[str]) -> list[float]:
    """Distribute one explanation's scores over the task labels.

    Assign case: the mentioned label takes p_e, every other label an equal
    share of p_c, and all labels an equal share of p_n. The not-assign case
    swaps the roles of p_e and p_c.
    """
    if len(labels) < 2:
        raise ValueError("need at least two labels")
    if meta.l_exp not in labels:
        raise ValueError(f"explanation label {meta.l_exp!r} not in task labels")
    own, other = (scores.p_e, scores.p_c) if meta.assign else (scores.p_c, scores.p_e)
    neutral_share = scores.p_n / len(labels)
    other_share = other / (len(labels) - 1)
    return [
        (own if label == meta.l_exp else other_share) + neutral_share
        for label in labels
    ]


def aggregate_logits(per_explanation: Sequence[Sequence[float]]) -> list[float]:
    """Elementwise arithmetic mean over explanations."""
    if not per_explanation:
        raise ValueError("no per-explanation logits to aggregate")
    width = len(per_explanation[0])
    if any(len(row) != width for row in per_explanation):
        raise ValueError("ragged logit rows")
    n = len(per_explanation)
    return [sum(row[i] for row in per_explanation) / n for i in range(width)]


def predict(example: Mapping[str, Value],
            explanations: Sequence[tuple[str, ExplanationMeta]],
            labels: Sequence[str], backend: ScoreBackend) -> tuple[str, list[float]]:
    """Score every explanation, map to class logits, average, argmax.

    Exact logit ties resolve through the same example-keyed rule the label
    assigner uses, so the symbolic backend stays in lockstep with it.
    """
    if not explanations:
        raise ValueError("need at least one explanation")
    per = []
    for text, meta in explanations:
        scores = backend.score(example, text)
        per.append(scores_to_logits(scores, meta, labels))
    logits = aggregate_logits(per)
    return labels[tie_break_argmax(logits, example)], logits


# ------------------------------------------------------------------ #
# backends
# ------------------------------------------------------------------ #

def symbolic_entail(rule, example: Mapping[str, Value],
                    mode: str = "algorithm") -> EntailmentScores:
    """Deterministic entailment scores for a parsed rule against a row.

    With antecedent truth t and quantifier probability p (1 when absent):
    t -> (p, 1-p, 0). In the default mode, not-t -> (1-p, p, 0), mirroring
    the label assigner's votes against the mentioned label; in ``strict``
    mode an unsatisfied conditional is neutral, (0, 0, 1).
    """
    if mode not in ("algorithm", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    satisfied = eval_antecedent(rule.antecedent, example)
    p = QUANTIFIER_PROBS[rule.quantifier] if rule.quantifier else 1.0
    if satisfied:
        return EntailmentScores(p, 1.0 - p, 0.0)
    if mode == "strict":
        return EntailmentScores(0.0, 0.0, 1.0)
    return EntailmentScores(1.0 - p, p, 0.0)


class SymbolicBackend:
    """Deterministic stand-in for a learned entailment scorer.

    Parses the explanation against the task's schema context and evaluates
    its antecedent on the row. A satisfied antecedent yields (p, 1-p, 0)
    where p is the quantifier probability (1 without a quantifier). An
    unsatisfied one yields (1-p, p, 0) in the default mode, mirroring the
    label assigner's votes against the mentioned label; in ``strict`` mode
    an unsatisfied conditional is neutral instead, (0, 0, 1).

    Rows carrying any out-of-domain value (e.g. after column scrambling)
    support neither reading, so they score neutral across the board.
    """

    def __init__(self, attributes: Sequence[AttributeSpec], labels: Sequence[str],
                 mode: str = "algorithm"):
        if mode not in ("algorithm", "strict"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self._attributes = list(attributes)
        self._labels = list(labels)
        self._parsed: dict[str, object] = {}

    def _rule_for(self, text: str):
        rule = self._parsed.get(text)
        if rule is None:
            rule, _ = parse_explanation(text, self._attributes, self._labels)
            self._parsed[text] = rule
        return rule

    def _row_in_domain(self, example: Mapping[str, Value]) -> bool:
        for spec in self._attributes:
            if spec.name in example and not spec.contains(example[spec.name]):
                return False
        return True

    def score(self, example: Mapping[str, Value], explanation: str) -> EntailmentScores:
        rule = self._rule_for(explanation)
        if not self._row_in_domain(example):
            return EntailmentScores(0.0, 0.0, 1.0)
        return symbolic_entail(rule, example, mode=self.mode)


class NoisyBackend:
    """Wrap another backend and add zero-mean uniform noise of a given
    width to each score component; width 0 is the identity."""

    def __init__(self, inner: ScoreBackend, width: float, rng: random.Random):
        self.inner = inner
        self.width = width
        self.rng = rng

    def score(self, example: Mapping[str, Value], explanation: str) -> EntailmentScores:
        base = self.inner.score(example, explanation)
        half = self.width / 2.0
        return EntailmentScores(
            base.p_e + self.rng.uniform(-half, half),
            base.p_c + self.rng.uniform(-half, half),
            base.p_n + self.rng.uniform(-half, half),
        )


class ExternalBackend:
    """Client for the line-delimited JSON scoring protocol.

    Requests: ``{"id": str, "premise": <FaT row>, "hypothesis": <text>}``.
    Responses carry the same id plus ``p_e``/``p_c``/``p_n`` (raw scores,
    any order on the wire; they are matched back by id).
    """

    def __init__(self, reader: IO[str], writer: IO[str], closer=None):
        self._reader = reader
        self._writer = writer
        self._closer = closer
        self._ids = itertools.count()
        self._pending: dict[str, dict] = {}

    @classmethod
    def connect_tcp(cls, host: str, port: int, timeout: float | None = 30.0) -> "ExternalBackend":
        sock = socket.create_connection((host, port), timeout=timeout)
        stream = sock.makefile("rw", encoding="utf-8", newline="\n")
        return cls(stream, stream, closer=sock.close)

    @classmethod
    def spawn(cls, argv: Sequence[str]) -> "ExternalBackend":
        proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                text=True, bufsize=1)
        return cls(proc.stdout, proc.stdin, closer=proc.terminate)

    def close(self) -> None:
        if self._closer is not None:
            self._closer()

    def __enter__(self) -> "ExternalBackend":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _send(self, request_id: str, premise: str, hypothesis: str) -> None:
        line = json.dumps({"id": request_id, "premise": premise, "hypothesis": hypothesis})
        try:
            self._writer.write(line + "\n")
            self._writer.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BackendError(f"backend connection lost: {exc}") from None

    def _receive(self, request_id: str) -> dict:
        while request_id not in self._pending:
            line = self._reader.readline()
            if not line:
                raise BackendError("backend closed the connection")
            line = line.strip()
            if not line:
                continue
            try:
                response = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BackendError(f"bad response line: {exc}") from None
            self._pending[str(response.get("id"))] = response
        return self._pending.pop(request_id)

    @staticmethod
    def _scores_from(response: dict) -> EntailmentScores:
        if "error" in response:
            raise BackendError(f"backend error: {response['error']}")
        try:
            return EntailmentScores(float(response["p_e"]), float(response["p_c"]),
                                    float(response["p_n"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed response {response!r}: {exc}") from None

    def score(self, example: Mapping[str, Value], explanation: str) -> EntailmentScores:
        request_id = str(next(self._ids))
        self._send(request_id, linearize(example), explanation)
        return self._scores_from(self._receive(request_id))

    def score_many(self, pairs: Iterable[tuple[Mapping[str, Value], str]]) -> list[EntailmentScores]:
        """Pipelined variant: send every request, then collect by id."""
        ids = []
        for example, explanation in pairs:
            request_id = str(next(self._ids))
            self._send(request_id, linearize(example), explanation)
            ids.append(request_id)
        return [self._scores_from(self._receive(i)) for i in ids]


def symbolic_backend_for_task(task, mode: str = "algorithm") -> SymbolicBackend:
    """Convenience: a symbolic backend bound to a task's schema slice."""
    return SymbolicBackend(task.schema.attributes, task.labels, mode=mode)
