import json
import random
import socket
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruletab.entail import (
    BackendError,
    EntailmentScores,
    ExternalBackend,
    NoisyBackend,
    SymbolicBackend,
    aggregate_logits,
    predict,
    scores_to_logits,
    symbolic_backend_for_task,
    symbolic_entail,
)
from ruletab.explanations import ExplanationMeta, render_explanation
from ruletab.rules import Clause, Comparison, Leaf, Rule, TaskType
from ruletab.schema import schema_by_name
from ruletab.taskgen import BenchmarkConfig, assign_label, generate_task


def leaf(attr, op, value):
    return Leaf(Clause(attr, op, value))


finite = st.floats(min_value=-5, max_value=5, allow_nan=False)
score_triples = st.tuples(finite, finite, finite).map(lambda t: EntailmentScores(*t))


class TestSymbolicEntail:
    def test_satisfied_unquantified(self):
        rule = Rule(leaf("size", Comparison.EQ, "large"), "wug")
        assert symbolic_entail(rule, {"size": "large"}) == EntailmentScores(1.0, 0.0, 0.0)

    def test_unsatisfied_unquantified(self):
        rule = Rule(leaf("size", Comparison.EQ, "large"), "wug")
        assert symbolic_entail(rule, {"size": "small"}) == EntailmentScores(0.0, 1.0, 0.0)

    def test_quantified_satisfied(self):
        rule = Rule(leaf("size", Comparison.EQ, "large"), "wug", quantifier="usually")
        scores = symbolic_entail(rule, {"size": "large"})
        assert scores.p_e == pytest.approx(0.70)
        assert scores.p_c == pytest.approx(0.30)
        assert scores.p_n == 0.0

    def test_strict_mode_neutral_on_unsatisfied(self):
        rule = Rule(leaf("size", Comparison.EQ, "large"), "wug")
        assert symbolic_entail(rule, {"size": "small"}, mode="strict") \
            == EntailmentScores(0.0, 0.0, 1.0)
        assert symbolic_entail(rule, {"size": "large"}, mode="strict") \
            == EntailmentScores(1.0, 0.0, 0.0)


class TestScoresToLogits:
    def test_assign_two_labels(self):
        logits = scores_to_logits(EntailmentScores(0.6, 0.3, 0.1),
                                  ExplanationMeta("A", True), ["A", "B"])
        assert logits == pytest.approx([0.65, 0.35])

    def test_not_assign_three_labels(self):
        logits = scores_to_logits(EntailmentScores(0.8, 0.1, 0.1),
                                  ExplanationMeta("A", False), ["A", "B", "C"])
        assert logits == pytest.approx([0.1 + 0.1 / 3, 0.4 + 0.1 / 3, 0.4 + 0.1 / 3])

    def test_pure_neutral_is_uniform(self):
        logits = scores_to_logits(EntailmentScores(0, 0, 1),
                                  ExplanationMeta("A", True), ["A", "B", "C", "D"])
        assert logits == pytest.approx([0.25] * 4)

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="not in task labels"):
            scores_to_logits(EntailmentScores(1, 0, 0), ExplanationMeta("Z", True), ["A", "B"])

    @settings(max_examples=300)
    @given(scores=score_triples, assign=st.booleans(), k=st.integers(2, 6),
           pos=st.integers(0, 5))
    def test_conservation(self, scores, assign, k, pos):
        labels = [f"l{i}" for i in range(k)]
        meta = ExplanationMeta(labels[pos % k], assign)
        logits = scores_to_logits(scores, meta, labels)
        assert sum(logits) == pytest.approx(scores.p_e + scores.p_c + scores.p_n, abs=1e-9)

    @settings(max_examples=300)
    @given(scores=score_triples, k=st.integers(2, 6), pos=st.integers(0, 5))
    def test_swap_symmetry(self, scores, k, pos):
        labels = [f"l{i}" for i in range(k)]
        l_exp = labels[pos % k]
        not_assign = scores_to_logits(scores, ExplanationMeta(l_exp, False), labels)
        swapped = scores_to_logits(EntailmentScores(scores.p_c, scores.p_e, scores.p_n),
                                   ExplanationMeta(l_exp, True), labels)
        assert not_assign == swapped

    @settings(max_examples=300)
    @given(scores=score_triples, assign=st.booleans(), k=st.integers(2, 6),
           pos=st.integers(0, 5), shift=st.integers(1, 5))
    def test_label_permutation_equivariance(self, scores, assign, k, pos, shift):
        labels = [f"l{i}" for i in range(k)]
        meta = ExplanationMeta(labels[pos % k], assign)
        base = scores_to_logits(scores, meta, labels)
        rotated = labels[shift % k:] + labels[:shift % k]
        moved = scores_to_logits(scores, meta, rotated)
        assert [moved[rotated.index(l)] for l in labels] == pytest.approx(base)


class TestAggregateLogits:
    def test_mean_of_symmetric_pair(self):
        assert aggregate_logits([[0.65, 0.35], [0.35, 0.65]]) == pytest.approx([0.5, 0.5])

    def test_single_element_identity(self):
        assert aggregate_logits([[0.2, 0.8]]) == [0.2, 0.8]

    def test_permutation_invariance(self):
        rows = [[0.1, 0.9], [0.7, 0.3], [0.5, 0.5]]
        assert aggregate_logits(rows) == pytest.approx(aggregate_logits(rows[::-1]))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate_logits([])

    def test_ragged_rejected(self):
        with pytest.raises(ValueError, match="ragged"):
            aggregate_logits([[1.0, 2.0], [1.0]])


class TestPredict:
    def _task_bits(self):
        rule = Rule(leaf("size", Comparison.EQ, "large"), "wug")
        text, meta = render_explanation(rule)
        birds = schema_by_name("bird-species")
        backend = SymbolicBackend([birds.attribute("size")], ["wug", "blicket"])
        return text, meta, backend

    def test_entailed_explanation_wins(self):
        text, meta, backend = self._task_bits()
        label, logits = predict({"size": "large"}, [(text, meta)], ["wug", "blicket"], backend)
        assert label == "wug"
        assert logits == pytest.approx([1.0, 0.0])

    def test_all_neutral_scores_tie_break_by_example(self):
        class Neutral:
            def score(self, example, explanation):
                return EntailmentScores(0, 0, 1)
        explanations = [("anything", ExplanationMeta("b", True))]
        label, logits = predict({"x": 1}, explanations, ["a", "b"], Neutral())
        assert logits == pytest.approx([0.5, 0.5])
        # same example, same pick; across examples the picks spread
        assert label == predict({"x": 1}, explanations, ["a", "b"], Neutral())[0]
        picks = {predict({"x": i}, explanations, ["a", "b"], Neutral())[0]
                 for i in range(40)}
        assert picks == {"a", "b"}

    def test_predict_tie_break_matches_label_assigner(self):
        # a full logit tie and a full vote tie must resolve identically
        from ruletab.taskgen import tie_break_argmax
        for i in range(50):
            example = {"x": i, "y": "q"}
            labels = ["a", "b", "c"]
            assert (tie_break_argmax([1.0, 1.0, 1.0], example)
                    == tie_break_argmax([3, 3, 3], example))

    def test_no_explanations_rejected(self):
        with pytest.raises(ValueError, match="explanation"):
            predict({"x": 1}, [], ["a", "b"], None)

    def test_constant_score_shift_keeps_binary_argmax(self):
        # with two labels a uniform shift of (p_e, p_c, p_n) moves both
        # logits by the same amount, so the predicted label cannot change
        rng = random.Random(8)
        labels = ["a", "b"]
        for _ in range(200):
            scores = EntailmentScores(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1))
            shift = rng.uniform(-1, 1)
            shifted = EntailmentScores(scores.p_e + shift, scores.p_c + shift,
                                       scores.p_n + shift)
            meta = ExplanationMeta(rng.choice(labels), rng.random() < 0.5)
            a = scores_to_logits(scores, meta, labels)
            b = scores_to_logits(shifted, meta, labels)
            assert max(range(2), key=lambda i: (a[i], -i)) == max(range(2), key=lambda i: (b[i], -i))

    def test_oracle_consistency_on_generated_tasks(self):
        for seed in (1, 2, 3):
            tt = TaskType("multiclass", "nested", False, "clause_or_label")
            task = generate_task(tt, schema_by_name("bird-species"), task_seed=seed)
            backend = symbolic_backend_for_task(task)
            for example, label in task.examples[:300]:
                got, _ = predict(example, task.explanations, task.labels, backend)
                assert got == label

    def test_out_of_domain_row_scores_neutral(self):
        text, meta, backend = self._task_bits()
        assert backend.score({"size": 47}, text) == EntailmentScores(0, 0, 1)


class TestNoisyBackend:
    def test_zero_width_is_identity(self):
        text, meta, _ = TestPredict()._task_bits()
        birds = schema_by_name("bird-species")
        inner = SymbolicBackend([birds.attribute("size")], ["wug", "blicket"])
        noisy = NoisyBackend(inner, 0.0, random.Random(1))
        assert noisy.score({"size": "large"}, text) == inner.score({"size": "large"}, text)

    def test_noise_is_bounded_and_zero_mean(self):
        text, meta, _ = TestPredict()._task_bits()
        birds = schema_by_name("bird-species")
        inner = SymbolicBackend([birds.attribute("size")], ["wug", "blicket"])
        noisy = NoisyBackend(inner, 0.4, random.Random(1))
        diffs = []
        for _ in range(2000):
            s = noisy.score({"size": "large"}, text)
            diffs.append(s.p_e - 1.0)
            assert abs(s.p_e - 1.0) <= 0.2
        assert abs(sum(diffs) / len(diffs)) < 0.02


def _echo_server(handler):
    """Serve one connection on an ephemeral port, line-in line-out."""
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    port = sock.getsockname()[1]

    def run():
        conn, _ = sock.accept()
        stream = conn.makefile("rw", encoding="utf-8", newline="\n")
        for line in stream:
            out = handler(json.loads(line))
            if out is not None:
                stream.write(json.dumps(out) + "\n")
                stream.flush()
        conn.close()
        sock.close()

    threading.Thread(target=run, daemon=True).start()
    return port


class TestExternalBackend:
    def test_scores_round_trip_over_tcp(self):
        def handler(req):
            assert set(req) == {"id", "premise", "hypothesis"}
            return {"id": req["id"], "p_e": 0.7, "p_c": 0.2, "p_n": 0.1}
        port = _echo_server(handler)
        with ExternalBackend.connect_tcp("127.0.0.1", port) as backend:
            scores = backend.score({"odor": "pungent"}, "some explanation")
        assert scores == EntailmentScores(0.7, 0.2, 0.1)

    def test_premise_is_linearized_row(self):
        seen = {}
        def handler(req):
            seen["premise"] = req["premise"]
            return {"id": req["id"], "p_e": 1, "p_c": 0, "p_n": 0}
        port = _echo_server(handler)
        with ExternalBackend.connect_tcp("127.0.0.1", port) as backend:
            backend.score({"a": 1, "b": "x"}, "h")
        assert seen["premise"] == "a | 1 [SEP] b | x"

    def test_out_of_order_responses_matched_by_id(self):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        def run():
            conn, _ = sock.accept()
            stream = conn.makefile("rw", encoding="utf-8", newline="\n")
            pending = []
            for line in stream:
                pending.append(json.loads(line))
                if len(pending) == 3:
                    for r in reversed(pending):
                        stream.write(json.dumps(
                            {"id": r["id"], "p_e": float(r["hypothesis"]),
                             "p_c": 0.0, "p_n": 0.0}) + "\n")
                    stream.flush()
            conn.close()
            sock.close()
        threading.Thread(target=run, daemon=True).start()
        with ExternalBackend.connect_tcp("127.0.0.1", port) as backend:
            got = backend.score_many([({"a": 1}, "0.1"), ({"a": 2}, "0.2"), ({"a": 3}, "0.3")])
        assert [s.p_e for s in got] == pytest.approx([0.1, 0.2, 0.3])

    def test_error_response_raises(self):
        def handler(req):
            return {"id": req["id"], "error": "boom"}
        port = _echo_server(handler)
        with ExternalBackend.connect_tcp("127.0.0.1", port) as backend:
            with pytest.raises(BackendError, match="boom"):
                backend.score({"a": 1}, "h")

    def test_malformed_response_raises(self):
        def handler(req):
            return {"id": req["id"], "p_e": "NaN-ish nonsense", "p_c": None}
        port = _echo_server(handler)
        with ExternalBackend.connect_tcp("127.0.0.1", port) as backend:
            with pytest.raises(BackendError, match="malformed|bad"):
                backend.score({"a": 1}, "h")

    def test_spawned_stdio_backend(self):
        import sys
        script = ("import sys, json\n"
                  "for line in sys.stdin:\n"
                  "    req = json.loads(line)\n"
                  "    print(json.dumps({'id': req['id'], 'p_e': 0.5, 'p_c': 0.25,"
                  " 'p_n': 0.25}), flush=True)\n")
        with ExternalBackend.spawn([sys.executable, "-c", script]) as backend:
            scores = backend.score({"a": 1}, "h")
        assert scores == EntailmentScores(0.5, 0.25, 0.25)
