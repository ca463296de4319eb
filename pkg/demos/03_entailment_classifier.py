"""From entailment scores to class predictions, step by step.

Run:  python3 demos/03_entailment_classifier.py
"""

from ruletab import (
    EntailmentScores,
    ExplanationMeta,
    TaskType,
    aggregate_logits,
    generate_task,
    predict,
    schema_by_name,
    scores_to_logits,
    symbolic_backend_for_task,
)
from ruletab.harness import evaluate_task, make_predictor

# ---- the score-to-logit mapping ---------------------------------------------
labels = ["poisonous", "edible", "unknown"]
scores = EntailmentScores(p_e=0.7, p_c=0.2, p_n=0.1)

assign = scores_to_logits(scores, ExplanationMeta("poisonous", assign=True), labels)
deny = scores_to_logits(scores, ExplanationMeta("poisonous", assign=False), labels)
print(f"scores (entail, contradict, neutral) = {scores.as_tuple()}")
print(f"  'assign poisonous'     -> logits {[round(v, 4) for v in assign]}")
print(f"  'do not assign ...'    -> logits {[round(v, 4) for v in deny]}")
print(f"  mass is conserved: sum = {sum(assign):.4f} in both cases")

# multiple explanations average elementwise
mean = aggregate_logits([assign, deny])
print(f"  mean of the two        -> {[round(v, 4) for v in mean]}")

# ---- a full prediction on a generated task -----------------------------------
task = generate_task(TaskType("multiclass", "conj_disj", False, "label_only"),
                     schema_by_name("bird-species"), task_seed=7)
backend = symbolic_backend_for_task(task)
example, label = task.examples[0]
predicted, logits = predict(example, task.explanations, task.labels, backend)
print(f"\ntask {task.id}: labels {task.labels}")
for text, _ in task.explanations:
    print(f"  explanation: {text}")
print(f"  example {example}")
print(f"  logits  {[round(v, 4) for v in logits]} -> predicted {predicted!r}, "
      f"stored label {label!r}")

# without quantifiers the symbolic scorer recovers every stored label
accuracy = evaluate_task(task, make_predictor(task, backend), "test")
print(f"  test-split agreement with the generative labels: {accuracy:.3f}")

# the strict variant treats a failed antecedent as neutral instead of contradicting
strict = symbolic_backend_for_task(task, mode="strict")
strict_accuracy = evaluate_task(task, make_predictor(task, strict), "test")
print(f"  strict-conditional variant: {strict_accuracy:.3f}")
