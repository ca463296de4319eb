"""Rule ASTs, antecedent evaluation, and seeded rule-set sampling.

A rule is ``IF <antecedent> THEN [NOT] <label>`` with an optional hedging
quantifier. Antecedents are boolean expressions over single-attribute
clauses, at most one connective deep over a pair (e.g. ``c1 or (c2 and c3)``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, Union

from .schema import CATEGORICAL, AttributeSpec, SchemaSpec, Value


class RuleError(ValueError):
    """Invalid rule structure or unsatisfiable sampling request."""


class EvalError(ValueError):
    """Antecedent evaluation failed (missing attribute or type mismatch)."""


class Comparison(str, Enum):
    EQ = "EQ"
    NEQ = "NEQ"
    GT = "GT"
    GTE = "GTE"
    LT = "LT"
    LTE = "LTE"
    NGT = "NGT"   # not greater than
    NLT = "NLT"   # not lesser than


# Operators legal on categorical attributes; the rest need numeric values.
CATEGORICAL_OPS = (Comparison.EQ, Comparison.NEQ)
NEGATED_OPS = (Comparison.NEQ, Comparison.NGT, Comparison.NLT)


@dataclass(frozen=True)
class Clause:
    attribute: str
    operator: Comparison
    value: Value


@dataclass(frozen=True)
class Leaf:
    clause: Clause


@dataclass(frozen=True)
class And:
    left: "RuleExpr"
    right: "RuleExpr"


@dataclass(frozen=True)
class Or:
    left: "RuleExpr"
    right: "RuleExpr"


RuleExpr = Union[Leaf, And, Or]


@dataclass(frozen=True)
class Rule:
    antecedent: RuleExpr
    label: str
    label_negated: bool = False
    quantifier: str | None = None


#: Hedging adverbs and the probability that the hedged assignment holds.
QUANTIFIER_PROBS: dict[str, float] = {
    "always": 0.95,
    "certainly": 0.95,
    "definitely": 0.95,
    "usually": 0.70,
    "normally": 0.70,
    "generally": 0.70,
    "likely": 0.70,
    "typically": 0.70,
    "often": 0.50,
    "sometimes": 0.30,
    "frequently": 0.30,
    "occasionally": 0.20,
    "rarely": 0.10,
    "seldom": 0.10,
    "never": 0.05,
}

QUANTIFIER_TOKENS = tuple(QUANTIFIER_PROBS)


LABEL_ARITIES = ("binary", "multiclass")
STRUCTURES = ("simple", "conj_disj", "nested")
NEGATION_MODES = ("none", "clause_only", "label_only", "clause_or_label")


@dataclass(frozen=True)
class TaskType:
    """One cell of the arity x structure x quantifier x negation grid."""

    label_arity: str
    structure: str
    quantified: bool
    negation: str

    def __post_init__(self) -> None:
        if self.label_arity not in LABEL_ARITIES:
            raise RuleError(f"unknown label arity {self.label_arity!r}")
        if self.structure not in STRUCTURES:
            raise RuleError(f"unknown structure {self.structure!r}")
        if self.negation not in NEGATION_MODES:
            raise RuleError(f"unknown negation mode {self.negation!r}")

    @property
    def slug(self) -> str:
        q = "quant" if self.quantified else "noquant"
        return f"{self.label_arity}-{self.structure}-{q}-{self.negation}"

    @property
    def allows_clause_negation(self) -> bool:
        return self.negation in ("clause_only", "clause_or_label")

    @property
    def allows_label_negation(self) -> bool:
        return self.negation in ("label_only", "clause_or_label")


def enumerate_task_types() -> list[TaskType]:
    """All 48 task types in canonical (arity, structure, quantified, negation) order."""
    return [
        TaskType(arity, structure, quantified, negation)
        for arity in LABEL_ARITIES
        for structure in STRUCTURES
        for quantified in (False, True)
        for negation in NEGATION_MODES
    ]


def task_type_from_slug(slug: str) -> TaskType:
    for tt in enumerate_task_types():
        if tt.slug == slug:
            return tt
    raise RuleError(f"unknown task type slug {slug!r}")


# ------------------------------------------------------------------ #
# evaluation
# ------------------------------------------------------------------ #

def _require_number(clause: Clause, value: Value) -> int | float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise EvalError(
            f"operator {clause.operator.value} on {clause.attribute!r} needs a "
            f"numeric value, got {value!r}"
        )
    return value


def eval_clause(clause: Clause, example: Mapping[str, Value]) -> bool:
    if clause.attribute not in example:
        raise EvalError(f"attribute {clause.attribute!r} missing from example")
    actual = example[clause.attribute]
    op = clause.operator
    if op == Comparison.EQ:
        return actual == clause.value
    if op == Comparison.NEQ:
        return actual != clause.value
    threshold = clause.value
    if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
        raise EvalError(f"operator {op.value} needs a numeric clause value, got {threshold!r}")
    actual_num = _require_number(clause, actual)
    if op == Comparison.GT:
        return actual_num > threshold
    if op == Comparison.GTE:
        return actual_num >= threshold
    if op == Comparison.LT:
        return actual_num < threshold
    if op == Comparison.LTE:
        return actual_num <= threshold
    if op == Comparison.NGT:
        return not actual_num > threshold
    if op == Comparison.NLT:
        return not actual_num < threshold
    raise EvalError(f"unknown operator {op!r}")


def eval_antecedent(expr: RuleExpr, example: Mapping[str, Value]) -> bool:
    """Standard boolean semantics; both operands always well-defined."""
    if isinstance(expr, Leaf):
        return eval_clause(expr.clause, example)
    if isinstance(expr, And):
        return eval_antecedent(expr.left, example) and eval_antecedent(expr.right, example)
    if isinstance(expr, Or):
        return eval_antecedent(expr.left, example) or eval_antecedent(expr.right, example)
    raise EvalError(f"unknown expression node {expr!r}")


def expr_clauses(expr: RuleExpr) -> list[Clause]:
    if isinstance(expr, Leaf):
        return [expr.clause]
    return expr_clauses(expr.left) + expr_clauses(expr.right)


def expr_depth(expr: RuleExpr) -> int:
    """Leaf = 0; one connective = 1; connective over a connective = 2."""
    if isinstance(expr, Leaf):
        return 0
    return 1 + max(expr_depth(expr.left), expr_depth(expr.right))


def rule_clauses(rule: Rule) -> list[Clause]:
    return expr_clauses(rule.antecedent)


# ------------------------------------------------------------------ #
# serialization (canonical tagged AST)
# ------------------------------------------------------------------ #

def expr_to_obj(expr: RuleExpr) -> dict:
    if isinstance(expr, Leaf):
        c = expr.clause
        return {"tag": "leaf", "attribute": c.attribute,
                "operator": c.operator.value, "value": c.value}
    tag = "and" if isinstance(expr, And) else "or"
    return {"tag": tag, "children": [expr_to_obj(expr.left), expr_to_obj(expr.right)]}


def expr_from_obj(obj: Mapping) -> RuleExpr:
    try:
        tag = obj["tag"]
    except (KeyError, TypeError):
        raise RuleError(f"expression object missing tag: {obj!r}") from None
    if tag == "leaf":
        return Leaf(Clause(obj["attribute"], Comparison(obj["operator"]), obj["value"]))
    if tag not in ("and", "or"):
        raise RuleError(f"unknown expression tag {tag!r}")
    children = obj.get("children", [])
    if len(children) != 2:
        raise RuleError(f"{tag!r} node needs exactly two children")
    left, right = (expr_from_obj(c) for c in children)
    return And(left, right) if tag == "and" else Or(left, right)


def rule_to_obj(rule: Rule) -> dict:
    return {
        "antecedent": expr_to_obj(rule.antecedent),
        "label": rule.label,
        "label_negated": rule.label_negated,
        "quantifier": rule.quantifier,
    }


def rule_from_obj(obj: Mapping) -> Rule:
    try:
        return Rule(
            antecedent=expr_from_obj(obj["antecedent"]),
            label=obj["label"],
            label_negated=bool(obj["label_negated"]),
            quantifier=obj.get("quantifier"),
        )
    except KeyError as exc:
        raise RuleError(f"rule object missing key {exc}") from None


# ------------------------------------------------------------------ #
# sampling
# ------------------------------------------------------------------ #

# Structural forms per maximum complexity; a type may emit anything up to
# its bound, so e.g. nested collections also contain plain conjunctions.
_FORMS_BY_STRUCTURE = {
    "simple": ("leaf",),
    "conj_disj": ("leaf", "and", "or"),
    "nested": ("leaf", "and", "or", "or_over_and", "and_over_or"),
}
_FORM_CLAUSE_COUNT = {"leaf": 1, "and": 2, "or": 2, "or_over_and": 3, "and_over_or": 3}

_POSITIVE_NUMERIC_OPS = (Comparison.EQ, Comparison.GT, Comparison.GTE,
                         Comparison.LT, Comparison.LTE)
_NEGATED_NUMERIC_OPS = (Comparison.NEQ, Comparison.NGT, Comparison.NLT)

#: Probability that a clause (or label) picks up a negation when the task
#: type permits one; types bound maximum complexity, not minimum.
NEGATION_PROB = 0.5


def _sample_clause(spec: AttributeSpec, allow_negation: bool, rng: random.Random) -> Clause:
    negated = allow_negation and rng.random() < NEGATION_PROB
    if spec.kind == CATEGORICAL:
        domain = spec.categorical_domain
        if len(domain) < 2:
            raise RuleError(f"attribute {spec.name!r}: singleton domain makes vacuous clauses")
        op = Comparison.NEQ if negated else Comparison.EQ
        value = domain[rng.randrange(len(domain))]
    else:
        lo, hi = spec.numeric_range  # type: ignore[misc]
        if hi - lo < 2:
            raise RuleError(f"attribute {spec.name!r}: range [{lo}, {hi}] has no interior")
        ops = _NEGATED_NUMERIC_OPS if negated else _POSITIVE_NUMERIC_OPS
        op = ops[rng.randrange(len(ops))]
        value = rng.randint(lo + 1, hi - 1)
    return Clause(spec.name, op, value)


def _build_expr(form: str, clauses: Sequence[Clause]) -> RuleExpr:
    leaves = [Leaf(c) for c in clauses]
    if form == "leaf":
        return leaves[0]
    if form == "and":
        return And(leaves[0], leaves[1])
    if form == "or":
        return Or(leaves[0], leaves[1])
    if form == "or_over_and":
        return Or(leaves[0], And(leaves[1], leaves[2]))
    if form == "and_over_or":
        return And(leaves[0], Or(leaves[1], leaves[2]))
    raise RuleError(f"unknown structural form {form!r}")


def sample_ruleset(ttype: TaskType, schema: SchemaSpec, attrs: Sequence[str],
                   labels: Sequence[str], rng: random.Random) -> list[Rule]:
    """Draw a rule set for one task.

    Binary tasks get 1-2 rules, multiclass 1..|labels|-1; every rule targets
    a distinct label. Numeric thresholds come from the open interior of the
    attribute range so no clause is vacuously true or false.
    """
    if ttype.label_arity == "binary":
        if len(labels) != 2:
            raise RuleError(f"binary task needs 2 labels, got {len(labels)}")
        n_rules = rng.randint(1, 2)
    else:
        if not 3 <= len(labels) <= 5:
            raise RuleError(f"multiclass task needs 3-5 labels, got {len(labels)}")
        n_rules = rng.randint(1, len(labels) - 1)
    specs = {name: schema.attribute(name) for name in attrs}
    max_clauses = max(_FORM_CLAUSE_COUNT[f] for f in _FORMS_BY_STRUCTURE[ttype.structure])
    if len(attrs) < max_clauses:
        raise RuleError(
            f"{ttype.structure!r} rules need up to {max_clauses} attributes, got {len(attrs)}"
        )
    rule_labels = rng.sample(list(labels), n_rules)
    rules = []
    for label in rule_labels:
        forms = _FORMS_BY_STRUCTURE[ttype.structure]
        form = forms[rng.randrange(len(forms))]
        chosen = rng.sample(list(attrs), _FORM_CLAUSE_COUNT[form])
        clauses = [_sample_clause(specs[name], ttype.allows_clause_negation, rng)
                   for name in chosen]
        label_negated = ttype.allows_label_negation and rng.random() < NEGATION_PROB
        quantifier = (QUANTIFIER_TOKENS[rng.randrange(len(QUANTIFIER_TOKENS))]
                      if ttype.quantified else None)
        rules.append(Rule(_build_expr(form, clauses), label, label_negated, quantifier))
    return rules
