"""Template NLG for rules and the inverse parser.

Rendering maps each comparison operator to a fixed phrase, joins clauses
with "and"/"or" (nested pair parenthesized), and produces sentences like::

    If number of hands equal to 2, then it is usually foo
    If size equal to large and humidity not greater than 50, then not wug

Parsing is the exact inverse given a schema context (attribute specs and
the label vocabulary); attribute and label matching is longest-first so
multi-word names like "number of faces" or "Not Qualified" resolve cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .rules import (
    And,
    Clause,
    Comparison,
    Leaf,
    Or,
    QUANTIFIER_PROBS,
    Rule,
    RuleExpr,
)
from .schema import CATEGORICAL, AttributeSpec, Value


class ParseError(ValueError):
    """Input text falls outside the explanation grammar."""


@dataclass(frozen=True)
class ExplanationMeta:
    """What the scoring stage needs to know about one explanation."""

    l_exp: str
    assign: bool
    quantifier: str | None = None

    def to_obj(self) -> dict:
        return {"l_exp": self.l_exp, "assign": self.assign, "quantifier": self.quantifier}

    @classmethod
    def from_obj(cls, obj: dict) -> "ExplanationMeta":
        return cls(l_exp=obj["l_exp"], assign=bool(obj["assign"]),
                   quantifier=obj.get("quantifier"))


OPERATOR_PHRASES: dict[Comparison, str] = {
    Comparison.EQ: "equal to",
    Comparison.GT: "greater than",
    Comparison.GTE: "greater than or equal to",
    Comparison.LT: "lesser than",
    Comparison.LTE: "lesser than or equal to",
    Comparison.NEQ: "not equal to",
    Comparison.NGT: "not greater than",
    Comparison.NLT: "not lesser than",
}

# Longest phrase first, so "greater than or equal to" wins over "greater than".
_PHRASES_BY_LENGTH = sorted(OPERATOR_PHRASES.items(), key=lambda kv: -len(kv[1]))


def _render_value(value: Value) -> str:
    return str(value)


def render_clause(clause: Clause) -> str:
    return f"{clause.attribute} {OPERATOR_PHRASES[clause.operator]} {_render_value(clause.value)}"


def _render_part(expr: RuleExpr) -> str:
    if isinstance(expr, Leaf):
        return render_clause(expr.clause)
    return f"({_render_expr(expr)})"


def _render_expr(expr: RuleExpr) -> str:
    if isinstance(expr, Leaf):
        return render_clause(expr.clause)
    word = "and" if isinstance(expr, And) else "or"
    return f"{_render_part(expr.left)} {word} {_render_part(expr.right)}"


def render_explanation(rule: Rule) -> tuple[str, ExplanationMeta]:
    """Turn a rule into explanation text plus its meta-information."""
    consequent = rule.label
    if rule.label_negated:
        consequent = f"not {consequent}"
    if rule.quantifier is not None:
        consequent = f"it is {rule.quantifier} {consequent}"
    text = f"If {_render_expr(rule.antecedent)}, then {consequent}"
    meta = ExplanationMeta(l_exp=rule.label, assign=not rule.label_negated,
                           quantifier=rule.quantifier)
    return text, meta


# ------------------------------------------------------------------ #
# parsing
# ------------------------------------------------------------------ #

def _first_token(text: str) -> str:
    return text.split(" ", 1)[0] if text else "<end of text>"


def _connective_splits(text: str, word: str) -> list[tuple[str, str]]:
    """Candidate (left, right) splits at top-level ``" word "`` occurrences.

    The word "or" also appears inside the phrase "greater than or equal
    to", so callers must treat these as candidates and backtrack on parse
    failure rather than committing to the first occurrence.
    """
    needle = f" {word} "
    splits = []
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced ')' in {text!r}")
        elif depth == 0 and text.startswith(needle, i):
            splits.append((text[:i], text[i + len(needle):]))
    if depth != 0:
        raise ParseError(f"unbalanced '(' in {text!r}")
    return splits


class _ClauseParser:
    def __init__(self, attributes: Sequence[AttributeSpec]):
        self._specs = sorted(attributes, key=lambda a: -len(a.name))

    def parse(self, text: str) -> Clause:
        text = text.strip()
        candidates = [s for s in self._specs if text.startswith(s.name + " ")]
        if not candidates:
            raise ParseError(f"no attribute matches at {_first_token(text)!r}")
        errors = []
        for spec in candidates:
            rest = text[len(spec.name) + 1:]
            try:
                return self._parse_tail(spec, rest)
            except ParseError as exc:
                errors.append(str(exc))
        raise ParseError(errors[0])

    def _parse_tail(self, spec: AttributeSpec, rest: str) -> Clause:
        for op, phrase in _PHRASES_BY_LENGTH:
            if rest.startswith(phrase + " "):
                value_text = rest[len(phrase) + 1:]
                return Clause(spec.name, op, self._parse_value(spec, op, value_text))
        raise ParseError(f"no comparison phrase after {spec.name!r} "
                         f"(at {_first_token(rest)!r})")

    @staticmethod
    def _parse_value(spec: AttributeSpec, op: Comparison, text: str) -> Value:
        text = text.strip()
        if not text:
            raise ParseError(f"missing value for {spec.name!r}")
        if spec.kind == CATEGORICAL:
            for v in spec.categorical_domain:
                if str(v) == text:
                    return v
            raise ParseError(f"{text!r} is not in the domain of {spec.name!r}")
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"expected an integer for {spec.name!r}, got {text!r}") from None


def _parse_connected(parser: _ClauseParser, text: str, operand) -> RuleExpr:
    """Try every top-level connective split, backtracking on failures;
    fall back to a single operand."""
    failures: list[ParseError] = []
    for word, node in (("and", And), ("or", Or)):
        for left, right in _connective_splits(text, word):
            try:
                return node(operand(left), operand(right))
            except ParseError as exc:
                failures.append(exc)
    try:
        return operand(text)
    except ParseError as exc:
        raise failures[0] if failures else exc


def _parse_operand(parser: _ClauseParser, text: str) -> RuleExpr:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1]
        expr = _parse_connected(parser, inner, lambda t: Leaf(parser.parse(t)))
        if isinstance(expr, Leaf):
            raise ParseError(f"expected a two-clause group in ({inner})")
        return expr
    return Leaf(parser.parse(text))


def _parse_antecedent(parser: _ClauseParser, text: str) -> RuleExpr:
    return _parse_connected(parser, text, lambda t: _parse_operand(parser, t))


def _parse_consequent(text: str, labels: Sequence[str]) -> tuple[str, bool, str | None]:
    quantifier = None
    if text.startswith("it is "):
        rest = text[len("it is "):]
        word, _, after = rest.partition(" ")
        if word.lower() not in QUANTIFIER_PROBS:
            raise ParseError(f"unknown quantifier {word!r}")
        if not after:
            raise ParseError("missing label after quantifier")
        quantifier = word.lower()
        text = after
    if text in labels:
        return text, True, quantifier
    if text.startswith("not "):
        candidate = text[len("not "):]
        if candidate in labels:
            return candidate, False, quantifier
    raise ParseError(f"no label matches at {_first_token(text)!r}")


def parse_explanation(text: str, attributes: Sequence[AttributeSpec],
                      labels: Sequence[str]) -> tuple[Rule, ExplanationMeta]:
    """Exact inverse of :func:`render_explanation` under the given schema context."""
    stripped = text.strip()
    if stripped.endswith("."):
        stripped = stripped[:-1].rstrip()
    if stripped.lower().startswith("if "):
        stripped = stripped[3:]
    else:
        raise ParseError(f"explanation must start with 'If', got {_first_token(stripped)!r}")
    head, sep, tail = stripped.partition(", then ")
    if not sep:
        raise ParseError("missing ', then ' separator")
    if ", then " in tail:
        raise ParseError("more than one ', then ' separator")
    parser = _ClauseParser(attributes)
    antecedent = _parse_antecedent(parser, head)
    l_exp, assign, quantifier = _parse_consequent(tail, labels)
    rule = Rule(antecedent=antecedent, label=l_exp, label_negated=not assign,
                quantifier=quantifier)
    return rule, ExplanationMeta(l_exp=l_exp, assign=assign, quantifier=quantifier)
