"""Template explanations in both directions, plus features-as-text rows.

Run:  python3 demos/02_explanations_and_linearization.py
"""

import random

from ruletab import (
    Clause,
    Comparison,
    Leaf,
    Rule,
    linearize,
    parse_explanation,
    render_explanation,
    sample_scramble_permutation,
    schema_by_name,
    scramble,
)
from ruletab.rules import And, Or

birds = schema_by_name("bird-species")

# ---- rendering -------------------------------------------------------------
rules = [
    Rule(Leaf(Clause("legs", Comparison.EQ, 4)), "dax"),
    Rule(Leaf(Clause("size (number)", Comparison.GTE, 60)), "wug", quantifier="usually"),
    Rule(And(Leaf(Clause("size", Comparison.EQ, "large")),
             Leaf(Clause("number of faces", Comparison.NGT, 2))), "blicket",
         label_negated=True),
    Rule(Or(Leaf(Clause("color", Comparison.EQ, "red")),
            And(Leaf(Clause("wings", Comparison.EQ, "yes")),
                Leaf(Clause("tail", Comparison.EQ, "no")))), "toma"),
]
print("rendered explanations:")
for rule in rules:
    text, meta = render_explanation(rule)
    print(f"  {text}")

# ---- parsing is the exact inverse -------------------------------------------
print("\nround trips:")
for rule in rules:
    text, meta = render_explanation(rule)
    parsed, parsed_meta = parse_explanation(text, birds.attributes, birds.target_labels)
    print(f"  {'ok ' if (parsed, parsed_meta) == (rule, meta) else 'BAD'} {text[:60]}...")

# out-of-grammar text is rejected with a pointed error
try:
    parse_explanation("big birds are probably wugs", birds.attributes, birds.target_labels)
except Exception as exc:
    print(f"\nfree text is rejected: {exc}")

# ---- features-as-text --------------------------------------------------------
row = {"size": "large", "legs": 4, "color": "red", "wings": "yes", "tail": "no"}
print(f"\nrow:        {row}")
print(f"linearized: {linearize(row)}")

rng = random.Random(42)
permutation = sample_scramble_permutation(list(row), rng)
garbled = scramble(row, permutation)
print(f"scrambled:  {linearize(garbled)}   (column names deranged, values fixed)")
