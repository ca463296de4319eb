"""ruletab: rule-generated tabular classification benchmarks and
explanation-guided entailment classifiers."""

from .schema import (
    AttributeSpec,
    SchemaError,
    SchemaSpec,
    builtin_schemas,
    load_schema,
    sample_example,
    schema_by_name,
    serialize_schema,
)
from .rules import (
    And,
    Clause,
    Comparison,
    Leaf,
    Or,
    QUANTIFIER_PROBS,
    Rule,
    RuleError,
    TaskType,
    enumerate_task_types,
    eval_antecedent,
    sample_ruleset,
)
from .explanations import ExplanationMeta, ParseError, parse_explanation, render_explanation
from .linearize import linearize, sample_scramble_permutation, scramble
from .taskgen import (
    Benchmark,
    BenchmarkConfig,
    Task,
    assign_label,
    generate_benchmark,
    generate_task,
)
from .entail import (
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
from .harness import (
    ablation_report,
    compute_baselines,
    evaluate_task,
    make_predictor,
    noise_degradation,
    scrambling_experiment,
    symbolic_predictor,
)
from .dataio import (
    export_benchmark,
    export_task,
    import_benchmark,
    import_task,
    load_real_task,
    select_features_mi,
)

__version__ = "0.1.0"
