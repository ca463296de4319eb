"""Bridge configuration: which model to host and how its class labels map
onto the wire protocol's score fields.

Checkpoints disagree on label naming and order ("ENTAILMENT" vs
"entailment" vs "LABEL_2"), so the mapping is declared in the config file
rather than guessed:

    {
      "model": "hf:textattack/roberta-base-MNLI",
      "label_mapping": {
        "ENTAILMENT": "p_e",
        "CONTRADICTION": "p_c",
        "NEUTRAL": "p_n"
      }
    }

``"model": "toy"`` selects the built-in deterministic lexical-overlap
scorer, which needs no downloads and no mapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

SCORE_FIELDS = ("p_e", "p_c", "p_n")

DEFAULT_LABEL_MAPPING = {
    "ENTAILMENT": "p_e",
    "CONTRADICTION": "p_c",
    "NEUTRAL": "p_n",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BridgeConfig:
    model: str = "toy"
    label_mapping: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_MAPPING))

    def __post_init__(self) -> None:
        targets = set(self.label_mapping.values())
        if targets != set(SCORE_FIELDS):
            raise ConfigError(
                f"label_mapping must cover exactly {SCORE_FIELDS}, got {sorted(targets)}"
            )


def load_config(path: str | Path | None) -> BridgeConfig:
    if path is None:
        return BridgeConfig()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return BridgeConfig(
        model=doc.get("model", "toy"),
        label_mapping=doc.get("label_mapping", dict(DEFAULT_LABEL_MAPPING)),
    )
