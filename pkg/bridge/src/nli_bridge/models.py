"""Entailment models the bridge can host.

Every model classifies a (premise, hypothesis) pair into named classes;
the server maps those class names to wire fields via the config's
label_mapping.
"""

from __future__ import annotations

import hashlib
import re

from .config import BridgeConfig, ConfigError

_TOKEN = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN.findall(text.lower()))


class ToyOverlapModel:
    """Deterministic stand-in scorer for offline runs.

    Entailment mass tracks lexical overlap between hypothesis and premise,
    contradiction rises when the hypothesis negates overlapping content,
    and a stable hash tilt keeps distinct pairs from scoring identically.
    Scores are finite and sum to 1.
    """

    name = "toy"

    def classify(self, premise: str, hypothesis: str) -> dict[str, float]:
        p_tokens = _tokens(premise)
        h_tokens = _tokens(hypothesis)
        overlap = len(p_tokens & h_tokens) / max(1, len(h_tokens))
        negated = 1.0 if ("not" in h_tokens or "no" in h_tokens) else 0.0
        digest = hashlib.blake2b(f"{premise}\x1f{hypothesis}".encode("utf-8"),
                                 digest_size=2).digest()
        tilt = int.from_bytes(digest, "big") / 0xFFFF * 0.1

        entail = 0.2 + 0.6 * overlap * (1.0 - 0.5 * negated)
        contradict = 0.1 + 0.4 * overlap * negated + tilt
        neutral = 1.0 - min(overlap, 1.0) * 0.5 + (0.1 - tilt)
        total = entail + contradict + neutral
        return {
            "ENTAILMENT": entail / total,
            "CONTRADICTION": contradict / total,
            "NEUTRAL": neutral / total,
        }


class HuggingFaceModel:
    """A local sequence-classification checkpoint (e.g. MNLI fine-tune)."""

    def __init__(self, model_id: str):
        try:
            from transformers import (AutoModelForSequenceClassification,
                                      AutoTokenizer)
            import torch
        except ImportError as exc:
            raise ConfigError(f"transformers/torch unavailable: {exc}") from None
        self._torch = torch
        self.name = model_id
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self._model.eval()

    def classify(self, premise: str, hypothesis: str) -> dict[str, float]:
        encoded = self._tokenizer(premise, hypothesis, return_tensors="pt",
                                  truncation=True, max_length=256)
        with self._torch.no_grad():
            logits = self._model(**encoded).logits[0]
        id2label = self._model.config.id2label
        return {id2label[i]: float(v) for i, v in enumerate(logits)}


def build_model(config: BridgeConfig):
    if config.model == "toy":
        return ToyOverlapModel()
    if config.model.startswith("hf:"):
        return HuggingFaceModel(config.model[3:])
    raise ConfigError(f"unknown model spec {config.model!r}; use 'toy' or 'hf:<model-id>'")
