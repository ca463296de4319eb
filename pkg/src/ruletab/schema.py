"""Table schemas: typed attribute domains plus a target label set.

A schema document is JSON with three keys::

    {
      "description": "...",
      "column_names": {"size": ["categorical", ["large", "medium", "small"]],
                       "humidity": ["number", [0, 100]]},
      "targets": {"rain tomorrow": ["yes", "no"]}
    }

Categorical domains may mix strings and numbers; ``number`` domains are
inclusive integer intervals ``[lo, hi]``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

Value = Union[str, int, float]

CATEGORICAL = "categorical"
NUMERIC = "numeric"

_KIND_TAGS = {"categorical": CATEGORICAL, "number": NUMERIC}
_TAG_OF_KIND = {CATEGORICAL: "categorical", NUMERIC: "number"}


class SchemaError(ValueError):
    """Malformed schema document or violated schema invariant."""


@dataclass(frozen=True)
class AttributeSpec:
    """One column: a name plus the domain values may be drawn from."""

    name: str
    kind: str
    categorical_domain: tuple[Value, ...] = ()
    numeric_range: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.kind == CATEGORICAL:
            if not self.categorical_domain:
                raise SchemaError(f"attribute {self.name!r}: empty categorical domain")
            if len(set(self.categorical_domain)) != len(self.categorical_domain):
                raise SchemaError(f"attribute {self.name!r}: duplicate domain values")
        elif self.kind == NUMERIC:
            if self.numeric_range is None:
                raise SchemaError(f"attribute {self.name!r}: missing numeric range")
            lo, hi = self.numeric_range
            if not (isinstance(lo, int) and isinstance(hi, int)):
                raise SchemaError(f"attribute {self.name!r}: range bounds must be integers")
            if lo > hi:
                raise SchemaError(f"attribute {self.name!r}: invalid range [{lo}, {hi}]")
        else:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")

    def contains(self, value: Value) -> bool:
        """Domain membership for a single value."""
        if isinstance(value, bool):
            return False
        if self.kind == CATEGORICAL:
            return any(value == v for v in self.categorical_domain)
        lo, hi = self.numeric_range  # type: ignore[misc]
        return isinstance(value, int) and lo <= value <= hi


@dataclass(frozen=True)
class SchemaSpec:
    """An ordered attribute list plus the classification target."""

    description: str
    attributes: tuple[AttributeSpec, ...]
    target_name: str
    target_labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self) -> None:
        if not self.attributes:
            raise SchemaError("schema needs at least one attribute")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate attribute names")
        if len(self.target_labels) < 2:
            raise SchemaError("schema needs at least two target labels")
        if self.target_name in names:
            raise SchemaError(f"target {self.target_name!r} collides with an attribute name")

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def attribute(self, name: str) -> AttributeSpec:
        for a in self.attributes:
            if a.name == name:
                return a
        raise SchemaError(f"unknown attribute {name!r}")

    def slice(self, selected: Sequence[str], labels: Sequence[str] | None = None) -> "SchemaSpec":
        """Restrict to the selected attributes (order kept) and optionally a label subset."""
        attrs = tuple(self.attribute(n) for n in selected)
        return SchemaSpec(
            description=self.description,
            attributes=attrs,
            target_name=self.target_name,
            target_labels=tuple(labels) if labels is not None else self.target_labels,
            name=self.name,
        )


def _attribute_from_entry(name: str, entry: object) -> AttributeSpec:
    if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
        raise SchemaError(f"attribute {name!r}: expected [kind, domain] pair")
    tag, domain = entry
    kind = _KIND_TAGS.get(tag)
    if kind is None:
        raise SchemaError(f"attribute {name!r}: unknown kind {tag!r}")
    if kind == CATEGORICAL:
        if not isinstance(domain, (list, tuple)):
            raise SchemaError(f"attribute {name!r}: categorical domain must be a list")
        return AttributeSpec(name=name, kind=kind, categorical_domain=tuple(domain))
    if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
        raise SchemaError(f"attribute {name!r}: numeric range must be [lo, hi]")
    return AttributeSpec(name=name, kind=kind, numeric_range=(domain[0], domain[1]))


def schema_from_doc(doc: Mapping[str, object], name: str = "") -> SchemaSpec:
    """Build a SchemaSpec from a parsed schema document."""
    try:
        description = doc["description"]
        columns = doc["column_names"]
        targets = doc["targets"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"schema document missing key: {exc}") from None
    if not isinstance(columns, Mapping) or not isinstance(targets, Mapping):
        raise SchemaError("column_names and targets must be mappings")
    if len(targets) != 1:
        raise SchemaError("targets must contain exactly one entry")
    attributes = tuple(_attribute_from_entry(n, e) for n, e in columns.items())
    (target_name, labels), = targets.items()
    return SchemaSpec(
        description=str(description),
        attributes=attributes,
        target_name=target_name,
        target_labels=tuple(str(l) for l in labels),
        name=name,
    )


def load_schema(text: str, name: str = "") -> SchemaSpec:
    """Parse a schema document (see module docstring for the format)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed schema document: {exc}") from None
    return schema_from_doc(doc, name=name)


def schema_to_doc(schema: SchemaSpec) -> dict:
    """Inverse of :func:`schema_from_doc`."""
    columns: dict[str, list] = {}
    for a in schema.attributes:
        if a.kind == CATEGORICAL:
            columns[a.name] = ["categorical", list(a.categorical_domain)]
        else:
            columns[a.name] = ["number", list(a.numeric_range)]  # type: ignore[arg-type]
    return {
        "description": schema.description,
        "column_names": columns,
        "targets": {schema.target_name: list(schema.target_labels)},
    }


def serialize_schema(schema: SchemaSpec) -> str:
    return json.dumps(schema_to_doc(schema), indent=2)


_YES_NO = ["yes", "no"]
_NONCE_SPECIES = ["wug", "blicket", "dax", "toma", "pimwit", "zav", "speff",
                  "tulver", "gazzer", "fem", "fendle", "tupa"]

_BUILTIN_DOCS: dict[str, dict] = {
    "bird-species": {
        "description": ("This dataset is used to predict the type of birds based on the "
                        "given attributes. Each row provides the relevant attributes of a bird."),
        "column_names": {
            "size": ["categorical", ["large", "medium", "small"]],
            "size (number)": ["number", [10, 100]],
            "color": ["categorical", ["red", "blue", "green", "brown", "pink", "orange", "black", "white"]],
            "head": ["categorical", _YES_NO],
            "length": ["categorical", ["tall", "medium", "short"]],
            "length (number)": ["number", [10, 100]],
            "tail": ["categorical", _YES_NO],
            "number of faces": ["number", [1, 3]],
            "arms": ["categorical", _YES_NO],
            "legs": ["categorical", [2, 4, 6, 8]],
            "hair": ["categorical", _YES_NO],
            "wings": ["categorical", _YES_NO],
            "feathers": ["categorical", _YES_NO],
            "airborne": ["categorical", _YES_NO],
            "toothed": ["categorical", _YES_NO],
            "backbone": ["categorical", _YES_NO],
            "venomous": ["categorical", _YES_NO],
            "domestic": ["categorical", _YES_NO],
            "region": ["categorical", ["asia", "europe", "americas", "africas", "antartica", "oceania"]],
        },
        "targets": {"bird species": _NONCE_SPECIES},
    },
    "animal-species": {
        "description": ("This dataset is used to predict the type of an aquatic animal based on the "
                        "given attributes. Each row provides the relevant attributes of an animal."),
        "column_names": {
            "size": ["categorical", ["large", "medium", "small"]],
            "size (number)": ["number", [10, 100]],
            "color": ["categorical", ["red", "blue", "green", "brown", "pink", "orange", "black", "white"]],
            "head": ["categorical", _YES_NO],
            "length": ["categorical", ["tall", "medium", "short"]],
            "length (number)": ["number", [10, 100]],
            "tail": ["categorical", _YES_NO],
            "number of faces": ["number", [1, 3]],
            "arms": ["categorical", _YES_NO],
            "legs": ["categorical", _YES_NO],
            "hair": ["categorical", _YES_NO],
            "fins": ["categorical", _YES_NO],
            "toothed": ["categorical", _YES_NO],
            "venomous": ["categorical", _YES_NO],
            "domestic": ["categorical", _YES_NO],
            "region": ["categorical", ["atlantic", "pacific", "indian", "arctic"]],
        },
        "targets": {"animal species": _NONCE_SPECIES},
    },
    "rainfall": {
        "description": ("This dataset is used to predict if it will rain tomorrow or not based on the "
                        "given attributes. Each row provides the relevant attributes of a day."),
        "column_names": {
            "location": ["categorical", ["sphinx", "doshtown", "kookaberra", "shtick union", "dysyen"]],
            "mintemp": ["number", [1, 15]],
            "maxtemp": ["number", [17, 35]],
            "rainfall today": ["categorical", [0, 0.2, 0.4, 0.6, 0.8, 1]],
            "hours of sunshine": ["categorical", [0, 4, 8, 12]],
            "humidity": ["number", [0, 100]],
            "wind direction": ["categorical", ["N", "S", "E", "W", "NW", "NE", "SE", "SW"]],
            "wind speed": ["number", [10, 85]],
            "atmospheric pressure": ["number", [950, 1050]],
        },
        "targets": {"rain tomorrow": _YES_NO},
    },
    "league-rank": {
        "description": ("This dataset is used to predict the final league position of a team based on the "
                        "given attributes. Each row provides the relevant attributes of a team."),
        "column_names": {
            "win percentage": ["number", [0, 100]],
            "adjusted offensive efficiency": ["number", [0, 100]],
            "adjusted defensive efficiency": ["number", [0, 100]],
            "power rating": ["categorical", [1, 2, 3, 4, 5]],
            "turnover percentage": ["number", [0, 100]],
            "field goal rating": ["categorical", [1, 2, 3, 4, 5]],
            "free throw rating": ["categorical", [1, 2, 3, 4, 5]],
            "two point shoot percentage": ["number", [0, 100]],
            "three point shoot percentage": ["number", [0, 100]],
        },
        "targets": {"final position": ["1", "2", "3", "4", "Not Qualified"]},
    },
    "bond-relevance": {
        "description": ("This dataset is used to predict the relevance (higher the better) of a bond to a "
                        "user based on the given attributes. Each row provides the relevant attributes of a user."),
        "column_names": {
            "user age": ["number", [15, 65]],
            "user knowledge": ["categorical", [1, 2, 3, 4, 5]],
            "user gender": ["categorical", ["male", "female"]],
            "user loyalty": ["categorical", [1, 2, 3, 4, 5]],
            "user income": ["number", [1000, 10000]],
            "user marital status": ["categorical", _YES_NO],
            "user dependents": ["number", [0, 3]],
        },
        "targets": {"relevance score": ["1", "2", "3", "4", "5"]},
    },
}

BUILTIN_SCHEMA_NAMES = tuple(_BUILTIN_DOCS)


def builtin_schemas() -> list[SchemaSpec]:
    """The five bundled table schemas, in a fixed order."""
    return [schema_from_doc(doc, name=name) for name, doc in _BUILTIN_DOCS.items()]


def schema_by_name(name: str) -> SchemaSpec:
    try:
        doc = _BUILTIN_DOCS[name]
    except KeyError:
        raise SchemaError(f"unknown schema {name!r}; known: {', '.join(_BUILTIN_DOCS)}") from None
    return schema_from_doc(doc, name=name)


def sample_example(schema: SchemaSpec, selected_attrs: Sequence[str],
                   rng: random.Random) -> dict[str, Value]:
    """Draw one row: uniform over each selected attribute's domain.

    Numeric attributes draw uniform integers over their inclusive range.
    """
    if not selected_attrs:
        raise SchemaError("selected_attrs must be non-empty")
    example: dict[str, Value] = {}
    for name in selected_attrs:
        spec = schema.attribute(name)
        if spec.kind == CATEGORICAL:
            domain = spec.categorical_domain
            example[name] = domain[rng.randrange(len(domain))]
        else:
            lo, hi = spec.numeric_range  # type: ignore[misc]
            example[name] = rng.randint(lo, hi)
    return example


def example_in_domain(attributes: Iterable[AttributeSpec], example: Mapping[str, Value]) -> bool:
    """True when every attribute value lies in its declared domain."""
    for spec in attributes:
        if spec.name not in example:
            return False
        if not spec.contains(example[spec.name]):
            return False
    return True
