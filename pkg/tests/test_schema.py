import json
import random

import pytest

from ruletab.schema import (
    SchemaError,
    builtin_schemas,
    example_in_domain,
    load_schema,
    sample_example,
    schema_by_name,
    serialize_schema,
)


class TestBuiltinSchemas:
    def test_five_schemas_with_expected_names(self):
        names = [s.name for s in builtin_schemas()]
        assert names == ["bird-species", "animal-species", "rainfall",
                         "league-rank", "bond-relevance"]

    def test_bird_species_target_labels(self):
        birds = schema_by_name("bird-species")
        assert len(birds.target_labels) == 12
        for label in ("wug", "blicket", "dax"):
            assert label in birds.target_labels

    def test_rainfall_shape(self):
        rain = schema_by_name("rainfall")
        assert len(rain.attributes) == 9
        assert rain.target_name == "rain tomorrow"
        assert rain.target_labels == ("yes", "no")
        mintemp = rain.attribute("mintemp")
        assert mintemp.numeric_range == (1, 15)

    def test_league_rank_targets(self):
        league = schema_by_name("league-rank")
        assert league.target_labels == ("1", "2", "3", "4", "Not Qualified")

    def test_legs_differ_between_bird_and_animal(self):
        assert schema_by_name("bird-species").attribute("legs").categorical_domain == (2, 4, 6, 8)
        assert schema_by_name("animal-species").attribute("legs").categorical_domain == ("yes", "no")

    def test_builtins_constant_across_calls(self):
        assert builtin_schemas() == builtin_schemas()

    def test_serialize_load_round_trip(self):
        for schema in builtin_schemas():
            again = load_schema(serialize_schema(schema), name=schema.name)
            assert again == schema


class TestLoadSchema:
    def test_minimal_document(self):
        doc = {"description": "d",
               "column_names": {"a": ["categorical", ["x"]]},
               "targets": {"t": ["l0", "l1"]}}
        schema = load_schema(json.dumps(doc))
        assert schema.attribute_names == ("a",)
        assert schema.target_labels == ("l0", "l1")

    def test_invalid_range_rejected(self):
        doc = {"description": "d",
               "column_names": {"a": ["number", [100, 10]]},
               "targets": {"t": ["l0", "l1"]}}
        with pytest.raises(SchemaError, match="invalid range"):
            load_schema(json.dumps(doc))

    def test_unknown_kind_rejected(self):
        doc = {"description": "d",
               "column_names": {"a": ["text", ["x"]]},
               "targets": {"t": ["l0", "l1"]}}
        with pytest.raises(SchemaError, match="unknown kind"):
            load_schema(json.dumps(doc))

    def test_empty_domain_rejected(self):
        doc = {"description": "d",
               "column_names": {"a": ["categorical", []]},
               "targets": {"t": ["l0", "l1"]}}
        with pytest.raises(SchemaError, match="empty categorical domain"):
            load_schema(json.dumps(doc))

    def test_malformed_json_rejected(self):
        with pytest.raises(SchemaError, match="malformed"):
            load_schema("{not json")

    def test_single_label_rejected(self):
        doc = {"description": "d",
               "column_names": {"a": ["categorical", ["x"]]},
               "targets": {"t": ["only"]}}
        with pytest.raises(SchemaError):
            load_schema(json.dumps(doc))

    def test_attribute_order_preserved(self):
        rain = schema_by_name("rainfall")
        assert rain.attribute_names[:3] == ("location", "mintemp", "maxtemp")


class TestSampleExample:
    def test_domain_membership_over_many_draws(self):
        rng = random.Random(0)
        for schema in builtin_schemas():
            attrs = list(schema.attribute_names)
            for _ in range(400):
                example = sample_example(schema, attrs, rng)
                assert example_in_domain(schema.attributes, example)

    def test_legs_values(self):
        birds = schema_by_name("bird-species")
        rng = random.Random(3)
        values = {sample_example(birds, ["legs"], rng)["legs"] for _ in range(50)}
        assert values <= {2, 4, 6, 8}

    def test_mintemp_range(self):
        rain = schema_by_name("rainfall")
        rng = random.Random(3)
        for _ in range(200):
            v = sample_example(rain, ["mintemp"], rng)["mintemp"]
            assert 1 <= v <= 15

    def test_singleton_domain_forced(self):
        doc = {"description": "d",
               "column_names": {"a": ["categorical", ["x"]]},
               "targets": {"t": ["l0", "l1"]}}
        schema = load_schema(json.dumps(doc))
        assert sample_example(schema, ["a"], random.Random(1))["a"] == "x"

    def test_unknown_attribute_rejected(self):
        with pytest.raises(SchemaError, match="unknown attribute"):
            sample_example(schema_by_name("rainfall"), ["nope"], random.Random(0))

    def test_deterministic_given_seed(self):
        rain = schema_by_name("rainfall")
        draws = lambda: [sample_example(rain, list(rain.attribute_names), random.Random(9))
                         for _ in range(10)]
        assert draws() == draws()
