import pytest

from guideline_qa.conditions import (
    And,
    Atom,
    Not,
    Or,
    condition_to_json,
    falsifying_assignment,
    parse_condition,
    referenced_concepts,
    satisfying_assignment,
)
from guideline_qa.errors import SchemaError


class TestAtoms:
    def test_missing_concept_is_false(self):
        assert not Atom("NORTON", "<=", 14).holds({})

    @pytest.mark.parametrize(
        "cmp,value,observed,expected",
        [
            ("==", 5, 5, True),
            ("!=", 5, 5, False),
            ("<", 14, 13, True),
            ("<=", 14, 14, True),
            (">", 1, 1, False),
            (">=", 1, 1, True),
            ("==", "red", "red", True),
        ],
    )
    def test_comparators(self, cmp, value, observed, expected):
        assert Atom("C", cmp, value).holds({"C": observed}) is expected

    def test_type_mismatch_is_false(self):
        assert not Atom("C", "<", 5).holds({"C": "not a number"})

    def test_unknown_comparator_rejected(self):
        with pytest.raises(SchemaError):
            Atom("C", "~=", 5)


class TestCompound:
    def test_and_or_not(self):
        state = {"A": 1, "B": 2}
        a1 = Atom("A", "==", 1)
        b3 = Atom("B", "==", 3)
        assert And((a1,)).holds(state)
        assert not And((a1, b3)).holds(state)
        assert Or((a1, b3)).holds(state)
        assert Not(b3).holds(state)

    def test_parse_round_trip(self):
        doc = {
            "op": "and",
            "args": [
                {"concept": "NORTON", "cmp": "<=", "value": 14},
                {"op": "not", "arg": {"concept": "COLOR", "cmp": "==", "value": "red"}},
            ],
        }
        cond = parse_condition(doc)
        assert condition_to_json(cond) == doc
        assert referenced_concepts(cond) == {"NORTON", "COLOR"}

    def test_parse_default_comparator_is_equality(self):
        cond = parse_condition({"concept": "C", "value": "x"})
        assert cond == Atom("C", "==", "x")

    def test_parse_errors(self):
        with pytest.raises(SchemaError):
            parse_condition({"op": "xor", "args": []})
        with pytest.raises(SchemaError):
            parse_condition({"op": "not"})
        with pytest.raises(SchemaError):
            parse_condition([1, 2])


class TestAssignments:
    @pytest.mark.parametrize(
        "cond",
        [
            Atom("A", "<=", 14),
            Atom("A", "<", 14),
            Atom("A", ">", 0),
            Atom("A", "!=", "red"),
            And((Atom("A", ">=", 2), Atom("B", "==", "yes"))),
            Or((Atom("A", "==", 1), Atom("B", "==", 2))),
        ],
    )
    def test_satisfying_then_falsifying(self, cond):
        assert cond.holds(satisfying_assignment(cond))
        assert not cond.holds(falsifying_assignment(cond))

    def test_not_unsupported(self):
        with pytest.raises(ValueError):
            satisfying_assignment(Not(Atom("A", "==", 1)))
