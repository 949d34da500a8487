import pytest

from swarmgrid.dsl import (
    And,
    EventAtom,
    GroupSchema,
    Not,
    Or,
    parse_program,
    pretty_print,
    validate,
)
from swarmgrid.errors import DslError, DslValidationError

PURSUIT = """\
symbol a: predator[any]
symbol b: prey[any]
rule on attack(a, b) receiver a, b value 1, -1
"""

SCHEMA = GroupSchema(groups=("predator", "prey"), width=16, height=16)


class TestParse:
    def test_pursuit_program(self):
        p = parse_program(PURSUIT)
        assert len(p.symbols) == 2
        assert len(p.rules) == 1
        rule = p.rules[0]
        assert rule.trigger == EventAtom("attack", ("a", "b"))
        assert rule.receivers == ("a", "b")
        assert rule.values == (1.0, -1.0)

    def test_empty_program(self):
        p = parse_program("")
        assert p.symbols == [] and p.rules == []

    def test_comments_and_whitespace_ignored(self):
        p = parse_program("# header\nsymbol a: g[any]  # trailing\n\n")
        assert len(p.symbols) == 1

    def test_attack_arity_error(self):
        with pytest.raises(DslError, match="','"):
            parse_program("symbol a: g[any]\nrule on attack(a) receiver a value 1")

    def test_die_unary(self):
        p = parse_program("symbol a: g[any]\nrule on die(a) receiver a value -1")
        assert p.rules[0].trigger == EventAtom("die", ("a",))

    def test_in_event_with_rect(self):
        p = parse_program("symbol a: g[any]\nrule on in(a, 1, 2, 3, 4) receiver a value 1")
        assert p.rules[0].trigger == EventAtom("in", ("a",), rect=(1, 2, 3, 4))

    def test_precedence_not_and_or(self):
        p = parse_program(
            "symbol a: g[any]\nsymbol b: g[any]\n"
            "rule on not die(a) and attack(a, b) or kill(a, b) "
            "receiver a value 1"
        )
        t = p.rules[0].trigger
        assert isinstance(t, Or)
        assert isinstance(t.left, And)
        assert isinstance(t.left.left, Not)

    def test_parens_override(self):
        p = parse_program(
            "symbol a: g[any]\nsymbol b: g[any]\n"
            "rule on die(a) and (die(b) or kill(a, b)) receiver a value 1"
        )
        t = p.rules[0].trigger
        assert isinstance(t, And) and isinstance(t.right, Or)

    def test_error_reports_line_and_column(self):
        with pytest.raises(DslError) as exc:
            parse_program("symbol a: g[any]\nrule on bogus(a) receiver a value 1")
        assert exc.value.line == 2
        assert exc.value.col == 9

    def test_concrete_index(self):
        p = parse_program("symbol lead: g[0]")
        assert p.symbols[0].index == 0

    def test_fractional_index_rejected(self):
        with pytest.raises(DslError, match="integer"):
            parse_program("symbol a: g[1.5]")

    def test_first_error_aborts(self):
        with pytest.raises(DslError):
            parse_program("symbol a g[any]\nsymbol ...")


class TestPrettyPrintRoundTrip:
    CASES = [
        PURSUIT,
        "symbol a: g[all]\nrule on die(a) receiver a value -0.5\n",
        "symbol a: g[any]\nsymbol b: h[2]\n"
        "rule on (attack(a, b) or kill(a, b)) and not die(a) "
        "receiver a, b value 1, 2.5\n",
        "symbol a: g[any]\nrule on in(a, 0, 0, 7, 7) receiver a value 3\n",
        "symbol a: g[any]\nrule on not (die(a) or in(a, 1, 1, 2, 2)) "
        "receiver a value 1\n",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip_structurally_identical(self, text):
        p1 = parse_program(text)
        printed = pretty_print(p1)
        p2 = parse_program(printed)
        assert p1.symbols == p2.symbols
        assert p1.rules == p2.rules


class TestValidate:
    def test_pursuit_valid(self):
        validate(parse_program(PURSUIT), SCHEMA)

    def test_undefined_symbol(self):
        p = parse_program(
            "symbol a: predator[any]\nrule on die(c) receiver a value 1"
        )
        with pytest.raises(DslValidationError, match="undefined symbol 'c'"):
            validate(p, SCHEMA)

    def test_undefined_receiver(self):
        p = parse_program(
            "symbol a: predator[any]\nrule on die(a) receiver z value 1"
        )
        with pytest.raises(DslValidationError, match="undefined receiver 'z'"):
            validate(p, SCHEMA)

    def test_unsafe_negation(self):
        p = parse_program(
            "symbol a: predator[any]\nrule on not die(a) receiver a value 1"
        )
        with pytest.raises(DslValidationError, match="unsafe negation"):
            validate(p, SCHEMA)

    def test_negation_safe_when_also_positive(self):
        p = parse_program(
            "symbol a: predator[any]\n"
            "rule on die(a) and not in(a, 0, 0, 3, 3) receiver a value 1"
        )
        validate(p, SCHEMA)

    def test_all_symbol_exempt_from_safety(self):
        p = parse_program(
            "symbol a: predator[all]\nrule on not die(a) receiver a value 1"
        )
        validate(p, SCHEMA)

    def test_in_region_bounds(self):
        p = parse_program(
            "symbol a: predator[any]\n"
            "rule on in(a, 0, 0, 16, 16) receiver a value 1"
        )
        with pytest.raises(DslValidationError, match="x1=16 out of map bounds"):
            validate(p, SCHEMA)

    def test_unknown_group(self):
        p = parse_program("symbol a: wolves[any]")
        with pytest.raises(DslValidationError, match="unknown group 'wolves'"):
            validate(p, SCHEMA)

    def test_receiver_value_count_mismatch(self):
        p = parse_program(
            "symbol a: predator[any]\nrule on die(a) receiver a value 1, 2"
        )
        with pytest.raises(DslValidationError, match="1 receivers but 2 values"):
            validate(p, SCHEMA)

    def test_all_violations_collected(self):
        p = parse_program(
            "symbol a: wolves[any]\nsymbol a: prey[any]\n"
            "rule on die(zz) receiver qq value 1"
        )
        with pytest.raises(DslValidationError) as exc:
            validate(p, SCHEMA)
        assert len(exc.value.violations) >= 3
