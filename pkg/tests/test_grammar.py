from fractions import Fraction as Fr
from pathlib import Path

import pytest
from hypothesis import given, settings

from diracflow import ExpPoly, beta, commutator, gen, parse, render
from diracflow.grammar import ParseError, dumps, from_json, loads, to_json
from strategies import exprs

GOLDEN = Path(__file__).parent / "golden"
O, E, B = gen("O"), gen("E"), beta()


def test_parse_examples():
    assert parse("(-1/2)*b*O") == (B * O).scale(Fr(-1, 2))
    assert parse("exp[-4s]*(s)*b*O^3") == (B * O ** 3) * ExpPoly.term(1, 1, 1)
    assert parse("E + (1/2)*b*O^2") == E + (B * O * O).scale(Fr(1, 2))


def test_render_examples():
    assert render(E + (B * O * O).scale(Fr(1, 2))) == "E + (1/2)*b*O^2"
    assert render(B * 0) == "0"
    assert render(-(B * O) + 3 * E) == "3*E - b*O"
    assert render(-(B * O)) == "-b*O"
    assert render(parse("2")) == "2"


def test_whitespace_and_lenient_forms():
    a = parse("  ( 1/4 - 1/4 * exp[-4s] ) * b * O\n - O*E ")
    assert a == parse("(1/4 - 1/4*exp[-4s])*b*O - O*E")
    assert parse("-O") == -O
    assert parse("O*b") == -(B * O)
    assert parse("(-1/2*exp[-4s] + 4*s*exp[-4s])*O") == O * ExpPoly({1: [Fr(-1, 2), 4]})


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("O +", 1, 4),
        ("O * * E", 1, 5),
        ("(1/2*exp[-3s])*O", 1, 11),
        ("O\n + X", 2, 4),
        ("", 1, 1),
        ("(1/0)*O", 1, 5),
    ],
)
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.line, err.value.column) == (line, col)
    assert err.value.expected


@given(exprs(max_terms=5))
@settings(max_examples=300)
def test_round_trip(a):
    assert parse(render(a)) == a


@given(exprs(max_terms=5))
def test_render_is_canonicalisation(a):
    text = render(a)
    assert render(parse(text)) == text


@given(exprs(max_terms=5))
def test_json_round_trip(a):
    assert from_json(to_json(a)) == a
    assert loads(dumps(a)) == a


def test_json_schema_shape():
    doc = to_json(commutator(O, E) * ExpPoly.term(Fr(-4), 1, 1))
    assert doc == {
        "terms": [
            {"beta": 0, "word": ["O", "E"], "coeff": {"1": ["0", "-4"]}},
            {"beta": 0, "word": ["E", "O"], "coeff": {"1": ["0", "4"]}},
        ]
    }


@pytest.mark.parametrize("path", sorted(GOLDEN.glob("*.txt")), ids=lambda p: p.name)
def test_golden_files_reparse(path):
    text = path.read_text().strip()
    assert render(parse(text)) == text
