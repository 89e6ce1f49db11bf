import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from toraldyn.errors import ParseError
from toraldyn.exact_linalg import IntMatrix
from toraldyn.io import jsonable, load_matrix, parse_matrix, parse_rational, parse_vector, render_text


def test_parse_json_and_grid():
    assert parse_matrix("[[1, 1], [1, 0]]") == IntMatrix([[1, 1], [1, 0]])
    assert parse_matrix("# fib\n1 1\n1,0\n") == IntMatrix([[1, 1], [1, 0]])


@given(st.integers(1, 5).flatmap(lambda d: st.lists(st.lists(st.integers(-10**6, 10**6), min_size=d, max_size=d),
                                                    min_size=d, max_size=d)))
def test_round_trip(rows):
    assert parse_matrix(json.dumps(rows)).tolist() == rows
    assert parse_matrix("\n".join(" ".join(map(str, r)) for r in rows)).tolist() == rows


@pytest.mark.parametrize("text,line,column", [
    ("", 1, 1),
    ("1 2\n3\n", 2, 1),
    ("1 2\n3 x\n", 2, 3),
    ("[[1, 2], [3]]", 1, 1),
    ("[[1, 2.5], [3, 4]]", 1, 1),
    ("[[1, 2], [3, 4]", 1, 16),
])
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as exc:
        parse_matrix(text)
    assert exc.value.line == line and exc.value.column == column


def test_load_matrix_missing(tmp_path):
    with pytest.raises(ParseError):
        load_matrix(tmp_path / "nope.txt")
    p = tmp_path / "m.txt"
    p.write_text("2 1\n1 1\n")
    assert load_matrix(p).det() == 1


def test_vectors_and_rationals():
    assert parse_vector("1/3, 0.25 -2") == [Fraction(1, 3), Fraction(1, 4), Fraction(-2)]
    with pytest.raises(ParseError):
        parse_vector("1, 2", d=3)
    with pytest.raises(ParseError):
        parse_vector("1, pi")
    assert parse_rational("3/4") == Fraction(3, 4)
    with pytest.raises(ParseError):
        parse_rational("1/0")


def test_jsonable_has_no_floats():
    with mpmath.workprec(100):
        obj = {"a": mpmath.sqrt(2), "b": [Fraction(1, 3), 2.5, np.float64(0.1)], "c": mpmath.mpc(1, -1),
               "d": {(1, 2)}, "e": np.arange(3), "f": True, "g": None}
        out = jsonable(obj)
    text = json.dumps(out)
    assert out["a"].startswith("1.41421356237309504880168872")
    assert out["b"] == ["1/3", "2.5", "0.1"]
    assert out["c"]["re"].startswith("1.000000000000000000000") and out["c"]["im"].startswith("-1.0")
    assert out["e"] == [0, 1, 2] and out["f"] is True
    assert "e+" not in text
    with pytest.raises(TypeError):
        jsonable(object())


def test_render_text():
    txt = render_text({"x": 1, "y": [1, 2], "z": {"w": "1.23456789012345678901234567890"}})
    assert "x: 1" in txt and "y: [1, 2]" in txt and "w: 1.23456789012" in txt
