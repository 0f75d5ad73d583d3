#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
测试存在函数表达式的解析、类型检查与反解析
"""

import pytest

from config import FOE_MAX_NESTING
from ontology.errors import FoeSyntaxError, FoeTypeError, MissingParameter, UnknownIdentifier, UnknownParameter
from ontology.foe_engine import bind
from ontology.foe_parser import BinOp, BoolOp, Compare, Name, Not, Num, Pow, parse_foe, tokenize, unparse
from ontology.schema_core import Dimension, define_schema

SPHERE = "class sphere(a,b,c,r): (x+a)^2+(y+b)^2+(z+c)^2 <= r^2"
WEIGHT = "class w(lo,hi,val): (time >= lo) AND (time <= hi) AND (weight = val)"


@pytest.fixture
def mixed():
    return define_schema("mixed", [
        Dimension("x"),
        Dimension("color", "categorical", values=("red", "green")),
        Dimension("alive", "boolean"),
    ])


def test_sphere_class(space):
    cls = parse_foe(SPHERE, space)
    assert cls.name == "sphere"
    assert cls.params == ("a", "b", "c", "r")
    assert cls.dims == frozenset({"x", "y", "z"})
    assert isinstance(cls.body, Compare)
    assert cls.body.op == "<="
    assert cls.body.right == Pow(Name("r", "param"), 2)


def test_weight_class(weight_schema):
    cls = parse_foe(WEIGHT, weight_schema)
    assert cls.params == ("lo", "hi", "val")
    assert isinstance(cls.body, BoolOp)
    assert cls.body.op == "AND"
    assert len(cls.body.operands) == 3


def test_precedence(plane):
    body = parse_foe("class p(): x + y * 2 <= 3 OR x = 1 AND y = 2", plane).body
    assert body.op == "OR"
    left, right = body.operands
    assert left.left == BinOp("+", Name("x"), BinOp("*", Name("y"), Num(2.0)))
    assert isinstance(right, BoolOp) and right.op == "AND"


def test_subtraction_is_left_associative(plane):
    body = parse_foe("class p(): x - y - 1 <= 0", plane).body
    assert body.left == BinOp("-", BinOp("-", Name("x"), Name("y")), Num(1.0))


def test_not_and_nested_parentheses(plane):
    body = parse_foe("class p(): NOT ((x <= 1) OR (y >= 2))", plane).body
    assert isinstance(body, Not)
    assert body.operand.op == "OR"


def test_parenthesized_arithmetic_before_comparison(plane):
    body = parse_foe("class p(): (x + 1) * 2 <= y", plane).body
    assert body.left == BinOp("*", BinOp("+", Name("x"), Num(1.0)), Num(2.0))


def test_unknown_identifier_position(plane):
    with pytest.raises(UnknownIdentifier) as excinfo:
        parse_foe("class bad(): q + 1 <= 2", plane)
    assert excinfo.value.position == 13
    assert excinfo.value.code == "UNKNOWN_IDENTIFIER"


@pytest.mark.parametrize("text, position", [
    ("class p(): x <=", 15),
    ("class p(): x + <= 1", 15),
    ("class p(): x ^ 1.5 <= 1", 15),
    ("class p(): x <= 1 1", 18),
    ("class p() x <= 1", 10),
    ("class p(): x # 1", 13),
])
def test_syntax_error_position(plane, text, position):
    with pytest.raises(FoeSyntaxError) as excinfo:
        parse_foe(text, plane)
    assert excinfo.value.position == position


def test_duplicate_or_clashing_parameters(plane):
    with pytest.raises(FoeSyntaxError):
        parse_foe("class p(a, a): x <= a", plane)
    with pytest.raises(FoeSyntaxError):
        parse_foe("class p(x): x <= 1", plane)


def test_categorical_dimension_rejected(mixed):
    with pytest.raises(FoeTypeError):
        parse_foe("class p(): color = 1", mixed)


def test_boolean_dimension_only_in_equality(mixed):
    cls = parse_foe("class p(): alive = 1", mixed)
    assert cls.dims == frozenset({"alive"})
    with pytest.raises(FoeTypeError):
        parse_foe("class p(): alive + 1 <= 2", mixed)
    with pytest.raises(FoeTypeError):
        parse_foe("class p(): alive <= 1", mixed)


def test_zero_parameter_tautology(plane):
    cls = parse_foe("class t(): 0 <= 1", plane)
    assert cls.params == ()
    assert cls.dims == frozenset()


def test_tokenize_keywords():
    kinds = [t.kind for t in tokenize("class c(): NOT x <= 1")]
    assert kinds == ["keyword", "ident", "op", "op", "op", "keyword", "ident", "op", "number", "eof"]


ROUND_TRIP_CORPUS = [
    SPHERE,
    "class p(k): x * (y + k) - 3 >= 0.25",
    "class p(): NOT (x <= 1 OR y <= 1) AND x = y",
    "class p(a): (x - y) - a <= x - (y - a)",
    "class p(): x * (y * 2) <= (x * y) * 2",
    "class t(): 0 <= 1",
    "class box(lo, hi): x >= lo AND x <= hi AND y >= lo AND y <= hi AND z >= lo AND z <= hi",
    "class half(a, b, c, d): a * x + b * y + c * z <= d",
    "class shell(r1, r2): x^2 + y^2 + z^2 >= r1^2 AND x^2 + y^2 + z^2 <= r2^2",
    "class cylinder(r): x^2 + y^2 <= r^2",
    "class p(): x = 1 OR y = 2 OR z = 3",
    "class p(): (x = 1 OR y = 2) OR z = 3",
    "class p(): x = 1 AND (y = 2 OR z = 3)",
    "class p(): NOT x <= 0",
    "class p(): NOT (x <= 0)",
    "class p(): NOT (x <= 0 AND y <= 0)",
    "class p(): (x + 1)^2 <= y",
    "class p(): ((x^2)^3) <= 1",
    "class p(): 2^10 * x <= 1e-05",
    "class p(): x * 0.1 + y * 0.2 = z * 0.3",
    "class p(a, b): a - b - x - y >= 0",
    "class p(a, b): a - (b - (x - y)) >= 0",
    "class p(): x * y * z <= x * (y * z)",
    "class p(k): 0 <= k * (x - y) AND k * (x - y) <= 1",
    "class p(): x >= 1.5 AND NOT y >= 2.5",
    "class p(): NOT (NOT x <= 1 OR y = 0)",
    "class p(): (x) <= (y)",
    "class p(a, b, c): (x - a)^2 + (y - b)^2 = c",
    "class p(): 1e+20 * x >= 123456789.125",
    "class p(): x - 3 * (y - 2)^2 <= z",
    "class w(lo, hi, val): x >= lo AND x <= hi AND y = val",
]


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
def test_unparse_reparses_to_same_tree(space, text):
    cls = parse_foe(text, space)
    again = parse_foe(unparse(cls), space)
    assert again == cls
    assert unparse(again) == unparse(cls)


def test_unparse_canonical_text(weight_schema):
    cls = parse_foe("class w(lo,hi,val):(time>=lo)AND(time<=hi)AND(weight=val)", weight_schema)
    assert unparse(cls) == "class w(lo, hi, val): time >= lo AND time <= hi AND weight = val"


# ========== 带位置的诊断 ==========

def test_type_misuse_positions(mixed):
    with pytest.raises(FoeTypeError) as excinfo:
        parse_foe("class p(): color = 1", mixed)
    assert excinfo.value.position == 11
    with pytest.raises(FoeTypeError) as excinfo:
        parse_foe("class p(): x + alive <= 2", mixed)
    assert excinfo.value.position == 15


def test_arity_diagnostics_point_into_class_header(space):
    sphere = parse_foe(SPHERE, space)
    assert sphere.param_positions == (13, 15, 17, 19)
    with pytest.raises(MissingParameter) as excinfo:
        bind(sphere, {"a": 0, "c": 0})
    assert excinfo.value.position == 15
    assert "4" in excinfo.value.message
    with pytest.raises(UnknownParameter) as excinfo:
        bind(sphere, {"a": 0, "b": 0, "c": 0, "r": 1, "s": 2})
    assert excinfo.value.position == 20
    tautology = parse_foe("class t(): 0 <= 1", space)
    with pytest.raises(UnknownParameter) as excinfo:
        bind(tautology, {"k": 1})
    assert excinfo.value.position == 8


def test_nesting_limit(plane):
    deep = "(" * FOE_MAX_NESTING + "x" + ")" * FOE_MAX_NESTING
    assert parse_foe(f"class p(): {deep} <= 1", plane).dims == frozenset({"x"})
    too_deep = "(" * 5000 + "x <= 1" + ")" * 5000
    with pytest.raises(FoeSyntaxError) as excinfo:
        parse_foe(f"class p(): {too_deep}", plane)
    assert excinfo.value.position == 11 + FOE_MAX_NESTING


def test_minus_is_binary_only(plane):
    with pytest.raises(FoeSyntaxError) as excinfo:
        parse_foe("class n(): -x <= 1", plane)
    assert excinfo.value.position == 11
    with pytest.raises(FoeSyntaxError) as excinfo:
        parse_foe("class n(): x / 2 <= 1", plane)
    assert excinfo.value.position == 13
    negated = parse_foe("class n(): 0 - x <= 1", plane)
    assert negated.body.left == BinOp("-", Num(0.0), Name("x", "dim"))
