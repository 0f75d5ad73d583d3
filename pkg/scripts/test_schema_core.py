#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
测试领域模式、向量构造与向量空间算术
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontology.errors import (
    ArityMismatch,
    DuplicateDimensionName,
    EmptyProjection,
    EmptySchema,
    InvalidDimension,
    KindMismatch,
    NonArithmeticDimension,
    NonIntegralScalarOnIntegerDimension,
    OutOfBounds,
    SchemaMismatch,
    UnknownDimension,
)
from ontology.schema_core import (
    Dimension,
    QualeKind,
    add,
    coords_equal,
    define_schema,
    load_schema,
    make_vector,
    negate,
    parse_coord,
    project,
    save_schema,
    scale,
    schema_from_dict,
    schema_to_dict,
    vector_from_mapping,
    zero_vector,
)
from utils.tolerance import is_close

TOL = 1e-9


# ========== 模式定义 ==========

def test_define_schema_keeps_order(shelves, shapes):
    assert shelves.dim_names == ("height", "width")
    assert len(shapes) == 4
    assert shapes.dimension("number_of_edges").kind is QualeKind.INTEGER


def test_define_schema_rejects_duplicates_and_empty():
    with pytest.raises(DuplicateDimensionName):
        define_schema("x", [Dimension("a"), Dimension("a")])
    with pytest.raises(EmptySchema):
        define_schema("x", [])


@pytest.mark.parametrize("kwargs", [
    {"name": "not an identifier"},
    {"name": "a", "kind": "complex"},
    {"name": "a", "bounds": (3, 1)},
    {"name": "a", "kind": "categorical", "values": ()},
    {"name": "a", "kind": "categorical", "values": ("x", "x")},
    {"name": "a", "kind": "boolean", "bounds": (0, 1)},
])
def test_invalid_dimension(kwargs):
    with pytest.raises(InvalidDimension):
        Dimension(**kwargs)


def test_schema_file_round_trip(tmp_path, shapes):
    path = tmp_path / "shapes.schema.json"
    save_schema(shapes, str(path))
    assert load_schema(str(path)) == shapes
    assert schema_from_dict(schema_to_dict(shapes)) == shapes


# ========== 向量构造 ==========

def test_make_vector_blue_rectangle(shapes):
    v = make_vector(shapes, [4, 0, 0, 255])
    assert v.coords == (4, 0.0, 0.0, 255.0)
    assert isinstance(v.coords[0], int)
    assert str(v) == "[4,0.0,0.0,255.0]"


def test_make_vector_errors(shapes, shelves):
    with pytest.raises(ArityMismatch):
        make_vector(shelves, [1.8])
    with pytest.raises(KindMismatch):
        make_vector(shapes, [4.5, 0, 0, 255])
    with pytest.raises(OutOfBounds):
        make_vector(shelves, [-1, 0.5])
    with pytest.raises(KindMismatch):
        make_vector(shelves, [float("nan"), 0.5])


def test_integral_float_accepted_on_integer_dim(shapes):
    assert make_vector(shapes, [4.0, 0, 0, 255]).coords[0] == 4


def test_categorical_and_boolean():
    schema = define_schema("fruit", [
        Dimension("color", "categorical", values=("red", "green")),
        Dimension("ripe", "boolean"),
    ])
    v = make_vector(schema, ["red", True])
    assert v["color"] == "red"
    with pytest.raises(KindMismatch):
        make_vector(schema, ["blue", True])
    with pytest.raises(KindMismatch):
        make_vector(schema, ["red", 1])
    assert parse_coord(schema.dimension("ripe"), "False") is False
    with pytest.raises(NonArithmeticDimension):
        add(v, v)


def test_vector_from_mapping(shelves):
    v = vector_from_mapping(shelves, {"width": 0.5, "height": 1.8})
    assert v.coords == (1.8, 0.5)
    with pytest.raises(ArityMismatch):
        vector_from_mapping(shelves, {"height": 1.8})


# ========== 算术 ==========

def test_add_and_identity(plane):
    u = make_vector(plane, [1, 2])
    v = make_vector(plane, [3, 4])
    assert add(u, v).coords == (4.0, 6.0)
    assert add(u, zero_vector(plane)) == u
    assert add(u, v) == add(v, u)


def test_add_schema_mismatch(plane, shelves):
    with pytest.raises(SchemaMismatch):
        add(make_vector(plane, [1, 2]), make_vector(shelves, [1, 2]))


def test_scale(plane, shapes):
    v = make_vector(plane, [1.5, 3])
    assert scale(2, v).coords == (3.0, 6.0)
    assert scale(1, v) == v
    blue = make_vector(shapes, [4, 0, 0, 255])
    assert scale(2, blue).coords[0] == 8
    with pytest.raises(NonIntegralScalarOnIntegerDimension):
        scale(0.5, blue)


def test_arithmetic_may_leave_bounds(shelves):
    v = make_vector(shelves, [2, 1])
    assert add(v, v).coords == (4.0, 2.0)


# ========== 投影 ==========

def test_project(shapes):
    v = make_vector(shapes, [4, 0, 0, 255])
    colors = project(v, {"blueness", "redness", "greenness"})
    assert colors.coords == (0.0, 0.0, 255.0)
    assert colors.schema.dim_names == ("redness", "greenness", "blueness")
    assert project(v, shapes.dim_names) is v
    with pytest.raises(UnknownDimension):
        project(v, {"nonexistent"})
    with pytest.raises(EmptyProjection):
        project(v, [])


def test_projection_commutes_with_addition(shapes):
    u = make_vector(shapes, [4, 0, 0, 255])
    v = make_vector(shapes, [3, 255, 0, 0])
    dims = ["redness", "blueness"]
    assert project(add(u, v), dims) == add(project(u, dims), project(v, dims))


# ========== 向量空间公理（随机检验） ==========

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
scalars = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
triples = st.lists(finite, min_size=3, max_size=3)


def _space():
    return define_schema("space", [Dimension("x"), Dimension("y"), Dimension("z")])


def _magnitude(*values):
    return max([1.0] + [abs(x) for x in values])


def _close(u, v, magnitude):
    # 抵消后的结果按参与运算的量级比较
    return all(is_close(a, b, TOL * magnitude) for a, b in zip(u.coords, v.coords))


@settings(max_examples=1000, deadline=None)
@given(triples, triples, triples)
def test_addition_axioms(a, b, c):
    s = _space()
    u, v, w = (make_vector(s, x) for x in (a, b, c))
    m = _magnitude(*a, *b, *c)
    assert coords_equal(add(u, v), add(v, u), TOL)
    assert _close(add(add(u, v), w), add(u, add(v, w)), m)
    assert add(u, zero_vector(s)) == u
    assert _close(add(u, negate(u)), zero_vector(s), m)


@settings(max_examples=1000, deadline=None)
@given(triples, triples, scalars, scalars)
def test_scalar_axioms(a, b, p, q):
    s = _space()
    u, v = make_vector(s, a), make_vector(s, b)
    m = _magnitude(p) * _magnitude(q) * _magnitude(*a, *b)
    assert scale(1, u) == u
    assert _close(scale(p, scale(q, u)), scale(p * q, u), m)
    assert _close(scale(p, add(u, v)), add(scale(p, u), scale(p, v)), m)
    assert _close(scale(p + q, u), add(scale(p, u), scale(q, u)), m)


SHAPE_DIMS = ["number_of_edges", "redness", "greenness", "blueness"]
nested_subsets = st.lists(st.sampled_from(SHAPE_DIMS), min_size=1, unique=True).flatmap(
    lambda outer: st.tuples(st.just(outer), st.lists(st.sampled_from(outer), min_size=1, unique=True)))


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 64), triples, nested_subsets)
def test_projection_composes(edges, colors, subsets):
    s = define_schema("colored-shapes", [Dimension("number_of_edges", "integer")] +
                      [Dimension(n) for n in SHAPE_DIMS[1:]])
    v = make_vector(s, [edges] + colors)
    outer, inner = subsets
    assert project(project(v, outer), inner) == project(v, inner)


def test_add_integer_overflow_is_out_of_bounds(shapes):
    big = make_vector(shapes, [2 ** 62, 0, 0, 0])
    with pytest.raises(OutOfBounds):
        add(big, big)
    assert add(big, negate(big)).coords[0] == 0
