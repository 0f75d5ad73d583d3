#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
测试线性相关检测、线性组合表示与概率存在函数
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import MAX_PROBABILITY_CELLS
from ontology.dependence_prob import (
    detect_linear_dependence,
    estimate_probability_model,
    express_as_combination,
    load_model,
    model_from_dict,
    model_to_dict,
    probability_of,
    save_model,
)
from ontology.errors import (
    EmptyExistenceSet,
    InvalidArgument,
    NonNumericDimension,
    NotInSpan,
    ParseError,
    SchemaMismatch,
    TooFewVectors,
)
from ontology.existence_store import ExistenceSet
from ontology.schema_core import Dimension, define_schema, make_vector, schema_to_dict


@pytest.fixture
def rgb():
    return define_schema("rgb", [Dimension("red"), Dimension("green"), Dimension("blue")])


def _vectors(schema, rows):
    return [make_vector(schema, r) for r in rows]


# ========== 线性相关 ==========

def test_yellow_is_red_plus_green(rgb):
    r, g, yellow = _vectors(rgb, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    report = detect_linear_dependence([r, g, yellow])
    assert report.rank == 2
    [dep] = report.dependent
    assert dep.index == 2
    assert dep.over == (0, 1)
    assert dep.coefficients == pytest.approx((1.0, 1.0))
    assert dep.residual == pytest.approx(0.0, abs=1e-12)


def test_standard_basis_is_independent(rgb):
    report = detect_linear_dependence(_vectors(rgb, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert report.rank == 3
    assert report.dependent == []


def test_rank_never_exceeds_dimension(rgb):
    rng = np.random.default_rng(11)
    vectors = _vectors(rgb, rng.uniform(-10, 10, size=(6, 3)).tolist())
    report = detect_linear_dependence(vectors)
    assert report.rank == 3
    assert [d.index for d in report.dependent] == [3, 4, 5]
    for d in report.dependent:
        rebuilt = sum(c * vectors[i].as_array() for c, i in zip(d.coefficients, d.over))
        assert np.allclose(rebuilt, vectors[d.index].as_array(), atol=1e-8)


def test_zero_vector_is_dependent(rgb):
    report = detect_linear_dependence(_vectors(rgb, [[1, 2, 3], [0, 0, 0]]))
    assert report.rank == 1
    assert report.dependent[0].index == 1
    assert report.dependent[0].coefficients == pytest.approx((0.0,))


def test_scaled_copy_is_dependent(rgb):
    report = detect_linear_dependence(_vectors(rgb, [[2, 4, 6], [-1, -2, -3]]))
    assert report.rank == 1
    assert report.dependent[0].coefficients == pytest.approx((-0.5,))


def _exact_rank(rows):
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    for col in range(len(m[0])):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                factor = m[i][col] / m[rank][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


@pytest.mark.parametrize("seed", range(100))
def test_rank_matches_exact_elimination(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(2, 7)), int(rng.integers(1, 7))
    rows = rng.integers(-3, 4, size=(n, d))
    if n > 2 and rng.random() < 0.5:
        rows[-1] = rows[0] * int(rng.integers(-2, 3)) + rows[1] * int(rng.integers(-2, 3))
    schema = define_schema("m", [Dimension(f"c{j}") for j in range(d)])
    report = detect_linear_dependence(_vectors(schema, rows.tolist()))
    assert report.rank == _exact_rank(rows.tolist())
    assert report.rank + len(report.dependent) == n


small_matrices = st.integers(1, 6).flatmap(
    lambda d: st.lists(st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=2, max_size=6))


@settings(max_examples=300, deadline=None)
@given(small_matrices, st.sampled_from([1e-6, 1e-3, 0.5, -2.0, 3.0, 1e3, 1e6]))
def test_dependence_invariant_under_uniform_scaling(rows, c):
    schema = define_schema("m", [Dimension(f"c{j}") for j in range(len(rows[0]))])
    plain = detect_linear_dependence(_vectors(schema, rows))
    scaled = detect_linear_dependence(_vectors(schema, [[c * x for x in row] for row in rows]))
    assert scaled.rank == plain.rank
    assert [(d.index, d.over) for d in scaled.dependent] == [(d.index, d.over) for d in plain.dependent]
    for a, b in zip(scaled.dependent, plain.dependent):
        assert a.coefficients == pytest.approx(b.coefficients, rel=1e-6, abs=1e-9)


def test_dependence_errors(rgb):
    with pytest.raises(TooFewVectors):
        detect_linear_dependence(_vectors(rgb, [[1, 0, 0]]))
    fruit = define_schema("fruit", [Dimension("mass"), Dimension("color", "categorical", values=("red",))])
    with pytest.raises(NonNumericDimension):
        detect_linear_dependence(_vectors(fruit, [[1, "red"], [2, "red"]]))


def test_express_as_combination(rgb):
    r, g, yellow, e3 = _vectors(rgb, [[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]])
    combo = express_as_combination(yellow, [r, g])
    assert combo.coefficients == pytest.approx((1.0, 1.0))
    assert combo.residual == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(NotInSpan) as excinfo:
        express_as_combination(e3, [r, g])
    assert excinfo.value.residual == pytest.approx(1.0)
    assert excinfo.value.code == "NOT_IN_SPAN"

    with pytest.raises(InvalidArgument):
        express_as_combination(yellow, [])


# ========== 概率存在函数 ==========

@pytest.fixture
def grid_4x4(plane):
    return ExistenceSet.from_vectors(plane, _vectors(plane, [[x, y] for x in range(4) for y in range(4)]))


def test_uniform_grid(plane, grid_4x4):
    model = estimate_probability_model(grid_4x4, bins_per_dim=4)
    assert model.cells == 16
    assert np.allclose(model.probabilities, 1 / 16)
    lookup = probability_of(model, make_vector(plane, [1, 2]))
    assert lookup.probability == pytest.approx(1 / 16)
    assert not lookup.clipped


def test_out_of_range_is_clipped(plane, grid_4x4):
    model = estimate_probability_model(grid_4x4, bins_per_dim=4)
    lookup = probability_of(model, make_vector(plane, [10, 0]))
    assert lookup.clipped
    assert lookup.probability == pytest.approx(1 / 16)


def test_point_mass(plane):
    s = ExistenceSet.from_vectors(plane, _vectors(plane, [[1, 1]]))
    model = estimate_probability_model(s, bins_per_dim=2)
    assert probability_of(model, make_vector(plane, [1, 1])).probability == 1.0
    assert probability_of(model, make_vector(plane, [0.6, 0.6])).probability == 0.0


def test_laplace_smoothing(plane):
    s = ExistenceSet.from_vectors(plane, _vectors(plane, [[1, 1]]))
    model = estimate_probability_model(s, bins_per_dim=2, smoothing=1.0)
    assert probability_of(model, make_vector(plane, [1, 1])).probability == pytest.approx(0.4)
    assert probability_of(model, make_vector(plane, [0.6, 0.6])).probability == pytest.approx(0.2)
    assert float(model.probabilities.sum()) == pytest.approx(1.0)


def test_categorical_and_boolean_cells():
    schema = define_schema("fruit", [
        Dimension("color", "categorical", values=("red", "green", "yellow")),
        Dimension("ripe", "boolean"),
    ])
    s = ExistenceSet.from_vectors(schema, _vectors(schema, [["red", True], ["red", False], ["green", True]]))
    model = estimate_probability_model(s)
    assert model.probabilities.shape == (3, 2)
    assert probability_of(model, make_vector(schema, ["red", True])).probability == pytest.approx(1 / 3)
    assert probability_of(model, make_vector(schema, ["yellow", False])).probability == 0.0


def test_probability_errors(plane, shapes, grid_4x4):
    with pytest.raises(EmptyExistenceSet):
        estimate_probability_model(ExistenceSet.empty(plane))
    for bins in (0, True, 2.5):
        with pytest.raises(InvalidArgument):
            estimate_probability_model(grid_4x4, bins_per_dim=bins)
    with pytest.raises(InvalidArgument):
        estimate_probability_model(grid_4x4, smoothing=-1)
    model = estimate_probability_model(grid_4x4)
    with pytest.raises(SchemaMismatch):
        probability_of(model, make_vector(shapes, [4, 0, 0, 255]))


def test_histogram_cell_limit(plane, grid_4x4):
    wide = define_schema("wide", [Dimension(f"d{i}") for i in range(20)])
    s = ExistenceSet.from_vectors(wide, [make_vector(wide, [float(i)] * 20) for i in range(3)])
    with pytest.raises(InvalidArgument) as excinfo:
        estimate_probability_model(s)
    assert str(MAX_PROBABILITY_CELLS) in excinfo.value.message
    with pytest.raises(InvalidArgument):
        estimate_probability_model(grid_4x4, bins_per_dim=10 ** 7)
    assert estimate_probability_model(grid_4x4, bins_per_dim=1000).cells == 1_000_000


def test_model_file_cell_limit(space):
    data = {
        "schema": schema_to_dict(space),
        "partitions": [{"dim": name, "edges": list(range(1001))} for name in ("x", "y", "z")],
        "smoothing": 0.0,
        "total": 1,
        "counts": [],
        "probabilities": [],
    }
    with pytest.raises(ParseError) as excinfo:
        model_from_dict(data)
    assert "上限" in excinfo.value.message


# ========== 模型文件 ==========

def test_saved_model_answers_identically(tmp_path, plane):
    rng = np.random.default_rng(3)
    s = ExistenceSet.from_vectors(plane, _vectors(plane, rng.normal(size=(40, 2)).tolist()))
    model = estimate_probability_model(s, bins_per_dim=5, smoothing=0.5)
    path = str(tmp_path / "model.json")
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.schema == model.schema
    for q in rng.normal(size=(20, 2)).tolist():
        v = make_vector(plane, q)
        assert probability_of(loaded, v) == probability_of(model, v)


def test_model_shape_mismatch(plane, grid_4x4):
    data = model_to_dict(estimate_probability_model(grid_4x4, bins_per_dim=2))
    data["probabilities"] = data["probabilities"][:1]
    with pytest.raises(ParseError):
        model_from_dict(data)
    del data["counts"]
    with pytest.raises(ParseError):
        model_from_dict(data)


def test_model_file_not_json(tmp_path):
    path = tmp_path / "model.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_model(str(path))
