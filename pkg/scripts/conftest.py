# -*- coding: utf-8 -*-
"""
测试公共夹具
"""

import os
import sys

import pytest

# 添加项目根目录到路径
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from config import DATA_DIR as DATA_DIRNAME
from ontology.schema_core import Dimension, define_schema, make_vector
from ontology.existence_store import ExistenceSet


DATA_DIR = os.path.join(ROOT, DATA_DIRNAME)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def shapes():
    return define_schema("colored-shapes", [
        Dimension("number_of_edges", "integer"),
        Dimension("redness"),
        Dimension("greenness"),
        Dimension("blueness"),
    ])


@pytest.fixture
def shelves():
    return define_schema("shelves", [
        Dimension("height", unit="m", bounds=(0, 3)),
        Dimension("width", unit="m"),
    ])


@pytest.fixture
def plane():
    return define_schema("plane", [Dimension("x"), Dimension("y")])


@pytest.fixture
def space():
    return define_schema("space", [Dimension("x"), Dimension("y"), Dimension("z")])


@pytest.fixture
def weight_schema():
    return define_schema("john-weight", [Dimension("time", unit="year"), Dimension("weight", unit="kg")])


@pytest.fixture
def weights(weight_schema):
    """[50,68] ... [60,68]，步长 1"""
    return ExistenceSet.from_vectors(weight_schema, [make_vector(weight_schema, [t, 68]) for t in range(50, 61)])


@pytest.fixture
def grid(plane):
    """5x5 整数网格"""
    return ExistenceSet.from_vectors(plane, [make_vector(plane, [x, y]) for x in range(5) for y in range(5)])
