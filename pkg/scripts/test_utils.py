#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
测试工具函数：容差判定、间隔检查、数据集文件读写与原子写入
"""

import math
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from utils.dataset_io import DatasetFormatError, detect_format, read_csv_records, read_header
from utils.file_writer import atomic_write_text
from utils.gap_checker import Gap, analyze_gaps, median_spacing
from utils.tolerance import is_close, is_less_or_close, search_window


# ========== 容差 ==========

def test_is_close():
    assert is_close(1.0, 1.0 + 1e-12)
    assert is_close(1e12, 1e12 + 1.0)
    assert not is_close(0.0, 1e-6)
    assert is_close(math.inf, math.inf)
    assert not is_close(math.inf, 1e308)


def test_is_less_or_close():
    assert is_less_or_close(1.0, 2.0)
    assert is_less_or_close(1.0 + 1e-12, 1.0)
    assert not is_less_or_close(1.1, 1.0)


@given(st.floats(min_value=-1e9, max_value=1e9), st.floats(min_value=-1e9, max_value=1e9))
def test_search_window_covers_close_values(x, y):
    if is_close(x, y):
        assert abs(x - y) <= search_window(x)


@given(st.floats(min_value=-1e6, max_value=1e6), st.floats(min_value=-1.0, max_value=20.0),
       st.sampled_from([0.3, 0.5, 0.6, 0.9, 0.99]))
def test_search_window_covers_close_values_at_wide_tolerance(x, factor, tol):
    y = x * factor
    if is_close(x, y, tol):
        assert abs(x - y) <= search_window(x, tol)


def test_search_window_unbounded_at_unit_tolerance():
    assert search_window(5.0, 1.0) == math.inf
    assert search_window(100.0, 0.6) >= 150.0    # y = 250 与 100 在 0.6 容差下相等


# ========== 间隔检查 ==========

def test_median_spacing():
    assert median_spacing([1, 2, 4]) == 1.0
    assert median_spacing([4, 1, 2, 2]) == 1.0
    assert median_spacing([5]) == 0.0
    assert median_spacing([3, 3, 3]) == 0.0


def test_two_runs_have_one_gap():
    result = analyze_gaps(list(range(0, 11)) + list(range(50, 61)))
    assert result.sampling_interval == 1.0
    assert result.threshold == 1.5
    assert result.gaps == [Gap(10.0, 50.0, 40.0)]
    assert result.largest == Gap(10.0, 50.0, 40.0)


def test_regular_series_has_no_gap():
    result = analyze_gaps([0, 2, 4, 6])
    assert result.gaps == []
    assert result.largest.width == 2.0


def test_given_sampling_interval():
    assert analyze_gaps([0, 2, 4], sampling_interval=1.0).gaps == [Gap(0.0, 2.0, 2.0), Gap(2.0, 4.0, 2.0)]


def test_degenerate_series():
    single = analyze_gaps([7])
    assert single.gaps == [Gap(7.0, 7.0, math.inf)]
    empty = analyze_gaps([])
    assert empty.gaps == [] and empty.largest is None


# ========== 数据集文件 ==========

def test_detect_format():
    assert detect_format("a.jsonl") == "jsonl"
    assert detect_format("a.CSV") == "csv"
    with pytest.raises(DatasetFormatError):
        detect_format("a.xlsx")


def test_read_header_skips_source(data_dir):
    assert read_header(os.path.join(data_dir, "rgb_yellow.csv")) == ["red", "green", "blue"]


def test_source_column_anywhere_and_blank_lines(tmp_path):
    path = tmp_path / "v.csv"
    path.write_text("_source,x,y\na,1,2\n\n,3,4\n", encoding="utf-8")
    records = read_csv_records(str(path), ["x", "y"])
    assert [r.line for r in records] == [2, 4]
    assert records[0].values == {"x": "1", "y": "2"}
    assert [r.source for r in records] == ["a", None]


def test_empty_csv(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(DatasetFormatError) as excinfo:
        read_csv_records(str(path), ["x"])
    assert excinfo.value.line == 1


def test_atomic_write_creates_directory(tmp_path):
    path = tmp_path / "nested" / "out.txt"
    atomic_write_text(str(path), "a\nb\n")
    assert path.read_text(encoding="utf-8") == "a\nb\n"
    assert os.listdir(path.parent) == ["out.txt"]
