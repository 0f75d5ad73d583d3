# -*- coding: utf-8 -*-
"""
工具函数模块
提供通用的辅助函数
"""

from .tolerance import is_close, is_less_or_close
from .file_writer import atomic_write_text
from .gap_checker import Gap, GapAnalysis, analyze_gaps, median_spacing
from .dataset_io import (
    DatasetFormatError,
    RawRecord,
    detect_format,
    read_header,
    read_csv_records,
    read_jsonl_records,
    write_csv_records,
    write_jsonl_records,
)

__all__ = [
    'is_close',
    'is_less_or_close',
    'atomic_write_text',
    'Gap',
    'GapAnalysis',
    'analyze_gaps',
    'median_spacing',
    'DatasetFormatError',
    'RawRecord',
    'detect_format',
    'read_header',
    'read_csv_records',
    'read_jsonl_records',
    'write_csv_records',
    'write_jsonl_records',
]
