"""
数据集文件读写工具

提供 CSV（表头 + 逐行记录）与 JSON Lines（每行一个对象）的原始记录读写，
类型转换与校验由调用方负责
"""

import json
import logging
import os
import re
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import pandas as pd

from config import CSV_ENCODING, SOURCE_COLUMN
from .file_writer import atomic_write_text

logger = logging.getLogger(__name__)


class DatasetFormatError(ValueError):
    """数据集文件格式错误，line 为 1 起始的行号"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line


class RawRecord(NamedTuple):
    """一条未经类型转换的记录"""
    line: int                    # 文件中的行号（1 起始，CSV 表头为第 1 行）
    values: Dict[str, Any]       # 维度名 -> 原始值（CSV 为字符串，JSONL 为 JSON 值）
    source: Optional[str]        # 来源标签（可选）


def detect_format(path: str) -> str:
    """
    根据扩展名判断数据集格式

    Returns:
        str: 'csv' 或 'jsonl'
    """
    ext = os.path.splitext(path)[1].lower()
    if ext in (".jsonl", ".ndjson"):
        return "jsonl"
    if ext in (".csv", ".txt", ""):
        return "csv"
    raise DatasetFormatError(f"无法识别的数据集格式: {path}（支持 .csv / .jsonl）")


def read_header(path: str) -> List[str]:
    """
    读取数据集的维度列名（不含来源列），CSV 取表头，JSON Lines 取第一条记录的键

    Raises:
        DatasetFormatError: 文件为空
    """
    if detect_format(path) == "jsonl":
        records = read_jsonl_records(path)
        if not records:
            raise DatasetFormatError(f"数据集为空: {path}", line=1)
        return list(records[0].values)
    try:
        df = pd.read_csv(path, nrows=0, encoding=CSV_ENCODING)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"数据集为空: {path}", line=1)
    return [str(c).strip() for c in df.columns if str(c).strip() != SOURCE_COLUMN]


def read_csv_records(path: str, columns: Sequence[str]) -> List[RawRecord]:
    """
    读取 CSV 数据集

    表头必须按模式顺序列出全部维度名；可额外带一个来源列（SOURCE_COLUMN），位置不限。

    Args:
        path: CSV 文件路径
        columns: 期望的维度列（模式顺序）

    Returns:
        List[RawRecord]: 原始记录（字符串值）

    Raises:
        DatasetFormatError: 表头不符、字段个数不符或文件为空，带行号
    """
    try:
        # 表头按普通行读取，字段多于表头的行由解析器报错；
        # 全部按字符串读取，空行保留以便行号与文件一致
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding=CSV_ENCODING,
                          skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"数据集为空: {path}", line=1)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise DatasetFormatError(f"CSV 字段个数不符: {path}", line=line)

    header = ["" if pd.isna(c) else str(c).strip() for c in raw.iloc[0]]
    has_source = SOURCE_COLUMN in header
    dim_header = [c for c in header if c != SOURCE_COLUMN]
    if dim_header != list(columns):
        raise DatasetFormatError(f"表头 {dim_header} 与模式维度 {list(columns)} 不一致", line=1)

    records = []
    for idx, row in enumerate(raw.iloc[1:].itertuples(index=False, name=None)):
        line = idx + 2  # 表头占第 1 行
        cells = dict(zip(header, row))
        if all(pd.isna(v) or str(v).strip() == "" for v in cells.values()):
            continue  # 空行
        missing = [name for name in columns if pd.isna(cells[name])]
        if missing:
            raise DatasetFormatError(f"缺少字段 {missing}", line=line)
        source = cells.get(SOURCE_COLUMN) if has_source else None
        records.append(RawRecord(
            line=line,
            values={name: cells[name] for name in columns},
            source=str(source) if source not in (None, "") and not pd.isna(source) else None,
        ))

    logger.debug(f"读取 CSV {path}: {len(records)} 条记录")
    return records


def read_jsonl_records(path: str) -> List[RawRecord]:
    """
    读取 JSON Lines 数据集（每行一个以维度名为键的对象，可带 SOURCE_COLUMN 键）

    Raises:
        DatasetFormatError: 某行不是 JSON 对象，带行号
    """
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise DatasetFormatError(f"JSON 解析失败: {e.msg}", line=line_no)
            if not isinstance(obj, dict):
                raise DatasetFormatError("每行必须是一个 JSON 对象", line=line_no)
            source = obj.pop(SOURCE_COLUMN, None)
            records.append(RawRecord(line=line_no, values=obj,
                                     source=str(source) if source is not None else None))

    logger.debug(f"读取 JSONL {path}: {len(records)} 条记录")
    return records


def write_csv_records(path: str, columns: Sequence[str], rows: Sequence[Sequence[str]],
                      sources: Optional[Sequence[Optional[str]]] = None) -> None:
    """
    写入 CSV 数据集（值已由调用方格式化为文本）

    Args:
        path: 输出路径
        columns: 维度列（模式顺序）
        rows: 每行的文本值
        sources: 每行的来源标签；全部为空时不写来源列
    """
    df = pd.DataFrame(list(rows), columns=list(columns), dtype=str)
    if sources is not None and any(s is not None for s in sources):
        df[SOURCE_COLUMN] = ["" if s is None else s for s in sources]
    text = df.to_csv(index=False, lineterminator="\n")
    atomic_write_text(path, text, encoding=CSV_ENCODING)


def write_jsonl_records(path: str, records: Sequence[Dict[str, Any]]) -> None:
    """写入 JSON Lines 数据集"""
    text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
    atomic_write_text(path, text)
