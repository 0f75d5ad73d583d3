# -*- coding: utf-8 -*-
"""
数值容差工具
所有坐标比较共用同一个容差判定
"""

import math

from config import DEFAULT_TOLERANCE


def is_close(a: float, b: float, tol: float = DEFAULT_TOLERANCE) -> bool:
    """
    容差相等判定

    |a - b| <= max(tol, tol * max(|a|, |b|))，即绝对容差与相对容差取较宽者

    Args:
        a: 数值 a
        b: 数值 b
        tol: 容差（同时作为绝对与相对容差）

    Returns:
        bool: 是否在容差内相等

    Examples:
        >>> is_close(1.0, 1.0 + 1e-12)
        True
        >>> is_close(1e12, 1e12 + 1.0)   # 相对容差放宽
        True
        >>> is_close(0.0, 1e-6)
        False
    """
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= max(tol, tol * max(abs(a), abs(b)))


def is_less_or_close(a: float, b: float, tol: float = DEFAULT_TOLERANCE) -> bool:
    """a <= b，容差内相等也算满足"""
    return a <= b or is_close(a, b, tol)


def search_window(x: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """
    与 x 容差相等的值所在区间的半宽（供排序索引做候选区间查找）

    对任意满足 is_close(x, y) 的 y，都有 |x - y| <= 返回值。
    tol >= 1 时相对容差不再约束 y 的范围，返回 inf（调用方应线性扫描）。

    Examples:
        >>> search_window(100.0, 0.5)    # |x - y| <= 0.5 * |y| => y <= 200
        100.5001...
    """
    if tol >= 1.0:
        return math.inf
    # |y| 更大时 |x - y| <= tol * (|x| + |x - y|)，解得 |x - y| <= tol * |x| / (1 - tol)
    return max(tol, tol * abs(x) / (1.0 - tol)) * (1.0 + 1e-6) + tol
