# -*- coding: utf-8 -*-
"""
间隔检查工具
沿某个数值轴分析采样间隔，找出超过阈值的缺口
"""

import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from config import GAP_FACTOR


class Gap(NamedTuple):
    """相邻两个采样位置之间的缺口"""
    start: float
    end: float
    width: float


class GapAnalysis(NamedTuple):
    sampling_interval: float      # 推断的采样间隔（正间隔的下中位数）
    threshold: float              # 缺口阈值 = gap_factor × sampling_interval
    gaps: List[Gap]               # 宽度严格大于阈值的缺口（按位置排序）
    largest: Optional[Gap]        # 最大的相邻间隔（无论是否超过阈值）


def median_spacing(positions: Sequence[float]) -> float:
    """
    推断采样间隔：排序后相邻正间隔的下中位数

    取下中位数而不是平均中位数，使 {1, 2, 4} 这样的序列推断出间隔 1，
    从而 2 的缺口会被 1.5 倍阈值识别出来。

    Args:
        positions: 轴上的采样位置（无需有序，可重复）

    Returns:
        float: 采样间隔；不足两个不同位置时返回 0.0

    Examples:
        >>> median_spacing([1, 2, 4])
        1.0
        >>> median_spacing([5])
        0.0
    """
    values = np.sort(np.asarray(positions, dtype=np.float64))
    diffs = np.diff(values)
    diffs = np.sort(diffs[diffs > 0])
    if diffs.size == 0:
        return 0.0
    return float(diffs[(diffs.size - 1) // 2])


def analyze_gaps(positions: Sequence[float], gap_factor: float = GAP_FACTOR,
                 sampling_interval: Optional[float] = None) -> GapAnalysis:
    """
    检查采样序列中的缺口

    Args:
        positions: 轴上的采样位置（无需有序，可重复）
        gap_factor: 阈值倍数
        sampling_interval: 指定采样间隔；None 表示由 median_spacing 推断

    Returns:
        GapAnalysis: 采样间隔、阈值、超阈值缺口与最大间隔

    Examples:
        >>> # 两段连续采样 [0,10] 与 [50,60]，步长 1
        >>> result = analyze_gaps(list(range(0, 11)) + list(range(50, 61)))
        >>> result.gaps
        [Gap(start=10.0, end=50.0, width=40.0)]
    """
    values = np.unique(np.asarray(positions, dtype=np.float64))
    if sampling_interval is None:
        sampling_interval = median_spacing(values)
    threshold = gap_factor * sampling_interval

    if values.size < 2:
        # 单点没有任何间隔可言，视为无限大的缺口
        if values.size == 1:
            point = float(values[0])
            return GapAnalysis(sampling_interval, threshold, [Gap(point, point, math.inf)],
                               Gap(point, point, math.inf))
        return GapAnalysis(sampling_interval, threshold, [], None)

    diffs = np.diff(values)
    gaps = [
        Gap(float(values[i]), float(values[i + 1]), float(diffs[i]))
        for i in np.flatnonzero(diffs > threshold)
    ]
    i = int(np.argmax(diffs))
    largest = Gap(float(values[i]), float(values[i + 1]), float(diffs[i]))
    return GapAnalysis(sampling_interval, threshold, gaps, largest)
