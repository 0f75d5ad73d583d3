# -*- coding: utf-8 -*-
"""
整体-部分（mereology）推理模块

区域以生成点（V 表示）存储，语义范围是生成点的凸包。
包含与相交都化为"是否存在凸组合"的可行性问题：
  - 维度 <= EXACT_HULL_MAX_DIMS 时用有理数单纯形精确求解，并以凸包面方程快速排除远离边界的点
  - 更高维度用非负最小二乘（nnls）按容差判定
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, QhullError

from config import DEFAULT_ORDER, EXACT_HULL_MAX_DIMS, HULL_TOLERANCE
from utils.file_writer import atomic_write_text

from .errors import (
    DimensionMismatch,
    EmptyPointList,
    NotAMember,
    ParseError,
    SchemaMismatch,
)
from .existence_store import ExistenceSet
from .metrics_nav import check_order, check_weights, minkowski_norm
from .schema_core import DomainSchema, OntVector, induced_schema, make_vector

logger = logging.getLogger(__name__)

# 面方程判定的边界带宽（相对坐标尺度），带内的点交给精确求解
_FACET_BAND = 10 * HULL_TOLERANCE


@dataclass(frozen=True)
class ConvexRegion:
    """
    凸区域

    Attributes:
        schema: 生成点所属的模式（区域维度是它的子集）
        dims: 区域维度（按模式顺序）
        generators: 投影到区域维度上的生成点坐标
    """

    schema: DomainSchema = field(compare=False, repr=False)
    dims: Tuple[str, ...]
    generators: Tuple[Tuple[float, ...], ...]

    @cached_property
    def points(self) -> np.ndarray:
        return np.asarray(self.generators, dtype=np.float64).reshape(len(self.generators), len(self.dims))

    @cached_property
    def coordinate_scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.points))))

    @cached_property
    def _facets(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """
        凸包面方程 (单位法向量, 偏移)，内部点满足 normal·x + offset <= 0

        一维、退化（不满维）或维度过高时返回 None。
        """
        d = len(self.dims)
        unique = np.unique(self.points, axis=0)
        if d < 2 or d > EXACT_HULL_MAX_DIMS or len(unique) <= d:
            return None
        try:
            hull = ConvexHull(unique)
        except QhullError:
            logger.debug(f"区域 {self.dims} 的凸包退化，跳过面方程预判")
            return None
        return hull.equations[:, :-1], hull.equations[:, -1]

    def __len__(self) -> int:
        return len(self.generators)


class Centrality(NamedTuple):
    distance: float
    is_part: bool          # part 不在 whole 内时仍给出距离，只记录警告


# ========== 构造与序列化 ==========

def _region_dims(schema: DomainSchema, dims: Sequence[str]) -> Tuple[str, ...]:
    names = list(dict.fromkeys(dims))
    for name in names:
        schema.numeric_dimension(name)
    wanted = set(names)
    return tuple(n for n in schema.dim_names if n in wanted)


def region_from_points(points: Sequence[OntVector], dims: Sequence[str]) -> ConvexRegion:
    """
    以若干点在维度子集上的投影为生成点构造凸区域

    Raises:
        EmptyPointList: 点列表为空
        NonNumericDimension: 区域维度含分类或布尔维度
        SchemaMismatch: 点不属于同一模式

    Examples:
        >>> region_from_points(engine_parts, ["x", "y", "z"])
    """
    points = list(points)
    if not points:
        raise EmptyPointList("构造凸区域至少需要一个点")
    schema = points[0].schema
    names = _region_dims(schema, dims)
    if not names:
        raise DimensionMismatch("区域维度不能为空")
    sub = induced_schema(schema, names)
    idx = [schema.index_of(n) for n in names]

    generators = []
    for p in points:
        if p.schema != schema:
            raise SchemaMismatch(f"点 {p} 属于模式 {p.schema.name}，与 {schema.name} 不一致")
        projected = make_vector(sub, [p.coords[i] for i in idx])
        generators.append(tuple(float(c) for c in projected.coords))
    return ConvexRegion(schema, names, tuple(generators))


def region_to_dict(region: ConvexRegion) -> Dict[str, Any]:
    """区域字面量 {"dims": [...], "generators": [[...], ...]}"""
    return {"dims": list(region.dims), "generators": [list(g) for g in region.generators]}


def region_from_dict(data: Mapping[str, Any], schema: DomainSchema) -> ConvexRegion:
    """
    从区域字面量构造区域，维度按模式顺序重新排列

    Raises:
        ParseError: 缺少 dims / generators 或生成点长度不符
        EmptyPointList: 生成点为空
    """
    if not isinstance(data, Mapping) or "dims" not in data or "generators" not in data:
        raise ParseError("区域 JSON 需要 dims 和 generators 字段")
    if not isinstance(data["dims"], list) or not all(isinstance(d, str) for d in data["dims"]):
        raise ParseError(f"区域 dims 必须是维度名数组: {data['dims']!r}")
    if not isinstance(data["generators"], list):
        raise ParseError(f"区域 generators 必须是坐标数组的数组: {data['generators']!r}")
    given = list(data["dims"])
    if len(set(given)) != len(given):
        raise ParseError(f"区域维度重复: {given}")
    names = _region_dims(schema, given)
    if not data["generators"]:
        raise EmptyPointList("区域至少需要一个生成点")

    sub = induced_schema(schema, names)
    order = [given.index(n) for n in names]
    generators = []
    for row in data["generators"]:
        if not isinstance(row, (list, tuple)) or len(row) != len(given):
            raise ParseError(f"生成点 {row} 的坐标个数与维度 {given} 不一致")
        projected = make_vector(sub, [row[i] for i in order])
        generators.append(tuple(float(c) for c in projected.coords))
    return ConvexRegion(schema, names, tuple(generators))


def load_region(path: str, schema: DomainSchema) -> ConvexRegion:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"区域文件 {path} 不是合法 JSON: {e.msg}", line=e.lineno)
    return region_from_dict(data, schema)


def save_region(region: ConvexRegion, path: str) -> None:
    atomic_write_text(path, json.dumps(region_to_dict(region), ensure_ascii=False) + "\n")


def centroid(region: ConvexRegion) -> Tuple[float, ...]:
    """生成点的重心"""
    return tuple(float(c) for c in region.points.mean(axis=0))


# ========== 可行性求解 ==========

def _exact_feasible(A: List[List[Fraction]], b: List[Fraction]) -> bool:
    """
    判断 {λ >= 0 : Aλ = b} 是否非空（第一阶段单纯形，有理数精确运算，Bland 规则防循环）
    """
    rows, cols = len(A), len(A[0])
    width = cols + rows + 1
    tableau = []
    for i in range(rows):
        sign = -1 if b[i] < 0 else 1
        row = [sign * a for a in A[i]] + [Fraction(0)] * rows + [sign * b[i]]
        row[cols + i] = Fraction(1)
        tableau.append(row)
    basis = [cols + i for i in range(rows)]

    # 目标：最小化人工变量之和；objective 保存检验数，末项为 -当前目标值
    objective = [-sum(tableau[i][j] for i in range(rows)) for j in range(width)]
    for j in range(cols, cols + rows):
        objective[j] = Fraction(0)

    while True:
        entering = next((j for j in range(cols + rows) if objective[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best = None
        for i in range(rows):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            break

        pivot = tableau[leaving][entering]
        tableau[leaving] = [x / pivot for x in tableau[leaving]]
        for i in range(rows):
            if i != leaving and tableau[i][entering] != 0:
                factor = tableau[i][entering]
                tableau[i] = [x - factor * y for x, y in zip(tableau[i], tableau[leaving])]
        factor = objective[entering]
        objective = [x - factor * y for x, y in zip(objective, tableau[leaving])]
        basis[leaving] = entering

    return objective[-1] == 0


def _nnls_feasible(A: np.ndarray, b: np.ndarray, scale: float) -> bool:
    """非负最小二乘残差在容差内即视为可行"""
    _, residual = nnls(A, b)
    return residual <= HULL_TOLERANCE * scale


def _combination_system(blocks: Sequence[np.ndarray], target: Optional[np.ndarray],
                        weight: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    拼出凸组合方程组

    一个块：G^T λ = x, Σλ = 1
    两个块：G_a^T λ - G_b^T μ = 0, Σλ = 1, Σμ = 1
    求和约束乘以 weight，与坐标方程量级一致。
    """
    d = blocks[0].shape[1]
    signs = [1.0, -1.0]
    top = np.hstack([signs[k] * blk.T for k, blk in enumerate(blocks)])
    sums = np.zeros((len(blocks), top.shape[1]))
    start = 0
    for k, blk in enumerate(blocks):
        sums[k, start:start + len(blk)] = weight
        start += len(blk)
    A = np.vstack([top, sums])
    rhs = np.concatenate([target if target is not None else np.zeros(d), np.full(len(blocks), weight)])
    return A, rhs


def _feasible(blocks: Sequence[np.ndarray], target: Optional[np.ndarray], scale: float) -> bool:
    d = blocks[0].shape[1]
    A, rhs = _combination_system(blocks, target, scale)
    if d <= EXACT_HULL_MAX_DIMS:
        exact_A = [[Fraction(float(x)) for x in row] for row in A]
        exact_b = [Fraction(float(x)) for x in rhs]
        if _exact_feasible(exact_A, exact_b):
            return True
        logger.debug("精确求解不可行，按容差复核")
    return _nnls_feasible(A, rhs, scale)


# ========== 查询 ==========

def _projected(region: ConvexRegion, v: OntVector) -> np.ndarray:
    missing = [d for d in region.dims if not v.schema.has_dim(d)]
    if missing:
        raise SchemaMismatch(f"向量 {v} 的模式缺少区域维度: {', '.join(missing)}")
    for d in region.dims:
        v.schema.numeric_dimension(d)
    return np.array([float(v[d]) for d in region.dims], dtype=np.float64)


def _contains(region: ConvexRegion, x: np.ndarray) -> bool:
    scale = max(region.coordinate_scale, float(np.max(np.abs(x))))
    facets = region._facets
    if facets is not None:
        normals, offsets = facets
        slack = float(np.max(normals @ x + offsets))
        band = _FACET_BAND * scale
        if slack < -band:
            return True
        if slack > band:
            return False
    elif len(region.dims) == 1:
        lo, hi = float(region.points.min()), float(region.points.max())
        tol = HULL_TOLERANCE * scale
        return lo - tol <= float(x[0]) <= hi + tol
    return _feasible([region.points], x, scale)


def contains_point(region: ConvexRegion, v: OntVector) -> bool:
    """
    点（投影到区域维度后）是否在凸包内，容差 HULL_TOLERANCE

    Raises:
        SchemaMismatch: v 的模式缺少区域维度

    Examples:
        >>> contains_point(triangle, make_vector(plane, [0.25, 0.25]))
        True
        >>> contains_point(triangle, make_vector(plane, [1, 1]))
        False
    """
    return _contains(region, _projected(region, v))


def _require_same_dims(a: ConvexRegion, b: ConvexRegion) -> None:
    if a.dims != b.dims:
        raise DimensionMismatch(f"区域维度不一致: {list(a.dims)} / {list(b.dims)}")


def part_of(part: ConvexRegion, whole: ConvexRegion) -> bool:
    """
    part 的每个生成点都在 whole 的凸包内（凸集下等价于凸包包含）

    Raises:
        DimensionMismatch: 区域维度不同
    """
    _require_same_dims(part, whole)
    return all(_contains(whole, np.asarray(g, dtype=np.float64)) for g in part.generators)


def overlap(a: ConvexRegion, b: ConvexRegion) -> bool:
    """
    两个凸包是否相交（存在同时属于二者的凸组合点）

    Raises:
        DimensionMismatch: 区域维度不同
    """
    _require_same_dims(a, b)
    lo_a, hi_a = a.points.min(axis=0), a.points.max(axis=0)
    lo_b, hi_b = b.points.min(axis=0), b.points.max(axis=0)
    scale = max(a.coordinate_scale, b.coordinate_scale)
    if np.any(lo_a > hi_b + HULL_TOLERANCE * scale) or np.any(lo_b > hi_a + HULL_TOLERANCE * scale):
        return False
    return _feasible([a.points, b.points], None, scale)


def centrality(part: ConvexRegion, whole: ConvexRegion, r: float = DEFAULT_ORDER,
               weights: Optional[Sequence[float]] = None) -> Centrality:
    """
    中心度：part 与 whole 生成点重心之间的 Minkowski-r 距离，越小越居中

    part 不在 whole 内时照常计算并记录警告。

    Raises:
        DimensionMismatch: 区域维度不同
        InvalidOrder / InvalidWeights: 度量参数不合法

    Examples:
        >>> centrality(unit_box, box_at_10, 2).distance
        10.0
    """
    _require_same_dims(part, whole)
    r = check_order(r)
    w = check_weights(weights, len(part.dims))
    is_part = part_of(part, whole)
    if not is_part:
        logger.warning(f"⚠️  区域 {list(part.dims)} 上 part 不在 whole 内，中心度仅供参考")
    diffs = np.asarray(centroid(part)) - np.asarray(centroid(whole))
    return Centrality(minkowski_norm(diffs, r, w), is_part)


# ========== 数据集相对凸性 ==========

def convexity_witness(existence: ExistenceSet, subset: Sequence[OntVector],
                      dims: Sequence[str]) -> Optional[OntVector]:
    """
    返回落在子集凸包内、却不属于子集的存在成员（没有则返回 None）

    Raises:
        NotAMember: 子集中有向量不在存在集中
        EmptyPointList: 子集为空
    """
    subset = list(subset)
    for v in subset:
        if not existence.exists(v):
            raise NotAMember(f"向量 {v} 不在存在集中")
    region = region_from_points(subset, dims)
    inside = {existence.find(v) for v in subset}
    for i, member in enumerate(existence.members):
        if i not in inside and contains_point(region, member):
            return member
    return None


def is_convex_in(existence: ExistenceSet, subset: Sequence[OntVector], dims: Sequence[str]) -> bool:
    """
    数据集相对凸性：子集凸包内没有其他存在成员

    Examples:
        >>> is_convex_in(grid, block, ["x", "y"])
        True
    """
    witness = convexity_witness(existence, subset, dims)
    if witness is not None:
        logger.debug(f"成员 {witness} 落在子集凸包内")
    return witness is None

