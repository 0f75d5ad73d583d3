# -*- coding: utf-8 -*-
"""
相似度度量与导航模块

Minkowski 距离、重构路径（逐维移动）与基于存在集的导航查询。
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_NEAREST_K, DEFAULT_ORDER, DEFAULT_TOLERANCE

from .errors import (
    EmptyExistenceSet,
    InvalidArgument,
    InvalidMove,
    InvalidOrder,
    InvalidWeights,
    KindMismatch,
    OntologyError,
)
from .existence_store import ExistenceSet
from .schema_core import (
    DomainSchema,
    OntVector,
    QualeKind,
    coord_equal,
    format_coord,
    make_vector,
    parse_coord,
    require_same_schema,
    sort_key,
    validate_coord,
)

logger = logging.getLogger(__name__)

_MOVE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(:=|=)\s*(.+?)\s*$")


# ========== 移动与重构路径 ==========

@dataclass(frozen=True)
class Move:
    """
    单维移动：数值维度为系数 a（加上 a·x_i），substitution 时为目标取值替换

    Attributes:
        dim: 维度名
        amount: 系数或替换值
        substitution: 是否为取值替换（分类/布尔维度只能替换）
    """

    dim: str
    amount: Any
    substitution: bool = False

    def __post_init__(self):
        if not self.substitution:
            if isinstance(self.amount, bool) or not isinstance(self.amount, (int, float)):
                raise InvalidMove(f"维度 {self.dim} 的移动系数必须是数值: {self.amount!r}")
            if not math.isfinite(self.amount) or self.amount == 0:
                raise InvalidMove(f"维度 {self.dim} 的移动系数必须是非零有限数值: {self.amount!r}")

    @property
    def magnitude(self) -> float:
        """替换计为 1，数值移动为系数绝对值"""
        return 1.0 if self.substitution else abs(float(self.amount))

    def __str__(self) -> str:
        if self.substitution:
            return f"{self.dim}:={format_coord(self.amount)}"
        return f"{self.dim}={self.amount:+g}"


def parse_move(text: str, schema: DomainSchema) -> Move:
    """
    解析命令行移动语法: dim=+0.5 | dim=-1.0 | dim:=VALUE

    Raises:
        InvalidMove: 语法错误或系数为零
        UnknownDimension: 维度不存在

    Examples:
        >>> parse_move("sweetness=+0.5", apples)
        Move(dim='sweetness', amount=0.5, substitution=False)
        >>> parse_move("color:=red", apples).substitution
        True
    """
    match = _MOVE_RE.match(text)
    if match is None:
        raise InvalidMove(f"无法解析移动 {text!r}（应为 dim=+0.5 或 dim:=VALUE）")
    name, op, raw = match.groups()
    dim = schema.dimension(name)
    if op == ":=":
        try:
            return Move(name, validate_coord(dim, parse_coord(dim, raw)), substitution=True)
        except KindMismatch as e:
            raise InvalidMove(e.message)
    if not dim.is_numeric:
        raise InvalidMove(f"{dim.kind.value} 维度 {name} 只能用 := 替换取值")
    try:
        amount = float(raw)
    except ValueError:
        raise InvalidMove(f"无法解析移动系数 {raw!r}")
    return Move(name, amount)


def apply_moves(origin: OntVector, moves: Sequence[Move]) -> OntVector:
    """
    把移动依次作用于起点，得到虚拟目标向量（不做区间校验，可以不存在）

    Raises:
        UnknownDimension: 移动引用了不存在的维度
        InvalidMove: 数值移动作用于分类/布尔维度，或非整数系数作用于整数维度
    """
    coords = list(origin.coords)
    for move in moves:
        pos = origin.schema.index_of(move.dim)
        dim = origin.schema.dims[pos]
        if move.substitution:
            if dim.is_numeric:
                value = float(move.amount)
                coords[pos] = int(value) if dim.kind is QualeKind.INTEGER and value.is_integer() else value
            else:
                try:
                    coords[pos] = validate_coord(dim, move.amount)
                except KindMismatch as e:
                    raise InvalidMove(e.message)
            continue
        if not dim.is_numeric:
            raise InvalidMove(f"{dim.kind.value} 维度 {dim.name} 不能做数值移动")
        if dim.kind is QualeKind.INTEGER:
            if not float(move.amount).is_integer():
                raise InvalidMove(f"整数维度 {dim.name} 不能移动非整数 {move.amount}")
            coords[pos] = coords[pos] + int(move.amount)
        else:
            coords[pos] = float(coords[pos]) + float(move.amount)
    return OntVector(origin.schema, tuple(coords))


@dataclass(frozen=True)
class ReconstructionPath:
    """
    重构路径: target = origin + Σ a_i·x_i

    每个维度至多一次移动，按模式顺序排列。
    """

    origin: OntVector
    moves: Tuple[Move, ...]
    target: OntVector

    def __len__(self) -> int:
        return len(self.moves)

    def apply(self) -> OntVector:
        return apply_moves(self.origin, self.moves)


def reconstruction_path(origin: OntVector, target: OntVector,
                        tol: float = DEFAULT_TOLERANCE) -> ReconstructionPath:
    """
    最小重构路径：在容差外不同的每个维度各一次移动

    Raises:
        SchemaMismatch: 两个向量模式不同

    Examples:
        >>> path = reconstruction_path(apple_1, apple_2)   # apple_2 = apple_1 + 0.5·sweetness
        >>> [str(m) for m in path.moves]
        ['sweetness=+0.5']
    """
    require_same_schema(origin, target)
    moves = []
    for dim, a, b in zip(origin.schema.dims, origin.coords, target.coords):
        if coord_equal(dim, a, b, tol):
            continue
        if dim.is_numeric:
            delta = b - a if dim.kind is QualeKind.INTEGER else float(b) - float(a)
            moves.append(Move(dim.name, delta))
        else:
            moves.append(Move(dim.name, b, substitution=True))
    return ReconstructionPath(origin, tuple(moves), target)


def reconstruction_distance(origin: OntVector, target: OntVector, tol: float = DEFAULT_TOLERANCE) -> int:
    """
    重构距离 = 最小路径的移动次数（容差外不同的维度数）

    Examples:
        >>> reconstruction_distance(planets, atoms)   # size, gravitational_force, electric_force
        3
    """
    return len(reconstruction_path(origin, target, tol))


def reconstruction_magnitude(origin: OntVector, target: OntVector, tol: float = DEFAULT_TOLERANCE) -> float:
    """另一种路径长度：系数绝对值之和（替换计为 1）"""
    return float(sum(m.magnitude for m in reconstruction_path(origin, target, tol).moves))


# ========== Minkowski 距离 ==========

def check_order(r: Union[float, str]) -> float:
    """
    校验 Minkowski 阶数，接受 'inf' 表示切比雪夫距离

    Raises:
        InvalidOrder: r < 1（不满足三角不等式）或不是数值
    """
    if isinstance(r, str):
        text = r.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return math.inf
        try:
            r = float(text)
        except ValueError:
            raise InvalidOrder(f"无法解析 Minkowski 阶数: {r!r}")
    if isinstance(r, bool) or not isinstance(r, (int, float)) or math.isnan(r) or r < 1:
        raise InvalidOrder(f"Minkowski 阶数必须 >= 1: {r!r}")
    return float(r)


def check_weights(weights: Optional[Sequence[float]], n: int) -> Optional[np.ndarray]:
    """
    Raises:
        InvalidWeights: 个数不符或含非正数
    """
    if weights is None:
        return None
    w = np.asarray(list(weights), dtype=np.float64)
    if w.shape != (n,):
        raise InvalidWeights(f"权重个数 {w.size} 与维度数 {n} 不一致")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InvalidWeights(f"权重必须是正的有限数值: {list(weights)}")
    return w


def minkowski_norm(diffs: Sequence[float], r: float = DEFAULT_ORDER,
                   weights: Optional[np.ndarray] = None) -> float:
    """
    坐标差向量的加权 Minkowski 范数（r 已校验）

    r=∞ 时取最大坐标差，忽略权重。
    """
    d = np.abs(np.asarray(diffs, dtype=np.float64))
    if d.size == 0:
        return 0.0
    m = float(d.max())
    if math.isinf(r) or m == 0.0 or math.isinf(m):
        return m
    w = np.ones_like(d) if weights is None else weights
    if r == 1:
        return float(np.sum(w * d))
    # 先除以最大差再求幂，避免大阶数上溢和微小差值下溢
    s = d / m
    if r == 2:
        return m * math.sqrt(float(np.sum(w * s * s)))
    return m * float(np.sum(w * s ** r)) ** (1.0 / r)


def coordinate_differences(u: OntVector, v: OntVector,
                           scale: Optional[Sequence[float]] = None) -> List[float]:
    """逐维差：数值维度为 |u_i - v_i|（可按 scale 归一化），分类与布尔维度为 0/1 指示"""
    diffs = []
    for i, (dim, a, b) in enumerate(zip(u.schema.dims, u.coords, v.coords)):
        if dim.is_numeric:
            diff = abs(float(a) - float(b))
            if scale is not None:
                diff /= scale[i]
            diffs.append(diff)
        else:
            diffs.append(0.0 if a == b else 1.0)
    return diffs


def minkowski(u: OntVector, v: OntVector, r: Union[float, str] = DEFAULT_ORDER,
              weights: Optional[Sequence[float]] = None,
              scale: Optional[Sequence[float]] = None) -> float:
    """
    Minkowski 距离 (Σ w_i |u_i - v_i|^r)^(1/r)

    Args:
        u, v: 同一模式的向量
        r: 阶数，>= 1 或 math.inf / 'inf'
        weights: 每个维度的正权重（可选）
        scale: 每个维度的归一化范围（可选，见 minmax_scale）

    Raises:
        SchemaMismatch: 模式不同
        InvalidOrder: r < 1
        InvalidWeights: 权重不合法

    Examples:
        >>> minkowski(make_vector(plane, [0, 0]), make_vector(plane, [3, 4]), 2)
        5.0
        >>> minkowski(make_vector(plane, [0, 0]), make_vector(plane, [3, 4]), 1)
        7.0
    """
    require_same_schema(u, v)
    r = check_order(r)
    w = check_weights(weights, len(u.schema))
    return minkowski_norm(coordinate_differences(u, v, scale), r, w)


def minmax_scale(existence: ExistenceSet) -> Tuple[float, ...]:
    """
    由存在集计算每个维度的取值范围（max - min），用于可选的归一化

    范围为 0 的维度和非数值维度记为 1.0。

    Raises:
        EmptyExistenceSet: 存在集为空
    """
    if len(existence) == 0:
        raise EmptyExistenceSet("存在集为空，无法计算取值范围")
    ranges = []
    for pos, dim in enumerate(existence.schema.dims):
        if not dim.is_numeric:
            ranges.append(1.0)
            continue
        values = [float(m.coords[pos]) for m in existence.members]
        span = max(values) - min(values)
        ranges.append(span if span > 0 else 1.0)
    return tuple(ranges)


# ========== 导航 ==========

class Neighbor(NamedTuple):
    vector: OntVector
    distance: float


def _ranked(existence: ExistenceSet, target: OntVector, r: float,
            weights: Optional[Sequence[float]], scale: Optional[Sequence[float]]) -> List[Neighbor]:
    if len(existence) == 0:
        raise EmptyExistenceSet("存在集为空，没有可返回的成员")
    require_same_schema(target, existence.members[0])
    r = check_order(r)
    w = check_weights(weights, len(existence.schema))
    scored = [Neighbor(m, minkowski_norm(coordinate_differences(target, m, scale), r, w))
              for m in existence.members]
    # 距离相同时按坐标字典序，保证结果确定
    scored.sort(key=lambda n: (n.distance, sort_key(n.vector)))
    return scored


def navigate(existence: ExistenceSet, origin: OntVector, moves: Sequence[Move],
             weights: Optional[Sequence[float]] = None,
             scale: Optional[Sequence[float]] = None) -> OntVector:
    """
    导航：计算虚拟目标 origin + moves，返回与之 Minkowski-2 距离最近的存在成员

    Raises:
        EmptyExistenceSet: 存在集为空
        SchemaMismatch: 起点与存在集模式不同

    Examples:
        >>> navigate(comics, favourite_comic, [Move("science", 1.0)])
    """
    if len(existence) == 0:
        raise EmptyExistenceSet("存在集为空，无法导航")
    try:
        origin = make_vector(origin.schema, origin.coords)
    except OntologyError:
        logger.warning(f"⚠️  导航起点 {origin} 未通过模式校验")
        raise
    target = apply_moves(origin, moves)
    best = _ranked(existence, target, 2.0, weights, scale)[0]
    logger.debug(f"虚拟目标 {target} -> 最近成员 {best.vector}（距离 {best.distance:g}）")
    return best.vector


def nearest(existence: ExistenceSet, v: OntVector, r: Union[float, str] = DEFAULT_ORDER,
            k: int = DEFAULT_NEAREST_K, weights: Optional[Sequence[float]] = None,
            scale: Optional[Sequence[float]] = None) -> List[Neighbor]:
    """
    按 Minkowski-r 距离升序返回 k 个最近成员（存在集不足 k 个时全部返回）

    Raises:
        InvalidArgument: k < 1
        EmptyExistenceSet: 存在集为空
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InvalidArgument(f"k 必须是正整数: {k!r}")
    return _ranked(existence, v, r, weights, scale)[:k]
