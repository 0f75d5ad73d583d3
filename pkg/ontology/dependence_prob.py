# -*- coding: utf-8 -*-
"""
线性相关（因果）与概率存在函数（相关）模块

- detect_linear_dependence: 逐个向量做消元，找出可由前面向量线性表示的向量
- express_as_combination: 最小二乘求组合系数，残差超限时报 NotInSpan
- estimate_probability_model: 等宽分箱直方图 + 拉普拉斯平滑
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEFAULT_BINS,
    DEFAULT_SMOOTHING,
    DEPENDENCE_TOLERANCE,
    MAX_PROBABILITY_CELLS,
    PROBABILITY_SUM_TOLERANCE,
)
from utils.file_writer import atomic_write_text

from .errors import (
    EmptyExistenceSet,
    InvalidArgument,
    NonNumericDimension,
    NotInSpan,
    ParseError,
    SchemaMismatch,
    TooFewVectors,
)
from .existence_store import ExistenceSet
from .schema_core import (
    Dimension,
    DomainSchema,
    OntVector,
    QualeKind,
    define_schema,
    make_vector,
    schema_from_dict,
    schema_to_dict,
)

logger = logging.getLogger(__name__)


# ========== 线性相关 ==========

class Dependency(NamedTuple):
    index: int                        # 被表示的向量下标
    over: Tuple[int, ...]             # 参与表示的（此前线性无关的）向量下标
    coefficients: Tuple[float, ...]
    residual: float


class DependenceReport(NamedTuple):
    rank: int
    dependent: List[Dependency]
    tolerance_used: float


class Combination(NamedTuple):
    coefficients: Tuple[float, ...]
    residual: float


def _numeric_matrix(vectors: Sequence[OntVector]) -> np.ndarray:
    schema = vectors[0].schema
    for v in vectors:
        if v.schema != schema:
            raise SchemaMismatch(f"向量属于不同模式: {schema.name} / {v.schema.name}")
    for dim in schema.dims:
        if not dim.is_numeric:
            raise NonNumericDimension(f"维度 {dim.name} 不是数值维度（{dim.kind.value}）")
    return np.array([[float(c) for c in v.coords] for v in vectors], dtype=np.float64)


def detect_linear_dependence(vectors: Sequence[OntVector],
                             tol: float = DEPENDENCE_TOLERANCE) -> DependenceReport:
    """
    检测向量组的线性相关性

    按顺序逐个消元：向量对此前的阶梯行消元后，剩余分量的最大绝对值不超过
    主元阈值 tol × 最大绝对元素 时，视为可由此前线性无关的向量表示。

    Args:
        vectors: 同一全数值模式的向量（至少 2 个）
        tol: 相对主元阈值

    Returns:
        DependenceReport: 秩、每个相关向量的组合系数与残差、实际残差容差

    Raises:
        TooFewVectors: 向量少于 2 个
        NonNumericDimension: 模式含分类或布尔维度

    Examples:
        >>> report = detect_linear_dependence([r, g, yellow])
        >>> report.rank, report.dependent[0].coefficients
        (2, (1.0, 1.0))
    """
    if len(vectors) < 2:
        raise TooFewVectors(f"线性相关检测至少需要 2 个向量，得到 {len(vectors)} 个")
    M = _numeric_matrix(vectors)
    peak = float(np.max(np.abs(M))) if M.size else 0.0
    threshold = tol * peak if peak > 0 else tol

    echelon: List[Tuple[int, np.ndarray]] = []     # (主元列, 阶梯行)
    independent: List[int] = []
    dependent: List[Dependency] = []

    for i, row in enumerate(M):
        remainder = row.copy()
        for pivot, basis_row in echelon:
            if remainder[pivot] != 0.0:
                remainder -= (remainder[pivot] / basis_row[pivot]) * basis_row
            remainder[pivot] = 0.0
        if float(np.max(np.abs(remainder))) > threshold:
            echelon.append((int(np.argmax(np.abs(remainder))), remainder))
            independent.append(i)
            continue

        if independent:
            basis = M[independent]
            coefficients, *_ = np.linalg.lstsq(basis.T, row, rcond=None)
            residual = float(np.linalg.norm(basis.T @ coefficients - row))
        else:
            coefficients, residual = np.zeros(0), float(np.linalg.norm(row))
        dependent.append(Dependency(i, tuple(independent), tuple(float(c) for c in coefficients), residual))
        logger.debug(f"向量 {i} 可由 {independent} 线性表示，残差 {residual:g}")

    rank = len(independent)
    logger.info(f"✅ {len(vectors)} 个向量的秩为 {rank}，{len(dependent)} 个线性相关")
    return DependenceReport(rank, dependent, threshold * math.sqrt(M.shape[1]))


def express_as_combination(target: OntVector, candidates: Sequence[OntVector],
                           tol: float = DEPENDENCE_TOLERANCE) -> Combination:
    """
    把目标向量表示为候选向量的线性组合（最小二乘）

    残差范数 <= tol × max(1, ‖target‖) 时成功。

    Raises:
        InvalidArgument: 候选向量为空
        NonNumericDimension: 模式含非数值维度
        NotInSpan: 目标不在候选向量张成的空间内（携带残差）

    Examples:
        >>> express_as_combination(yellow, [r, g]).coefficients
        (1.0, 1.0)
        >>> express_as_combination(e3, [e1, e2])      # NotInSpan, residual 1.0
    """
    if not candidates:
        raise InvalidArgument("候选向量不能为空")
    M = _numeric_matrix([target] + list(candidates))
    t, C = M[0], M[1:]
    coefficients, *_ = np.linalg.lstsq(C.T, t, rcond=None)
    residual = float(np.linalg.norm(C.T @ coefficients - t))
    coefficients = tuple(float(c) for c in coefficients)
    if residual > tol * max(1.0, float(np.linalg.norm(t))):
        raise NotInSpan(residual, coefficients)
    return Combination(coefficients, residual)


# ========== 概率存在函数 ==========

class Partition(NamedTuple):
    """单个维度的分箱：数值维度为箱边界，分类/布尔维度为取值列表"""
    dim: str
    edges: Optional[Tuple[float, ...]]
    values: Optional[Tuple[Any, ...]]

    @property
    def size(self) -> int:
        return len(self.edges) - 1 if self.edges is not None else len(self.values)


class ProbabilityLookup(NamedTuple):
    probability: float
    clipped: bool                     # 坐标越出分箱范围，按最近的边缘箱计算


@dataclass(frozen=True, eq=False)
class ProbabilisticFOE:
    """
    概率存在函数 p(v 存在) = 所在格子的概率

    Attributes:
        schema: 所属模式
        partitions: 每个维度的分箱
        counts: 每个格子的成员数
        probabilities: 每个格子的概率（和为 1）
        smoothing: 拉普拉斯平滑常数
        total: 建模时的成员数 N
    """

    schema: DomainSchema
    partitions: Tuple[Partition, ...]
    counts: np.ndarray
    probabilities: np.ndarray
    smoothing: float
    total: int

    @property
    def cells(self) -> int:
        return int(self.probabilities.size)


def _partition(dim: Dimension, values: List[Any], bins: int) -> Partition:
    if dim.kind is QualeKind.CATEGORICAL:
        return Partition(dim.name, None, tuple(dim.values))
    if dim.kind is QualeKind.BOOLEAN:
        return Partition(dim.name, None, (False, True))
    lo, hi = float(min(values)), float(max(values))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return Partition(dim.name, tuple(float(e) for e in np.linspace(lo, hi, bins + 1)), None)


def _partition_size(dim: Dimension, bins: int) -> int:
    if dim.kind is QualeKind.CATEGORICAL:
        return len(dim.values)
    if dim.kind is QualeKind.BOOLEAN:
        return 2
    return bins


def _cell_index(partition: Partition, value: Any) -> Tuple[int, bool]:
    """坐标所在的箱号；越界时夹到边缘箱并返回 clipped=True。最后一个箱右闭。"""
    if partition.edges is None:
        return partition.values.index(value), False
    edges = partition.edges
    x = float(value)
    clipped = x < edges[0] or x > edges[-1]
    i = int(np.searchsorted(edges, x, side="right")) - 1
    return min(max(i, 0), len(edges) - 2), clipped


def estimate_probability_model(existence: ExistenceSet, bins_per_dim: int = DEFAULT_BINS,
                               smoothing: float = DEFAULT_SMOOTHING) -> ProbabilisticFOE:
    """
    估计概率存在函数

    数值维度在 [观测最小值, 观测最大值] 上等宽分 bins_per_dim 个箱（最小值等于最大值时
    区间向两侧各扩 0.5）；格子概率 = (计数 + s) / (N + s × 格子数)。

    Raises:
        EmptyExistenceSet: 存在集为空
        InvalidArgument: bins_per_dim < 1 或 smoothing < 0

    Examples:
        >>> model = estimate_probability_model(grid_4x4, bins_per_dim=4)
        >>> model.probabilities.min() == model.probabilities.max()
        True
    """
    if len(existence) == 0:
        raise EmptyExistenceSet("存在集为空，无法估计概率模型")
    if isinstance(bins_per_dim, bool) or not isinstance(bins_per_dim, int) or bins_per_dim < 1:
        raise InvalidArgument(f"每维分箱数必须是正整数: {bins_per_dim!r}")
    if not isinstance(smoothing, (int, float)) or not math.isfinite(smoothing) or smoothing < 0:
        raise InvalidArgument(f"平滑常数必须是非负有限数值: {smoothing!r}")

    schema = existence.schema
    cells = math.prod(_partition_size(dim, bins_per_dim) for dim in schema.dims)
    if cells > MAX_PROBABILITY_CELLS:
        raise InvalidArgument(f"直方图共 {cells} 个格子，超过上限 {MAX_PROBABILITY_CELLS}，"
                              f"请减少每维分箱数或先投影到更少的维度")
    partitions = tuple(
        _partition(dim, [m.coords[pos] for m in existence.members], bins_per_dim)
        for pos, dim in enumerate(schema.dims)
    )
    counts = np.zeros(tuple(p.size for p in partitions), dtype=np.int64)
    for m in existence.members:
        counts[tuple(_cell_index(p, c)[0] for p, c in zip(partitions, m.coords))] += 1

    total = len(existence)
    smoothing = float(smoothing)
    probabilities = (counts + smoothing) / (total + smoothing * counts.size)
    if abs(float(probabilities.sum()) - 1.0) > PROBABILITY_SUM_TOLERANCE * counts.size:
        logger.warning(f"⚠️  格子概率之和偏离 1: {float(probabilities.sum())!r}")
    logger.info(f"✅ 概率模型: {total} 个成员，{counts.size} 个格子，平滑 {smoothing:g}")
    return ProbabilisticFOE(schema, partitions, counts, probabilities, smoothing, total)


def probability_of(model: ProbabilisticFOE, v: OntVector) -> ProbabilityLookup:
    """
    v 所在格子的概率；越出分箱范围的坐标按最近的边缘箱计算并标记 clipped

    Raises:
        SchemaMismatch: v 的模式与模型不同
    """
    if v.schema != model.schema:
        raise SchemaMismatch(f"向量模式 {v.schema.name} 与模型模式 {model.schema.name} 不一致")
    v = make_vector(model.schema, v.coords)
    index = []
    clipped = False
    for p, c in zip(model.partitions, v.coords):
        i, out = _cell_index(p, c)
        index.append(i)
        clipped = clipped or out
    if clipped:
        logger.warning(f"⚠️  向量 {v} 越出分箱范围，按边缘格子计算")
    probability = float(model.probabilities[tuple(index)])
    return ProbabilityLookup(min(max(probability, 0.0), 1.0), clipped)


# ========== 模型文件 ==========

def model_to_dict(model: ProbabilisticFOE) -> Dict[str, Any]:
    return {
        "schema": schema_to_dict(model.schema),
        "partitions": [
            {"dim": p.dim, "edges": list(p.edges)} if p.edges is not None
            else {"dim": p.dim, "values": list(p.values)}
            for p in model.partitions
        ],
        "smoothing": model.smoothing,
        "total": model.total,
        "counts": model.counts.tolist(),
        "probabilities": model.probabilities.tolist(),
    }


def model_from_dict(data: Dict[str, Any]) -> ProbabilisticFOE:
    """
    从 JSON 结构还原模型，概率原样使用（不重新计算），保证查询结果逐位一致
    """
    try:
        schema = schema_from_dict(data["schema"])
        partitions = tuple(
            Partition(p["dim"], tuple(float(e) for e in p["edges"]), None) if "edges" in p
            else Partition(p["dim"], None, tuple(p["values"]))
            for p in data["partitions"]
        )
        cells = math.prod(p.size for p in partitions)
        if cells > MAX_PROBABILITY_CELLS:
            raise ParseError(f"概率模型声明了 {cells} 个格子，超过上限 {MAX_PROBABILITY_CELLS}")
        counts = np.asarray(data["counts"], dtype=np.int64)
        probabilities = np.asarray(data["probabilities"], dtype=np.float64)
        smoothing = float(data["smoothing"])
        total = int(data["total"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"概率模型 JSON 结构不完整: {e}")
    if [p.dim for p in partitions] != list(schema.dim_names):
        raise ParseError("概率模型的分箱维度与模式不一致")
    shape = tuple(p.size for p in partitions)
    if counts.shape != shape or probabilities.shape != shape:
        raise ParseError(f"概率模型的格子形状 {probabilities.shape} 与分箱 {shape} 不一致")
    return ProbabilisticFOE(schema, partitions, counts, probabilities, smoothing, total)


def save_model(model: ProbabilisticFOE, path: str) -> None:
    atomic_write_text(path, json.dumps(model_to_dict(model), ensure_ascii=False) + "\n")
    logger.info(f"✅ 概率模型已保存到 {path}")


def load_model(path: str) -> ProbabilisticFOE:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"概率模型文件 {path} 不是合法 JSON: {e.msg}", line=e.lineno)
    return model_from_dict(data)


def infer_numeric_schema(names: Sequence[str], name: str = "vectors") -> DomainSchema:
    """由向量文件表头推断全连续维度模式"""
    return define_schema(name, [Dimension(n) for n in names])
