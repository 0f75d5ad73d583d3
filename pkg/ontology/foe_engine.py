# -*- coding: utf-8 -*-
"""
存在函数（FOE）引擎

绑定参数、求值、取外延，拟合区间常量函数，并按微连续性区分持续体与事件体。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Mapping, NamedTuple, Tuple

from config import DEFAULT_TOLERANCE, GAP_FACTOR
from utils.gap_checker import Gap, analyze_gaps, median_spacing
from utils.tolerance import is_close, is_less_or_close

from .errors import (
    EmptyExistenceSet,
    EmptyExtension,
    KindMismatch,
    MissingParameter,
    SchemaMismatch,
    UnknownParameter,
)
from .existence_store import ExistenceSet
from .foe_parser import Compare, FunctionClass, Name, Not, Num, Pow, parse_foe
from .schema_core import DomainSchema, OntVector, sort_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FOEInstance:
    """
    参数已全部绑定的存在函数

    Attributes:
        cls: 所属函数类
        bindings: (参数名, 值) 按参数槽顺序排列
    """

    cls: FunctionClass
    bindings: Tuple[Tuple[str, float], ...]

    @property
    def values(self) -> Dict[str, float]:
        return dict(self.bindings)

    def __call__(self, v: OntVector, tol: float = DEFAULT_TOLERANCE) -> bool:
        return evaluate(self, v, tol)

    def __str__(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.bindings)
        return f"{self.cls.name}({args})"


class Continuity(str, Enum):
    ENDURANT = "Endurant"
    PERDURANT = "Perdurant"


class ContinuityVerdict(NamedTuple):
    label: Continuity
    witness: Gap                      # 事件体：超过阈值的最大缺口；持续体：最大间隔
    sampling_interval: float          # 推断的中位采样间隔
    threshold: float


def bind(cls: FunctionClass, values: Mapping[str, Any]) -> FOEInstance:
    """
    绑定全部参数

    Raises:
        MissingParameter: 有参数槽未给出
        UnknownParameter: 给出了不存在的参数
        KindMismatch: 参数值不是有限数值

    Examples:
        >>> bind(sphere, {"a": 0, "b": 0, "c": 0, "r": 1})
    """
    missing = [i for i, p in enumerate(cls.params) if p not in values]
    if missing:
        names = ", ".join(cls.params[i] for i in missing)
        position = cls.param_positions[missing[0]] if cls.param_positions else -1
        raise MissingParameter(f"函数类 {cls.name} 需要 {len(cls.params)} 个参数，缺少: {names}", position)
    extra = sorted(k for k in values if k not in cls.params)
    if extra:
        raise UnknownParameter(f"函数类 {cls.name} 只有 {len(cls.params)} 个参数，没有: {', '.join(extra)}",
                               cls.params_end)

    bindings = []
    for p in cls.params:
        value = values[p]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise KindMismatch(f"参数 {p} 必须是有限数值，得到 {value!r}")
        bindings.append((p, float(value)))
    return FOEInstance(cls, tuple(bindings))


# ========== 求值 ==========

def _power(base: float, exponent: int) -> float:
    try:
        return base ** exponent
    except OverflowError:
        return math.copysign(math.inf, base) if exponent % 2 else math.inf


def _arith(node, coords: Mapping[str, Any], params: Mapping[str, float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        if node.kind == "param":
            return params[node.ident]
        return float(coords[node.ident])        # 布尔值按 1/0 参与 '='
    if isinstance(node, Pow):
        return _power(_arith(node.base, coords, params), node.exponent)
    left = _arith(node.left, coords, params)
    right = _arith(node.right, coords, params)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def _truth(node, coords: Mapping[str, Any], params: Mapping[str, float], tol: float) -> bool:
    if isinstance(node, Compare):
        left = _arith(node.left, coords, params)
        right = _arith(node.right, coords, params)
        if node.op == "<=":
            return is_less_or_close(left, right, tol)
        if node.op == ">=":
            return is_less_or_close(right, left, tol)
        return is_close(left, right, tol)
    if isinstance(node, Not):
        return not _truth(node.operand, coords, params, tol)
    if node.op == "AND":
        return all(_truth(c, coords, params, tol) for c in node.operands)
    return any(_truth(c, coords, params, tol) for c in node.operands)


def _require_dims(instance: FOEInstance, schema: DomainSchema) -> None:
    missing = sorted(d for d in instance.cls.dims if not schema.has_dim(d))
    if missing:
        raise SchemaMismatch(f"模式 {schema.name} 缺少函数 {instance.cls.name} 引用的维度: {', '.join(missing)}")
    for name in instance.cls.dims:
        if schema.dimension(name).kind is not instance.cls.schema.dimension(name).kind:
            raise SchemaMismatch(f"维度 {name} 在模式 {schema.name} 中的种类与函数定义不一致")


def evaluate(instance: FOEInstance, v: OntVector, tol: float = DEFAULT_TOLERANCE) -> bool:
    """
    计算 v 是否满足存在函数（比较使用引擎容差）

    Raises:
        SchemaMismatch: v 的模式不含表达式引用的维度

    Examples:
        >>> evaluate(johns_weight, make_vector(weight_schema, [55, 68]))
        True
    """
    _require_dims(instance, v.schema)
    return _truth(instance.cls.body, v.as_dict(), instance.values, tol)


def extension(instance: FOEInstance, existence: ExistenceSet, tol: float = DEFAULT_TOLERANCE) -> ExistenceSet:
    """
    外延：存在集中满足函数的成员（保留来源标签）

    Raises:
        SchemaMismatch: 存在集的模式不含表达式引用的维度
    """
    _require_dims(instance, existence.schema)
    params = instance.values
    keep = [_truth(instance.cls.body, m.as_dict(), params, tol) for m in existence.members]
    return existence.subset(keep)


# ========== 区间常量拟合 ==========

def interval_constant_class(schema: DomainSchema, value_dim: str, axis_dim: str) -> FunctionClass:
    """
    区间常量函数类: axis 在 [lo, hi] 内且 value 恒为 val

    参数名与维度冲突时加 p_ 前缀。

    Raises:
        UnknownDimension: 维度不存在
        NonNumericDimension: 维度不是数值维度
    """
    schema.numeric_dimension(value_dim)
    schema.numeric_dimension(axis_dim)

    def slot(name: str) -> str:
        while schema.has_dim(name):
            name = f"p_{name}"
        return name

    lo, hi, val = slot("lo"), slot("hi"), slot("val")
    text = (f"class interval_constant({lo}, {hi}, {val}): "
            f"({axis_dim} >= {lo}) AND ({axis_dim} <= {hi}) AND ({value_dim} = {val})")
    return parse_foe(text, schema)


def fit_constant_interval(existence: ExistenceSet, value_dim: str, axis_dim: str,
                          gap_factor: float = GAP_FACTOR,
                          tol: float = DEFAULT_TOLERANCE) -> List[FOEInstance]:
    """
    沿 axis_dim 找出 value_dim 保持常量（容差内）的极大连续段，每段拟合为一个区间常量实例

    以下任一情况断开当前段：取值与段首不同，或相邻轴间隔超过 gap_factor × 中位采样间隔。

    Args:
        existence: 存在集
        value_dim: 取值维度（如 weight）
        axis_dim: 轴维度（如 time）
        gap_factor: 缺口阈值倍数
        tol: 取值相等容差

    Returns:
        List[FOEInstance]: 按轴顺序排列的实例，参数为 (lo, hi, val)

    Raises:
        UnknownDimension / NonNumericDimension: 维度不合法
        EmptyExistenceSet: 存在集为空

    Examples:
        >>> # [50,68],[51,68],...,[60,68]
        >>> fit_constant_interval(weights, "weight", "time")
        [interval_constant(lo=50, hi=60, val=68)]
    """
    cls = interval_constant_class(existence.schema, value_dim, axis_dim)
    if len(existence) == 0:
        raise EmptyExistenceSet("存在集为空，无法拟合")

    ax = existence.schema.index_of(axis_dim)
    vx = existence.schema.index_of(value_dim)
    points = sorted(
        ((float(m.coords[ax]), float(m.coords[vx]), sort_key(m)) for m in existence.members),
    )
    threshold = gap_factor * median_spacing([p[0] for p in points])

    runs: List[List[Tuple[float, float]]] = []
    for axis_value, value, _ in points:
        if runs:
            run = runs[-1]
            last_axis = run[-1][0]
            if is_close(value, run[0][1], tol) and axis_value - last_axis <= threshold:
                run.append((axis_value, value))
                continue
        runs.append([(axis_value, value)])

    lo, hi, val = cls.params
    instances = [bind(cls, {lo: run[0][0], hi: run[-1][0], val: run[0][1]}) for run in runs]
    logger.info(f"✅ 沿 {axis_dim} 拟合出 {len(instances)} 个 {value_dim} 常量区间")
    return instances


# ========== 连续性 ==========

def classify_continuity(existence: ExistenceSet, instance: FOEInstance, axis_dim: str,
                        gap_factor: float = GAP_FACTOR,
                        tol: float = DEFAULT_TOLERANCE) -> ContinuityVerdict:
    """
    按微连续性把函数分类为持续体（Endurant）或事件体（Perdurant）

    外延按 axis_dim 排序后，若没有相邻间隔超过 gap_factor × 中位间隔则为持续体。
    单点外延是事件体，缺口宽度记为无穷大。

    Raises:
        EmptyExtension: 外延为空
        NonNumericDimension: 轴维度不是数值维度

    Examples:
        >>> classify_continuity(clusters, always, "time").witness
        Gap(start=10.0, end=50.0, width=40.0)
    """
    existence.schema.numeric_dimension(axis_dim)
    ext = extension(instance, existence, tol)
    if len(ext) == 0:
        raise EmptyExtension(f"函数 {instance} 在存在集上的外延为空")

    ax = ext.schema.index_of(axis_dim)
    analysis = analyze_gaps([float(m.coords[ax]) for m in ext.members], gap_factor)
    label = Continuity.PERDURANT if analysis.gaps else Continuity.ENDURANT
    logger.debug(f"{instance} 沿 {axis_dim}: {label.value}，最大间隔 {analysis.largest.width}")
    return ContinuityVerdict(label, analysis.largest, analysis.sampling_interval, analysis.threshold)


def compression_ratio(instance: FOEInstance, existence: ExistenceSet, tol: float = DEFAULT_TOLERANCE) -> float:
    """
    压缩比 = 外延大小 × 维度数 / 参数个数（一个概念替代了多少个坐标）

    没有参数的函数类返回 math.inf。

    Raises:
        EmptyExtension: 外延为空

    Examples:
        >>> compression_ratio(johns_weight, weights)    # 11 个成员 × 2 维 / 3 个参数
        7.333333333333333
    """
    size = len(extension(instance, existence, tol))
    if size == 0:
        raise EmptyExtension(f"函数 {instance} 在存在集上的外延为空")
    n_params = len(instance.cls.params)
    if n_params == 0:
        return math.inf
    return size * len(existence.schema) / n_params

