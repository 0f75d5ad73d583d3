# -*- coding: utf-8 -*-
"""
领域模式（基）与向量运算模块

DomainSchema 是一组有序、具名、带类型的质量维度（基向量），
OntVector 是对齐到某个模式的一个点；加法、数乘、投影满足向量空间公理。
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_TOLERANCE, INT64_MAX, INT64_MIN
from utils.file_writer import atomic_write_text
from utils.tolerance import is_close

from .errors import (
    ArityMismatch,
    DuplicateDimensionName,
    EmptyProjection,
    EmptySchema,
    InvalidDimension,
    KindMismatch,
    NonArithmeticDimension,
    NonIntegralScalarOnIntegerDimension,
    NonNumericDimension,
    OutOfBounds,
    ParseError,
    SchemaMismatch,
    UnknownDimension,
)

logger = logging.getLogger(__name__)

Coord = Union[float, int, str, bool]


class QualeKind(str, Enum):
    """维度取值域（quale）的种类"""

    CONTINUOUS = "continuous"
    INTEGER = "integer"
    CATEGORICAL = "categorical"
    BOOLEAN = "boolean"

    @property
    def is_numeric(self) -> bool:
        return self in (QualeKind.CONTINUOUS, QualeKind.INTEGER)


@dataclass(frozen=True)
class Dimension:
    """
    质量维度（一个基向量）

    Attributes:
        name: 维度名（模式内唯一的标识符）
        kind: 取值种类
        unit: 单位说明，可为空
        bounds: 数值维度的闭区间 (lo, hi)，可选
        values: 分类维度的有序取值列表
    """

    name: str
    kind: QualeKind = QualeKind.CONTINUOUS
    unit: str = ""
    bounds: Optional[Tuple[float, float]] = None
    values: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.isidentifier():
            raise InvalidDimension(f"维度名必须是非空标识符: {self.name!r}")

        try:
            kind = QualeKind(self.kind)
        except ValueError:
            raise InvalidDimension(f"未知的维度种类: {self.kind!r}（维度 {self.name}）")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "unit", self.unit or "")

        if self.bounds is not None:
            if not kind.is_numeric:
                raise InvalidDimension(f"只有数值维度可以设置区间: {self.name}")
            try:
                lo, hi = (float(b) for b in self.bounds)
            except (TypeError, ValueError):
                raise InvalidDimension(f"区间必须是两个数值 [lo, hi]: {self.name} {self.bounds!r}")
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise InvalidDimension(f"区间下界必须 <= 上界: {self.name} {self.bounds}")
            object.__setattr__(self, "bounds", (lo, hi))

        if kind is QualeKind.CATEGORICAL:
            values = tuple(str(v) for v in (self.values or ()))
            if not values:
                raise InvalidDimension(f"分类维度的取值列表不能为空: {self.name}")
            if len(set(values)) != len(values):
                raise InvalidDimension(f"分类维度的取值列表有重复: {self.name}")
            object.__setattr__(self, "values", values)
        elif self.values:
            raise InvalidDimension(f"只有分类维度可以设置取值列表: {self.name}")
        else:
            object.__setattr__(self, "values", None)

    @property
    def is_numeric(self) -> bool:
        return self.kind.is_numeric


@dataclass(frozen=True)
class DomainSchema:
    """
    领域模式（基 B_D）

    Attributes:
        name: 模式名
        dims: 有序维度列表（顺序即基的顺序）
        base: 诱导子模式所属的根模式名；根模式为空串
    """

    name: str
    dims: Tuple[Dimension, ...]
    base: str = ""

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims:
            raise EmptySchema(f"模式至少需要一个维度: {self.name}")
        seen = set()
        for dim in dims:
            if dim.name in seen:
                raise DuplicateDimensionName(f"维度名重复: {dim.name}")
            seen.add(dim.name)
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.dims)

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {dim.name: i for i, dim in enumerate(self.dims)}

    @property
    def dim_names(self) -> Tuple[str, ...]:
        return tuple(dim.name for dim in self.dims)

    @property
    def root_name(self) -> str:
        return self.base or self.name

    @property
    def is_all_numeric(self) -> bool:
        return all(dim.is_numeric for dim in self.dims)

    def has_dim(self, name: str) -> bool:
        return name in self._positions

    def index_of(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise UnknownDimension(f"模式 {self.name} 中没有维度: {name}")

    def dimension(self, name: str) -> Dimension:
        return self.dims[self.index_of(name)]

    def numeric_dimension(self, name: str) -> Dimension:
        """按名取维度，并要求是数值维度"""
        dim = self.dimension(name)
        if not dim.is_numeric:
            raise NonNumericDimension(f"维度 {name} 不是数值维度（{dim.kind.value}）")
        return dim


@dataclass(frozen=True)
class OntVector:
    """
    本体中的一个点

    直接构造只检查坐标个数；经 make_vector 构造的向量额外通过了种类和区间校验。
    算术结果可以越出声明的区间（区间约束的是"断言存在"，不是向量空间的封闭性）。
    """

    schema: DomainSchema
    coords: Tuple[Coord, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) != len(self.schema):
            raise ArityMismatch(
                f"坐标个数 {len(coords)} 与模式 {self.schema.name} 的维度数 {len(self.schema)} 不一致"
            )
        object.__setattr__(self, "coords", coords)

    def __getitem__(self, name: str) -> Coord:
        return self.coords[self.schema.index_of(name)]

    def as_dict(self) -> Dict[str, Coord]:
        return dict(zip(self.schema.dim_names, self.coords))

    def as_array(self) -> np.ndarray:
        """数值坐标转为 float64 数组（要求全部维度为数值）"""
        for dim in self.schema.dims:
            if not dim.is_numeric:
                raise NonNumericDimension(f"维度 {dim.name} 不是数值维度（{dim.kind.value}）")
        return np.array([float(c) for c in self.coords], dtype=np.float64)

    def __str__(self) -> str:
        return "[" + ",".join(format_coord(c) for c in self.coords) + "]"


# ========== 模式定义 ==========

def define_schema(name: str, dims: Sequence[Union[Dimension, Mapping[str, Any]]]) -> DomainSchema:
    """
    定义领域模式

    Args:
        name: 模式名
        dims: 维度列表（Dimension 或 schema JSON 中的维度字典），顺序即基的顺序

    Returns:
        DomainSchema: 新模式

    Raises:
        EmptySchema: 维度列表为空
        DuplicateDimensionName: 维度名重复

    Examples:
        >>> shelves = define_schema("shelves", [Dimension("height", unit="m"), Dimension("width", unit="m")])
        >>> len(shelves)
        2
    """
    if not name:
        raise InvalidDimension("模式名不能为空")
    built = [d if isinstance(d, Dimension) else _dimension_from_dict(d) for d in dims]
    return DomainSchema(name=name, dims=tuple(built))


def _dimension_from_dict(data: Mapping[str, Any]) -> Dimension:
    if not isinstance(data, Mapping):
        raise ParseError(f"维度定义必须是 JSON 对象: {data!r}")
    if "name" not in data:
        raise InvalidDimension(f"维度定义缺少 name 字段: {dict(data)}")
    bounds = data.get("bounds")
    values = data.get("values")
    if bounds is not None and (not isinstance(bounds, (list, tuple)) or len(bounds) != 2):
        raise ParseError(f"维度 {data['name']!r} 的 bounds 必须是 [lo, hi] 数组: {bounds!r}")
    if values is not None and not isinstance(values, (list, tuple)):
        raise ParseError(f"维度 {data['name']!r} 的 values 必须是数组: {values!r}")
    return Dimension(
        name=data["name"],
        kind=data.get("kind", "continuous"),
        unit=data.get("unit") or "",
        bounds=tuple(bounds) if bounds is not None else None,
        values=tuple(values) if values is not None else None,
    )


# ========== 坐标校验 ==========

def _to_int64(value: int, dim: Dimension) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise OutOfBounds(f"维度 {dim.name} 的整数值超出 64 位范围: {value}")
    return value


def validate_coord(dim: Dimension, value: Any) -> Coord:
    """
    按维度种类校验并规范化一个坐标

    Returns:
        规范化后的坐标：continuous -> float，integer -> int，categorical -> str，boolean -> bool

    Raises:
        KindMismatch: 值的类型与维度种类不符
        OutOfBounds: 数值越出声明区间
    """
    kind = dim.kind

    if kind is QualeKind.BOOLEAN:
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        raise KindMismatch(f"维度 {dim.name} 需要布尔值，得到 {value!r}")

    if kind is QualeKind.CATEGORICAL:
        if not isinstance(value, str):
            raise KindMismatch(f"维度 {dim.name} 需要分类标签，得到 {value!r}")
        if value not in dim.values:
            raise KindMismatch(f"维度 {dim.name} 的取值 {value!r} 不在 {list(dim.values)} 中")
        return value

    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise KindMismatch(f"维度 {dim.name} 需要数值，得到 {value!r}")

    if kind is QualeKind.INTEGER:
        if isinstance(value, (int, np.integer)):
            coord: Coord = _to_int64(int(value), dim)
        else:
            number = float(value)
            if not math.isfinite(number) or not number.is_integer():
                raise KindMismatch(f"维度 {dim.name} 需要整数，得到 {value!r}")
            coord = _to_int64(int(number), dim)
    else:
        coord = float(value)
        if not math.isfinite(coord):
            raise KindMismatch(f"维度 {dim.name} 需要有限实数，得到 {value!r}")

    if dim.bounds is not None:
        lo, hi = dim.bounds
        if coord < lo or coord > hi:
            raise OutOfBounds(f"维度 {dim.name} 的取值 {coord} 越出区间 [{lo}, {hi}]")
    return coord


def make_vector(schema: DomainSchema, coords: Sequence[Any]) -> OntVector:
    """
    构造并校验向量

    Raises:
        ArityMismatch: 坐标个数不符
        KindMismatch: 坐标种类不符
        OutOfBounds: 越出区间

    Examples:
        >>> make_vector(shapes, [4, 0, 0, 255])      # 蓝色矩形
        >>> make_vector(shelves, [1.8])              # ArityMismatch
    """
    coords = list(coords)
    if len(coords) != len(schema):
        raise ArityMismatch(
            f"坐标个数 {len(coords)} 与模式 {schema.name} 的维度数 {len(schema)} 不一致"
        )
    return OntVector(schema, tuple(validate_coord(dim, value) for dim, value in zip(schema.dims, coords)))


def vector_from_mapping(schema: DomainSchema, record: Mapping[str, Any]) -> OntVector:
    """按维度名取值构造向量（JSON Lines / 向量文件）"""
    missing = [name for name in schema.dim_names if name not in record]
    extra = [name for name in record if not schema.has_dim(name)]
    if missing or extra:
        raise ArityMismatch(f"记录字段与模式不一致，缺少 {missing}，多出 {extra}")
    return make_vector(schema, [record[name] for name in schema.dim_names])


def parse_coord(dim: Dimension, text: str) -> Coord:
    """
    把文本解析为维度对应类型的坐标（CSV 单元格与命令行输入）

    布尔值接受 true/false/1/0（不区分大小写），分类值按原样作为标签。
    只做文本到类型的转换，种类与区间校验由 validate_coord 负责。
    """
    text = str(text).strip()
    if dim.kind is QualeKind.BOOLEAN:
        lowered = text.lower()
        if lowered in ("true", "1"):
            return True
        if lowered in ("false", "0"):
            return False
        raise KindMismatch(f"维度 {dim.name} 需要 true/false，得到 {text!r}")
    if dim.kind is QualeKind.CATEGORICAL:
        return text
    if dim.kind is QualeKind.INTEGER:
        try:
            return int(text)
        except ValueError:
            pass
    try:
        return float(text)
    except ValueError:
        raise KindMismatch(f"维度 {dim.name} 需要数值，得到 {text!r}")


def format_coord(value: Coord) -> str:
    """坐标序列化为文本：浮点数使用 repr 保证往返精确，布尔值为 true/false"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ========== 向量算术 ==========

def require_same_schema(u: OntVector, v: OntVector) -> None:
    if u.schema != v.schema:
        raise SchemaMismatch(f"向量属于不同模式: {u.schema.name} / {v.schema.name}")


def _require_arithmetic(schema: DomainSchema) -> None:
    for dim in schema.dims:
        if not dim.is_numeric:
            raise NonArithmeticDimension(f"维度 {dim.name}（{dim.kind.value}）不支持算术运算")


def _combine(dim: Dimension, value: float) -> Coord:
    if dim.kind is QualeKind.INTEGER:
        return _to_int64(int(value), dim)
    return float(value)


def add(u: OntVector, v: OntVector) -> OntVector:
    """
    逐坐标相加，结果不受区间约束

    Raises:
        SchemaMismatch: 两个向量模式不同
        NonArithmeticDimension: 模式含分类或布尔维度
    """
    require_same_schema(u, v)
    _require_arithmetic(u.schema)
    return OntVector(u.schema, tuple(_combine(d, a + b) for d, a, b in zip(u.schema.dims, u.coords, v.coords)))


def negate(v: OntVector) -> OntVector:
    """加法逆元"""
    _require_arithmetic(v.schema)
    return OntVector(v.schema, tuple(_combine(d, -a) for d, a in zip(v.schema.dims, v.coords)))


def subtract(u: OntVector, v: OntVector) -> OntVector:
    return add(u, negate(v))


def zero_vector(schema: DomainSchema) -> OntVector:
    """加法单位元"""
    _require_arithmetic(schema)
    return OntVector(schema, tuple(0 if d.kind is QualeKind.INTEGER else 0.0 for d in schema.dims))


def scale(a: float, v: OntVector) -> OntVector:
    """
    数乘

    整数维度构成模（不是域）：对含整数维度的向量只接受整数标量，非整数直接拒绝而不是舍入。

    Raises:
        NonArithmeticDimension: 模式含分类或布尔维度
        NonIntegralScalarOnIntegerDimension: 整数维度遇到非整数标量
    """
    _require_arithmetic(v.schema)
    if isinstance(a, bool) or not isinstance(a, (int, float, np.integer, np.floating)) or not math.isfinite(a):
        raise KindMismatch(f"标量必须是有限数值: {a!r}")
    has_integer = any(d.kind is QualeKind.INTEGER for d in v.schema.dims)
    if has_integer and not float(a).is_integer():
        raise NonIntegralScalarOnIntegerDimension(f"整数维度不能乘以非整数标量 {a}")

    coords = []
    for dim, x in zip(v.schema.dims, v.coords):
        if dim.kind is QualeKind.INTEGER:
            coords.append(_to_int64(int(a) * x, dim))
        else:
            coords.append(float(a) * x)
    return OntVector(v.schema, tuple(coords))


def coord_equal(dim: Dimension, a: Coord, b: Coord, tol: float = DEFAULT_TOLERANCE) -> bool:
    """单个坐标的相等判定：数值按容差，分类与布尔按同一性"""
    if dim.is_numeric:
        return is_close(float(a), float(b), tol)
    return a == b


def coords_equal(u: OntVector, v: OntVector, tol: float = DEFAULT_TOLERANCE) -> bool:
    """向量在容差下相等（不可分辨者同一）"""
    if u.schema != v.schema:
        return False
    return all(coord_equal(d, a, b, tol) for d, a, b in zip(u.schema.dims, u.coords, v.coords))


def sort_key(v: OntVector) -> Tuple:
    """
    字典序比较键：数值按大小，分类按取值列表中的位置，布尔 False < True
    """
    key = []
    for dim, value in zip(v.schema.dims, v.coords):
        if dim.kind is QualeKind.CATEGORICAL:
            key.append(dim.values.index(value))
        else:
            key.append(float(value))
    return tuple(key)


# ========== 投影 ==========

@lru_cache(maxsize=256)
def induced_schema(schema: DomainSchema, names: Tuple[str, ...]) -> DomainSchema:
    """
    诱导子模式（按父模式顺序排列的维度子集），同一子集重复使用缓存结果

    选中全部维度时返回父模式本身。子模式命名为 根模式名[维度,...]，
    因此对子模式再投影与直接从根模式投影得到同一个模式。
    """
    if not names:
        raise EmptyProjection("投影维度不能为空")
    wanted = set(names)
    for name in names:
        schema.index_of(name)
    dims = tuple(d for d in schema.dims if d.name in wanted)
    if len(dims) == len(schema):
        return schema
    root = schema.root_name
    return DomainSchema(name=f"{root}[{','.join(d.name for d in dims)}]", dims=dims, base=root)


def project(v: OntVector, dims: Iterable[str]) -> OntVector:
    """
    把向量限制到维度子集上（低维子空间 / 局部基）

    Raises:
        UnknownDimension: 维度不在模式中
        EmptyProjection: 维度子集为空

    Examples:
        >>> project(blue_rectangle, {"redness", "greenness", "blueness"}).coords
        (0.0, 0.0, 255.0)
    """
    names = list(dict.fromkeys(dims))
    if not names:
        raise EmptyProjection("投影维度不能为空")
    for name in names:
        v.schema.index_of(name)
    wanted = set(names)
    ordered = tuple(n for n in v.schema.dim_names if n in wanted)
    sub = induced_schema(v.schema, ordered)
    if sub is v.schema:
        return v
    return OntVector(sub, tuple(v.coords[v.schema.index_of(n)] for n in ordered))


# ========== 模式文件 ==========

def schema_to_dict(schema: DomainSchema) -> Dict[str, Any]:
    """模式转为 JSON 结构（dims 的顺序即基的顺序）"""
    return {
        "name": schema.name,
        "dims": [
            {
                "name": d.name,
                "kind": d.kind.value,
                "unit": d.unit,
                "bounds": list(d.bounds) if d.bounds is not None else None,
                "values": list(d.values) if d.values is not None else None,
            }
            for d in schema.dims
        ],
    }


def schema_from_dict(data: Mapping[str, Any]) -> DomainSchema:
    if not isinstance(data, Mapping) or "dims" not in data:
        raise ParseError("模式 JSON 缺少 dims 字段")
    if not isinstance(data["dims"], list):
        raise ParseError(f"模式 JSON 的 dims 必须是数组: {data['dims']!r}")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ParseError(f"模式名必须是字符串: {name!r}")
    return define_schema(name, list(data["dims"]))


def load_schema(path: str) -> DomainSchema:
    """
    从 JSON 文件加载模式

    Raises:
        ParseError: JSON 格式错误
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"模式文件 {path} 不是合法 JSON: {e.msg}", line=e.lineno)
    schema = schema_from_dict(data)
    logger.debug(f"已加载模式 {schema.name}（{len(schema)} 维）: {path}")
    return schema


def save_schema(schema: DomainSchema, path: str) -> None:
    atomic_write_text(path, json.dumps(schema_to_dict(schema), ensure_ascii=False, indent=2) + "\n")


def numeric_dims(schema: DomainSchema) -> List[str]:
    return [d.name for d in schema.dims if d.is_numeric]
