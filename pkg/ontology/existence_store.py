# -*- coding: utf-8 -*-
"""
存在集模块

ExistenceSet 是模式空间中"真实存在"的稀疏有限点集。
快照不可变：insert 返回新版本，旧快照可被并发读取。
"""

import bisect
import logging
import math
from functools import cached_property
from typing import Any, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from config import DEFAULT_TOLERANCE, INDEX_MIN_MEMBERS, SOURCE_COLUMN
from utils.dataset_io import (
    DatasetFormatError,
    RawRecord,
    detect_format,
    read_csv_records,
    read_jsonl_records,
    write_csv_records,
    write_jsonl_records,
)
from utils.tolerance import is_close, search_window

from .errors import (
    EmptyProjection,
    KindMismatch,
    OntologyError,
    ParseError,
    SchemaMismatch,
    ValidationFailure,
)
from .schema_core import (
    DomainSchema,
    OntVector,
    QualeKind,
    coord_equal,
    coords_equal,
    format_coord,
    make_vector,
    parse_coord,
    project,
    validate_coord,
)

logger = logging.getLogger(__name__)


class InsertResult(NamedTuple):
    snapshot: "ExistenceSet"
    collision: Optional[OntVector]    # 与新向量不可分辨的已有成员；None 表示确实新增


class Possibility(NamedTuple):
    """可能存在（◇）的判定结果"""
    possible: bool
    reason: Optional[str]             # 不可能时的错误码，如 KIND_MISMATCH

    def __bool__(self) -> bool:
        return self.possible


class ExistenceSet:
    """
    存在集快照

    成员两两在容差下不可分辨；每个成员都通过了模式校验。
    """

    def __init__(self, schema: DomainSchema, members: Sequence[OntVector] = (),
                 provenance: Optional[Sequence[Optional[str]]] = None,
                 tolerance: float = DEFAULT_TOLERANCE, version: int = 0):
        """
        初始化快照（不做去重，通常应通过 from_vectors / insert 构造）

        Args:
            schema: 所属模式
            members: 成员向量
            provenance: 每个成员的来源标签
            tolerance: 不可分辨判定的容差
            version: 快照版本号
        """
        self.schema = schema
        self.members: Tuple[OntVector, ...] = tuple(members)
        if provenance is None:
            provenance = [None] * len(self.members)
        self.provenance: Tuple[Optional[str], ...] = tuple(provenance)
        self.tolerance = tolerance
        self.version = version

    @classmethod
    def empty(cls, schema: DomainSchema, tolerance: float = DEFAULT_TOLERANCE) -> "ExistenceSet":
        return cls(schema, tolerance=tolerance)

    @classmethod
    def from_vectors(cls, schema: DomainSchema, vectors: Iterable[OntVector],
                     sources: Optional[Iterable[Optional[str]]] = None,
                     tolerance: float = DEFAULT_TOLERANCE) -> "ExistenceSet":
        """
        按顺序批量构造存在集，不可分辨的重复保留第一个

        结果与从空集逐个 insert 相同，但整批共用一个增量维护的排序索引。
        """
        vectors = list(vectors)
        sources = list(sources) if sources is not None else [None] * len(vectors)
        pos = _index_position(schema)
        members: List[OntVector] = []
        provenance: List[Optional[str]] = []
        values: List[float] = []
        order: List[int] = []
        for v, source in zip(vectors, sources):
            checked = _checked(schema, v)
            if pos is None:
                candidates: Iterable[int] = range(len(members))
            else:
                x = float(checked.coords[pos])
                candidates = _window(values, order, x, tolerance)
            duplicate = next((i for i in candidates if coords_equal(members[i], checked, tolerance)), None)
            if duplicate is not None:
                logger.warning(f"⚠️  向量 {checked} 与已有成员 {members[duplicate]} 不可分辨，保留已有成员")
                continue
            if pos is not None:
                k = bisect.bisect_right(values, x)
                values.insert(k, x)
                order.insert(k, len(members))
            members.append(checked)
            provenance.append(source)
        return cls(schema, members, provenance, tolerance=tolerance, version=len(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[OntVector]:
        return iter(self.members)

    def __repr__(self) -> str:
        return f"ExistenceSet(schema={self.schema.name!r}, size={len(self)}, version={self.version})"

    # ========== 成员查询 ==========

    @cached_property
    def _index(self) -> Optional[Tuple[int, List[float], List[int]]]:
        """
        第一个连续维度上的排序索引 (维度位置, 排序后的值, 对应成员下标)

        成员数较少时不建立索引，直接线性扫描。
        """
        pos = _index_position(self.schema)
        if len(self.members) < INDEX_MIN_MEMBERS or pos is None:
            return None
        order = sorted(range(len(self.members)), key=lambda i: self.members[i].coords[pos])
        values = [float(self.members[i].coords[pos]) for i in order]
        logger.debug(f"为维度 {self.schema.dims[pos].name} 建立排序索引（{len(values)} 个成员）")
        return pos, values, order

    def _candidates(self, v: OntVector) -> Iterable[int]:
        index = self._index
        if index is None:
            return range(len(self.members))
        pos, values, order = index
        return _window(values, order, float(v.coords[pos]), self.tolerance)

    def find(self, v: OntVector) -> Optional[int]:
        """返回与 v 不可分辨的成员下标，不存在返回 None"""
        if v.schema != self.schema:
            raise SchemaMismatch(f"向量模式 {v.schema.name} 与存在集模式 {self.schema.name} 不一致")
        for i in self._candidates(v):
            if coords_equal(self.members[i], v, self.tolerance):
                return i
        return None

    def exists(self, v: OntVector) -> bool:
        """
        存在判定：某个成员与 v 在容差下相等

        Raises:
            SchemaMismatch: v 不属于本存在集的模式

        Examples:
            >>> shapes.exists(make_vector(schema, [4, 0, 0, 255]))   # Blue Rectangle exists
            True
        """
        return self.find(v) is not None

    def __contains__(self, v: OntVector) -> bool:
        return self.exists(v)

    def source_of(self, v: OntVector) -> Optional[str]:
        i = self.find(v)
        return self.provenance[i] if i is not None else None

    # ========== 插入 ==========

    def insert_report(self, v: OntVector, source: Optional[str] = None) -> InsertResult:
        """
        插入向量并报告是否与已有成员冲突

        重复（不可分辨）时保留已有成员，返回原快照并给出冲突成员，不报错。

        Raises:
            SchemaMismatch: 模式不一致
            ValidationFailure: 向量未通过模式校验（种类/区间/分类取值）
        """
        checked = _checked(self.schema, v)
        i = self.find(checked)
        if i is not None:
            logger.warning(f"⚠️  向量 {checked} 与已有成员 {self.members[i]} 不可分辨，保留已有成员")
            return InsertResult(self, self.members[i])

        snapshot = ExistenceSet(self.schema, self.members + (checked,), self.provenance + (source,),
                                tolerance=self.tolerance, version=self.version + 1)
        return InsertResult(snapshot, None)

    def insert(self, v: OntVector, source: Optional[str] = None) -> "ExistenceSet":
        """插入向量，返回新快照（重复时返回原快照）"""
        return self.insert_report(v, source).snapshot

    # ========== 子集 ==========

    def subset(self, keep: Sequence[bool]) -> "ExistenceSet":
        """按布尔掩码取子集（成员本就两两可分辨，无需再去重）"""
        members = [m for m, k in zip(self.members, keep) if k]
        sources = [s for s, k in zip(self.provenance, keep) if k]
        return ExistenceSet(self.schema, members, sources, tolerance=self.tolerance, version=self.version)


def _checked(schema: DomainSchema, v: OntVector) -> OntVector:
    """插入前的模式一致性与坐标校验"""
    if v.schema != schema:
        raise SchemaMismatch(f"向量模式 {v.schema.name} 与存在集模式 {schema.name} 不一致")
    try:
        return make_vector(schema, v.coords)
    except OntologyError as e:
        raise ValidationFailure(f"向量 {v} 未通过模式校验: {e.message}", record=list(v.coords))


def _index_position(schema: DomainSchema) -> Optional[int]:
    """排序索引所用的维度：第一个连续维度"""
    return next((pos for pos, dim in enumerate(schema.dims) if dim.kind is QualeKind.CONTINUOUS), None)


def _window(values: List[float], order: List[int], x: float, tol: float) -> Sequence[int]:
    """排序索引中可能与 x 容差相等的成员下标；窗口无界时退化为全部成员"""
    w = search_window(x, tol)
    if math.isinf(w):
        return list(order)
    lo = bisect.bisect_left(values, x - w)
    hi = bisect.bisect_right(values, x + w)
    return order[lo:hi]


# ========== 可能存在 ==========

def possible(schema: DomainSchema, coords: Sequence[Any]) -> Possibility:
    """
    可能存在（◇）：坐标通过模式校验即可，不要求真的存在

    不会抛出异常，输入不合法时返回 False 和错误码。

    Examples:
        >>> possible(shapes, [4, 0, 0, 255])
        Possibility(possible=True, reason=None)
        >>> possible(shapes, [4.5, 0, 0, 255]).reason
        'KIND_MISMATCH'
    """
    try:
        make_vector(schema, list(coords))
    except OntologyError as e:
        return Possibility(False, e.code)
    except TypeError:
        return Possibility(False, KindMismatch.code)
    return Possibility(True, None)


# ========== 局部基 ==========

def constant_dims(existence: ExistenceSet) -> List[str]:
    """
    在全部成员上取值恒定（容差内）的维度

    这样的维度在该领域内不携带信息，可以从局部基中去掉。空集返回空列表。
    """
    if len(existence) == 0:
        return []
    first = existence.members[0]
    result = []
    for pos, dim in enumerate(existence.schema.dims):
        if all(coord_equal(dim, first.coords[pos], m.coords[pos], existence.tolerance)
               for m in existence.members[1:]):
            result.append(dim.name)
    return result


def restrict_domain(existence: ExistenceSet, dim_name: str, value: Any) -> ExistenceSet:
    """
    以某维度取某个常量值定义子领域（例如 number_of_edges = 4 的矩形领域）

    Raises:
        UnknownDimension: 维度不存在
        KindMismatch / OutOfBounds: 常量值不符合维度定义
    """
    pos = existence.schema.index_of(dim_name)
    dim = existence.schema.dims[pos]
    value = validate_coord(dim, value)
    return existence.subset([coord_equal(dim, m.coords[pos], value, existence.tolerance)
                             for m in existence.members])


def informative_projection(existence: ExistenceSet) -> ExistenceSet:
    """
    去掉恒定维度后的投影存在集（有界领域的局部基）

    Raises:
        EmptyProjection: 全部维度都恒定
    """
    constant = set(constant_dims(existence))
    keep = [name for name in existence.schema.dim_names if name not in constant]
    if not keep:
        raise EmptyProjection("全部维度在该存在集上都恒定，没有可保留的维度")
    projected = [project(m, keep) for m in existence.members]
    sub = projected[0].schema if projected else existence.schema
    return ExistenceSet.from_vectors(sub, projected, existence.provenance, tolerance=existence.tolerance)


# ========== 文件读写 ==========

def _vector_from_raw(schema: DomainSchema, record: RawRecord, from_text: bool) -> OntVector:
    """原始记录 -> 向量；文本无法转换为类型时是解析错误，类型正确但不合法时是校验错误"""
    values = []
    for dim in schema.dims:
        if dim.name not in record.values:
            raise ParseError(f"缺少字段 {dim.name}", line=record.line)
        raw = record.values[dim.name]
        if from_text:
            try:
                raw = parse_coord(dim, raw)
            except KindMismatch as e:
                raise ParseError(e.message, line=record.line)
        values.append(raw)

    extra = [k for k in record.values if not schema.has_dim(k)]
    if extra:
        raise ParseError(f"多余字段 {extra}", line=record.line)

    try:
        return make_vector(schema, values)
    except OntologyError as e:
        raise ValidationFailure(f"第 {record.line} 行记录未通过校验: {e.message}",
                                record=record.values, line=record.line)


def read_vectors(path: str, schema: DomainSchema) -> List[Tuple[OntVector, Optional[str]]]:
    """
    按文件顺序读取向量及其来源标签（不去重）

    Raises:
        ParseError: 文件格式错误（带行号）
        ValidationFailure: 记录不符合模式（带出错记录）
    """
    try:
        fmt = detect_format(path)
        if fmt == "jsonl":
            records = read_jsonl_records(path)
        else:
            records = read_csv_records(path, schema.dim_names)
    except DatasetFormatError as e:
        raise ParseError(str(e), line=e.line)
    return [(_vector_from_raw(schema, r, from_text=(fmt == "csv")), r.source) for r in records]


def load_dataset(path: str, schema: DomainSchema, tolerance: float = DEFAULT_TOLERANCE) -> ExistenceSet:
    """
    从 CSV 或 JSON Lines 加载存在集（格式由扩展名决定）

    Args:
        path: 数据集路径（.csv / .jsonl）
        schema: 模式
        tolerance: 不可分辨判定容差

    Returns:
        ExistenceSet: 存在集，文件中不可分辨的重复记录只保留第一条
    """
    pairs = read_vectors(path, schema)
    existence = ExistenceSet.from_vectors(schema, [v for v, _ in pairs], [s for _, s in pairs],
                                          tolerance=tolerance)
    duplicates = len(pairs) - len(existence)
    if duplicates:
        logger.warning(f"⚠️  {path} 中有 {duplicates} 条不可分辨的重复记录已合并")
    logger.info(f"✅ 已加载 {path}: {len(existence)} 个成员")
    return existence


def vector_to_record(v: OntVector) -> Dict[str, Any]:
    """向量 -> JSON 对象（分类值为标签，布尔值为 true/false）"""
    return dict(zip(v.schema.dim_names, v.coords))


def save_dataset(existence: ExistenceSet, path: str) -> None:
    """
    保存存在集（格式由扩展名决定），来源标签写入 SOURCE_COLUMN
    """
    fmt = detect_format(path)
    if fmt == "jsonl":
        records = []
        for v, source in zip(existence.members, existence.provenance):
            record = vector_to_record(v)
            if source is not None:
                record[SOURCE_COLUMN] = source
            records.append(record)
        write_jsonl_records(path, records)
    else:
        rows = [[format_coord(c) for c in v.coords] for v in existence.members]
        write_csv_records(path, existence.schema.dim_names, rows, existence.provenance)
    logger.info(f"✅ 已保存 {len(existence)} 个成员到 {path}")
