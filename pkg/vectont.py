#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
向量本体命令行工具
定义领域模式、管理存在集，并以子命令形式提供全部查询

特点：
    ✅ 每个查询一个子命令，--json 输出单行 JSON（键顺序固定，重复运行逐字节一致）
    ✅ 领域错误统一 exit 1 并给出错误码，参数错误 exit 2
    ✅ 日志写到 stderr，stdout 只有查询结果

使用方法：
    python vectont.py exists --data data/shapes.csv --vector 4,0,0,255
    python vectont.py recon dist --from data/planets.json --to data/atoms.json
    python vectont.py depend rank --vectors data/rgb_yellow.csv

模式查找：
    --schema 指定模式文件；未指定时使用数据集旁的同名模式文件
    （data/shapes.csv -> data/shapes.schema.json）

容差优先级：
    --tolerance 参数 > 环境变量 VECTONT_TOLERANCE > config.DEFAULT_TOLERANCE

示例：
    # 判断蓝色矩形是否存在
    python vectont.py exists --data data/shapes.csv --vector 4,0,0,255

    # 从体重记录中拟合区间常量函数，并判断它是否是持续体
    python vectont.py foe fit-const --data data/john_weight.csv --value weight --axis time
    python vectont.py foe classify --data data/john_weight.csv --axis time \\
        --foe "class w(lo,hi,val): (time >= lo) AND (time <= hi) AND (weight = val)" \\
        --param lo=49 --param hi=61 --param val=68

    # 距离与导航
    python vectont.py dist --schema data/plane.schema.json --from 0,0 --to 3,4 --r 2
    python vectont.py nearest --data data/shapes.csv --vector 4,0,0,200 --k 2 --json
"""

import argparse
import json
import logging
import math
import os
import sys
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple

# 添加项目根目录到路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import (
    DEFAULT_BINS,
    DEFAULT_NEAREST_K,
    DEFAULT_ORDER,
    DEFAULT_SMOOTHING,
    DEFAULT_TOLERANCE,
    DEPENDENCE_TOLERANCE,
    GAP_FACTOR,
    TOLERANCE_ENV_VAR,
)
from ontology.errors import ArityMismatch, FileAccessError, InvalidWeights, OntologyError, ParseError
from ontology.schema_core import (
    Dimension,
    DomainSchema,
    OntVector,
    define_schema,
    load_schema,
    make_vector,
    parse_coord,
    save_schema,
    schema_from_dict,
    schema_to_dict,
    vector_from_mapping,
)
from ontology.existence_store import (
    ExistenceSet,
    Possibility,
    constant_dims,
    load_dataset,
    possible,
    read_vectors,
    save_dataset,
)
from ontology.foe_parser import parse_foe, unparse
from ontology.foe_engine import (
    FOEInstance,
    bind,
    classify_continuity,
    compression_ratio,
    evaluate,
    extension,
    fit_constant_interval,
)
from ontology.mereology import (
    ConvexRegion,
    centrality,
    contains_point,
    convexity_witness,
    load_region,
    overlap,
    part_of,
    region_from_points,
    region_to_dict,
    save_region,
)
from ontology.metrics_nav import (
    minkowski,
    minmax_scale,
    navigate,
    nearest,
    parse_move,
    reconstruction_distance,
    reconstruction_magnitude,
    reconstruction_path,
)
from ontology.dependence_prob import (
    detect_linear_dependence,
    estimate_probability_model,
    express_as_combination,
    infer_numeric_schema,
    load_model,
    probability_of,
    save_model,
)
from utils.dataset_io import read_header

logger = logging.getLogger(__name__)


class CommandResult(NamedTuple):
    exit_code: int        # 0 成功，1 领域错误，2 参数错误
    payload: str          # 文本或 JSON
    stream: str           # 'stdout' 或 'stderr'


class UsageError(Exception):
    """命令行参数错误（exit 2）"""


class _ArgumentParser(argparse.ArgumentParser):
    """参数错误时抛出 UsageError，而不是直接退出进程"""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ========== 输出 ==========

def _jsonable(value: Any) -> Any:
    """转为可 JSON 序列化的值；非有限浮点数输出为字符串 'inf' / '-inf' / 'nan'"""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        if math.isnan(value):
            return "nan"
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return str(value)


def emit_json(result: Any = None, error: Optional[str] = None) -> str:
    """
    单行 JSON: {"ok": ..., "result": ..., "error": ...}

    Examples:
        >>> emit_json(True)
        '{"ok":true,"result":true,"error":null}'
        >>> emit_json(error="NOT_IN_SPAN")
        '{"ok":false,"result":null,"error":"NOT_IN_SPAN"}'
    """
    payload = {"ok": error is None, "result": _jsonable(result) if error is None else None, "error": error}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def _num(x: float) -> str:
    """文本输出的数值：整数值不带小数点，无穷大输出 inf"""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _bool(x: bool) -> str:
    return "true" if x else "false"


# ========== 参数解析辅助 ==========

def resolve_tolerance(flag: Optional[float]) -> float:
    """
    获取引擎容差
    优先级: 命令行参数 > 环境变量 > config.py
    """
    if flag is not None:
        return flag
    env = os.environ.get(TOLERANCE_ENV_VAR)
    if env:
        try:
            value = float(env)
            if math.isfinite(value) and value > 0:
                return value
        except ValueError:
            pass
        logger.warning(f"⚠️  环境变量 {TOLERANCE_ENV_VAR}={env!r} 不是正数，使用默认容差")
    return DEFAULT_TOLERANCE


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"不是数值: {text!r}")
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"必须是正数: {text!r}")
    return value


def _param(text: str) -> Tuple[str, float]:
    name, sep, raw = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"参数应写成 name=value: {text!r}")
    try:
        return name.strip(), float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"参数值不是数值: {text!r}")


def _names(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _weights(args) -> Optional[List[float]]:
    if not args.weights:
        return None
    try:
        return [float(t) for t in args.weights.split(",")]
    except ValueError:
        raise InvalidWeights(f"无法解析权重: {args.weights!r}")


def _order(args):
    return args.r if args.r is not None else DEFAULT_ORDER


def _dependence_tol(args) -> float:
    """线性相关的主元阈值：只认 --tolerance 参数，不受环境变量影响"""
    return args.tolerance if args.tol_given else DEPENDENCE_TOLERANCE


def _schema_sidecar(data_path: str) -> str:
    return os.path.splitext(data_path)[0] + ".schema.json"


def _schema(args) -> DomainSchema:
    """--schema 优先，否则使用数据集旁的同名模式文件"""
    if args.schema:
        return load_schema(args.schema)
    if args.data:
        sidecar = _schema_sidecar(args.data)
        if os.path.exists(sidecar):
            return load_schema(sidecar)
        raise UsageError(f"未指定 --schema，且找不到数据集的模式文件 {sidecar}")
    raise UsageError("需要 --schema 或 --data")


def _dataset(args, schema: Optional[DomainSchema] = None) -> ExistenceSet:
    if not args.data:
        raise UsageError("需要 --data")
    return load_dataset(args.data, schema or _schema(args), tolerance=args.tolerance)


def parse_vector_text(schema: DomainSchema, text: str) -> OntVector:
    """按模式顺序解析逗号分隔的坐标"""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(schema):
        raise ArityMismatch(f"坐标个数 {len(parts)} 与模式 {schema.name} 的维度数 {len(schema)} 不一致")
    return make_vector(schema, [parse_coord(d, p) for d, p in zip(schema.dims, parts)])


def load_vector_file(path: str, fallback: Optional[DomainSchema] = None) -> OntVector:
    """
    读取向量文件 {"schema": 模式路径（相对该文件）或模式对象, "vector": {维度: 值} 或按模式顺序的列表}
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"向量文件 {path} 不是合法 JSON: {e.msg}", line=e.lineno)
    if not isinstance(data, dict) or "vector" not in data:
        raise ParseError(f"向量文件 {path} 缺少 vector 字段")

    ref = data.get("schema")
    if isinstance(ref, str):
        schema = load_schema(os.path.join(os.path.dirname(os.path.abspath(path)), ref))
    elif isinstance(ref, dict):
        schema = schema_from_dict(ref)
    elif ref is not None:
        raise ParseError(f"向量文件 {path} 的 schema 必须是路径或模式对象: {ref!r}")
    elif fallback is not None:
        schema = fallback
    else:
        raise ParseError(f"向量文件 {path} 没有 schema，且未指定 --schema")

    vector = data["vector"]
    if isinstance(vector, dict):
        return vector_from_mapping(schema, vector)
    if not isinstance(vector, list):
        raise ParseError(f"向量文件 {path} 的 vector 必须是对象或数组: {vector!r}")
    return make_vector(schema, vector)


def _vector_spec(text: str, args) -> OntVector:
    """--from / --to: 已存在的 .json 文件按向量文件读取，否则按逗号坐标解析"""
    if text.lower().endswith(".json") and os.path.exists(text):
        fallback = load_schema(args.schema) if args.schema else None
        return load_vector_file(text, fallback)
    return parse_vector_text(_schema(args), text)


def _vector(args, schema: DomainSchema) -> OntVector:
    if args.vector_file:
        return load_vector_file(args.vector_file, schema)
    if args.vector is not None:
        return parse_vector_text(schema, args.vector)
    raise UsageError("需要 --vector 或 --vector-file")


def _foe(args, schema: DomainSchema) -> FOEInstance:
    if not args.foe:
        raise UsageError("需要 --foe")
    cls = parse_foe(args.foe, schema)
    return bind(cls, dict(args.param or []))


def _coords(v: OntVector) -> List[Any]:
    return list(v.coords)


def _region(path: str, args) -> ConvexRegion:
    return load_region(path, _schema(args))


# ========== 子命令: schema / data ==========

def parse_dim_spec(text: str) -> Dimension:
    """
    解析 --dim name:kind[:unit][:lo..hi]；分类维度为 name:categorical:a|b|c[:unit]
    """
    parts = text.split(":")
    if len(parts) < 2:
        raise UsageError(f"维度应写成 name:kind[:unit][:lo..hi]: {text!r}")
    name, kind, extras = parts[0], parts[1], parts[2:]
    unit, bounds, values = "", None, None
    if kind == "categorical":
        if not extras:
            raise UsageError(f"分类维度需要取值列表 a|b|c: {text!r}")
        values = tuple(extras[0].split("|"))
        extras = extras[1:]
    for extra in extras:
        if ".." in extra:
            lo, _, hi = extra.partition("..")
            try:
                bounds = (float(lo), float(hi))
            except ValueError:
                raise UsageError(f"无法解析区间 {extra!r}")
        else:
            unit = extra
    return Dimension(name, kind, unit, bounds, values)


def cmd_schema_new(args):
    schema = define_schema(args.name, [parse_dim_spec(d) for d in args.dim])
    if args.out:
        save_schema(schema, args.out)
        logger.info(f"✅ 模式已保存到 {args.out}")
    return schema_to_dict(schema), json.dumps(schema_to_dict(schema), ensure_ascii=False, indent=2)


def cmd_schema_show(args):
    schema = _schema(args)
    lines = [f"{schema.name} ({len(schema)} 维)"]
    for d in schema.dims:
        line = f"  {d.name}: {d.kind.value}"
        if d.unit:
            line += f" [{d.unit}]"
        if d.bounds is not None:
            line += f" {_num(d.bounds[0])}..{_num(d.bounds[1])}"
        if d.values is not None:
            line += f" {'|'.join(d.values)}"
        lines.append(line)
    return schema_to_dict(schema), "\n".join(lines)


def cmd_data_load(args):
    existence = _dataset(args)
    result = {"size": len(existence), "dims": list(existence.schema.dim_names)}
    return result, f"已加载 {len(existence)} 个成员"


def cmd_data_save(args):
    existence = _dataset(args)
    save_dataset(existence, args.out)
    return {"size": len(existence), "path": args.out}, f"已保存 {len(existence)} 个成员到 {args.out}"


def cmd_data_insert(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    v = _vector(args, schema)
    report = existence.insert_report(v, args.source)
    out = args.out or args.data
    if report.collision is None:
        save_dataset(report.snapshot, out)
    result = {
        "inserted": report.collision is None,
        "collision": _coords(report.collision) if report.collision is not None else None,
        "size": len(report.snapshot),
    }
    text = "inserted" if report.collision is None else f"collision {report.collision}"
    return result, text


def cmd_data_constant_dims(args):
    names = constant_dims(_dataset(args))
    return names, ",".join(names)


# ========== 子命令: exists / possible ==========

def cmd_exists(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    found = existence.exists(_vector(args, schema))
    return found, _bool(found)


def cmd_possible(args):
    schema = _schema(args)
    if args.vector_file:
        try:
            load_vector_file(args.vector_file, schema)
            verdict = Possibility(True, None)
        except OntologyError as e:
            verdict = Possibility(False, e.code)
    elif args.vector is not None:
        parts = [p.strip() for p in args.vector.split(",")]
        if len(parts) != len(schema):
            verdict = Possibility(False, ArityMismatch.code)
        else:
            try:
                coords = [parse_coord(d, p) for d, p in zip(schema.dims, parts)]
                verdict = possible(schema, coords)
            except OntologyError as e:
                verdict = Possibility(False, e.code)
    else:
        raise UsageError("需要 --vector 或 --vector-file")
    text = _bool(verdict.possible) if verdict.possible else f"false ({verdict.reason})"
    return {"possible": verdict.possible, "reason": verdict.reason}, text


# ========== 子命令: foe ==========

def cmd_foe_parse(args):
    cls = parse_foe(args.foe, _schema(args))
    text = unparse(cls)
    return {"name": cls.name, "params": list(cls.params), "text": text}, text


def cmd_foe_bind(args):
    instance = _foe(args, _schema(args))
    return {"class": instance.cls.name, "bindings": instance.values}, str(instance)


def cmd_foe_eval(args):
    schema = _schema(args)
    instance = _foe(args, schema)
    value = evaluate(instance, _vector(args, schema), args.tolerance)
    return value, _bool(value)


def cmd_foe_extension(args):
    schema = _schema(args)
    ext = extension(_foe(args, schema), _dataset(args, schema), args.tolerance)
    members = [_coords(m) for m in ext.members]
    return {"size": len(ext), "members": members}, "\n".join(str(m) for m in ext.members)


def cmd_foe_fit_const(args):
    instances = fit_constant_interval(_dataset(args), args.value, args.axis, args.gap_factor, args.tolerance)
    result = [{"class": i.cls.name, "bindings": i.values} for i in instances]
    return result, "\n".join(str(i) for i in instances)


def cmd_foe_classify(args):
    schema = _schema(args)
    verdict = classify_continuity(_dataset(args, schema), _foe(args, schema), args.axis,
                                  args.gap_factor, args.tolerance)
    w = verdict.witness
    result = {
        "label": verdict.label.value,
        "witness": {"start": w.start, "end": w.end, "width": w.width},
        "sampling_interval": verdict.sampling_interval,
        "threshold": verdict.threshold,
    }
    text = f"{verdict.label.value}; gap ({_num(w.start)}, {_num(w.end)}) width {_num(w.width)}"
    return result, text


def cmd_foe_compress(args):
    schema = _schema(args)
    ratio = compression_ratio(_foe(args, schema), _dataset(args, schema), args.tolerance)
    return ratio, _num(ratio)


# ========== 子命令: region ==========

def cmd_region_new(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    if args.foe:
        existence = extension(_foe(args, schema), existence, args.tolerance)
    region = region_from_points(existence.members, _names(args.dims))
    if args.out:
        save_region(region, args.out)
        logger.info(f"✅ 区域已保存到 {args.out}")
    data = region_to_dict(region)
    return data, json.dumps(data, ensure_ascii=False)


def cmd_region_contains(args):
    schema = _schema(args)
    region = load_region(args.region, schema)
    inside = contains_point(region, _vector(args, schema))
    return inside, _bool(inside)


def cmd_region_part_of(args):
    result = part_of(_region(args.part, args), _region(args.whole, args))
    return result, _bool(result)


def cmd_region_overlap(args):
    result = overlap(_region(args.first, args), _region(args.second, args))
    return result, _bool(result)


def cmd_region_centrality(args):
    c = centrality(_region(args.part, args), _region(args.whole, args), _order(args), _weights(args))
    return {"distance": c.distance, "is_part": c.is_part}, _num(c.distance)


def cmd_region_convex_in(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    subset = [v for v, _ in read_vectors(args.subset, schema)]
    witness = convexity_witness(existence, subset, _names(args.dims))
    result = {"convex": witness is None, "witness": _coords(witness) if witness is not None else None}
    return result, "true" if witness is None else f"false; witness {witness}"


# ========== 子命令: dist / recon / navigate / nearest ==========

def _scale(args, schema: DomainSchema):
    if not args.scale:
        return None
    return minmax_scale(_dataset(args, schema))


def cmd_dist(args):
    u = _vector_spec(args.from_, args)
    v = _vector_spec(args.to, args)
    d = minkowski(u, v, _order(args), _weights(args), _scale(args, u.schema))
    return d, _num(d)


def cmd_recon_path(args):
    path = reconstruction_path(_vector_spec(args.from_, args), _vector_spec(args.to, args), args.tolerance)
    moves = [str(m) for m in path.moves]
    return {"moves": moves, "length": len(path)}, "\n".join(moves)


def cmd_recon_dist(args):
    origin = _vector_spec(args.from_, args)
    target = _vector_spec(args.to, args)
    if args.magnitude:
        value = reconstruction_magnitude(origin, target, args.tolerance)
        return value, _num(value)
    length = reconstruction_distance(origin, target, args.tolerance)
    return length, str(length)


def cmd_navigate(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    origin = _vector(args, schema)
    moves = [parse_move(m, schema) for m in args.move or []]
    member = navigate(existence, origin, moves, _weights(args), _scale(args, schema))
    return _coords(member), str(member)


def cmd_nearest(args):
    schema = _schema(args)
    existence = _dataset(args, schema)
    neighbors = nearest(existence, _vector(args, schema), _order(args), args.k, _weights(args),
                        _scale(args, schema))
    result = [{"vector": _coords(n.vector), "distance": n.distance} for n in neighbors]
    return result, "\n".join(f"{n.vector} {_num(n.distance)}" for n in neighbors)


# ========== 子命令: depend / prob ==========

def _labeled_vectors(args) -> Tuple[List[OntVector], List[str]]:
    """读取向量文件；未指定模式时由表头推断全连续模式。标签取来源列，否则为 v0, v1, ..."""
    schema = load_schema(args.schema) if args.schema else infer_numeric_schema(read_header(args.vectors))
    pairs = read_vectors(args.vectors, schema)
    labels = [label if label is not None else f"v{i}" for i, (_, label) in enumerate(pairs)]
    return [v for v, _ in pairs], labels


def _combination_text(target: str, labels: Sequence[str], coefficients: Sequence[float]) -> str:
    terms = []
    for label, c in zip(labels, coefficients):
        c = float(f"{c:.12g}")
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        term = f"{_num(abs(c))}*{label}"
        terms.append(term if not terms and c > 0 else (f"-{term}" if not terms else f"{sign} {term}"))
    return f"{target} = {' '.join(terms) if terms else '0'}"


def cmd_depend_rank(args):
    vectors, labels = _labeled_vectors(args)
    report = detect_linear_dependence(vectors, _dependence_tol(args))
    dependencies = []
    texts = [f"rank={report.rank}"]
    for dep in report.dependent:
        over = [labels[i] for i in dep.over]
        dependencies.append({
            "target": labels[dep.index],
            "over": over,
            "coefficients": list(dep.coefficients),
            "residual": dep.residual,
        })
        texts.append(_combination_text(labels[dep.index], over, dep.coefficients))
    result = {"rank": report.rank, "dependent": dependencies, "tolerance_used": report.tolerance_used}
    return result, "; ".join(texts)


def cmd_depend_express(args):
    vectors, labels = _labeled_vectors(args)
    if args.target not in labels:
        raise UsageError(f"找不到目标向量 {args.target}，可选: {', '.join(labels)}")
    target = vectors[labels.index(args.target)]
    wanted = _names(args.candidates) if args.candidates else [l for l in labels if l != args.target]
    missing = [w for w in wanted if w not in labels]
    if missing:
        raise UsageError(f"找不到候选向量: {', '.join(missing)}")
    candidates = [vectors[labels.index(w)] for w in wanted]
    combo = express_as_combination(target, candidates, _dependence_tol(args))
    result = {"coefficients": dict(zip(wanted, combo.coefficients)), "residual": combo.residual}
    return result, _combination_text(args.target, wanted, combo.coefficients)


def cmd_prob_fit(args):
    model = estimate_probability_model(_dataset(args), args.bins, args.smoothing)
    if args.out:
        save_model(model, args.out)
    result = {"cells": model.cells, "total": model.total, "smoothing": model.smoothing}
    return result, f"{model.cells} 个格子，{model.total} 个成员"


def cmd_prob_query(args):
    model = load_model(args.model)
    lookup = probability_of(model, _vector(args, model.schema))
    text = _num(lookup.probability) + (" (clipped)" if lookup.clipped else "")
    return {"probability": lookup.probability, "clipped": lookup.clipped}, text


# ========== 解析器 ==========

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--schema', help='模式文件（JSON）')
    common.add_argument('--data', help='数据集文件（.csv / .jsonl）')
    common.add_argument('--json', action='store_true', help='输出单行 JSON')
    common.add_argument('--tolerance', type=_positive_float, default=None,
                        help=f'坐标相等容差（默认：环境变量 {TOLERANCE_ENV_VAR} 或 {DEFAULT_TOLERANCE}）')
    common.add_argument('--r', default=None, help='Minkowski 阶数（>= 1，或 inf；默认：2）')
    common.add_argument('--weights', default=None, help='逗号分隔的维度权重')
    return common


def _add_vector_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--vector', help='按模式顺序的逗号分隔坐标')
    group.add_argument('--vector-file', help='向量文件（JSON）')


def _add_foe_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument('--foe', required=required, help='函数类定义，如 "class w(lo,hi,val): ..."')
    parser.add_argument('--param', type=_param, action='append', help='参数绑定 name=value（可重复）')


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _ArgumentParser(
        prog='vectont',
        description='向量本体命令行工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest='command', required=True)

    def leaf(sub, name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    def group(name: str, help_text: str):
        return commands.add_parser(name, help=help_text).add_subparsers(dest='action', required=True)

    # schema
    schema_cmd = group('schema', '定义与查看领域模式')
    p = leaf(schema_cmd, 'new', cmd_schema_new, '定义新模式')
    p.add_argument('--name', required=True, help='模式名')
    p.add_argument('--dim', action='append', required=True, help='维度 name:kind[:unit][:lo..hi]（可重复）')
    p.add_argument('--out', help='保存路径')
    leaf(schema_cmd, 'show', cmd_schema_show, '查看模式')

    # data
    data_cmd = group('data', '存在集管理')
    leaf(data_cmd, 'load', cmd_data_load, '加载并校验数据集')
    p = leaf(data_cmd, 'save', cmd_data_save, '另存数据集（可转换格式）')
    p.add_argument('--out', required=True, help='输出路径')
    p = leaf(data_cmd, 'insert', cmd_data_insert, '插入向量')
    _add_vector_args(p)
    p.add_argument('--source', help='来源标签')
    p.add_argument('--out', help='输出路径（默认：覆盖 --data）')
    leaf(data_cmd, 'constant-dims', cmd_data_constant_dims, '取值恒定的维度')

    # exists / possible
    p = leaf(commands, 'exists', cmd_exists, '是否存在')
    _add_vector_args(p)
    p = leaf(commands, 'possible', cmd_possible, '是否可能存在')
    _add_vector_args(p)

    # foe
    foe_cmd = group('foe', '存在函数')
    p = leaf(foe_cmd, 'parse', cmd_foe_parse, '解析函数类')
    _add_foe_args(p)
    p = leaf(foe_cmd, 'bind', cmd_foe_bind, '绑定参数')
    _add_foe_args(p)
    p = leaf(foe_cmd, 'eval', cmd_foe_eval, '对向量求值')
    _add_foe_args(p)
    _add_vector_args(p)
    p = leaf(foe_cmd, 'extension', cmd_foe_extension, '外延')
    _add_foe_args(p)
    p = leaf(foe_cmd, 'fit-const', cmd_foe_fit_const, '拟合区间常量函数')
    p.add_argument('--value', required=True, help='取值维度')
    p.add_argument('--axis', required=True, help='轴维度')
    p.add_argument('--gap-factor', type=_positive_float, default=GAP_FACTOR, help=f'缺口阈值倍数（默认：{GAP_FACTOR}）')
    p = leaf(foe_cmd, 'classify', cmd_foe_classify, '持续体 / 事件体分类')
    _add_foe_args(p)
    p.add_argument('--axis', required=True, help='轴维度')
    p.add_argument('--gap-factor', type=_positive_float, default=GAP_FACTOR, help=f'缺口阈值倍数（默认：{GAP_FACTOR}）')
    p = leaf(foe_cmd, 'compress', cmd_foe_compress, '压缩比')
    _add_foe_args(p)

    # region
    region_cmd = group('region', '凸区域与整体-部分')
    p = leaf(region_cmd, 'new', cmd_region_new, '由数据集成员（或函数外延）构造区域')
    p.add_argument('--dims', required=True, help='逗号分隔的区域维度')
    _add_foe_args(p, required=False)
    p.add_argument('--out', help='保存路径')
    p = leaf(region_cmd, 'contains', cmd_region_contains, '点是否在区域内')
    p.add_argument('--region', required=True, help='区域文件')
    _add_vector_args(p)
    for name, handler, help_text in (('part-of', cmd_region_part_of, '部分关系'),
                                     ('centrality', cmd_region_centrality, '中心度')):
        p = leaf(region_cmd, name, handler, help_text)
        p.add_argument('--part', required=True, help='部分区域文件')
        p.add_argument('--whole', required=True, help='整体区域文件')
    p = leaf(region_cmd, 'overlap', cmd_region_overlap, '是否相交')
    p.add_argument('--first', required=True, help='区域文件')
    p.add_argument('--second', required=True, help='区域文件')
    p = leaf(region_cmd, 'convex-in', cmd_region_convex_in, '子集在数据集中是否凸')
    p.add_argument('--subset', required=True, help='子集数据文件（同一模式）')
    p.add_argument('--dims', required=True, help='逗号分隔的区域维度')

    # dist / recon
    p = leaf(commands, 'dist', cmd_dist, 'Minkowski 距离')
    p.add_argument('--from', dest='from_', required=True, help='逗号坐标或向量文件')
    p.add_argument('--to', required=True, help='逗号坐标或向量文件')
    p.add_argument('--scale', action='store_true', help='按 --data 的取值范围归一化')
    recon_cmd = group('recon', '重构路径')
    for name, handler, help_text in (('path', cmd_recon_path, '重构路径'), ('dist', cmd_recon_dist, '重构距离')):
        p = leaf(recon_cmd, name, handler, help_text)
        p.add_argument('--from', dest='from_', required=True, help='逗号坐标或向量文件')
        p.add_argument('--to', required=True, help='逗号坐标或向量文件')
    p.add_argument('--magnitude', action='store_true', help='输出系数绝对值之和而不是移动次数')

    # navigate / nearest
    p = leaf(commands, 'navigate', cmd_navigate, '导航到最近的存在成员')
    _add_vector_args(p)
    p.add_argument('--move', action='append', help='移动 dim=+0.5 | dim:=VALUE（可重复）')
    p.add_argument('--scale', action='store_true', help='按数据集取值范围归一化')
    p = leaf(commands, 'nearest', cmd_nearest, '最近的 k 个成员')
    _add_vector_args(p)
    p.add_argument('--k', type=int, default=DEFAULT_NEAREST_K, help=f'返回个数（默认：{DEFAULT_NEAREST_K}）')
    p.add_argument('--scale', action='store_true', help='按数据集取值范围归一化')

    # depend
    depend_cmd = group('depend', '线性相关')
    p = leaf(depend_cmd, 'rank', cmd_depend_rank, '秩与线性相关')
    p.add_argument('--vectors', required=True, help='向量文件（.csv / .jsonl，_source 列为标签）')
    p = leaf(depend_cmd, 'express', cmd_depend_express, '表示为线性组合')
    p.add_argument('--vectors', required=True, help='向量文件')
    p.add_argument('--target', required=True, help='目标向量标签')
    p.add_argument('--candidates', help='逗号分隔的候选标签（默认：其余全部）')

    # prob
    prob_cmd = group('prob', '概率存在函数')
    p = leaf(prob_cmd, 'fit', cmd_prob_fit, '估计直方图模型')
    p.add_argument('--bins', type=int, default=DEFAULT_BINS, help=f'每维分箱数（默认：{DEFAULT_BINS}）')
    p.add_argument('--smoothing', type=float, default=DEFAULT_SMOOTHING, help='拉普拉斯平滑常数')
    p.add_argument('--out', help='模型保存路径')
    p = leaf(prob_cmd, 'query', cmd_prob_query, '查询向量的存在概率')
    p.add_argument('--model', required=True, help='模型文件')
    _add_vector_args(p)

    return parser


# ========== 入口 ==========

def run(argv: Sequence[str]) -> CommandResult:
    """
    执行一条命令，返回退出码与输出（不调用 sys.exit，便于测试）

    Examples:
        >>> run(["exists", "--data", "data/shapes.csv", "--vector", "4,0,0,255"]).payload
        'true'
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as e:
        return CommandResult(2, str(e), "stderr")
    except SystemExit as e:
        # --help
        return CommandResult(int(e.code or 0), "", "stdout")

    args.tol_given = args.tolerance is not None
    args.tolerance = resolve_tolerance(args.tolerance)
    try:
        result, text = args.handler(args)
    except UsageError as e:
        return CommandResult(2, f"{parser.format_usage()}vectont: error: {e}", "stderr")
    except FileNotFoundError as e:
        return CommandResult(2, f"vectont: error: 文件不存在: {e.filename}", "stderr")
    except (IsADirectoryError, PermissionError, UnicodeDecodeError) as e:
        return _failure(FileAccessError(f"无法读取文件: {e}"), args)
    except OntologyError as e:
        return _failure(e, args)

    return CommandResult(0, emit_json(result) if args.json else text, "stdout")


def _failure(e: OntologyError, args) -> CommandResult:
    """领域错误 -> exit 1"""
    logger.error(f"❌ {e.code}: {e.message}")
    if args.json:
        return CommandResult(1, emit_json(error=e.code), "stdout")
    return CommandResult(1, f"{e.code}: {e.message}", "stderr")


def main():
    """主函数"""
    logging.basicConfig(
        level=logging.INFO,
        format='%(message)s'
    )
    result = run(sys.argv[1:])
    if result.payload:
        stream = sys.stdout if result.stream == "stdout" else sys.stderr
        print(result.payload, file=stream)
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
