#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
示例：如何使用 ontology 模块做存在判定、函数拟合、整体-部分推理与相似度导航
"""

import os
import sys

# 添加项目根目录到路径
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from config import DATA_DIR as DATA_DIRNAME
from ontology import (
    bind,
    classify_continuity,
    compression_ratio,
    detect_linear_dependence,
    fit_constant_interval,
    load_dataset,
    load_schema,
    make_vector,
    nearest,
    parse_foe,
    part_of,
    possible,
    reconstruction_path,
)
from ontology.dependence_prob import infer_numeric_schema
from ontology.errors import OntologyError
from ontology.existence_store import read_vectors
from ontology.mereology import load_region
from utils.dataset_io import read_header

DATA_DIR = os.path.join(ROOT, DATA_DIRNAME)

print("=" * 60)
print("示例 1: 彩色形状的存在集")
print("=" * 60)
shapes = load_schema(os.path.join(DATA_DIR, "shapes.schema.json"))
existence = load_dataset(os.path.join(DATA_DIR, "shapes.csv"), shapes)
blue = make_vector(shapes, [4, 0, 0, 255])
print(f"蓝色矩形 {blue} 存在: {existence.exists(blue)}（来源: {existence.source_of(blue)}）")
verdict = possible(shapes, [4.5, 0, 0, 255])
print(f"4.5 条边可能存在吗: {verdict.possible}（{verdict.reason}）")

for n in nearest(existence, make_vector(shapes, [4, 0, 0, 200]), 2, 2):
    print(f"  最近邻 {n.vector}  距离 {n.distance:.2f}")

print("\n" + "=" * 60)
print("示例 2: John 的体重记录")
print("=" * 60)
weight_schema = load_schema(os.path.join(DATA_DIR, "john_weight.schema.json"))
record = load_dataset(os.path.join(DATA_DIR, "john_weight.csv"), weight_schema)

for instance in fit_constant_interval(record, "weight", "time"):
    print(f"  {instance}  压缩比 {compression_ratio(instance, record):.2f}")

weight_class = parse_foe("class w(lo,hi,val): (time >= lo) AND (time <= hi) AND (weight = val)", weight_schema)
verdict = classify_continuity(record, bind(weight_class, {"lo": 49, "hi": 61, "val": 68}), "time")
print(f"w(49, 61, 68) 是 {verdict.label.value}，最大间隔 {verdict.witness.width:g}")

print("\n" + "=" * 60)
print("示例 3: 发动机是汽车的一部分")
print("=" * 60)
plane = load_schema(os.path.join(DATA_DIR, "plane.schema.json"))
car = load_region(os.path.join(DATA_DIR, "car.region.json"), plane)
engine = load_region(os.path.join(DATA_DIR, "engine.region.json"), plane)
print(f"engine ⊑ car: {part_of(engine, car)}")
print(f"car ⊑ engine: {part_of(car, engine)}")

print("\n" + "=" * 60)
print("示例 4: 行星轨道与原子轨道的重构路径")
print("=" * 60)
motion = load_schema(os.path.join(DATA_DIR, "motion.schema.json"))
planets = make_vector(motion, ["elliptical", True, 1.496e11, 3.54e22, 0.0])
atoms = make_vector(motion, ["elliptical", True, 5.29e-11, 3.61e-47, 8.24e-8])
path = reconstruction_path(planets, atoms)
print(f"重构距离 {len(path)}，移动: {', '.join(str(m) for m in path.moves)}")

print("\n" + "=" * 60)
print("示例 5: 黄色 = 红色 + 绿色")
print("=" * 60)
vectors_path = os.path.join(DATA_DIR, "rgb_yellow.csv")
try:
    pairs = read_vectors(vectors_path, infer_numeric_schema(read_header(vectors_path)))
    labels = [label for _, label in pairs]
    report = detect_linear_dependence([v for v, _ in pairs])
    for dep in report.dependent:
        terms = " + ".join(f"{c:g}×{labels[i]}" for c, i in zip(dep.coefficients, dep.over))
        print(f"秩 {report.rank}，{labels[dep.index]} = {terms}")
except OntologyError as e:
    print(f"❌ {e.code}: {e.message}")
