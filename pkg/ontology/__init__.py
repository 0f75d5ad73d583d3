# -*- coding: utf-8 -*-
"""
向量本体模块
提供领域模式、存在集、存在函数、整体-部分推理、相似度导航与线性相关分析
"""

from .errors import OntologyError
from .schema_core import (
    Dimension,
    DomainSchema,
    OntVector,
    QualeKind,
    add,
    define_schema,
    load_schema,
    make_vector,
    project,
    save_schema,
    scale,
)
from .existence_store import (
    ExistenceSet,
    InsertResult,
    Possibility,
    load_dataset,
    possible,
    save_dataset,
)
from .foe_parser import FunctionClass, parse_foe, unparse
from .foe_engine import (
    ContinuityVerdict,
    FOEInstance,
    bind,
    classify_continuity,
    compression_ratio,
    evaluate,
    extension,
    fit_constant_interval,
)
from .mereology import ConvexRegion, centrality, contains_point, is_convex_in, overlap, part_of, region_from_points
from .metrics_nav import (
    Move,
    ReconstructionPath,
    minkowski,
    navigate,
    nearest,
    reconstruction_distance,
    reconstruction_path,
)
from .dependence_prob import (
    DependenceReport,
    ProbabilisticFOE,
    detect_linear_dependence,
    estimate_probability_model,
    express_as_combination,
    probability_of,
)

__all__ = [
    'OntologyError',
    'Dimension', 'DomainSchema', 'OntVector', 'QualeKind',
    'define_schema', 'make_vector', 'add', 'scale', 'project', 'load_schema', 'save_schema',
    'ExistenceSet', 'InsertResult', 'Possibility', 'possible', 'load_dataset', 'save_dataset',
    'FunctionClass', 'parse_foe', 'unparse',
    'FOEInstance', 'ContinuityVerdict', 'bind', 'evaluate', 'extension',
    'fit_constant_interval', 'classify_continuity', 'compression_ratio',
    'ConvexRegion', 'region_from_points', 'contains_point', 'part_of', 'overlap', 'centrality', 'is_convex_in',
    'Move', 'ReconstructionPath', 'minkowski', 'reconstruction_path', 'reconstruction_distance',
    'navigate', 'nearest',
    'DependenceReport', 'ProbabilisticFOE', 'detect_linear_dependence', 'express_as_combination',
    'estimate_probability_model', 'probability_of',
]
