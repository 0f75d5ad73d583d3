# -*- coding: utf-8 -*-
"""
领域异常定义

所有领域错误都继承 OntologyError，并携带一个稳定的机器可读错误码（code），
命令行层据此输出 exit 1 和 JSON 中的 "error" 字段。
"""

from typing import Any, Optional, Sequence


class OntologyError(Exception):
    """领域错误基类"""

    code = "ONTOLOGY_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# ========== 模式与向量 ==========

class EmptySchema(OntologyError):
    code = "EMPTY_SCHEMA"


class DuplicateDimensionName(OntologyError):
    code = "DUPLICATE_DIMENSION_NAME"


class InvalidDimension(OntologyError):
    code = "INVALID_DIMENSION"


class ArityMismatch(OntologyError):
    code = "ARITY_MISMATCH"


class KindMismatch(OntologyError):
    code = "KIND_MISMATCH"


class OutOfBounds(OntologyError):
    code = "OUT_OF_BOUNDS"


class SchemaMismatch(OntologyError):
    code = "SCHEMA_MISMATCH"


class NonArithmeticDimension(OntologyError):
    code = "NON_ARITHMETIC_DIMENSION"


class NonIntegralScalarOnIntegerDimension(OntologyError):
    code = "NON_INTEGRAL_SCALAR_ON_INTEGER_DIMENSION"


class UnknownDimension(OntologyError):
    code = "UNKNOWN_DIMENSION"


class EmptyProjection(OntologyError):
    code = "EMPTY_PROJECTION"


class NonNumericDimension(OntologyError):
    code = "NON_NUMERIC_DIMENSION"


# ========== 存在集与文件 ==========

class ValidationFailure(OntologyError):
    """记录校验失败，record 为出错的原始记录"""

    code = "VALIDATION_FAILURE"

    def __init__(self, message: str, record: Any = None, line: Optional[int] = None):
        super().__init__(message)
        self.record = record
        self.line = line


class ParseError(OntologyError):
    """文件解析失败，line 为 1 起始的行号（含表头）"""

    code = "PARSE_ERROR"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)
        self.line = line


class FileAccessError(OntologyError):
    """文件存在但无法读取（是目录、无权限或编码错误）"""

    code = "FILE_ACCESS_ERROR"


class EmptyExistenceSet(OntologyError):
    code = "EMPTY_EXISTENCE_SET"


class NotAMember(OntologyError):
    code = "NOT_A_MEMBER"


# ========== 存在函数 ==========

class PositionedError(OntologyError):
    """带字符位置（0 起始）的表达式错误"""

    code = "FOE_ERROR"

    def __init__(self, message: str, position: int):
        super().__init__(f"位置 {position}: {message}")
        self.position = position


class FoeSyntaxError(PositionedError):
    code = "SYNTAX_ERROR"


class UnknownIdentifier(PositionedError):
    code = "UNKNOWN_IDENTIFIER"


class FoeTypeError(PositionedError):
    code = "TYPE_ERROR"


class MissingParameter(PositionedError):
    """位置为缺少取值的参数在定义文本中的位置"""

    code = "MISSING_PARAMETER"


class UnknownParameter(PositionedError):
    """位置为参数列表右括号：多余的参数本应在此之前声明"""

    code = "UNKNOWN_PARAMETER"


class EmptyExtension(OntologyError):
    code = "EMPTY_EXTENSION"


# ========== 凸区域 ==========

class EmptyPointList(OntologyError):
    code = "EMPTY_POINT_LIST"


class DimensionMismatch(OntologyError):
    code = "DIMENSION_MISMATCH"


# ========== 度量与导航 ==========

class InvalidOrder(OntologyError):
    code = "INVALID_ORDER"


class InvalidWeights(OntologyError):
    code = "INVALID_WEIGHTS"


class InvalidMove(OntologyError):
    code = "INVALID_MOVE"


class InvalidArgument(OntologyError):
    code = "INVALID_ARGUMENT"


# ========== 线性相关 ==========

class TooFewVectors(OntologyError):
    code = "TOO_FEW_VECTORS"


class NotInSpan(OntologyError):
    """目标向量不在候选向量张成的空间内"""

    code = "NOT_IN_SPAN"

    def __init__(self, residual: float, coefficients: Sequence[float] = ()):
        super().__init__(f"目标不在张成空间内，残差 {residual:g}")
        self.residual = residual
        self.coefficients = tuple(coefficients)
