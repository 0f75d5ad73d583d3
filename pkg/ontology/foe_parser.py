# -*- coding: utf-8 -*-
"""
存在函数（FOE）表达式解析模块

文法（优先级从高到低：^ > * > (+,-) > 比较 > NOT > AND > OR）:

    class    := "class" IDENT "(" [params] ")" ":" expr
    params   := IDENT {"," IDENT}
    expr     := or ; or := and {"OR" and} ; and := not {"AND" not}
    not      := ["NOT"] cmp
    cmp      := sum (("<="|">="|"=") sum) | "(" expr ")"
    sum      := term {("+"|"-") term} ; term := pow {"*" pow}
    pow      := atom ["^" INT] ; atom := IDENT | NUMBER | "(" sum ")"

解析分两步：先按文法构造语法树，再解析标识符并做类型检查，
两步的错误都带 0 起始的字符位置。
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import FrozenSet, List, NamedTuple, Tuple, Union

from config import FOE_MAX_NESTING

from .errors import FoeSyntaxError, FoeTypeError, UnknownIdentifier
from .schema_core import DomainSchema, QualeKind

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({"class", "AND", "OR", "NOT"})
COMPARE_OPS = ("<=", ">=", "=")

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|[=+\-*^(),:])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str       # 'ident' / 'keyword' / 'number' / 'op' / 'eof'
    text: str
    pos: int


# ========== 语法树 ==========
# 位置字段不参与相等比较，unparse 后重新解析得到的树与原树相等

@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    ident: str
    kind: str = "dim"            # 'dim' 或 'param'
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str                      # '+' / '-' / '*'
    left: "Arith"
    right: "Arith"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: "Arith"
    exponent: int
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Compare:
    op: str                      # '<=' / '>=' / '='
    left: "Arith"
    right: "Arith"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    operand: "Predicate"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class BoolOp:
    op: str                      # 'AND' / 'OR'
    operands: Tuple["Predicate", ...]
    pos: int = field(default=-1, compare=False, repr=False)


Arith = Union[Num, Name, BinOp, Pow]
Predicate = Union[Compare, Not, BoolOp]


@dataclass(frozen=True)
class FunctionClass:
    """
    函数类（带可调参数的 FOE 族）

    Attributes:
        name: 类名
        params: 有序参数槽
        body: 布尔值表达式树（根为比较或逻辑连接）
        schema: 标识符解析所依据的模式
        param_positions: 各参数在定义文本中的字符位置
        params_end: 参数列表右括号的字符位置
    """

    name: str
    params: Tuple[str, ...]
    body: Predicate
    schema: DomainSchema = field(compare=False, repr=False)
    param_positions: Tuple[int, ...] = field(default=(), compare=False, repr=False)
    params_end: int = field(default=-1, compare=False, repr=False)

    @property
    def dims(self) -> FrozenSet[str]:
        """表达式引用的维度名"""
        return frozenset(n.ident for n in iter_names(self.body) if n.kind == "dim")

    def __str__(self) -> str:
        return unparse(self)


def iter_names(node) -> List[Name]:
    """按源码顺序收集表达式中的标识符"""
    if isinstance(node, Name):
        return [node]
    if isinstance(node, (BinOp, Compare)):
        return iter_names(node.left) + iter_names(node.right)
    if isinstance(node, Pow):
        return iter_names(node.base)
    if isinstance(node, Not):
        return iter_names(node.operand)
    if isinstance(node, BoolOp):
        return [n for child in node.operands for n in iter_names(child)]
    return []


# ========== 词法分析 ==========

def tokenize(text: str) -> List[Token]:
    """
    切分为记号序列（末尾追加 eof）

    Raises:
        FoeSyntaxError: 非法字符
    """
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise FoeSyntaxError(f"非法字符 {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind == "ident" and match.group() in KEYWORDS:
            kind = "keyword"
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# ========== 语法分析 ==========

class _Parser:
    """递归下降解析器，每个文法规则一个方法"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        depth = 0
        for token in self.tokens:
            if token.kind != "op":
                continue
            if token.text == "(":
                depth += 1
                if depth > FOE_MAX_NESTING:
                    raise FoeSyntaxError(f"括号嵌套超过 {FOE_MAX_NESTING} 层", token.pos)
            elif token.text == ")":
                depth -= 1

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        token = self.tokens[self.i]
        if token.kind != "eof":
            self.i += 1
        return token

    def at(self, text: str) -> bool:
        token = self.peek
        return token.kind in ("op", "keyword") and token.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise FoeSyntaxError(f"期望 {text!r}，得到 {self._describe(self.peek)}", self.peek.pos)
        return self.advance()

    def expect_ident(self) -> Token:
        if self.peek.kind != "ident":
            raise FoeSyntaxError(f"期望标识符，得到 {self._describe(self.peek)}", self.peek.pos)
        return self.advance()

    @staticmethod
    def _describe(token: Token) -> str:
        return "输入结束" if token.kind == "eof" else repr(token.text)

    # class := "class" IDENT "(" [params] ")" ":" expr
    def parse_class(self) -> Tuple[str, List[Token], int, Predicate]:
        self.expect("class")
        name = self.expect_ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.expect_ident())
            while self.at(","):
                self.advance()
                params.append(self.expect_ident())
        close = self.expect(")")
        self.expect(":")
        body = self.parse_expr()
        if self.peek.kind != "eof":
            raise FoeSyntaxError(f"多余的输入 {self._describe(self.peek)}", self.peek.pos)
        return name.text, params, close.pos, body

    def parse_expr(self) -> Predicate:
        return self.parse_or()

    def parse_or(self) -> Predicate:
        start = self.peek.pos
        operands = [self.parse_and()]
        while self.at("OR"):
            self.advance()
            operands.append(self.parse_and())
        return operands[0] if len(operands) == 1 else BoolOp("OR", tuple(operands), start)

    def parse_and(self) -> Predicate:
        start = self.peek.pos
        operands = [self.parse_not()]
        while self.at("AND"):
            self.advance()
            operands.append(self.parse_not())
        return operands[0] if len(operands) == 1 else BoolOp("AND", tuple(operands), start)

    def parse_not(self) -> Predicate:
        if self.at("NOT"):
            token = self.advance()
            return Not(self.parse_cmp(), token.pos)
        return self.parse_cmp()

    def parse_cmp(self) -> Predicate:
        if not self.at("("):
            return self._parse_comparison()

        # "(" 开头既可能是带括号的算式（比较的左侧），也可能是带括号的布尔表达式
        saved = self.i
        try:
            return self._parse_comparison()
        except FoeSyntaxError as first:
            self.i = saved
            try:
                self.expect("(")
                inner = self.parse_expr()
                self.expect(")")
                return inner
            except FoeSyntaxError as second:
                raise first if first.position >= second.position else second

    def _parse_comparison(self) -> Compare:
        left = self.parse_sum()
        token = self.peek
        if not (token.kind == "op" and token.text in COMPARE_OPS):
            raise FoeSyntaxError(f"期望比较运算符 <=、>= 或 =，得到 {self._describe(token)}", token.pos)
        self.advance()
        right = self.parse_sum()
        return Compare(token.text, left, right, token.pos)

    def parse_sum(self) -> Arith:
        node = self.parse_term()
        while self.at("+") or self.at("-"):
            token = self.advance()
            node = BinOp(token.text, node, self.parse_term(), token.pos)
        return node

    def parse_term(self) -> Arith:
        node = self.parse_pow()
        while self.at("*"):
            token = self.advance()
            node = BinOp("*", node, self.parse_pow(), token.pos)
        return node

    def parse_pow(self) -> Arith:
        base = self.parse_atom()
        if self.at("^"):
            token = self.advance()
            exp = self.peek
            if exp.kind != "number" or not exp.text.isdigit():
                raise FoeSyntaxError(f"指数必须是非负整数字面量，得到 {self._describe(exp)}", exp.pos)
            self.advance()
            return Pow(base, int(exp.text), token.pos)
        return base

    def parse_atom(self) -> Arith:
        token = self.peek
        if token.kind == "ident":
            self.advance()
            return Name(token.text, "dim", token.pos)
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise FoeSyntaxError(f"数值字面量溢出: {token.text}", token.pos)
            return Num(value, token.pos)
        if self.at("("):
            self.advance()
            inner = self.parse_sum()
            self.expect(")")
            return inner
        raise FoeSyntaxError(f"期望标识符、数值或 '('，得到 {self._describe(token)}", token.pos)


# ========== 标识符解析与类型检查 ==========

def _resolve(node, schema: DomainSchema, params: FrozenSet[str], bare_eq_operand: bool = False):
    """
    把标识符标注为维度或参数，并检查维度种类

    分类维度不能出现；布尔维度只能作为 "=" 比较的直接操作数。
    """
    if isinstance(node, Name):
        if node.ident in params:
            return Name(node.ident, "param", node.pos)
        if not schema.has_dim(node.ident):
            raise UnknownIdentifier(f"未知标识符 {node.ident}（既不是维度也不是参数）", node.pos)
        kind = schema.dimension(node.ident).kind
        if kind is QualeKind.CATEGORICAL:
            raise FoeTypeError(f"分类维度 {node.ident} 不能参与算术或比较", node.pos)
        if kind is QualeKind.BOOLEAN and not bare_eq_operand:
            raise FoeTypeError(f"布尔维度 {node.ident} 只能直接用于 '=' 比较", node.pos)
        return node
    if isinstance(node, Num):
        return node
    if isinstance(node, BinOp):
        return BinOp(node.op, _resolve(node.left, schema, params), _resolve(node.right, schema, params), node.pos)
    if isinstance(node, Pow):
        return Pow(_resolve(node.base, schema, params), node.exponent, node.pos)
    if isinstance(node, Compare):
        bare = node.op == "="
        return Compare(node.op,
                       _resolve(node.left, schema, params, bare),
                       _resolve(node.right, schema, params, bare),
                       node.pos)
    if isinstance(node, Not):
        return Not(_resolve(node.operand, schema, params), node.pos)
    return BoolOp(node.op, tuple(_resolve(c, schema, params) for c in node.operands), node.pos)


def parse_foe(text: str, schema: DomainSchema) -> FunctionClass:
    """
    解析函数类定义

    Args:
        text: 形如 "class name(params): expr" 的定义文本
        schema: 解析维度名所依据的模式

    Returns:
        FunctionClass: 标识符已解析的函数类

    Raises:
        FoeSyntaxError: 语法错误（含参数重名、参数与维度同名、非整数指数）
        UnknownIdentifier: 标识符既不是维度也不是参数
        FoeTypeError: 分类维度参与运算，或布尔维度不在 '=' 中

    Examples:
        >>> cls = parse_foe("class sphere(a,b,c,r): (x+a)^2+(y+b)^2+(z+c)^2 <= r^2", space)
        >>> cls.params
        ('a', 'b', 'c', 'r')
    """
    parser = _Parser(text)
    name, param_tokens, params_end, body = parser.parse_class()

    seen = set()
    for token in param_tokens:
        if token.text in seen:
            raise FoeSyntaxError(f"参数重名: {token.text}", token.pos)
        if schema.has_dim(token.text):
            raise FoeSyntaxError(f"参数 {token.text} 与维度同名", token.pos)
        seen.add(token.text)

    body = _resolve(body, schema, frozenset(seen))
    cls = FunctionClass(name, tuple(t.text for t in param_tokens), body, schema,
                        param_positions=tuple(t.pos for t in param_tokens), params_end=params_end)
    logger.debug(f"解析函数类 {name}（{len(cls.params)} 个参数）")
    return cls


# ========== 反解析 ==========

def format_number(value: float) -> str:
    """整数值输出为整数字面量，其余用 repr 保证精确往返"""
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def _is_sum(node) -> bool:
    return isinstance(node, BinOp) and node.op in ("+", "-")


def _arith_text(node: Arith) -> str:
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Pow):
        base = _arith_text(node.base)
        if not isinstance(node.base, (Num, Name)):
            base = f"({base})"
        return f"{base}^{node.exponent}"

    left = _arith_text(node.left)
    right = _arith_text(node.right)
    if node.op == "*":
        if _is_sum(node.left):
            left = f"({left})"
        if _is_sum(node.right) or (isinstance(node.right, BinOp) and node.right.op == "*"):
            right = f"({right})"
    elif _is_sum(node.right):
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _predicate_text(node: Predicate) -> str:
    if isinstance(node, Compare):
        return f"{_arith_text(node.left)} {node.op} {_arith_text(node.right)}"
    if isinstance(node, Not):
        inner = _predicate_text(node.operand)
        return f"NOT {inner}" if isinstance(node.operand, Compare) else f"NOT ({inner})"

    parts = []
    for child in node.operands:
        text = _predicate_text(child)
        if isinstance(child, BoolOp) and (node.op == "AND" or child.op == "OR"):
            text = f"({text})"
        parts.append(text)
    return f" {node.op} ".join(parts)


def unparse_expr(node: Union[Arith, Predicate]) -> str:
    if isinstance(node, (Compare, Not, BoolOp)):
        return _predicate_text(node)
    return _arith_text(node)


def unparse(cls: FunctionClass) -> str:
    """
    函数类的规范文本，重新解析得到相等的函数类

    Examples:
        >>> unparse(parse_foe("class t(): 0<=1", space))
        'class t(): 0 <= 1'
    """
    return f"class {cls.name}({', '.join(cls.params)}): {_predicate_text(cls.body)}"
