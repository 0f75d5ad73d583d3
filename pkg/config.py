# -*- coding: utf-8 -*-
"""
配置文件
集中管理项目中的常量和配置参数
"""

# ========== 文件路径配置 ==========
DATA_DIR = "data"                   # 示例数据目录（模式、数据集、向量文件）
CSV_ENCODING = "utf-8-sig"          # CSV 读写编码（兼容 Excel 打开）
SOURCE_COLUMN = "_source"           # 数据集中可选的来源/标签列

# ========== 数值容差配置 ==========
DEFAULT_TOLERANCE = 1e-9            # 坐标相等容差：|a-b| <= max(tol, tol*max(|a|,|b|))
TOLERANCE_ENV_VAR = "VECTONT_TOLERANCE"  # 环境变量覆盖默认容差（命令行参数优先）
INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

# ========== 存在集配置 ==========
INDEX_MIN_MEMBERS = 64              # 成员数达到该值时才为连续维度建立排序索引

# ========== 存在函数（FOE）配置 ==========
GAP_FACTOR = 1.5                    # 连续性阈值 = GAP_FACTOR × 中位间隔
FOE_MAX_NESTING = 64                # 表达式括号最大嵌套层数

# ========== 凸区域配置 ==========
HULL_TOLERANCE = 1e-7               # 凸组合可行性容差
EXACT_HULL_MAX_DIMS = 3             # 维度 <= 3 时使用有理数精确主元消去

# ========== 相似度与导航配置 ==========
DEFAULT_ORDER = 2.0                 # 默认 Minkowski 阶数
DEFAULT_NEAREST_K = 1

# ========== 线性相关与概率配置 ==========
DEPENDENCE_TOLERANCE = 1e-9         # 消元主元阈值 = tol × 最大绝对元素
DEFAULT_BINS = 4                    # 每个数值维度的等宽分箱数
DEFAULT_SMOOTHING = 0.0             # 拉普拉斯平滑常数
PROBABILITY_SUM_TOLERANCE = 1e-12
MAX_PROBABILITY_CELLS = 1_000_000    # 直方图格子数上限（计数与概率均为稠密数组）
