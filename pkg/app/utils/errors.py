"""统一的异常层级

每个异常类都带有 exit_code，CLI 直接据此返回稳定的退出码：
0 通过，1 数学性质不成立，2 解析错误，3 资源保护，4 缺少 κ。
"""


class DeJongError(Exception):
    """所有领域异常的基类"""

    exit_code = 1


class SpecError(DeJongError, ValueError):
    """规格文档无法解析或结构不合法"""

    exit_code = 2


class NonCentered(SpecError):
    """齐次和要求变量中心化"""


class NonUnitVariance(SpecError):
    """齐次和要求变量方差为 1"""


class MixedOrder(SpecError):
    """系数子集的大小不一致"""


class UnsupportedVariable(SpecError):
    """精确计算遇到了只有采样器、没有有限支撑的变量"""


class SpaceTooLarge(DeJongError):
    """结果空间超过枚举上限"""

    exit_code = 3


class SubsetBudgetExceeded(SpaceTooLarge):
    """变量个数超过子集位掩码的上限"""


class KappaUnknown(DeJongError, ValueError):
    """非对称规格且没有提供 κ"""

    exit_code = 4


class InvalidKappa(DeJongError, ValueError):
    """κ 必须为正"""

    exit_code = 2


class OutOfRange(DeJongError, ValueError):
    """参数超出允许范围（分位数、矩的阶数、置信参数）"""

    exit_code = 2


class NoSampler(DeJongError, ValueError):
    """变量无法采样"""

    exit_code = 2
