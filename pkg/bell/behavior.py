"""
行为（Behavior）与关联函数

概率张量统一按 p[a, b, x, y] 存放，结果下标 0 = plus（+1），1 = zero（−1）。
"""
import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

import numpy as np

from utils.errors import DomainError, SignalingError
from utils.logger import Logger

STRUCTURAL_TOL = 1e-12
NO_SIGNALING_TOL = 1e-10

# plus -> +1, zero -> -1
SIGNS = np.array([1.0, -1.0])

# E = P(++|00) − P(+0|01) − P(0+|10) − P(++|11)
EBERHARD_WEIGHTS = np.zeros((2, 2, 2, 2))
EBERHARD_WEIGHTS[0, 0, 0, 0] = 1.0
EBERHARD_WEIGHTS[0, 1, 0, 1] = -1.0
EBERHARD_WEIGHTS[1, 0, 1, 0] = -1.0
EBERHARD_WEIGHTS[0, 0, 1, 1] = -1.0


class Outcome(IntEnum):
    PLUS = 0
    ZERO = 1

    @property
    def sign(self):
        return 1 if self is Outcome.PLUS else -1

    @property
    def symbol(self):
        return "+" if self is Outcome.PLUS else "0"


def _signaling_violation(p):
    """8 个无信号等式的最大偏差：Alice 的边缘分布与 y 无关，Bob 的与 x 无关"""
    alice = p.sum(axis=1)  # [a, x, y]
    bob = p.sum(axis=0)  # [b, x, y]
    return float(max(np.abs(alice[:, :, 0] - alice[:, :, 1]).max(), np.abs(bob[:, 0, :] - bob[:, 1, :]).max()))


@dataclass(frozen=True, eq=False)
class Behavior:
    """
    16 个条件概率 P(ab|xy)
    valid 为 False 表示存在负概率或归一化失败（例如由不一致的关联函数重建得到）
    no_signaling 为构造时按 NO_SIGNALING_TOL 检查的无信号标记
    """
    p: np.ndarray
    label: Optional[str] = None
    valid: bool = field(init=False)
    no_signaling: bool = field(init=False)

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if arr.shape != (2, 2, 2, 2):
            message = f"行为张量形状应为 (2, 2, 2, 2)，实际为 {arr.shape}"
            Logger.error(message)
            raise DomainError(message)
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)
        in_range = bool(np.all(arr >= -STRUCTURAL_TOL) and np.all(arr <= 1.0 + STRUCTURAL_TOL))
        normalized = bool(np.all(np.abs(arr.sum(axis=(0, 1)) - 1.0) <= STRUCTURAL_TOL))
        object.__setattr__(self, "valid", in_range and normalized)
        object.__setattr__(self, "no_signaling", _signaling_violation(arr) <= NO_SIGNALING_TOL)

    def prob(self, a, b, x, y):
        return float(self.p[a, b, x, y])

    def rows(self):
        """4×4 行表示：行 (x0y0, x0y1, x1y0, x1y1)，列 (++, +0, 0+, 00)"""
        return self.p.transpose(2, 3, 0, 1).reshape(4, 4)

    @classmethod
    def from_rows(cls, rows, label=None):
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (4, 4):
            message = f"行为 JSON 中的 p 应为 4×4 数组，实际为 {arr.shape}"
            Logger.error(message)
            raise DomainError(message)
        return cls(arr.reshape(2, 2, 2, 2).transpose(2, 3, 0, 1), label=label)

    @classmethod
    def uniform(cls):
        return cls(np.full((2, 2, 2, 2), 0.25), label="uniform")

    def mix(self, other, weight):
        """weight·self + (1 − weight)·other"""
        return Behavior(weight * self.p + (1.0 - weight) * other.p)


@dataclass(frozen=True, eq=False)
class Correlators:
    A: np.ndarray
    B: np.ndarray
    AB: np.ndarray

    def __post_init__(self):
        for name, shape in (("A", (2,)), ("B", (2,)), ("AB", (2, 2))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                message = f"关联函数 {name} 的形状应为 {shape}，实际为 {arr.shape}"
                Logger.error(message)
                raise DomainError(message)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class NoSignalingReport:
    max_violation: float
    passed: bool
    tol: float


def check_no_signaling(b, tol=NO_SIGNALING_TOL):
    """
    检查 8 个无信号等式：Alice 的边缘分布与 y 无关（4 个），Bob 的与 x 无关（4 个）
    :param b: Behavior
    :param tol: 容差
    :return: NoSignalingReport，不抛异常
    """
    max_violation = _signaling_violation(b.p)
    return NoSignalingReport(max_violation=max_violation, passed=max_violation <= tol, tol=tol)


def correlators_from_behavior(b):
    if not b.valid:
        message = "行为含负概率或未归一化，关联函数无定义"
        Logger.error(message)
        raise DomainError(message)
    report = check_no_signaling(b)
    if not report.passed:
        message = f"行为存在信号（最大违背 {report.max_violation:.3e}），边缘关联无定义"
        Logger.error(message)
        raise SignalingError(message, report.max_violation)
    ab = np.einsum("a,b,abxy->xy", SIGNS, SIGNS, b.p)
    # 无信号时对另一方设置取平均与任取其一相同
    a = np.einsum("a,abxy->xy", SIGNS, b.p).mean(axis=1)
    bb = np.einsum("b,abxy->xy", SIGNS, b.p).mean(axis=0)
    return Correlators(A=a, B=bb, AB=ab)


def behavior_from_correlators(c, label=None):
    """P(ab|xy) = ¼[1 + a·A_x + b·B_y + ab·AB_xy]；存在负项时返回 valid=False 的行为"""
    p = 0.25 * (
        1.0
        + np.einsum("a,x->ax", SIGNS, c.A)[:, None, :, None]
        + np.einsum("b,y->by", SIGNS, c.B)[None, :, None, :]
        + np.einsum("a,b,xy->abxy", SIGNS, SIGNS, c.AB)
    )
    result = Behavior(p, label=label)
    if not result.valid:
        Logger.warning(f"由关联函数重建的行为含负概率（最小值 {p.min():.3e}）")
    return result


def chsh_value(b):
    ab = correlators_from_behavior(b).AB
    return float(ab[0, 0] + ab[0, 1] + ab[1, 0] - ab[1, 1])


def eberhard_value(b):
    # 对有信号的行为也逐点定义
    return float(np.sum(EBERHARD_WEIGHTS * b.p))


def eberhard_from_chsh(beta):
    return beta / 4.0 - 0.5


def behavior_to_json(b):
    data = {"p": b.rows().tolist()}
    if b.label is not None:
        data["label"] = b.label
    return data


def behavior_from_json(data):
    """
    解析共享 JSON 格式，非法行为直接报错
    :param data: dict，含 "p" 与可选 "label"
    :return: Behavior
    """
    if "p" not in data:
        message = "行为 JSON 缺少键 p"
        Logger.error(message)
        raise DomainError(message)
    b = Behavior.from_rows(data["p"], label=data.get("label"))
    if not b.valid:
        message = f"行为（{b.label}）不满足非负或归一化条件"
        Logger.error(message)
        raise DomainError(message)
    return b


def load_behavior(path):
    try:
        with open(path, "r", encoding="utf-8") as file:
            data = json.load(file)
    except (OSError, json.JSONDecodeError) as e:
        message = f"行为文件（{path}）读取失败, 错误信息：({e})"
        Logger.error(message)
        raise DomainError(message) from e
    return behavior_from_json(data)
