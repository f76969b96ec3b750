"""矩量矩阵自由元上的仿射泛函"""
import itertools
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from bell.behavior import SIGNS
from bell.noise import coefficient_terms, noise_weights
from utils.logger import Logger

ZERO_COEFF = 1e-15


@dataclass(frozen=True, eq=False)
class LinearFunctional:
    constant: float = 0.0
    coeffs: Dict[int, float] = field(default_factory=dict)

    # 让 numpy 标量在左侧时回落到 __rmul__ / __radd__
    __array_ufunc__ = None

    def __post_init__(self):
        cleaned = {int(k): float(v) for k, v in self.coeffs.items() if abs(v) > ZERO_COEFF}
        object.__setattr__(self, "coeffs", cleaned)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return LinearFunctional(self.constant + other, self.coeffs)
        coeffs = dict(self.coeffs)
        for cid, v in other.coeffs.items():
            coeffs[cid] = coeffs.get(cid, 0.0) + v
        return LinearFunctional(self.constant + other.constant, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        return LinearFunctional(self.constant * scalar, {k: v * scalar for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def evaluate(self, values):
        """
        :param values: 各类取值的向量（按类编号索引）
        :return: float
        """
        return self.constant + sum(v * values[cid] for cid, v in self.coeffs.items())

    def is_close(self, other, tol=1e-12):
        diff = self - other
        return abs(diff.constant) <= tol and all(abs(v) <= tol for v in diff.coeffs.values())


def probability_functional(s, a, b, x, y):
    """P(ab|xy) = ¼[1 + a⟨A_x⟩ + b⟨B_y⟩ + ab⟨A_xB_y⟩]，a、b 为结果下标（0 = plus）"""
    sa, sb = SIGNS[a], SIGNS[b]
    return LinearFunctional(0.25, {
        s.class_of(f"A{x}"): 0.25 * sa,
        s.class_of(f"B{y}"): 0.25 * sb,
        s.class_of(f"A{x}B{y}"): 0.25 * sa * sb,
    })


def eberhard_coefficient_functionals(s):
    """
    K、ℒ′、ℒ″、L、M、N、O 的矩量泛函；每个概率项都经过 probability_functional
    :return: dict
    """
    k, lp, lpp, m, n, o = coefficient_terms(
        lambda a, b, x, y: probability_functional(s, a, b, x, y)
    )
    return {"K": k, "Lp": lp, "Lpp": lpp, "L": lp + lpp, "M": m, "N": n, "O": o}


def noisy_eberhard_objective(s, eta, xi=0.0):
    """η²K − ηL + ξηM − ξN + ξ²O"""
    f = eberhard_coefficient_functionals(s)
    return (eta ** 2) * f["K"] - eta * f["L"] + (xi * eta) * f["M"] - xi * f["N"] + (xi ** 2) * f["O"]


def noisy_eberhard_functional(s, n):
    """任意八参数噪声下的含噪 Eberhard 泛函（信道权重逐项推入 probability_functional）"""
    w = noise_weights(n)
    total = LinearFunctional()
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if w[a, b, x, y] != 0.0:
            total = total + float(w[a, b, x, y]) * probability_functional(s, a, b, x, y)
    Logger.debug(f"含噪 Eberhard 泛函：常数 {total.constant:.6g}，{len(total.coeffs)} 个系数")
    return total


def chsh_functional(s):
    terms = [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)]
    return LinearFunctional(0.0, {s.class_of(f"A{x}B{y}"): sign for x, y, sign in terms})


def evaluate_on_gamma(functional, s, gamma):
    return functional.evaluate(s.moments_from_matrix(np.asarray(gamma)))
