"""
线性探测噪声信道与 Eberhard 系数

每一方、每个测量设置独立地经过二元信道：
plus 以概率 1−η 变为 zero，zero 以概率 ξ（暗计数）变为 plus。
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from bell.behavior import EBERHARD_WEIGHTS, Behavior, Outcome, eberhard_value
from bell.decomposition import ld_distribution
from utils.errors import DomainError
from utils.logger import Logger

Pair = Tuple[float, float]


@dataclass(frozen=True)
class NoiseParams:
    """八个线性噪声参数，下标为该方的测量设置"""
    eta_A: Pair
    eta_B: Pair
    xi_A: Pair = (0.0, 0.0)
    xi_B: Pair = (0.0, 0.0)

    def __post_init__(self):
        for name in ("eta_A", "eta_B", "xi_A", "xi_B"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != 2 or not all(0.0 <= v <= 1.0 for v in values):
                message = f"噪声参数 {name}={values} 必须是两个 [0, 1] 内的数"
                Logger.error(message)
                raise DomainError(message)
            object.__setattr__(self, name, values)

    @classmethod
    def symmetric(cls, eta, xi=0.0):
        return cls(eta_A=(eta, eta), eta_B=(eta, eta), xi_A=(xi, xi), xi_B=(xi, xi))

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**{k: tuple(data[k]) for k in ("eta_A", "eta_B", "xi_A", "xi_B")})
        except (KeyError, TypeError) as e:
            message = f"噪声参数字典格式错误：{data}"
            Logger.error(message)
            raise DomainError(message) from e

    def to_dict(self):
        return {"eta_A": list(self.eta_A), "eta_B": list(self.eta_B),
                "xi_A": list(self.xi_A), "xi_B": list(self.xi_B)}

    @property
    def setting_independent(self):
        return all(v[0] == v[1] for v in (self.eta_A, self.eta_B, self.xi_A, self.xi_B))

    @property
    def dark_count_free(self):
        return not any(self.xi_A) and not any(self.xi_B)

    @property
    def symmetric_parties(self):
        return self.setting_independent and self.eta_A == self.eta_B and self.xi_A == self.xi_B

    def channels(self):
        """返回 (TA, TB)，形状 (设置, 输出, 输入)"""
        return _channel(self.eta_A, self.xi_A), _channel(self.eta_B, self.xi_B)


def _channel(etas, xis):
    eta = np.asarray(etas, dtype=float)
    xi = np.asarray(xis, dtype=float)
    return np.stack([
        np.stack([eta, xi], axis=-1),
        np.stack([1.0 - eta, 1.0 - xi], axis=-1),
    ], axis=1)


def apply_detection_noise(b, n):
    ta, tb = n.channels()
    q = np.einsum("xia,yjb,abxy->ijxy", ta, tb, b.p)
    return Behavior(q, label=b.label)


def noise_weights(n):
    """
    把含噪 Eberhard 泛函写成输入概率上的权重 w，
    即 eberhard_value(apply_detection_noise(b, n)) = Σ w[a,b,x,y]·P(ab|xy)
    """
    ta, tb = n.channels()
    return np.einsum("ijxy,xia,yjb->abxy", EBERHARD_WEIGHTS, ta, tb)


def coefficient_terms(prob):
    """
    由概率取值函数 prob(a, b, x, y) 组合出 (K, ℒ′, ℒ″, M, N, O)
    prob 可以返回浮点数，也可以返回矩量矩阵上的线性泛函
    """
    pp, pz, zp, zz = (0, 0), (0, 1), (1, 0), (1, 1)

    def q(outcomes, x, y):
        return prob(outcomes[0], outcomes[1], x, y)

    k = q(pp, 0, 0) - q(pp, 1, 1) + q(pp, 0, 1) + q(pp, 1, 0)
    lp = q(pz, 0, 1) + q(pp, 0, 1)
    lpp = q(zp, 1, 0) + q(pp, 1, 0)
    m = (q(zp, 0, 0) + q(pz, 0, 0) + q(zp, 0, 1) + q(pz, 1, 0)
         + q(pz, 0, 1) + q(zp, 1, 0) - q(zp, 1, 1) - q(pz, 1, 1))
    n = q(zz, 0, 1) + q(zz, 1, 0) + q(zp, 0, 1) + q(pz, 1, 0)
    o = q(zz, 0, 0) + q(zz, 0, 1) + q(zz, 1, 0) - q(zz, 1, 1)
    return k, lp, lpp, m, n, o


@dataclass(frozen=True, eq=False)
class EberhardCoefficients:
    K: float
    Lp: float
    Lpp: float
    M: float
    N: float
    O: float
    # 计算系数所用的行为；设置相关的噪声需要用它展开信道
    source: Optional[Behavior] = None

    @property
    def L(self):
        return self.Lp + self.Lpp

    def noisy_value(self, eta, xi=0.0):
        """对称、与设置无关的噪声：K η² − L η + M ξη − N ξ + O ξ²"""
        return (self.K * eta ** 2 - self.L * eta + self.M * xi * eta
                - self.N * xi + self.O * xi ** 2)


def eberhard_coefficients(b):
    k, lp, lpp, m, n, o = coefficient_terms(b.prob)
    return EberhardCoefficients(K=k, Lp=lp, Lpp=lpp, M=m, N=n, O=o, source=b)


def observed_eberhard(c, n):
    """
    含噪观测到的 Eberhard 值
    :param c: EberhardCoefficients
    :param n: NoiseParams
    :return: float
    """
    if n.setting_independent and n.dark_count_free:
        eta_a, eta_b = n.eta_A[0], n.eta_B[0]
        return c.K * eta_a * eta_b - c.Lp * eta_a - c.Lpp * eta_b
    if n.symmetric_parties:
        return c.noisy_value(n.eta_A[0], n.xi_A[0])
    if c.source is None:
        message = "设置相关或非对称暗计数的噪声需要系数携带原始行为才能展开信道"
        Logger.error(message)
        raise DomainError(message)
    return eberhard_value(apply_detection_noise(c.source, n))


def exact_violation_mixture(b, n, e_obs):
    """
    将不等式见证 E(b, n) ≥ e_obs 变为等式见证：与 D4（恒为 00）混合，
    使含噪 Eberhard 值恰好等于 e_obs
    """
    d4 = ld_distribution((Outcome.ZERO,) * 4)
    v = eberhard_value(apply_detection_noise(b, n))
    v4 = eberhard_value(apply_detection_noise(d4, n))
    if e_obs <= 0 or v < e_obs:
        message = f"含噪 Eberhard 值 {v:.9g} 未达到目标 {e_obs:.9g}，无法构造等式见证"
        Logger.error(message)
        raise DomainError(message)
    weight = (e_obs - v4) / (v - v4)
    return b.mix(d4, weight)
