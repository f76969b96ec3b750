"""
两比特量子实现

态 |ψ⟩ = cosθ|00⟩ + sinθ|11⟩，测量方向在 X–Z 平面：
O(φ) = sinφ·X + cosφ·Z，plus 对应 +1 本征值的投影 Π₊ = (I + O)/2。
"""
import math
from dataclasses import dataclass

import numpy as np

from bell.behavior import SIGNS, Behavior
from utils.errors import DomainError
from utils.logger import Logger

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
ANGLE_SLACK = 1e-12

# L-BFGS-B 的边界：θ ∈ [0, π/2]，测量角 ∈ [0, 2π]
ANGLE_BOUNDS = [(0.0, math.pi / 2)] + [(0.0, 2 * math.pi)] * 4


@dataclass(frozen=True)
class QuantumRealization:
    theta: float
    theta_a0: float
    theta_a1: float
    theta_b0: float
    theta_b1: float

    def __post_init__(self):
        for (low, high), name in zip(ANGLE_BOUNDS, ("theta", "theta_a0", "theta_a1", "theta_b0", "theta_b1")):
            value = float(getattr(self, name))
            if not low - ANGLE_SLACK <= value <= high + ANGLE_SLACK:
                message = f"角度 {name}={value} 超出范围 [{low}, {high:.6f}]"
                Logger.error(message)
                raise DomainError(message)
            object.__setattr__(self, name, value)

    @classmethod
    def from_angles(cls, angles):
        return cls(*(float(v) for v in angles))

    @property
    def angles(self):
        return np.array([self.theta, self.theta_a0, self.theta_a1, self.theta_b0, self.theta_b1])


def probability_tensor(angles):
    """
    闭式概率，按最后一维 5 个角度向量化
    :param angles: 形状 (..., 5)
    :return: 形状 (..., 2, 2, 2, 2)，下标 [a, b, x, y]
    """
    angles = np.asarray(angles, dtype=float)
    theta = angles[..., 0, None, None]
    tx = np.stack([angles[..., 1], angles[..., 2]], axis=-1)[..., :, None]
    ty = np.stack([angles[..., 3], angles[..., 4]], axis=-1)[..., None, :]
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    cx, sx, cy, sy = np.cos(tx), np.sin(tx), np.cos(ty), np.sin(ty)

    pp = (2 + np.cos(2 * theta - tx) + np.cos(2 * theta + tx)
          + 2 * cy * (c2 + cx) + 2 * sx * sy * s2) / 8
    pz = (np.sin(tx / 2) ** 2 * np.cos(ty / 2) ** 2 * np.sin(theta) ** 2
          + np.cos(tx / 2) ** 2 * np.sin(ty / 2) ** 2 * np.cos(theta) ** 2
          - 0.25 * sx * sy * s2)
    zp = (2 + np.cos(2 * theta + ty) + np.cos(2 * theta - ty)
          - 2 * cx * (c2 + cy) - 2 * sx * sy * s2) / 8
    zz = (1 + cx * cy - (cx + cy) * c2 + sx * sy * s2) / 4
    return np.stack([np.stack([pp, pz], axis=-3), np.stack([zp, zz], axis=-3)], axis=-4)


def realization_probabilities(r):
    return Behavior(probability_tensor(r.angles), label="quantum")


def realization_state(r):
    return np.array([math.cos(r.theta), 0.0, 0.0, math.sin(r.theta)])


def _observable(phi):
    return math.sin(phi) * PAULI_X + math.cos(phi) * PAULI_Z


def local_observables(r):
    """
    返回 ([A0, A1], [B0, B1])，均为 4×4 的 ±1 可观测量
    """
    eye = np.eye(2)
    alice = [np.kron(_observable(phi), eye) for phi in (r.theta_a0, r.theta_a1)]
    bob = [np.kron(eye, _observable(phi)) for phi in (r.theta_b0, r.theta_b1)]
    return alice, bob


def _projectors(phis):
    """[..., a, x, i, k]：第 x 个设置下结果 a 的投影 (I ± O)/2"""
    obs = np.sin(phis)[..., None, None] * PAULI_X + np.cos(phis)[..., None, None] * PAULI_Z
    return 0.5 * (np.eye(2) + SIGNS[:, None, None, None] * obs[..., None, :, :, :])


def born_rule_tensor(angles):
    """
    显式构造态与秩一投影，用 Born 规则计算全部 16 个概率，按最后一维 5 个角度向量化
    :param angles: 形状 (..., 5)
    :return: 形状 (..., 2, 2, 2, 2)，下标 [a, b, x, y]
    """
    angles = np.asarray(angles, dtype=float)
    theta = angles[..., 0]
    psi = np.zeros(angles.shape[:-1] + (2, 2))
    psi[..., 0, 0] = np.cos(theta)
    psi[..., 1, 1] = np.sin(theta)
    alice = _projectors(angles[..., 1:3])
    bob = _projectors(angles[..., 3:5])
    # ⟨ψ|Π_a ⊗ Π_b|ψ⟩，ψ 按 (Alice, Bob) 排成 2×2
    return np.einsum("...ij,...axik,...byjl,...kl->...abxy", psi, alice, bob, psi)


def born_rule_oracle(r):
    return Behavior(born_rule_tensor(r.angles), label="born-rule")
