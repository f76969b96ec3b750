"""
局域确定点（LD）、PR 盒与无信号凸分解

LD 点按赋值四元组 (a0, a1, b0, b1) 标识；LD_POINTS 给出与常用编号
{1, 4, 5, 8, 9, 12, 14, 15} 的对应关系，这 8 个点恰好使 CHSH = 2、E = 0。
"""
import itertools
from dataclasses import dataclass, fields

import numpy as np

from bell.behavior import Behavior, Outcome
from utils.errors import DomainError
from utils.logger import Logger

P, Z = Outcome.PLUS, Outcome.ZERO

LD_POINTS = {
    1: (P, P, P, P),
    4: (Z, Z, Z, Z),
    5: (P, P, P, Z),
    8: (Z, Z, Z, P),
    9: (P, Z, P, P),
    12: (Z, P, Z, Z),
    14: (P, Z, Z, P),
    15: (Z, P, P, Z),
}


def ld_distribution(assignment):
    """
    确定性行为 P(a(x) b(y)|xy) = 1
    :param assignment: (a0, a1, b0, b1)，元素为 Outcome
    :return: Behavior
    """
    if len(assignment) != 4:
        message = f"LD 赋值应为四元组 (a0, a1, b0, b1)，实际为 {assignment}"
        Logger.error(message)
        raise DomainError(message)
    a0, a1, b0, b1 = (Outcome(v) for v in assignment)
    p = np.zeros((2, 2, 2, 2))
    for x, a in enumerate((a0, a1)):
        for y, b in enumerate((b0, b1)):
            p[a, b, x, y] = 1.0
    label = "D(" + "".join(o.symbol for o in (a0, a1, b0, b1)) + ")"
    return Behavior(p, label=label)


def all_ld_distributions():
    return [ld_distribution(assignment) for assignment in itertools.product(Outcome, repeat=4)]


def pr_box(alpha=0, beta=0, gamma=0):
    """
    PR 盒：结果下标满足 a ⊕ b = xy ⊕ αx ⊕ βy ⊕ γ 时概率为 ½
    (0, 0, 0) 即 CHSH = 4 的标准 PR 盒
    """
    p = np.zeros((2, 2, 2, 2))
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma:
            p[a, b, x, y] = 0.5
    return Behavior(p, label="PR" if (alpha, beta, gamma) == (0, 0, 0) else f"PR{alpha}{beta}{gamma}")


PR_BOX = pr_box()


@dataclass(frozen=True)
class NsDecomposition:
    p_pr: float
    p1: float = 0.0
    p4: float = 0.0
    p5: float = 0.0
    p8: float = 0.0
    p9: float = 0.0
    p12: float = 0.0
    p14: float = 0.0
    p15: float = 0.0

    def __post_init__(self):
        weights = self.weights()
        if min(weights) < -1e-12 or abs(sum(weights) - 1.0) > 1e-12:
            message = f"分解权重必须非负且和为 1：{weights}"
            Logger.error(message)
            raise DomainError(message)

    def weights(self):
        return [getattr(self, f.name) for f in fields(self)]

    @property
    def alpha(self):
        return 2.0 * (self.p1 + self.p5 + self.p9) + self.p14 + self.p15


def ns_mixture(d):
    p = d.p_pr * PR_BOX.p
    for index, assignment in LD_POINTS.items():
        p = p + getattr(d, f"p{index}") * ld_distribution(assignment).p
    return Behavior(p, label="P_ns-mixture")


# 无信号多胞形的 24 个顶点：16 个 LD 点与 8 个 PR 盒
def no_signaling_vertices():
    prs = [pr_box(*bits) for bits in itertools.product(range(2), repeat=3)]
    return np.stack([b.p for b in all_ld_distributions() + prs])


def random_no_signaling_behaviors(rng, count):
    """
    在无信号多胞形中随机取点（顶点的 Dirichlet 凸组合）
    :param rng: numpy Generator
    :param count: 数量
    :return: 形状 (count, 2, 2, 2, 2) 的数组
    """
    vertices = no_signaling_vertices()
    weights = rng.dirichlet(np.full(len(vertices), 0.5), size=count)
    return np.einsum("nv,vabxy->nabxy", weights, vertices)
