"""
标准原始形式的稠密 SDP：

    maximize   ⟨C, X⟩ + offset
    subject to ⟨A_k, X⟩ = b_k,  X ⪰ 0

所有矩阵为实对称 dim×dim。
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from utils.errors import DomainError
from utils.logger import Logger

SYMMETRY_TOL = 1e-12
# 弱对偶允许的舍入误差：dual_value ≥ value − WEAK_DUALITY_FLOOR
WEAK_DUALITY_FLOOR = 1e-12
# A*(u) = I 的可接受残差
IDENTITY_TOL = 1e-10


def _sym(m):
    return 0.5 * (m + m.T)


def _symmetric_unit(dim, i, j):
    e = np.zeros((dim, dim))
    e[i, j] += 0.5
    e[j, i] += 0.5
    return e


@dataclass(frozen=True, eq=False)
class DenseSdp:
    dim: int
    C: np.ndarray
    A: np.ndarray
    b: np.ndarray
    offset: float = 0.0
    sense: str = "maximize"

    def __post_init__(self):
        c = np.asarray(self.C, dtype=float)
        a = np.asarray(self.A, dtype=float)
        if a.size == 0:
            a = np.zeros((0, self.dim, self.dim))
        b = np.asarray(self.b, dtype=float).ravel()
        if c.shape != (self.dim, self.dim) or a.ndim != 3 or a.shape[1:] != (self.dim, self.dim):
            message = f"矩阵形状（C {c.shape}，A {a.shape}）与维数 {self.dim} 不符"
            Logger.error(message)
            raise DomainError(message)
        if len(a) != len(b):
            message = f"约束矩阵个数 {len(a)} 与右端项个数 {len(b)} 不符"
            Logger.error(message)
            raise DomainError(message)
        if np.abs(c - c.T).max(initial=0.0) > SYMMETRY_TOL or np.abs(a - a.transpose(0, 2, 1)).max(initial=0.0) > SYMMETRY_TOL:
            message = "目标矩阵与约束矩阵必须对称"
            Logger.error(message)
            raise DomainError(message)
        if self.sense != "maximize":
            message = f"只支持 maximize，实际为 {self.sense}"
            Logger.error(message)
            raise DomainError(message)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)

    @property
    def num_constraints(self):
        return len(self.b)

    def apply(self, x):
        """A(X) = [⟨A_k, X⟩]"""
        return np.einsum("kij,ij->k", self.A, x)

    def adjoint(self, y):
        """A*(y) = Σ y_k A_k"""
        return np.einsum("k,kij->ij", y, self.A)

    def objective(self, x):
        return float(np.sum(self.C * x) + self.offset)

    @cached_property
    def _gram_pinv(self):
        a_vec = self.A.reshape(self.num_constraints, -1)
        return np.linalg.pinv(a_vec @ a_vec.T)

    def project(self, x):
        """把 X 正交投影到仿射集 {X : A(X) = b}"""
        return _sym(x + self.adjoint(self._gram_pinv @ (self.b - self.apply(x))))

    @cached_property
    def identity_multiplier(self):
        """
        满足 A*(u) = I 的 u；对角线全部被固定时存在，此时任何可行 X 的迹都等于 b·u
        :return: np.ndarray 或 None
        """
        a_vec = self.A.reshape(self.num_constraints, -1)
        u = np.linalg.lstsq(a_vec.T, np.eye(self.dim).ravel(), rcond=None)[0]
        if np.abs(self.adjoint(u) - np.eye(self.dim)).max() > IDENTITY_TOL:
            return None
        return u

    @cached_property
    def interior_point(self):
        """单位阵在仿射集上的投影，严格正定时作为原始内点，否则为 None"""
        center = self.project(np.eye(self.dim))
        if np.linalg.eigvalsh(center).min() <= 0:
            return None
        return center

    def certify(self, x, y):
        """
        把近似最优的 (X, y) 修正为严格的界：
        X 投影到仿射集，失去半正定性时与内点做凸组合，其目标值是最大值的下界；
        y 沿 u（A*(u) = I）平移到 Z = −C − A*(y) 半正定，−b·y + offset 是最大值的上界
        :return: CertifiedPoint
        """
        x = self.project(_sym(np.asarray(x, dtype=float)))
        center = self.interior_point
        low = np.linalg.eigvalsh(x).min()
        if low < 0 and center is not None:
            center_low = np.linalg.eigvalsh(center).min()
            t = -low / (center_low - low)
            x = _sym((1.0 - t) * x + t * center)
        y = np.asarray(y, dtype=float)
        z = _sym(-self.C - self.adjoint(y))
        u = self.identity_multiplier
        if u is not None:
            shift = min(0.0, float(np.linalg.eigvalsh(z).min()))
            y = y + shift * u
            z = _sym(-self.C - self.adjoint(y))
        # 对偶残差计入 Z 的半正定违背量，u 不存在时上界不严格
        dual_residual = max(float(np.abs(-self.C - z - self.adjoint(y)).max()),
                            -float(np.linalg.eigvalsh(z).min()), 0.0)
        return CertifiedPoint(
            X=x,
            y=y,
            Z=z,
            value=self.objective(x),
            dual_value=-float(self.b @ y) + self.offset,
            primal_residual=float(np.abs(self.apply(x) - self.b).max(initial=0.0)),
            dual_residual=dual_residual,
        )

    @classmethod
    def from_classes(cls, dim, classes, unit_classes, objective, constant=0.0):
        """
        由矩量矩阵的等价类构造 SDP
        :param dim: 矩阵维数
        :param classes: {类 id: [(i, j), ...]}，只含上三角单元（i ≤ j），第一个单元为代表元
        :param unit_classes: 取值恒为 1 的类
        :param objective: {类 id: 系数}，作用在代表元上
        :param constant: 目标常数项
        :return: DenseSdp
        """
        c = np.zeros((dim, dim))
        for cid, coeff in objective.items():
            if cid not in classes:
                message = f"目标函数引用了不存在的类 {cid}"
                Logger.error(message)
                raise DomainError(message)
            i, j = classes[cid][0]
            c += coeff * _symmetric_unit(dim, i, j)
        a, b = [], []
        # 对角线单位约束（显式施加，与字约化给出的单位类重复）
        for i in range(dim):
            a.append(_symmetric_unit(dim, i, i))
            b.append(1.0)
        for cid in sorted(classes):
            cells = classes[cid]
            if cid in unit_classes:
                for i, j in cells:
                    if i != j:
                        a.append(_symmetric_unit(dim, i, j))
                        b.append(1.0)
                continue
            i0, j0 = cells[0]
            for i, j in cells[1:]:
                a.append(_symmetric_unit(dim, i0, j0) - _symmetric_unit(dim, i, j))
                b.append(0.0)
        return cls(dim=dim, C=c, A=np.array(a), b=np.array(b), offset=float(constant))

    @classmethod
    def from_interchange(cls, data):
        """读取 npa 导出的 JSON 交换格式"""
        try:
            classes = {int(cid): [tuple(cell) for cell in cells] for cid, cells in data["classes"].items()}
            unit = {int(cid) for cid in data["unit_classes"]}
            objective = {int(t["class"]): float(t["coeff"]) for t in data["objective"]["terms"]}
            return cls.from_classes(int(data["dim"]), classes, unit, objective, float(data["objective"]["constant"]))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, DomainError):
                raise
            message = f"SDP 交换格式解析失败：({e})"
            Logger.error(message)
            raise DomainError(message) from e


@dataclass(frozen=True, eq=False)
class SdpSolution:
    value: float
    dual_value: float
    gap: float
    status: str
    X: np.ndarray
    y: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None
    iterations: int = 0
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")
    solver: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == "optimal"


@dataclass(frozen=True, eq=False)
class CertifiedPoint:
    """修正后的原始-对偶点：value 为可行下界，dual_value 为上界"""
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    value: float
    dual_value: float
    primal_residual: float
    dual_residual: float

    @property
    def gap(self):
        return self.dual_value - self.value

    def converged(self, tol):
        return (-WEAK_DUALITY_FLOOR <= self.gap <= tol
                and self.primal_residual <= tol and self.dual_residual <= tol)
