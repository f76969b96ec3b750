"""
原始-对偶内点法（HKM 方向，Mehrotra 预测-校正）

内部把 maximize ⟨C, X⟩ 写成 minimize ⟨−C, X⟩：
    原始  min ⟨Cm, X⟩  s.t. A(X) = b, X ⪰ 0
    对偶  max b·y      s.t. A*(y) + Z = Cm, Z ⪰ 0
维数很小（≤ 16），全部用稠密线性代数。
每一步都经 DenseSdp.certify 修正成可行下界与严格上界，间隙按修正后的点判断，
对角线被固定的问题上返回的 dual_value 总是不小于 value。
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from sdp.base_solver import BaseSolver
from sdp.problem import WEAK_DUALITY_FLOOR, SdpSolution
from utils.logger import Logger

PSD_FLOOR = -1e-9
# 连续多少步没有改进就停止
STALL_LIMIT = 8


def _sym(m):
    return 0.5 * (m + m.T)


def _max_step(x, dx, fraction):
    """使 x + α·dx 保持正定的最大步长（乘以 fraction，截断到 1）"""
    try:
        chol = linalg.cholesky(x, lower=True)
    except linalg.LinAlgError:
        return 0.0
    w = linalg.solve_triangular(chol, dx, lower=True)
    w = linalg.solve_triangular(chol, w.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(w)).min()
    if lam >= 0:
        return 1.0
    return min(1.0, -fraction / lam)


def _positive_or(candidate, fallback):
    try:
        linalg.cholesky(candidate, lower=True)
    except linalg.LinAlgError:
        return fallback
    return candidate


class InteriorPointSolver(BaseSolver):
    name = "interior-point"

    def __init__(self, max_iter=100, step_fraction=0.98):
        self.max_iter = max_iter
        self.step_fraction = step_fraction

    def _solve(self, problem, tol):
        n = problem.dim
        m = problem.num_constraints
        cm = -problem.C
        a_mat = problem.A
        a_vec = a_mat.reshape(m, -1)
        b = problem.b

        x = problem.interior_point if problem.interior_point is not None else np.eye(n)
        y = np.zeros(m)
        zeta = max(10.0, np.sqrt(n), np.linalg.norm(cm))
        z = zeta * np.eye(n)

        status = "max_iter"
        best = None
        stalled = 0
        iteration = 0
        for iteration in range(1, self.max_iter + 1):
            # 每一步都给出严格的上下界，收敛判据作用在修正后的点上
            point = problem.certify(x, y)
            score = abs(point.gap) + point.primal_residual + point.dual_residual
            if best is None or score < best[0]:
                best, stalled = (score, point), 0
            else:
                stalled += 1
            if point.converged(tol):
                best, status = (score, point), "optimal"
                break
            if np.abs(y).max(initial=0.0) > 1e12:
                status = "infeasible"
                break
            if stalled >= STALL_LIMIT:
                Logger.debug(f"内点法停滞于第 {iteration} 次迭代，gap={best[1].gap:.3e}")
                break

            rp = b - problem.apply(x)
            rd = cm - z - problem.adjoint(y)
            try:
                z_inv = linalg.cho_solve(linalg.cho_factor(z), np.eye(n))
            except linalg.LinAlgError:
                Logger.debug("对偶矩阵 Z 失去正定性，提前终止")
                break
            t = x @ a_mat @ z_inv
            schur = _sym(a_vec @ t.reshape(m, -1).T)
            try:
                factor = linalg.cho_factor(schur)

                def solve_schur(rhs):
                    return linalg.cho_solve(factor, rhs)
            except linalg.LinAlgError:
                def solve_schur(rhs):
                    return np.linalg.lstsq(schur, rhs, rcond=None)[0]

            x_rd_zinv = problem.apply(x @ rd @ z_inv)

            def direction(rc):
                h = rp - problem.apply(rc @ z_inv) + x_rd_zinv
                dy = solve_schur(h)
                dz = _sym(rd - problem.adjoint(dy))
                dx = _sym((rc - x @ dz) @ z_inv)
                return dx, dy, dz

            mu = float(np.sum(x * z)) / n
            # 预测步
            dx_a, dy_a, dz_a = direction(-x @ z)
            alpha_p = _max_step(x, dx_a, 1.0)
            alpha_d = _max_step(z, dz_a, 1.0)
            mu_aff = float(np.sum((x + alpha_p * dx_a) * (z + alpha_d * dz_a))) / n
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0
            # 校正步
            rc = sigma * mu * np.eye(n) - x @ z - dx_a @ dz_a
            dx, dy, dz = direction(rc)
            alpha_p = _max_step(x, dx, self.step_fraction)
            alpha_d = _max_step(z, dz, self.step_fraction)
            if max(alpha_p, alpha_d) < 1e-12:
                Logger.debug(f"内点法步长退化于第 {iteration} 次迭代")
                break
            x = _sym(x + alpha_p * dx)
            y = y + alpha_d * dy
            z = _sym(z + alpha_d * dz)
            # 仍正定时把迭代点拉回可行集，残差不再累积
            x = _positive_or(problem.project(x), x)
            z = _positive_or(_sym(cm - problem.adjoint(y)), z)

        point = best[1]
        return SdpSolution(
            value=point.value,
            dual_value=point.dual_value,
            gap=point.gap,
            status=status,
            X=point.X,
            y=point.y,
            Z=point.Z,
            iterations=iteration,
            primal_residual=point.primal_residual,
            dual_residual=point.dual_residual,
            solver=self.name,
        )


_DEFAULT_SOLVER = InteriorPointSolver()


def solve_sdp(problem, tol=1e-9, solver=None):
    return (solver or _DEFAULT_SOLVER).solve(problem, tol)


@dataclass(frozen=True)
class CertificateReport:
    min_eigenvalue: float
    primal_residual: float
    weak_duality: bool
    passed: bool


def verify_solution(problem, solution, tol=1e-9):
    """
    不依赖求解器内部状态，独立检查返回的 X：半正定、约束残差、弱对偶
    """
    x = _sym(np.asarray(solution.X, dtype=float))
    min_eig = float(np.linalg.eigvalsh(x).min())
    residual = float(np.abs(problem.apply(x) - problem.b).max(initial=0.0))
    weak = solution.dual_value >= solution.value - WEAK_DUALITY_FLOOR
    return CertificateReport(
        min_eigenvalue=min_eig,
        primal_residual=residual,
        weak_duality=weak,
        passed=min_eig >= PSD_FLOOR and residual <= tol and weak,
    )
