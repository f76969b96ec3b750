"""
外部锥规划求解器后端（cvxpy），与内置内点法共用 BaseSolver 接口

cvxpy 只在实例化时导入。
"""
import numpy as np

from sdp.base_solver import BaseSolver
from sdp.problem import SdpSolution
from utils.logger import Logger


class CvxpySolver(BaseSolver):
    name = "cvxpy"

    def __init__(self, backend=None):
        import cvxpy

        self._cp = cvxpy
        self.backend = backend

    def _solve(self, problem, tol):
        cp = self._cp
        n = problem.dim
        x = cp.Variable((n, n), symmetric=True)
        psd = x >> 0
        constraints = [psd] + [cp.trace(a @ x) == b for a, b in zip(problem.A, problem.b)]
        prob = cp.Problem(cp.Maximize(cp.trace(problem.C @ x)), constraints)
        kwargs = {"solver": self.backend} if self.backend else {}
        try:
            prob.solve(**kwargs)
        except cp.error.SolverError as e:
            Logger.warning(f"cvxpy 求解失败：{e}")
            return SdpSolution(value=float("nan"), dual_value=float("nan"), gap=float("nan"),
                               status="max_iter", X=np.eye(n), solver=self.name)
        if prob.status not in ("optimal", "optimal_inaccurate"):
            status = "infeasible" if "infeasible" in prob.status else "max_iter"
            return SdpSolution(value=float("nan"), dual_value=float("nan"), gap=float("nan"),
                               status=status, X=np.eye(n), solver=self.name)

        xv = 0.5 * (x.value + x.value.T)
        z = 0.5 * (psd.dual_value + psd.dual_value.T)
        # 由 A*(y) = −C − Z 的最小二乘解恢复对偶变量，避免依赖等式约束的符号约定
        m = problem.num_constraints
        y = np.linalg.lstsq(problem.A.reshape(m, -1).T, (-problem.C - z).ravel(), rcond=None)[0]
        # 与内置求解器一样修正为严格的上下界，外部求解器的精度只影响间隙大小
        point = problem.certify(xv, y)
        optimal = prob.status == "optimal" and point.converged(tol)
        return SdpSolution(
            value=point.value,
            dual_value=point.dual_value,
            gap=point.gap,
            status="optimal" if optimal else "max_iter",
            X=point.X,
            y=point.y,
            Z=point.Z,
            primal_residual=point.primal_residual,
            dual_residual=point.dual_residual,
            solver=self.name,
            diagnostics={"cvxpy_status": prob.status},
        )
