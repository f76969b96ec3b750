from utils.errors import DomainError
from utils.logger import Logger


class BaseSolver:
    """
    求解器公共接口：子类实现 _solve，返回 SdpSolution
    外部锥规划求解器可以在同一接口下替换内置内点法
    """
    name = "base"

    def solve(self, problem, tol=1e-9):
        """
        求解 maximize ⟨C, X⟩ + offset
        :param problem: DenseSdp
        :param tol: 对偶间隙与残差容差
        :return: SdpSolution
        """
        if tol <= 0:
            message = f"容差必须为正数，实际为 {tol}"
            Logger.error(message)
            raise DomainError(message)
        solution = self._solve(problem, tol)
        Logger.debug(
            f"[{self.name}] status={solution.status} value={solution.value:.12g} "
            f"gap={solution.gap:.3e} iterations={solution.iterations}"
        )
        return solution

    def _solve(self, problem, tol):
        raise NotImplementedError
