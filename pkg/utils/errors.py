"""
领域异常定义

所有异常在抛出前都应先通过 Logger.error 记录同样的信息。
"""


class DomainError(ValueError):
    """参数越界、形状错误、权重非法、未知 NPA 层级等"""


class SignalingError(DomainError):
    """行为不满足无信号条件，边缘分布无定义"""

    def __init__(self, message, max_violation):
        super().__init__(message)
        self.max_violation = max_violation


class InfeasibleViolationError(ValueError):
    """在 η = 1 时也无法达到观测到的 Eberhard 违背"""

    def __init__(self, message, e_obs, xi, achievable):
        super().__init__(message)
        self.e_obs = e_obs
        self.xi = xi
        self.achievable = achievable


class SdpConvergenceError(RuntimeError):
    """SDP 求解未收敛，携带当前最好的原始/对偶界"""

    def __init__(self, message, status, primal_bound, dual_bound):
        super().__init__(message)
        self.status = status
        self.primal_bound = primal_bound
        self.dual_bound = dual_bound
