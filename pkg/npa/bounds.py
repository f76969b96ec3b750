"""
NPA 松弛下的含噪 Eberhard 最大值与 η_npa 二分

内层 SDP 求得全局最优，可行性向上封闭，所以二分得到的是松弛上的
全局最小效率，即量子最小效率的可靠下界。可行性按对偶上界判定，
数值误差只会让 η_npa 偏小。
"""
from dataclasses import dataclass
from typing import List

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from bell.noise import NoiseParams
from config.config import Config, ETA_EBERHARD
from npa.functionals import noisy_eberhard_functional, noisy_eberhard_objective
from npa.moments import build_moment_structure
from quantum.search import SearchConfig, validate_target, max_noisy_eberhard_general
from sdp.interior_point import InteriorPointSolver
from sdp.problem import DenseSdp
from utils.errors import DomainError, InfeasibleViolationError, SdpConvergenceError
from utils.logger import Logger

# 第二次尝试用更保守的步长与更多迭代
ATTEMPT_SOLVERS = (
    InteriorPointSolver(max_iter=Config.SDP_MAX_ITER, step_fraction=0.98),
    InteriorPointSolver(max_iter=3 * Config.SDP_MAX_ITER, step_fraction=0.9),
)


@dataclass(frozen=True, eq=False)
class NpaCertificate:
    value: float
    dual_value: float
    gap: float
    status: str
    level: str
    moments: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class BisectionStep:
    eta: float
    value: float
    dual_value: float
    feasible: bool


def build_sdp(s, functional):
    return DenseSdp.from_classes(s.dim, s.classes, s.unit_classes, functional.coeffs, functional.constant)


def _log_retry(retry_state):
    error = retry_state.outcome.exception()
    Logger.warning(f"SDP 求解未收敛（第 {retry_state.attempt_number} 次尝试），使用保守参数重试：{error}")


def _accept(solution, tol):
    if solution.optimal:
        return solution
    message = (f"SDP 求解失败：status={solution.status}，"
               f"原始界 {solution.value:.9g}，对偶界 {solution.dual_value:.9g}，间隙 {solution.gap:.3e}（要求 ≤ {tol:.1e}）")
    Logger.error(message)
    raise SdpConvergenceError(message, solution.status, solution.value, solution.dual_value)


def solve_functional(s, functional, tol=Config.SDP_TOL, solver=None):
    """
    在松弛上最大化仿射泛函，失败时由 tenacity 换保守参数重试
    :return: NpaCertificate
    """
    problem = build_sdp(s, functional)
    solvers = (solver,) if solver is not None else ATTEMPT_SOLVERS
    for attempt in Retrying(
        stop=stop_after_attempt(len(solvers)),
        retry=retry_if_exception_type(SdpConvergenceError),
        before_sleep=_log_retry,
        reraise=True,
    ):
        with attempt:
            solution = _accept(solvers[attempt.retry_state.attempt_number - 1].solve(problem, tol), tol)
    return NpaCertificate(
        value=solution.value,
        dual_value=solution.dual_value,
        gap=solution.gap,
        status=solution.status,
        level=s.level,
        moments=s.moments_from_matrix(solution.X),
        gamma=solution.X,
    )


def max_noisy_eberhard_sdp(eta, xi=0.0, level=Config.NPA_LEVEL, tol=Config.SDP_TOL, solver=None):
    """
    maximize η²K − ηL + ξηM − ξN + ξ²O，常数项并入目标偏移
    :return: (value, NpaCertificate)
    """
    if not 0.0 <= eta <= 1.0 or not 0.0 <= xi < 1.0:
        message = f"η={eta} 必须在 [0, 1] 内，ξ={xi} 必须在 [0, 1) 内"
        Logger.error(message)
        raise DomainError(message)
    s = build_moment_structure(level)
    certificate = solve_functional(s, noisy_eberhard_objective(s, eta, xi), tol, solver)
    return certificate.value, certificate


def max_noisy_eberhard_sdp_general(n, level=Config.NPA_LEVEL, tol=Config.SDP_TOL, solver=None):
    s = build_moment_structure(level)
    certificate = solve_functional(s, noisy_eberhard_functional(s, n), tol, solver)
    return certificate.value, certificate


def min_efficiency_npa(e_obs, xi=0.0, tol=Config.BISECTION_TOL, level=Config.NPA_LEVEL, solver=None):
    """
    在 [2/3, 1] 上二分，可行性判据为对偶上界 ≥ E_obs − slack：
    只有被对偶证书排除的 η 才判为不可行，返回值因此是可靠下界
    :return: (eta, trace)
    """
    validate_target(e_obs, tol)
    slack = Config.FEASIBILITY_SLACK
    trace: List[BisectionStep] = []

    value, certificate = max_noisy_eberhard_sdp(1.0, xi, level, solver=solver)
    bound = certificate.dual_value
    trace.append(BisectionStep(1.0, value, bound, bound >= e_obs - slack))
    if bound < e_obs - slack:
        message = f"ξ={xi} 时层级 {level} 松弛可达到的最大违背不超过 {bound:.6f}，小于观测值 {e_obs}"
        Logger.error(message)
        raise InfeasibleViolationError(message, e_obs=e_obs, xi=xi, achievable=bound)

    lower, upper = ETA_EBERHARD, 1.0
    while upper - lower > tol:
        mid = 0.5 * (lower + upper)
        value, certificate = max_noisy_eberhard_sdp(mid, xi, level, solver=solver)
        feasible = certificate.dual_value >= e_obs - slack
        trace.append(BisectionStep(mid, value, certificate.dual_value, feasible))
        if feasible:
            upper = mid
        else:
            lower = mid
        Logger.debug(f"η_npa 二分：η={mid:.9f} 最大值={value:.9g} 上界={certificate.dual_value:.9g} 可行={feasible}")
    Logger.info(f"η_npa(E={e_obs}, ξ={xi}, 层级 {level}) = {upper:.9f}")
    return upper, trace


def classify_noise_point(e_obs, n, level=Config.NPA_LEVEL, cfg=None):
    """
    八参数噪声空间中单点的分类：
    certified_infeasible  松弛最大值的对偶上界 < E_obs，任何量子盒都不可能
    witnessed_feasible    局部搜索找到了达到 E_obs 的量子实现
    undetermined          两者之间
    :return: (label, sdp_value, search_value)
    """
    slack = Config.FEASIBILITY_SLACK
    _, certificate = max_noisy_eberhard_sdp_general(n, level)
    sdp_value = certificate.dual_value
    if sdp_value < e_obs - slack:
        return "certified_infeasible", sdp_value, None
    search_value, _ = max_noisy_eberhard_general(n, cfg or SearchConfig())
    if search_value >= e_obs - slack:
        return "witnessed_feasible", sdp_value, search_value
    return "undetermined", sdp_value, search_value


def random_noise_params(rng, count, eta_range=(ETA_EBERHARD, 1.0), xi_range=(0.0, 0.02)):
    """在八参数空间中均匀取样"""
    etas = rng.uniform(*eta_range, size=(count, 4))
    xis = rng.uniform(*xi_range, size=(count, 4))
    return [
        NoiseParams(eta_A=tuple(e[:2]), eta_B=tuple(e[2:]), xi_A=tuple(z[:2]), xi_B=tuple(z[2:]))
        for e, z in zip(etas, xis)
    ]
