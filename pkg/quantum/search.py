"""
量子实现上界 η_qr：多起点有界局部搜索 + 对 η 的二分

可行性判定使用不等式 f(η) ≥ E_obs；对无暗计数的情形，若某实现在 η₀ 处
已有 f(η₀) > 0，则在 [η₀, 1] 上 f 单调递增，二分因此是可靠的。
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from bell.noise import NoiseParams, noise_weights
from config.config import Config, E_MAX, ETA_EBERHARD
from quantum.realization import ANGLE_BOUNDS, QuantumRealization, probability_tensor
from utils.errors import DomainError, InfeasibleViolationError
from utils.logger import Logger

_LOW = np.array([b[0] for b in ANGLE_BOUNDS])
_HIGH = np.array([b[1] for b in ANGLE_BOUNDS])


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = Config.RESTARTS
    inner_tolerance: float = Config.INNER_TOLERANCE
    max_iterations: int = Config.MAX_ITERATIONS
    rng_seed: int = Config.SEED
    fd_step: float = Config.FD_STEP

    def __post_init__(self):
        if self.restarts < 1 or self.inner_tolerance <= 0 or self.max_iterations < 1:
            message = f"搜索配置非法：{self}"
            Logger.error(message)
            raise DomainError(message)

    @classmethod
    def from_settings(cls, settings):
        return cls(
            restarts=int(settings["restarts"]),
            inner_tolerance=float(settings["inner_tolerance"]),
            max_iterations=int(settings["max_iterations"]),
            rng_seed=int(settings["seed"]),
            fd_step=float(settings["fd_step"]),
        )


@dataclass(frozen=True)
class BisectionResult:
    eta: float
    realization: QuantumRealization
    iterations: int
    achieved_value: float
    e_obs: float
    xi: float

    def to_json(self):
        return {
            "eta": self.eta,
            "angles": self.realization.angles.tolist(),
            "achieved_value": self.achieved_value,
            "iterations": self.iterations,
            "e_obs": self.e_obs,
            "xi": self.xi,
        }


def noisy_eberhard_of_angles(angles, n):
    """向量化计算含噪 Eberhard 值，angles 形状 (..., 5)"""
    return np.einsum("abxy,...abxy->...", noise_weights(n), probability_tensor(angles))


def _objective(weights, step):
    # 中心点与 ±step 的 10 个扰动点一次批量求值
    offsets = np.vstack([np.zeros(5), step * np.eye(5), -step * np.eye(5)])

    def fun(v):
        values = np.einsum("abxy,nabxy->n", weights, probability_tensor(v + offsets))
        grad = (values[1:6] - values[6:11]) / (2 * step)
        return -values[0], -grad

    return fun


def _random_starts(cfg, stream):
    rng = np.random.default_rng([cfg.rng_seed, stream])
    return rng.uniform(_LOW, _HIGH, size=(cfg.restarts, 5))


def max_noisy_eberhard_general(n, cfg=None, starts=None, stream=0):
    """
    在五角参数盒上多起点局部最大化含噪 Eberhard 值（任意八参数噪声）
    :param n: NoiseParams
    :param cfg: SearchConfig
    :param starts: 额外起点（例如上一步二分的见证）
    :param stream: 随机流编号
    :return: (value, QuantumRealization)，value 是真实最大值的下界
    """
    cfg = cfg or SearchConfig()
    fun = _objective(noise_weights(n), cfg.fd_step)
    candidates = _random_starts(cfg, stream)
    if starts is not None:
        candidates = np.vstack([np.atleast_2d(starts), candidates])
    best_value, best_angles = -np.inf, None
    for x0 in candidates:
        res = minimize(
            fun, x0, jac=True, method="L-BFGS-B", bounds=ANGLE_BOUNDS,
            options={"maxiter": cfg.max_iterations, "ftol": 1e-15, "gtol": 1e-12},
        )
        angles = np.clip(res.x, _LOW, _HIGH)
        value = float(-fun(angles)[0])
        if value > best_value:
            best_value, best_angles = value, angles
    return best_value, QuantumRealization.from_angles(best_angles)


def max_noisy_eberhard(eta, xi=0.0, cfg=None, starts=None, stream=0):
    if not 0.0 <= eta <= 1.0 or not 0.0 <= xi < 1.0:
        message = f"η={eta} 必须在 [0, 1] 内，ξ={xi} 必须在 [0, 1) 内"
        Logger.error(message)
        raise DomainError(message)
    return max_noisy_eberhard_general(NoiseParams.symmetric(eta, xi), cfg, starts=starts, stream=stream)


def validate_target(e_obs, tol):
    if not 0.0 < e_obs <= E_MAX + 1e-12 or tol <= 0:
        message = f"E_obs={e_obs} 必须在 (0, {E_MAX:.9f}] 内，tol={tol} 必须为正"
        Logger.error(message)
        raise DomainError(message)


def min_efficiency_qr(e_obs, xi=0.0, tol=Config.BISECTION_TOL, cfg=None):
    """
    在 [2/3, 1] 上二分 η，返回可行一侧的上端点
    :return: BisectionResult
    """
    cfg = cfg or SearchConfig()
    validate_target(e_obs, tol)
    slack = cfg.inner_tolerance
    value, witness = max_noisy_eberhard(1.0, xi, cfg, stream=0)
    if value < e_obs - slack:
        message = f"ξ={xi} 时可达到的最大违背为 {value:.6f}，小于观测值 {e_obs}"
        Logger.error(message)
        raise InfeasibleViolationError(message, e_obs=e_obs, xi=xi, achievable=value)

    lower, upper = ETA_EBERHARD, 1.0
    achieved = value
    iterations = 0
    while upper - lower > tol:
        iterations += 1
        mid = 0.5 * (lower + upper)
        value, candidate = max_noisy_eberhard(mid, xi, cfg, starts=witness.angles, stream=iterations)
        if value >= e_obs - slack:
            upper, witness, achieved = mid, candidate, value
        else:
            lower = mid
        Logger.debug(f"η_qr 二分第 {iterations} 步：η={mid:.9f} 最大值={value:.9g}")
    Logger.info(f"η_qr(E={e_obs}, ξ={xi}) = {upper:.9f}（{iterations} 次二分）")
    return BisectionResult(eta=upper, realization=witness, iterations=iterations,
                           achieved_value=achieved, e_obs=e_obs, xi=xi)


def upper_closedness_margin(result, points=25):
    """
    沿 [η, 1] 直接计算见证实现的含噪值，返回 min(f(η') − E_obs)；非负即满足向上封闭
    """
    grid = np.linspace(result.eta, 1.0, points)
    values = [noisy_eberhard_of_angles(result.realization.angles, NoiseParams.symmetric(eta, result.xi))
              for eta in grid]
    return float(min(values) - result.e_obs)
