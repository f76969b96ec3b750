"""
无信号 + Tsirelson 约束下的解析效率下界

把观测行为分解为一个 PR 盒与 8 个饱和 CHSH 的 LD 点的凸组合，
Tsirelson 界限制 p_PR ≤ √2 − 1。对称效率 η 下

    E(η) = (3/2·p_PR + α)η² − (p_PR + α)η,   α = 2(p1 + p5 + p9) + p14 + p15

α = 0 且 p_PR 取最大时最耐受低效率，η_ns 是 (3q/2)η² − qη = E 的正根。
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from bell.decomposition import NsDecomposition, ns_mixture
from config.config import E_MAX, Q_PR
from utils.errors import DomainError
from utils.logger import Logger

CHAIN_TOL = 1e-12


@dataclass(frozen=True)
class AnalyticBound:
    e_obs: float
    eta_ns: float


def eta_ns(e_obs):
    if not 0.0 < e_obs <= E_MAX:
        message = f"E_obs={e_obs} 超出 η_ns 的定义域 (0, {E_MAX:.9f}]"
        Logger.error(message)
        raise DomainError(message)
    # 3E/E_MAX 与 6E/q 相同，在 E = E_MAX 处精确得到 1
    return (1.0 + np.sqrt(1.0 + 3.0 * e_obs / E_MAX)) / 3.0


def analytic_bound(e_obs):
    return AnalyticBound(e_obs=e_obs, eta_ns=float(eta_ns(e_obs)))


def quadratic_residual(e_obs, eta):
    return 1.5 * Q_PR * eta ** 2 - Q_PR * eta - e_obs


def p_ns(p4, p8, p12):
    """
    Tsirelson 饱和的无信号行为：q_PR = √2 − 1 的 PR 盒与 D4、D8、D12 混合
    """
    weights = (p4, p8, p12)
    if min(weights) < 0 or abs(sum(weights) - (1.0 - Q_PR)) > 1e-12:
        message = f"p4 + p8 + p12 必须等于 1 − q_PR = {1 - Q_PR:.12f} 且非负，实际为 {weights}"
        Logger.error(message)
        raise DomainError(message)
    return ns_mixture(NsDecomposition(p_pr=Q_PR, p4=p4, p8=p8, p12=p12))


def noisy_eberhard_ns_mixture(d, eta):
    return (1.5 * d.p_pr + d.alpha) * eta ** 2 - (d.p_pr + d.alpha) * eta


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class ChainWitness:
    e_obs: float
    eta: float
    eta_ns_value: Optional[float]
    links: List[ChainLink]

    @property
    def holds(self):
        return all(link.holds for link in self.links)

    def failures(self):
        return [link.name for link in self.links if not link.holds]


def verify_proposition1(d, eta):
    """
    逐环检查 E = p_PR·g(η) + α(η² − η) ≤ p_PR·g(η) ≤ q_PR·g(η)，g(η) = (3/2)η² − η，
    再确认 η_ns(E) ≤ η。前提不满足时记为失败的环节，不抛异常
    """
    g = 1.5 * eta ** 2 - eta
    e_obs = noisy_eberhard_ns_mixture(d, eta)
    links = [
        ChainLink("tsirelson_precondition", d.p_pr, Q_PR, d.p_pr <= Q_PR + CHAIN_TOL),
        ChainLink("positive_violation", e_obs, 0.0, e_obs > 0.0),
        ChainLink("alpha_term", d.alpha * (eta ** 2 - eta), 0.0, d.alpha * (eta ** 2 - eta) <= CHAIN_TOL),
        ChainLink("tsirelson_step", d.p_pr * g, Q_PR * g, d.p_pr * g <= Q_PR * g + CHAIN_TOL),
        ChainLink("g_nonnegative", g, 0.0, g >= -CHAIN_TOL),
    ]
    value = None
    if 0.0 < e_obs <= E_MAX:
        value = float(eta_ns(e_obs))
        links.append(ChainLink("eta_ns_below_eta", value, eta, value <= eta + CHAIN_TOL))
    else:
        links.append(ChainLink("eta_ns_below_eta", float("nan"), eta, False))
    return ChainWitness(e_obs=e_obs, eta=eta, eta_ns_value=value, links=links)


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    tested: int
    counterexamples: int
    max_excess: float

    @property
    def clean(self):
        return self.counterexamples == 0


def _sample_chunk(rng, size):
    p_pr = rng.uniform(0.0, Q_PR, size=size)
    # 8 个 LD 权重顺序：p1, p4, p5, p8, p9, p12, p14, p15
    ld = rng.dirichlet(np.full(8, 0.5), size=size) * (1.0 - p_pr)[:, None]
    alpha = 2.0 * (ld[:, 0] + ld[:, 2] + ld[:, 4]) + ld[:, 6] + ld[:, 7]
    eta = rng.uniform(2.0 / 3.0, 1.0, size=size)
    e_obs = (1.5 * p_pr + alpha) * eta ** 2 - (p_pr + alpha) * eta
    return eta, e_obs


def proposition1_monte_carlo(trials=100_000, seed=0, chunks=8):
    """
    在 Tsirelson 约束下的分解单纯形上随机取样，统计 η_ns(E) > η 的反例
    每个分块使用 SeedSequence.spawn 派生的独立随机流
    """
    streams = np.random.SeedSequence(seed).spawn(chunks)
    sizes = np.full(chunks, trials // chunks)
    sizes[: trials % chunks] += 1
    tested = counterexamples = 0
    max_excess = -np.inf
    for stream, size in zip(streams, sizes):
        eta, e_obs = _sample_chunk(np.random.default_rng(stream), int(size))
        mask = e_obs > 0.0
        if not mask.any():
            continue
        bound = (1.0 + np.sqrt(1.0 + 3.0 * e_obs[mask] / E_MAX)) / 3.0
        excess = bound - eta[mask]
        tested += int(mask.sum())
        counterexamples += int(np.count_nonzero(excess > CHAIN_TOL))
        max_excess = max(max_excess, float(excess.max()))
    Logger.info(f"命题蒙特卡洛：{trials} 次取样，{tested} 个正违背，{counterexamples} 个反例")
    return MonteCarloReport(trials=trials, tested=tested, counterexamples=counterexamples, max_excess=max_excess)
