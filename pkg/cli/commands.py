"""单点命令：point、export-sdp、classify"""
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from analytic.ns_bound import eta_ns
from bell.noise import NoiseParams
from config.config import E_MAX
from npa.bounds import classify_noise_point, min_efficiency_npa, random_noise_params
from npa.interchange import export_noisy_eberhard_sdp
from quantum.search import SearchConfig, min_efficiency_qr
from utils.errors import DomainError, InfeasibleViolationError
from utils.logger import Logger

ALL_OUTPUTS = ("qr", "npa", "analytic")


@dataclass
class EfficiencyBound:
    """单个效率界的结果记录"""
    e_obs: float
    xi: float
    eta: Optional[float]
    kind: str
    certificate: dict = field(default_factory=dict)

    def to_json(self):
        return {"e_obs": self.e_obs, "xi": self.xi, "eta": self.eta, "kind": self.kind,
                "certificate": self.certificate}


def check_quantum_maximum(e_obs, xi):
    if e_obs > E_MAX:
        message = f"E_obs={e_obs} 超过量子最大违背 {E_MAX:.6f}"
        Logger.error(message)
        raise InfeasibleViolationError(message, e_obs=e_obs, xi=xi, achievable=E_MAX)


def cmd_point(e_obs, xi, settings, outputs=ALL_OUTPUTS):
    """
    计算 η_qr、η_npa、η_ns
    :param settings: Config.load 得到并被命令行覆盖后的配置
    :return: EfficiencyBound 列表
    """
    check_quantum_maximum(e_obs, xi)
    bounds = []
    if "qr" in outputs:
        result = min_efficiency_qr(e_obs, xi, settings["bisection_tol"], SearchConfig.from_settings(settings))
        bounds.append(EfficiencyBound(e_obs, xi, result.eta, "qr", result.to_json()))
    if "npa" in outputs:
        level = settings["npa_level"]
        eta, trace = min_efficiency_npa(e_obs, xi, settings["bisection_tol"], level)
        bounds.append(EfficiencyBound(e_obs, xi, eta, f"npa_l{level}",
                                      {"level": level, "steps": len(trace), "final_value": trace[-1].value,
                                       "final_dual_value": trace[-1].dual_value}))
    if "analytic" in outputs:
        # η_ns 只对无暗计数的情形有定义
        value = float(eta_ns(e_obs)) if xi == 0 else None
        bounds.append(EfficiencyBound(e_obs, xi, value, "ns"))
    return bounds


def cmd_export_sdp(eta, xi, level, out=None):
    data = export_noisy_eberhard_sdp(eta, xi, level)
    text = json.dumps(data, indent=2, ensure_ascii=False)
    if out:
        with open(out, "w", encoding="utf-8") as file:
            file.write(text)
        Logger.info(f"SDP 交换文件已写入：{out}")
    return data


def load_noise(path):
    try:
        with open(path, "r", encoding="utf-8") as file:
            return NoiseParams.from_dict(json.load(file))
    except (OSError, json.JSONDecodeError) as e:
        message = f"噪声参数文件（{path}）读取失败, 错误信息：({e})"
        Logger.error(message)
        raise DomainError(message) from e


def cmd_classify(e_obs, settings, noise=None, samples=0):
    """
    对给定噪声点，或在八参数空间中随机取样的若干点分类
    :return: 记录列表
    """
    check_quantum_maximum(e_obs, 0.0)
    if noise is not None:
        points = [noise]
    else:
        points = random_noise_params(np.random.default_rng(settings["seed"]), samples)
    cfg = SearchConfig.from_settings(settings)
    records = []
    for n in points:
        label, sdp_value, search_value = classify_noise_point(e_obs, n, settings["npa_level"], cfg)
        records.append({"noise": n.to_dict(), "e_obs": e_obs, "label": label,
                        "sdp_max": sdp_value, "search_max": search_value})
    return records
