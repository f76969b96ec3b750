"""
曲线扫描：每个 E_obs 网格点一行

列顺序固定：e_obs, eta_qr, eta_npa_l1, eta_npa_l1ab, eta_npa_l2, eta_ns, xi, wall_time, status
浮点数以 9 位有效数字输出；--no-timing 时 wall_time 写 0，同一种子下 CSV 逐字节一致。
"""
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from analytic.ns_bound import eta_ns
from cli.commands import check_quantum_maximum
from config.config import Config, E_MAX, thread_count
from npa.bounds import min_efficiency_npa
from quantum.search import SearchConfig, min_efficiency_qr
from utils.errors import DomainError, InfeasibleViolationError, SdpConvergenceError
from utils.logger import Logger

COLUMNS = ["e_obs", "eta_qr", "eta_npa_l1", "eta_npa_l1ab", "eta_npa_l2", "eta_ns", "xi", "wall_time", "status"]
LEVEL_COLUMNS = {"1": "eta_npa_l1", "1+AB": "eta_npa_l1ab", "2": "eta_npa_l2"}


@dataclass(frozen=True)
class SweepSpec:
    e_min: float = Config.SWEEP_E_MIN
    e_max: float = Config.SWEEP_E_MAX
    points: int = Config.SWEEP_POINTS
    xi: float = 0.0
    levels: tuple = ("2",)
    tol: float = Config.BISECTION_TOL
    outputs: frozenset = frozenset({"qr", "npa", "analytic"})
    seed: int = Config.SEED
    output_path: Optional[str] = None
    output_format: str = "csv"
    # 显式网格优先于 e_min/e_max/points
    grid: Optional[tuple] = None
    timing: bool = True
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        if self.grid is None and not (0.0 < self.e_min <= self.e_max <= E_MAX and self.points >= 1):
            message = f"扫描范围非法：e_min={self.e_min}, e_max={self.e_max}, points={self.points}"
            Logger.error(message)
            raise DomainError(message)
        if self.output_format not in ("csv", "json"):
            message = f"输出格式（{self.output_format}）错误, 支持：csv, json"
            Logger.error(message)
            raise DomainError(message)
        unknown = set(self.levels) - set(LEVEL_COLUMNS)
        if unknown:
            message = f"未知的 NPA 层级：{sorted(unknown)}"
            Logger.error(message)
            raise DomainError(message)

    def grid_values(self):
        if self.grid is not None:
            return [float(v) for v in self.grid]
        if self.points == 1:
            return [self.e_max]
        return np.geomspace(self.e_min, self.e_max, self.points).tolist()


def _evaluate_point(spec, e_obs):
    start = time.perf_counter()
    row = {column: np.nan for column in COLUMNS}
    row.update(e_obs=e_obs, xi=spec.xi, status="ok")
    try:
        check_quantum_maximum(e_obs, spec.xi)
        if "analytic" in spec.outputs and spec.xi == 0:
            row["eta_ns"] = float(eta_ns(e_obs))
        if "npa" in spec.outputs:
            for level in spec.levels:
                row[LEVEL_COLUMNS[level]], _ = min_efficiency_npa(e_obs, spec.xi, spec.tol, level)
        if "qr" in spec.outputs:
            search = replace(spec.search, rng_seed=spec.seed)
            row["eta_qr"] = min_efficiency_qr(e_obs, spec.xi, spec.tol, search).eta
    except InfeasibleViolationError as e:
        row["status"] = f"infeasible (max {e.achievable:.6f})"
    except (DomainError, SdpConvergenceError) as e:
        row["status"] = f"error: {e}"
    row["wall_time"] = time.perf_counter() - start if spec.timing else 0.0
    return row


def run_sweep(spec):
    """
    逐点计算，网格点分派到进程池，输出前恢复原有顺序
    :return: pandas.DataFrame
    """
    grid = spec.grid_values()
    workers = min(thread_count(), len(grid))
    Logger.info(f"开始扫描：{len(grid)} 个点，ξ={spec.xi}，{workers} 个进程")
    if workers <= 1:
        rows = [_evaluate_point(spec, e) for e in tqdm(grid, desc="sweep")]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(tqdm(pool.map(_evaluate_point, [spec] * len(grid), grid), total=len(grid), desc="sweep"))
    failed = sum(1 for row in rows if row["status"] != "ok")
    if failed:
        Logger.warning(f"扫描中有 {failed} 个点未成功，详见 status 列")
    return pd.DataFrame(rows, columns=COLUMNS)


def write_sweep(frame, spec):
    if spec.output_format == "csv":
        text = frame.to_csv(index=False, float_format=Config.FLOAT_FORMAT, na_rep="", lineterminator="\n")
    else:
        records = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
        text = json.dumps(records, indent=2, ensure_ascii=False) + "\n"
    if spec.output_path:
        with open(spec.output_path, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        Logger.info(f"扫描结果已写入：{spec.output_path}")
    return text


def cmd_sweep(spec):
    frame = run_sweep(spec)
    return frame, write_sweep(frame, spec)
