# 配置文件，用于定义计算的基本设置
import json
import math
import os

from utils.logger import Logger

# 无信号/量子最大 Eberhard 违背 (√2−1)/2
E_MAX = (math.sqrt(2.0) - 1.0) / 2.0
# Tsirelson 约束下 PR 盒的最大权重
Q_PR = math.sqrt(2.0) - 1.0
# Eberhard 阈值
ETA_EBERHARD = 2.0 / 3.0


class Config:
    # 二分法
    BISECTION_TOL = 1e-7
    # SDP 对偶间隙
    SDP_TOL = 1e-9
    SDP_MAX_ITER = 100
    # 退化求解时可接受的间隙（会打印警告）
    # 可行性判定余量 dual_value >= E_obs - slack
    FEASIBILITY_SLACK = 1e-9
    # 局部搜索
    RESTARTS = 32
    INNER_TOLERANCE = 1e-9
    MAX_ITERATIONS = 500
    FD_STEP = 1e-6
    SEED = 20250101
    NPA_LEVEL = "2"
    # 输出
    FLOAT_FORMAT = "%.9g"
    SWEEP_POINTS = 30
    SWEEP_E_MIN = 0.001
    SWEEP_E_MAX = 0.2071

    @classmethod
    def defaults(cls):
        """
        以字典形式返回全部默认配置（键为小写）
        :return: dict
        """
        return {
            name.lower(): value
            for name, value in vars(cls).items()
            if name.isupper()
        }

    @classmethod
    def load(cls, path=None):
        """
        读取 JSON 配置文件并覆盖默认值；命令行参数在调用方再覆盖一次
        :param path: JSON 文件路径，None 表示只使用默认值
        :return: dict
        """
        settings = cls.defaults()
        if path is None:
            return settings
        try:
            with open(path, "r", encoding="utf-8") as file:
                overrides = json.load(file)
        except (OSError, json.JSONDecodeError) as e:
            message = f"配置文件（{path}）读取失败, 错误信息：({e})"
            Logger.error(message)
            raise ValueError(message) from e
        unknown = set(overrides) - set(settings)
        if unknown:
            message = f"配置文件包含未知键：{sorted(unknown)}"
            Logger.error(message)
            raise ValueError(message)
        settings.update(overrides)
        Logger.debug(f"已加载配置文件：{path}")
        return settings


def thread_count():
    """
    工作进程数上限，由环境变量 ETACERT_THREADS 控制
    :return: int
    """
    raw = os.environ.get("ETACERT_THREADS")
    if not raw:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        Logger.warning(f"ETACERT_THREADS={raw} 无法解析，改用单进程")
        return 1
