import numpy as np
import pytest

from npa.moments import build_moment_structure
from quantum.search import SearchConfig
from sdp.interior_point import InteriorPointSolver
from utils.logger import Logger


@pytest.fixture(autouse=True)
def log_test_rerun(request):
    # 当前测试的相关信息
    node_id = request.node.nodeid
    # 当前重试次数
    rerun = getattr(request.node, "execution_count", 1)
    # 在测试开始时记录日志
    if rerun == 1:
        Logger.info(f"开始执行测试：{node_id}")
    else:
        Logger.warning(f"重试测试（第{rerun - 1}次）：{node_id}")


# 由于使用了pytest-rerunfailures的重试机制，所用域目前仅支持function和session
@pytest.fixture(scope="session")
def level2():
    return build_moment_structure("2")


@pytest.fixture(scope="session")
def level1():
    return build_moment_structure("1")


@pytest.fixture(scope="session")
def solver():
    return InteriorPointSolver()


@pytest.fixture(scope="session")
def search_config():
    return SearchConfig()


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(1234)
