import math

import allure
import numpy as np
import pytest

from config.config import Config, E_MAX
from npa.bounds import build_sdp
from npa.functionals import (
    LinearFunctional, chsh_functional, eberhard_coefficient_functionals, noisy_eberhard_objective,
)
from npa.moments import build_moment_structure
from sdp.interior_point import InteriorPointSolver, solve_sdp, verify_solution
from sdp.problem import WEAK_DUALITY_FLOOR, DenseSdp
from utils.errors import DomainError


@allure.epic("sdp-solver")
@allure.feature("原始-对偶内点法")
@allure.story("已知最优值的问题")
class TestKnownOptima:
    @allure.title("level 1 上最大化 ⟨A0B0⟩ 得 1")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_single_correlator(self, level1):
        problem = build_sdp(level1, LinearFunctional(0.0, {level1.class_of("A0B0"): 1.0}))
        solution = solve_sdp(problem)
        assert solution.optimal
        assert -1e-12 <= solution.gap <= 1e-9
        assert solution.value == pytest.approx(1.0, abs=1e-7)

    @allure.title("level 1 上最大化 CHSH 得 2√2")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_tsirelson_bound(self, level1):
        solution = solve_sdp(build_sdp(level1, chsh_functional(level1)))
        assert solution.optimal
        assert -1e-12 <= solution.gap <= 1e-9
        assert solution.value == pytest.approx(2 * math.sqrt(2), abs=1e-7)

    @allure.title("level 2 上最大化 K − L 得 (√2−1)/2")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_eberhard_maximum(self, level2):
        f = eberhard_coefficient_functionals(level2)
        solution = solve_sdp(build_sdp(level2, f["K"] - f["L"]))
        assert solution.optimal
        assert -1e-12 <= solution.gap <= 1e-9
        assert solution.value == pytest.approx(E_MAX, abs=1e-7)


@allure.epic("sdp-solver")
@allure.feature("原始-对偶内点法")
@allure.story("证书")
class TestCertificates:
    @allure.title("弱对偶、半正定与残差检查")
    @allure.severity(allure.severity_level.NORMAL)
    def test_certificate(self, level2):
        f = eberhard_coefficient_functionals(level2)
        problem = build_sdp(level2, 0.8 ** 2 * f["K"] - 0.8 * f["L"])
        solution = solve_sdp(problem)
        report = verify_solution(problem, solution)
        assert report.passed
        assert solution.dual_value >= solution.value - 1e-12
        assert solution.optimal
        assert -1e-12 <= solution.gap <= 1e-9

    @allure.title("相同输入的结果一致")
    @allure.severity(allure.severity_level.NORMAL)
    def test_determinism(self, level2):
        problem = build_sdp(level2, chsh_functional(level2))
        first = solve_sdp(problem, solver=InteriorPointSolver())
        second = solve_sdp(problem, solver=InteriorPointSolver())
        assert abs(first.value - second.value) <= 1e-10

    @allure.title("迭代次数不足时返回 max_iter 与当前界")
    @allure.severity(allure.severity_level.MINOR)
    def test_max_iter_status(self, level2):
        problem = build_sdp(level2, chsh_functional(level2))
        solution = InteriorPointSolver(max_iter=2).solve(problem)
        assert solution.status == "max_iter"
        assert np.isfinite(solution.value) and np.isfinite(solution.dual_value)


@allure.epic("sdp-solver")
@allure.feature("原始-对偶内点法")
@allure.story("含噪 Eberhard 网格上的证书")
class TestCertificateGrid:
    @allure.title("η × ξ × 层级网格：最优、间隙、半正定与弱对偶")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.parametrize("level", ["1", "1+AB", "2"])
    @pytest.mark.parametrize("xi", [0.0, 0.01])
    @pytest.mark.parametrize("eta", [2.0 / 3.0, 0.75, 0.861, 0.944, 1.0])
    def test_grid(self, eta, xi, level):
        s = build_moment_structure(level)
        problem = build_sdp(s, noisy_eberhard_objective(s, eta, xi))
        solution = solve_sdp(problem, Config.SDP_TOL, InteriorPointSolver(max_iter=3 * Config.SDP_MAX_ITER))
        assert solution.optimal
        assert -WEAK_DUALITY_FLOOR <= solution.gap <= Config.SDP_TOL
        assert solution.dual_value >= solution.value - WEAK_DUALITY_FLOOR
        assert solution.primal_residual <= Config.SDP_TOL
        assert solution.dual_residual <= Config.SDP_TOL
        assert verify_solution(problem, solution).passed

    @allure.title("level 1 的对偶上界不低于 level 2 的最大值")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.parametrize("eta", [0.861, 1.0])
    def test_level_containment(self, eta, level1, level2):
        loose = solve_sdp(build_sdp(level1, noisy_eberhard_objective(level1, eta)))
        tight = solve_sdp(build_sdp(level2, noisy_eberhard_objective(level2, eta)))
        assert loose.dual_value >= tight.value - WEAK_DUALITY_FLOOR


@allure.epic("sdp-solver")
@allure.feature("问题描述")
@allure.story("任意点的修正")
class TestCertify:
    @allure.title("任意对偶向量修正后给出合法上界，任意矩阵修正后给出可行下界")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_arbitrary_point(self, level1, seed):
        rng = np.random.default_rng(seed)
        problem = build_sdp(level1, chsh_functional(level1))
        noise = rng.normal(size=(level1.dim, level1.dim))
        point = problem.certify(np.eye(level1.dim) + 0.3 * (noise + noise.T), rng.normal(size=problem.num_constraints))
        assert point.dual_value >= 2 * math.sqrt(2) - 1e-9
        assert point.value <= 2 * math.sqrt(2) + 1e-9
        assert np.linalg.eigvalsh(point.Z).min() >= -1e-10
        assert np.linalg.eigvalsh(point.X).min() >= -1e-10
        assert point.primal_residual <= 1e-9

    @allure.title("正定的投影单位阵作为内点")
    @allure.severity(allure.severity_level.MINOR)
    def test_interior_point(self, level2):
        problem = build_sdp(level2, chsh_functional(level2))
        assert problem.identity_multiplier is not None
        assert problem.identity_multiplier @ problem.b == pytest.approx(level2.dim)
        np.testing.assert_allclose(problem.apply(problem.interior_point), problem.b, atol=1e-12)
        assert np.linalg.eigvalsh(problem.interior_point).min() > 0


@allure.epic("sdp-solver")
@allure.feature("问题描述")
@allure.story("形状检查与交换格式")
class TestDenseSdp:
    @allure.title("形状不符或不对称时报错")
    @allure.severity(allure.severity_level.NORMAL)
    def test_shape_errors(self):
        with pytest.raises(DomainError):
            DenseSdp(dim=2, C=np.zeros((3, 3)), A=np.zeros((1, 2, 2)), b=[1.0])
        with pytest.raises(DomainError):
            DenseSdp(dim=2, C=np.array([[0.0, 1.0], [0.0, 0.0]]), A=np.zeros((1, 2, 2)), b=[1.0])
        with pytest.raises(DomainError):
            DenseSdp(dim=2, C=np.zeros((2, 2)), A=np.zeros((2, 2, 2)), b=[1.0])

    @allure.title("level 2 共 53 个约束：13 个对角 + 40 个等式")
    @allure.severity(allure.severity_level.NORMAL)
    def test_constraint_count(self, level2):
        problem = build_sdp(level2, chsh_functional(level2))
        assert problem.num_constraints == 53

    @allure.title("小型问题：maximize X01，对角为 1")
    @allure.severity(allure.severity_level.NORMAL)
    def test_two_by_two(self):
        classes = {0: [(0, 0), (1, 1)], 1: [(0, 1)]}
        problem = DenseSdp.from_classes(2, classes, {0}, {1: 1.0}, constant=0.5)
        solution = solve_sdp(problem)
        assert solution.value == pytest.approx(1.5, abs=1e-8)
        np.testing.assert_allclose(solution.X, np.ones((2, 2)), atol=1e-4)
