import allure
import numpy as np
import pytest

from bell.behavior import Behavior, check_no_signaling, eberhard_value
from bell.decomposition import LD_POINTS, PR_BOX, ld_distribution, random_no_signaling_behaviors
from bell.noise import (
    EberhardCoefficients, NoiseParams, apply_detection_noise, eberhard_coefficients,
    exact_violation_mixture, noise_weights, observed_eberhard,
)
from utils.errors import DomainError


def _random_noise(rng):
    e = rng.uniform(0.0, 1.0, size=8)
    return NoiseParams(eta_A=tuple(e[:2]), eta_B=tuple(e[2:4]), xi_A=tuple(e[4:6]), xi_B=tuple(e[6:]))


@allure.epic("bell-core")
@allure.feature("探测噪声信道")
@allure.story("信道作用")
class TestDetectionNoise:
    @allure.title("η = 1、ξ = 0 时信道为恒等")
    @allure.severity(allure.severity_level.NORMAL)
    def test_identity(self):
        out = apply_detection_noise(PR_BOX, NoiseParams.symmetric(1.0))
        np.testing.assert_allclose(out.p, PR_BOX.p)

    @allure.title("信道保持归一化与无信号")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_preserves_structure(self, rng):
        for p in random_no_signaling_behaviors(rng, 100):
            out = apply_detection_noise(Behavior(p), _random_noise(rng))
            assert np.abs(out.p.sum(axis=(0, 1)) - 1).max() <= 1e-12
            assert check_no_signaling(out).max_violation <= 1e-10
            assert out.valid

    @allure.title("参数越界被拒绝")
    @allure.severity(allure.severity_level.MINOR)
    def test_invalid_params(self):
        with pytest.raises(DomainError):
            NoiseParams(eta_A=(1.2, 1.0), eta_B=(1.0, 1.0))
        with pytest.raises(DomainError):
            NoiseParams.symmetric(0.9, -0.1)

    @allure.title("噪声权重展开与信道作用一致")
    @allure.severity(allure.severity_level.NORMAL)
    def test_noise_weights(self, rng):
        for p in random_no_signaling_behaviors(rng, 50):
            n = _random_noise(rng)
            b = Behavior(p)
            assert np.sum(noise_weights(n) * p) == pytest.approx(eberhard_value(apply_detection_noise(b, n)), abs=1e-14)


@allure.epic("bell-core")
@allure.feature("探测噪声信道")
@allure.story("Eberhard 系数")
class TestEberhardCoefficients:
    @allure.title("PR 盒：K = 3/2，L = 1")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_pr_box(self):
        c = eberhard_coefficients(PR_BOX)
        assert c.K == pytest.approx(1.5)
        assert c.L == pytest.approx(1.0)
        assert observed_eberhard(c, NoiseParams.symmetric(2.0 / 3.0)) == pytest.approx(0.0, abs=1e-15)

    @allure.title("D4 的 K、L 为 0")
    @allure.severity(allure.severity_level.NORMAL)
    def test_d4(self):
        c = eberhard_coefficients(ld_distribution(LD_POINTS[4]))
        assert c.K == 0 and c.L == 0

    @allure.title("单位效率下 K − L 等于原始 E")
    @allure.severity(allure.severity_level.NORMAL)
    def test_unit_efficiency(self, rng):
        for p in random_no_signaling_behaviors(rng, 20):
            b = Behavior(p)
            c = eberhard_coefficients(b)
            assert c.K - c.L == pytest.approx(eberhard_value(b), abs=1e-14)

    @allure.title("对称噪声的闭式与信道展开一致")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.parametrize("eta, xi", [(0.8, 0.0), (0.75, 0.01), (0.9, 0.2), (1.0, 0.05)])
    def test_symmetric_formula(self, rng, eta, xi):
        n = NoiseParams.symmetric(eta, xi)
        for p in random_no_signaling_behaviors(rng, 20):
            b = Behavior(p)
            c = eberhard_coefficients(b)
            expected = eberhard_value(apply_detection_noise(b, n))
            assert c.noisy_value(eta, xi) == pytest.approx(expected, abs=1e-12)
            assert observed_eberhard(c, n) == pytest.approx(expected, abs=1e-12)

    @allure.title("非对称效率（无暗计数）K ηA ηB − ℒ′ ηA − ℒ″ ηB")
    @allure.severity(allure.severity_level.NORMAL)
    def test_asymmetric_efficiencies(self, rng):
        n = NoiseParams(eta_A=(0.82, 0.82), eta_B=(0.91, 0.91))
        for p in random_no_signaling_behaviors(rng, 20):
            b = Behavior(p)
            c = EberhardCoefficients(**{k: getattr(eberhard_coefficients(b), k) for k in ("K", "Lp", "Lpp", "M", "N", "O")})
            assert observed_eberhard(c, n) == pytest.approx(eberhard_value(apply_detection_noise(b, n)), abs=1e-12)

    @allure.title("设置相关噪声通过原始行为展开信道")
    @allure.severity(allure.severity_level.NORMAL)
    def test_setting_dependent(self, rng):
        for p in random_no_signaling_behaviors(rng, 20):
            b = Behavior(p)
            n = _random_noise(rng)
            assert observed_eberhard(eberhard_coefficients(b), n) == pytest.approx(
                eberhard_value(apply_detection_noise(b, n)), abs=1e-12)

    @allure.title("缺少原始行为时无法展开设置相关噪声")
    @allure.severity(allure.severity_level.MINOR)
    def test_setting_dependent_without_source(self):
        c = EberhardCoefficients(K=1.5, Lp=0.5, Lpp=0.5, M=0, N=0, O=0)
        with pytest.raises(DomainError):
            observed_eberhard(c, NoiseParams(eta_A=(0.9, 0.8), eta_B=(0.9, 0.9)))


@allure.epic("bell-core")
@allure.feature("探测噪声信道")
@allure.story("等式见证")
class TestExactViolationMixture:
    @allure.title("与 D4 混合后含噪 E 恰好等于目标")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.parametrize("xi", [0.0, 0.01])
    def test_mixture_hits_target(self, xi):
        n = NoiseParams.symmetric(0.9, xi)
        mixed = exact_violation_mixture(PR_BOX, n, 0.1)
        assert eberhard_value(apply_detection_noise(mixed, n)) == pytest.approx(0.1, abs=1e-14)
        assert mixed.valid

    @allure.title("目标高于当前违背时报错")
    @allure.severity(allure.severity_level.MINOR)
    def test_unreachable_target(self):
        with pytest.raises(DomainError):
            exact_violation_mixture(PR_BOX, NoiseParams.symmetric(0.7), 0.2)
