import itertools

import allure
import numpy as np
import pytest

from bell.behavior import correlators_from_behavior, eberhard_value
from bell.decomposition import PR_BOX
from bell.noise import NoiseParams, apply_detection_noise
from npa.functionals import (
    LinearFunctional, eberhard_coefficient_functionals, noisy_eberhard_functional,
    noisy_eberhard_objective, probability_functional,
)
from npa.moments import correlator_moments, moment_vector_from_realization
from quantum.realization import QuantumRealization, realization_probabilities


@allure.epic("npa")
@allure.feature("线性泛函")
@allure.story("概率泛函")
class TestProbabilityFunctional:
    @allure.title("P(++|x0y0) 与 P(00|x1y1) 的符号")
    @allure.severity(allure.severity_level.NORMAL)
    def test_signs(self, level2):
        s = level2
        pp = probability_functional(s, 0, 0, 0, 0)
        assert pp.constant == 0.25
        assert pp.coeffs == {s.class_of("A0"): 0.25, s.class_of("B0"): 0.25, s.class_of("A0B0"): 0.25}
        zz = probability_functional(s, 1, 1, 1, 1)
        assert zz.coeffs == {s.class_of("A1"): -0.25, s.class_of("B1"): -0.25, s.class_of("A1B1"): 0.25}

    @allure.title("固定 (x, y) 求和得常数 1")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.parametrize("x, y", list(itertools.product(range(2), repeat=2)))
    def test_normalization(self, level1, x, y):
        total = sum(probability_functional(level1, a, b, x, y) for a in range(2) for b in range(2))
        assert total.constant == pytest.approx(1.0)
        assert total.coeffs == {}


@allure.epic("npa")
@allure.feature("线性泛函")
@allure.story("Eberhard 系数泛函")
class TestCoefficientFunctionals:
    @allure.title("K、L 与闭式一致")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_k_and_l(self, level2):
        s = level2
        f = eberhard_coefficient_functionals(s)
        k = LinearFunctional(0.5, {
            s.class_of("A0"): 0.5, s.class_of("B0"): 0.5,
            s.class_of("A0B0"): 0.25, s.class_of("A0B1"): 0.25, s.class_of("A1B0"): 0.25, s.class_of("A1B1"): -0.25,
        })
        l = LinearFunctional(1.0, {s.class_of("A0"): 0.5, s.class_of("B0"): 0.5})
        assert f["K"].is_close(k)
        assert f["L"].is_close(l)

    @allure.title("PR 盒矩量：K = 3/2，L 在零点为 1，K − L = ½")
    @allure.severity(allure.severity_level.NORMAL)
    def test_pr_moments(self, level1):
        f = eberhard_coefficient_functionals(level1)
        pr = correlator_moments(level1, correlators_from_behavior(PR_BOX))
        assert f["K"].evaluate(pr) == pytest.approx(1.5)
        assert (f["K"] - f["L"]).evaluate(pr) == pytest.approx(0.5)
        zero = np.zeros(level1.num_classes)
        assert f["L"].evaluate(zero) == pytest.approx(1.0)

    @allure.title("八参数泛函在对称情形下与系数组合一致")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.parametrize("eta, xi", [(0.8, 0.0), (0.85, 0.01), (1.0, 0.3)])
    def test_general_matches_symmetric(self, level2, eta, xi):
        general = noisy_eberhard_functional(level2, NoiseParams.symmetric(eta, xi))
        assert general.is_close(noisy_eberhard_objective(level2, eta, xi))

    @allure.title("在量子实现的矩量上求值等于含噪行为的 E")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_evaluate_on_realization(self, level2, rng):
        for _ in range(20):
            r = QuantumRealization.from_angles(rng.uniform([0] * 5, [np.pi / 2] + [2 * np.pi] * 4))
            e = rng.uniform(0.5, 1.0, size=4)
            z = rng.uniform(0.0, 0.1, size=4)
            n = NoiseParams(eta_A=tuple(e[:2]), eta_B=tuple(e[2:]), xi_A=tuple(z[:2]), xi_B=tuple(z[2:]))
            moments = moment_vector_from_realization(level2, r)
            expected = eberhard_value(apply_detection_noise(realization_probabilities(r), n))
            assert noisy_eberhard_functional(level2, n).evaluate(moments) == pytest.approx(expected, abs=1e-12)
