import allure
import pytest

from bell.behavior import check_no_signaling
from npa.bounds import min_efficiency_npa
from quantum.realization import realization_probabilities
from quantum.search import SearchConfig, max_noisy_eberhard, min_efficiency_qr, upper_closedness_margin
from utils.errors import DomainError, InfeasibleViolationError
from utils.yaml_loader import get_test_data


@allure.epic("quantum-real")
@allure.feature("局部搜索")
@allure.story("固定 η 的最大违背")
class TestMaxNoisyEberhard:
    @allure.title("η = 1 时接近 (√2−1)/2")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_unit_efficiency(self, search_config):
        value, witness = max_noisy_eberhard(1.0, 0.0, search_config)
        assert value >= 0.207106
        assert check_no_signaling(realization_probabilities(witness)).passed

    @allure.title("η = 2/3 时没有违背")
    @allure.severity(allure.severity_level.CRITICAL)
    def test_eberhard_threshold(self, search_config):
        value, _ = max_noisy_eberhard(2.0 / 3.0, 0.0, search_config)
        assert value <= 1e-7

    @allure.title("暗计数 ξ = 0.01 的上限")
    @allure.severity(allure.severity_level.NORMAL)
    def test_dark_count_ceiling(self, search_config):
        value, _ = max_noisy_eberhard(1.0, 0.01, search_config)
        assert value == pytest.approx(0.193201, abs=1e-4)

    @allure.title("相同种子结果一致")
    @allure.severity(allure.severity_level.MINOR)
    def test_deterministic(self):
        cfg = SearchConfig(restarts=4, rng_seed=7)
        assert max_noisy_eberhard(0.9, 0.0, cfg)[0] == max_noisy_eberhard(0.9, 0.0, cfg)[0]

    @allure.title("参数越界")
    @allure.severity(allure.severity_level.MINOR)
    def test_domain(self):
        with pytest.raises(DomainError):
            max_noisy_eberhard(1.5, 0.0)
        with pytest.raises(DomainError):
            SearchConfig(restarts=0)


@allure.epic("quantum-real")
@allure.feature("局部搜索")
@allure.story("η_qr 二分")
class TestMinEfficiencyQr:
    @allure.title("复现首末两行")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.parametrize("e_obs, expected", [(0.006951, 0.753774), (0.065330, 0.871331)])
    def test_rows(self, search_config, e_obs, expected):
        result = min_efficiency_qr(e_obs, 0.0, cfg=search_config)
        assert result.eta == pytest.approx(expected, abs=1e-4)
        assert result.achieved_value >= e_obs - 1e-6
        assert upper_closedness_margin(result) >= -search_config.inner_tolerance
        assert check_no_signaling(realization_probabilities(result.realization)).passed

    @allure.title("全部表格行")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.slow
    @pytest.mark.parametrize("case", get_test_data("efficiency_tables.yaml", "test_quantum_realization_table"))
    def test_table(self, search_config, case):
        result = min_efficiency_qr(case["e_obs"], 0.0, cfg=search_config)
        assert result.eta == pytest.approx(case["eta_qr"], abs=1e-4)

    @allure.title("ξ = 0.01 的表格，两个界相差不超过 1e-4")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.slow
    @pytest.mark.parametrize("case", get_test_data("efficiency_tables.yaml", "test_dark_count_table"))
    def test_dark_count_table(self, search_config, case):
        eta_qr = min_efficiency_qr(case["e_obs"], 0.01, cfg=search_config).eta
        eta_npa, _ = min_efficiency_npa(case["e_obs"], 0.01)
        assert eta_qr == pytest.approx(case["eta_qr"], abs=1e-4)
        assert eta_npa <= eta_qr + 1e-6
        assert eta_qr - eta_npa <= 1e-4

    @allure.title("夹逼：η_npa ≤ η_qr ≤ η_npa + 1e-4")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.slow
    @pytest.mark.parametrize("case", get_test_data("efficiency_tables.yaml", "test_npa_table"))
    def test_sandwich(self, search_config, case):
        eta_qr = min_efficiency_qr(case["e_obs"], 0.0, cfg=search_config).eta
        eta_npa, _ = min_efficiency_npa(case["e_obs"], 0.0)
        assert eta_npa <= eta_qr + 1e-6
        assert eta_qr - eta_npa <= 1e-4

    @allure.title("η_qr 随 E_obs 与 ξ 单调不减")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.slow
    def test_monotonicity(self):
        cfg = SearchConfig(restarts=12)
        by_e = [min_efficiency_qr(e, 0.0, tol=1e-6, cfg=cfg).eta for e in (0.01, 0.05, 0.1)]
        by_xi = [min_efficiency_qr(0.02, xi, tol=1e-6, cfg=cfg).eta for xi in (0.0, 0.005, 0.01)]
        assert by_e == sorted(by_e)
        assert by_xi == sorted(by_xi)

    @allure.title("ξ > 0 时超过上限的 E_obs 报不可行")
    @allure.severity(allure.severity_level.NORMAL)
    def test_infeasible(self):
        with pytest.raises(InfeasibleViolationError) as excinfo:
            min_efficiency_qr(0.2, 0.01, cfg=SearchConfig(restarts=8))
        assert excinfo.value.achievable == pytest.approx(0.193201, abs=1e-4)
