"""
性质验证套件：core、quantum、npa、analytic、all

每项性质给出实测偏差与容差，任一失败则命令以非零码退出。
"""
from dataclasses import dataclass, asdict

import numpy as np

from analytic.ns_bound import eta_ns, proposition1_monte_carlo, quadratic_residual
from bell.behavior import (
    EBERHARD_WEIGHTS, SIGNS, Behavior, behavior_from_correlators, check_no_signaling, chsh_value,
    correlators_from_behavior, eberhard_value,
)
from bell.decomposition import all_ld_distributions, random_no_signaling_behaviors
from bell.noise import NoiseParams, apply_detection_noise, eberhard_coefficients, observed_eberhard
from config.config import E_MAX
from npa.bounds import max_noisy_eberhard_sdp, min_efficiency_npa
from npa.moments import build_moment_structure, moment_vector_from_realization
from quantum.realization import ANGLE_BOUNDS, QuantumRealization, born_rule_tensor, probability_tensor
from quantum.search import SearchConfig, min_efficiency_qr, upper_closedness_margin
from utils.logger import Logger
from utils.yaml_loader import get_test_data

SUITES = ("core", "quantum", "npa", "analytic")


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool

    def to_json(self):
        return asdict(self)


def _check(suite, name, measured, tolerance):
    return PropertyResult(suite, name, float(measured), tolerance, bool(measured <= tolerance))


def _random_noise(rng):
    e = rng.uniform(0.0, 1.0, size=8)
    return NoiseParams(eta_A=tuple(e[:2]), eta_B=tuple(e[2:4]), xi_A=tuple(e[4:6]), xi_B=tuple(e[6:]))


def core_suite(seed, samples=10_000):
    rng = np.random.default_rng(seed)
    batch = random_no_signaling_behaviors(rng, samples)
    ab = np.einsum("a,b,nabxy->nxy", SIGNS, SIGNS, batch)
    beta = ab[:, 0, 0] + ab[:, 0, 1] + ab[:, 1, 0] - ab[:, 1, 1]
    e = np.einsum("abxy,nabxy->n", EBERHARD_WEIGHTS, batch)
    results = [_check("core", "eberhard_chsh_equivalence", np.abs(e - (beta / 4 - 0.5)).max(), 1e-12)]

    noise_ns, noise_norm, coeff, round_trip = 0.0, 0.0, 0.0, 0.0
    for p in batch[:200]:
        b = Behavior(p)
        n = _random_noise(rng)
        q = apply_detection_noise(b, n)
        noise_ns = max(noise_ns, check_no_signaling(q).max_violation)
        noise_norm = max(noise_norm, np.abs(q.p.sum(axis=(0, 1)) - 1).max())
        coeff = max(coeff, abs(observed_eberhard(eberhard_coefficients(b), n) - eberhard_value(q)))
        sym = NoiseParams.symmetric(n.eta_A[0], n.xi_A[0])
        coeff = max(coeff, abs(observed_eberhard(eberhard_coefficients(b), sym)
                               - eberhard_value(apply_detection_noise(b, sym))))
        round_trip = max(round_trip, np.abs(behavior_from_correlators(correlators_from_behavior(b)).p - p).max())
    results += [
        _check("core", "noise_preserves_no_signaling", noise_ns, 1e-10),
        _check("core", "noise_preserves_normalization", noise_norm, 1e-12),
        _check("core", "coefficient_consistency", coeff, 1e-12),
        _check("core", "correlator_round_trip", round_trip, 1e-14),
    ]
    lds = all_ld_distributions()
    values = np.array([eberhard_value(b) for b in lds])
    saturating = [b for b, v in zip(lds, values) if abs(v) < 1e-15]
    chsh_dev = max(abs(chsh_value(b) - 2.0) for b in saturating)
    results += [
        _check("core", "ld_eberhard_nonpositive", max(values.max(), 0.0), 0.0),
        _check("core", "ld_saturating_count", abs(len(saturating) - 8), 0),
        _check("core", "ld_saturating_chsh", chsh_dev, 1e-15),
    ]
    return results


def quantum_suite(seed, samples=10_000, settings=None):
    rng = np.random.default_rng(seed)
    low = np.array([b[0] for b in ANGLE_BOUNDS])
    high = np.array([b[1] for b in ANGLE_BOUNDS])
    angles = rng.uniform(low, high, size=(samples, 5))
    closed = probability_tensor(angles)
    oracle_dev = np.abs(born_rule_tensor(angles) - closed).max()
    alice = closed.sum(axis=-3)  # [..., a, x, y]
    bob = closed.sum(axis=-4)  # [..., b, x, y]
    ns_dev = max(np.abs(alice[..., 0] - alice[..., 1]).max(), np.abs(bob[..., 0, :] - bob[..., 1, :]).max())

    s = build_moment_structure("2")
    min_eig = min(
        np.linalg.eigvalsh(s.moment_matrix(moment_vector_from_realization(s, QuantumRealization.from_angles(a)))).min()
        for a in angles[:100]
    )
    results = [
        _check("quantum", "closed_form_vs_born_rule", oracle_dev, 1e-12),
        _check("quantum", "realization_no_signaling", ns_dev, 1e-12),
        _check("quantum", "realization_moments_psd", max(-min_eig, 0.0), 1e-10),
    ]
    cfg = SearchConfig.from_settings(settings) if settings else SearchConfig()
    for e_obs in (0.006951, 0.065330):
        result = min_efficiency_qr(e_obs, 0.0, cfg=cfg)
        results.append(_check("quantum", f"upper_closedness_E{e_obs}", max(-upper_closedness_margin(result), 0.0),
                              cfg.inner_tolerance))
    return results


def npa_suite(seed=None, levels_grid=10):
    s = build_moment_structure("2")
    golden = {frozenset(tuple(cell) for cell in group) for group in get_test_data("npa_level2_equalities.yaml", "test_level2_equalities")}
    generated = set(s.equality_groups())
    equalities = sum(len(group) - 1 for group in generated)
    results = [
        _check("npa", "level2_golden_groups", len(golden ^ generated), 0),
        _check("npa", "level2_equality_count", abs(equalities - 40), 0),
    ]
    value, _ = max_noisy_eberhard_sdp(1.0, 0.0, "2")
    results.append(_check("npa", "quantum_maximum", abs(value - E_MAX), 1e-6))
    value, _ = max_noisy_eberhard_sdp(2.0 / 3.0, 0.0, "2")
    results.append(_check("npa", "eberhard_threshold", max(value, 0.0), 1e-7))
    worst = 0.0
    for e_obs in np.linspace(0.005, 0.2, levels_grid):
        etas = [min_efficiency_npa(float(e_obs), 0.0, level=level)[0] for level in ("1", "1+AB", "2")]
        worst = max(worst, etas[0] - etas[1], etas[1] - etas[2])
    results.append(_check("npa", "hierarchy_monotonicity", max(worst, 0.0), 1e-7))
    return results


def analytic_suite(seed, trials=100_000):
    grid = np.linspace(1e-4, E_MAX, 2000)
    residual = max(abs(quadratic_residual(e, eta_ns(e))) for e in grid)
    increments = np.diff([eta_ns(e) for e in grid])
    report = proposition1_monte_carlo(trials=trials, seed=seed)
    return [
        _check("analytic", "eta_ns_at_maximum", abs(eta_ns(E_MAX) - 1.0), 0.0),
        _check("analytic", "quadratic_residual", residual, 1e-13),
        _check("analytic", "strictly_increasing", float(increments.min() <= 0), 0.0),
        _check("analytic", "proposition1_monte_carlo", report.counterexamples, 0),
    ]


def cmd_validate(suite, seed, settings=None):
    """
    :param suite: core | quantum | npa | analytic | all
    :return: PropertyResult 列表
    """
    suites = SUITES if suite == "all" else (suite,)
    results = []
    for name in suites:
        Logger.info(f"运行验证套件：{name}")
        if name == "core":
            results += core_suite(seed)
        elif name == "quantum":
            results += quantum_suite(seed, settings=settings)
        elif name == "npa":
            results += npa_suite(seed)
        elif name == "analytic":
            results += analytic_suite(seed)
    for result in results:
        log = Logger.info if result.passed else Logger.error
        log(f"[{result.suite}] {result.name}: measured={result.measured:.3e} tol={result.tolerance:.1e} "
            f"{'PASS' if result.passed else 'FAIL'}")
    return results
