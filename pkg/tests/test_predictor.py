"""Compensator evaluation, deviation norms, synthesis, boundary checks."""

import math

import numpy as np
import pytest

from bandcast import (
    DeviationGrid,
    FrequencyDomain,
    PredictorTransfer,
    alpha_coefficient,
    build_kernel,
    deviation_norm,
    eval_compensator,
    eval_predictor_transfer,
    eval_transfer,
    hardy_boundary_check,
    mobius_real_part,
    synthesize_time_predictor,
)
from bandcast.errors import (
    DomainError,
    Saturated,
    SaturatedSpectrum,
    SpectrumNotDecayed,
    TruncationNotJustified,
)
from bandcast.grids import GridSpec
from bandcast.kernels import transfer_on_grid
from bandcast.predictor import (
    compensator_minus_one_on_points,
    compensator_on_points,
    predictor_from_json,
    predictor_to_json,
    predictor_transfer_on_grid,
)
from helpers import random_kernel


def test_alpha_coefficient_values():
    assert alpha_coefficient(1.0, 0.0, 1.0) == pytest.approx(1.0)
    assert alpha_coefficient(0.5, 0.8, 1.0) == pytest.approx(0.72)
    assert alpha_coefficient(2.0, 0.0, 1.0) == pytest.approx(0.5)


def test_alpha_coefficient_rejects_bad_inputs():
    with pytest.raises(DomainError):
        alpha_coefficient(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        alpha_coefficient(1.0, 1.0, 1.0)


def test_mobius_real_part_values():
    assert mobius_real_part(1.0, 0.0, 1.0, 0.0) == pytest.approx(-1.0)
    assert mobius_real_part(1.0, 0.0, 1.0, 1.0) == 0.0
    assert mobius_real_part(0.5, 0.8, 1.0, 2.0) == pytest.approx(3 / 1.9584, rel=1e-12)


def test_mobius_real_part_identity():
    rng = np.random.default_rng(101)
    for _ in range(200):
        om = rng.uniform(0.5, 2.0)
        a = rng.uniform(0.3, 3.0)
        b = rng.uniform(-0.7, 0.7) * om
        w = rng.uniform(-2.0, 2.0) * om
        alpha = alpha_coefficient(a, b, om)
        direct = ((1j * w - a + 1j * b) / (1j * w + alpha - 1j * b)).real
        assert abs(mobius_real_part(a, b, om, w) - direct) <= 1e-12


def test_gamma_zero_rejected(single_pole):
    with pytest.raises(DomainError):
        PredictorTransfer(single_pole, 0.0)


def test_target_class(single_pole):
    assert PredictorTransfer(single_pole, 3.0).target_class == "LOW"
    assert PredictorTransfer(single_pole, -3.0).target_class == "HIGH"


def test_compensator_small_gamma_limit(single_pole):
    pred = PredictorTransfer(single_pole, 1e-12)
    assert abs(eval_compensator(pred, 0.0)) <= 1e-10


def test_compensator_at_origin(single_pole):
    pred = PredictorTransfer(single_pole, 5.0)
    assert eval_compensator(pred, 0.0) == pytest.approx(1 - math.exp(-5), rel=1e-12)


def test_compensator_band_edge_magnitude(single_pole):
    # At the band edge the exponent is purely imaginary, so the factor sits
    # on the circle |1 - e^{i theta}| = 2|sin(theta/2)|; here theta = 5.
    pred = PredictorTransfer(single_pole, 5.0)
    v = eval_compensator(pred, 1j * 1.0)
    assert abs(v) == pytest.approx(2 * abs(math.sin(2.5)), rel=1e-12)
    assert abs(v) <= 2.0


def test_predictor_transfer_at_origin(single_pole):
    pred = PredictorTransfer(single_pole, 5.0)
    assert eval_predictor_transfer(pred, 0.0) == pytest.approx(-(1 - math.exp(-5)), rel=1e-12)


def test_predictor_transfer_large_gamma_in_band(single_pole):
    pred = PredictorTransfer(single_pole, 300.0)
    for w in (0.0, 0.3, 0.5):
        dev = abs(eval_predictor_transfer(pred, w) - eval_transfer(single_pole, w))
        assert dev <= 1e-12


def test_predictor_transfer_high_frequency_deviation(single_pole):
    # |K_hat - K| = e^{gamma * 0.6} / sqrt(5) at w = 2 for gamma = -5.
    pred = PredictorTransfer(single_pole, -5.0)
    dev = abs(eval_predictor_transfer(pred, 2.0) - eval_transfer(single_pole, 2.0))
    assert dev == pytest.approx(math.exp(-3) / math.sqrt(5), abs=1e-6)


def test_compensator_conjugate_symmetry(conjugate_pair):
    pred = PredictorTransfer(conjugate_pair, 7.0)
    rng = np.random.default_rng(13)
    w = rng.uniform(-3, 3, size=64)
    v_pos, _ = compensator_on_points(pred, 1j * w)
    v_neg, _ = compensator_on_points(pred, -1j * w)
    assert np.max(np.abs(v_neg - np.conj(v_pos))) <= 1e-12 * np.max(np.abs(v_pos))


def test_factor_distance_bound_on_matching_domain():
    # Each factor satisfies |V_m - 1| = e^{gamma Re phi} <= 1 there; products
    # are bounded by 2**n - 1.
    rng = np.random.default_rng(17)
    for _ in range(10):
        k = random_kernel(rng)
        n_factors = k.denominator_degree
        for gamma in (0.5, 5.0, 50.0):
            pred = PredictorTransfer(k, gamma)
            w = np.linspace(-k.omega, k.omega, 2001)
            vm1 = np.abs(compensator_minus_one_on_points(pred, 1j * w))
            assert vm1.max() <= 2.0**n_factors - 1.0 + 1e-9
            pred_neg = PredictorTransfer(k, -gamma)
            w_off = np.linspace(k.omega, 10 * k.omega, 2001)
            vm1_off = np.abs(compensator_minus_one_on_points(pred_neg, 1j * w_off))
            assert vm1_off.max() <= 2.0**n_factors - 1.0 + 1e-9


def test_single_factor_distance_bound(single_pole):
    for gamma in (0.5, 5.0, 50.0):
        pred = PredictorTransfer(single_pole, gamma)
        w = np.linspace(-1.0, 1.0, 4001)
        vm1 = np.abs(compensator_minus_one_on_points(pred, 1j * w))
        expected = np.exp(gamma * (w**2 - 1) / (w**2 + 1))
        assert np.max(np.abs(vm1 - expected)) <= 1e-12
        assert vm1.max() <= 1.0 + 1e-15


def test_deviation_is_distance_times_transfer(conjugate_pair):
    pred = PredictorTransfer(conjugate_pair, 9.0)
    w = np.linspace(-0.95, 0.95, 501)
    vm1 = compensator_minus_one_on_points(pred, 1j * w)
    k = transfer_on_grid(conjugate_pair, w)
    khat, _ = predictor_transfer_on_grid(pred, w)
    lhs = np.abs(khat - k)
    rhs = np.abs(vm1) * np.abs(k)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * max(rhs.max(), 1e-300)


def test_deviation_norm_sup_at_band_interior_edge(single_pole):
    # For b = 0 the deviation is monotone in |w| in-band, so the sup over
    # [-0.9, 0.9] sits at the endpoints.
    pred = PredictorTransfer(single_pole, 20.0)
    sup = deviation_norm(pred, FrequencyDomain("LOW", 0.1), math.inf)
    edge = abs(compensator_minus_one_on_points(pred, 1j * np.array([0.9]))[0]) * abs(
        eval_transfer(single_pole, 0.9)
    )
    assert sup == pytest.approx(edge, rel=1e-12)


def test_deviation_norm_linearity(single_pole):
    doubled = build_kernel([(1.0, 0.0, 1)], [2.0], 1.0)
    for mu in (2.0, math.inf):
        d1 = deviation_norm(PredictorTransfer(single_pole, 5.0), FrequencyDomain("LOW", 0.0), mu)
        d2 = deviation_norm(PredictorTransfer(doubled, 5.0), FrequencyDomain("LOW", 0.0), mu)
        assert d2 == pytest.approx(2 * d1, rel=1e-13)


def test_deviation_norm_bounded_by_twice_sup_transfer(single_pole):
    pred = PredictorTransfer(single_pole, 5.0)
    sup_dev = deviation_norm(pred, FrequencyDomain("LOW", 0.0), math.inf)
    w = np.linspace(-1, 1, 4001)
    assert sup_dev <= 2 * np.max(np.abs(transfer_on_grid(single_pole, w)))


def test_deviation_norm_high_domain(single_pole):
    pred = PredictorTransfer(single_pole, -10.0)
    sup = deviation_norm(pred, FrequencyDomain("HIGH", 0.1), math.inf)
    # Deviation decays away from the band edge; the sup sits near w = 1.1.
    near_edge = abs(compensator_minus_one_on_points(pred, 1j * np.array([1.1]))[0]) * abs(
        eval_transfer(single_pole, 1.1)
    )
    assert sup == pytest.approx(near_edge, rel=1e-6)


def test_deviation_norm_truncation_guard(single_pole):
    pred = PredictorTransfer(single_pole, -10.0)
    with pytest.raises(TruncationNotJustified):
        deviation_norm(
            pred, FrequencyDomain("HIGH", 0.1), math.inf, DeviationGrid(omega_max=100.0)
        )


def test_pointwise_convergence_single_factor(single_pole):
    # |V - 1| = e^{gamma Re phi} falls strictly at every interior point along
    # a doubling ladder, for both target classes.
    ladder = [1, 2, 4, 8, 16, 32, 64, 128, 256]
    w_in = np.linspace(-0.99, 0.99, 199)
    w_off = np.linspace(1.01, 3.0, 199)
    prev_in = prev_off = None
    for g in ladder:
        cur_in = np.abs(
            compensator_minus_one_on_points(PredictorTransfer(single_pole, g), 1j * w_in)
        )
        cur_off = np.abs(
            compensator_minus_one_on_points(PredictorTransfer(single_pole, -g), 1j * w_off)
        )
        if prev_in is not None:
            assert np.all(cur_in < prev_in)
            assert np.all(cur_off < prev_off)
        prev_in, prev_off = cur_in, cur_off


def test_uniform_convergence_with_recorded_gamma(single_pole, conjugate_pair):
    # sup over the eps-gapped band falls below 1e-6 at some recorded gamma.
    for kernel in (single_pole, conjugate_pair):
        eps = 0.1 * kernel.omega
        w = np.linspace(-(kernel.omega - eps), kernel.omega - eps, 10001)
        certified = None
        gamma = 1.0
        while gamma <= 512.0:
            vm1 = np.abs(
                compensator_minus_one_on_points(PredictorTransfer(kernel, gamma), 1j * w)
            )
            if vm1.max() < 1e-6:
                certified = gamma
                break
            gamma *= 2.0
        assert certified is not None and certified <= 256.0


def test_pair_kernel_converges_without_monotonicity(conjugate_pair):
    # Products are not pointwise monotone in gamma, but they do converge.
    w = np.linspace(-0.9, 0.9, 501)
    first = np.abs(compensator_minus_one_on_points(PredictorTransfer(conjugate_pair, 1.0), 1j * w))
    last = np.abs(compensator_minus_one_on_points(PredictorTransfer(conjugate_pair, 256.0), 1j * w))
    assert last.max() < 1e-6 < first.max()
    assert last.max() < first.max()


def test_saturation_carries_log_form(single_pole):
    pred = PredictorTransfer(single_pole, 2000.0)
    with pytest.raises(Saturated) as info:
        eval_compensator(pred, 1j * 50.0)
    exc = info.value
    expected_log = 2000.0 * mobius_real_part(1.0, 0.0, 1.0, 50.0)
    assert exc.log_magnitude == pytest.approx(expected_log, rel=1e-9)
    assert -math.pi <= exc.phase <= math.pi


def test_synthesize_fast_decay_kernel(triple_pole):
    pred = PredictorTransfer(triple_pole, 1.0)
    result = synthesize_time_predictor(pred, GridSpec(2**18, 256.0))
    assert result.spectrum_end_magnitude < 1e-8
    assert result.leakage < 1e-12


def test_synthesize_reference_leakage(single_pole):
    # Slow-decay reference: spectrum ends at ~0.14, leakage still <= 1e-3
    # (golden threshold from the first synthesis run: 6.757e-4).
    pred = PredictorTransfer(single_pole, 5.0)
    with pytest.raises(SpectrumNotDecayed):
        synthesize_time_predictor(pred, GridSpec(2**16, 200.0))
    result = synthesize_time_predictor(pred, GridSpec(2**16, 200.0), decay_tol=1.0)
    assert result.leakage <= 1e-3


def test_synthesize_saturates_for_huge_gamma(single_pole):
    with pytest.raises(SaturatedSpectrum):
        synthesize_time_predictor(PredictorTransfer(single_pole, 2000.0), GridSpec(2**14, 100.0))


def test_synthesize_linearity(single_pole):
    doubled = build_kernel([(1.0, 0.0, 1)], [2.0], 1.0)
    r1 = synthesize_time_predictor(PredictorTransfer(single_pole, 5.0), GridSpec(2**14, 100.0), decay_tol=1.0)
    r2 = synthesize_time_predictor(PredictorTransfer(doubled, 5.0), GridSpec(2**14, 100.0), decay_tol=2.0)
    assert np.array_equal(r2.khat.values, 2 * r1.khat.values)


def test_hardy_boundary_lines(single_pole):
    pred = PredictorTransfer(single_pole, 5.0)
    report = hardy_boundary_check(pred, [0.5, 1.0, 2.0, 10.0, 100.0], omega_max=300.0, h=0.05)
    assert report.all_finite
    assert report.sup_nonincreasing
    # Far from the axis the factor approaches 1 - e^gamma.
    far = report.lines[-1]
    assert far.sup_v == pytest.approx(abs(1 - math.exp(5)), rel=0.2)
    # K_hat line norms stay finite and shrink with s (H2-style behavior).
    l2s = [ln.l2_khat for ln in report.lines]
    assert all(b < a for a, b in zip(l2s, l2s[1:]))


def test_hardy_boundary_negative_gamma(single_pole):
    report = hardy_boundary_check(
        PredictorTransfer(single_pole, -5.0), [1.0, 2.0], omega_max=300.0, h=0.05
    )
    assert report.all_finite


def test_predictor_json_roundtrip(conjugate_pair):
    pred = PredictorTransfer(conjugate_pair, -7.5)
    back = predictor_from_json(predictor_to_json(pred))
    assert back.kernel == conjugate_pair
    assert back.gamma == -7.5
