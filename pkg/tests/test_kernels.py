"""Kernel construction, frequency/time evaluation, residues, and norms."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from bandcast import (
    build_kernel,
    eval_time_kernel,
    eval_transfer,
    kernel_from_json,
    kernel_l2_norm,
    kernel_to_json,
    partial_fraction_expand,
)
from bandcast.errors import (
    DegreeViolation,
    NonConjugateSymmetric,
    NumericalDegeneracy,
    PoleOutOfRegion,
)
from bandcast.kernels import time_kernel_on_grid, transfer_on_grid
from helpers import random_kernel


def test_build_single_pole(single_pole):
    assert single_pole.denominator_degree == 1
    assert single_pole.numerator_degree == 0
    assert single_pole.pole_values == (1.0 + 0.0j,)


def test_build_rejects_pole_outside_band():
    with pytest.raises(PoleOutOfRegion):
        build_kernel([(1.0, 2.0, 1)], [1.0], 1.0)
    with pytest.raises(PoleOutOfRegion):
        build_kernel([(-0.5, 0.0, 1)], [1.0], 1.0)
    with pytest.raises(PoleOutOfRegion):
        build_kernel([(0.0, 0.0, 1)], [1.0], 1.0)


def test_build_rejects_degree_violation():
    with pytest.raises(DegreeViolation):
        build_kernel([(1.0, 0.0, 1)], [1.0, 1.0], 1.0)
    with pytest.raises(DegreeViolation):
        build_kernel([(1.0, 0.0, 1)], [0.0], 1.0)


def test_build_rejects_unpaired_complex_pole():
    with pytest.raises(NonConjugateSymmetric):
        build_kernel([(0.5, 0.8, 1)], [1.0], 1.0)


def test_build_rejects_coincident_entries():
    with pytest.raises(NumericalDegeneracy):
        build_kernel([(1.0, 0.0, 1), (1.0 + 1e-13, 0.0, 1)], [1.0], 1.0)


def test_build_conjugate_pair(conjugate_pair):
    # numerator [0, 1] is d(p) = p, degree 1 < 2
    assert conjugate_pair.numerator_degree == 1
    assert conjugate_pair.denominator_degree == 2


def test_transfer_single_pole_values(single_pole):
    assert eval_transfer(single_pole, 0.0) == pytest.approx(-1.0)
    assert eval_transfer(single_pole, 1.0) == pytest.approx((-1 - 1j) / 2)


def test_transfer_conjugate_symmetry(conjugate_pair):
    w0 = 0.3
    assert eval_transfer(conjugate_pair, -w0) == pytest.approx(
        np.conj(eval_transfer(conjugate_pair, w0)), abs=1e-15
    )
    rng = np.random.default_rng(11)
    for _ in range(6):
        k = random_kernel(rng)
        w = rng.uniform(-5, 5, size=32)
        vals = transfer_on_grid(k, w)
        mirror = transfer_on_grid(k, -w)
        assert np.max(np.abs(mirror - np.conj(vals))) <= 1e-14 * np.max(np.abs(vals))


def test_partial_fractions_single_pole(single_pole):
    terms = partial_fraction_expand(single_pole).terms
    assert terms == ((1.0 + 0.0j, 1, 1.0 + 0.0j),)


def test_partial_fractions_conjugate_pair(conjugate_pair):
    # Residue of p/((p-l)(p-lbar)) at l is l/(l - lbar); l = 0.5 - 0.8i.
    terms = dict(
        ((pole, order), coeff) for pole, order, coeff in partial_fraction_expand(conjugate_pair).terms
    )
    lam = 0.5 - 0.8j
    expected = lam / (lam - np.conj(lam))
    assert terms[(lam, 1)] == pytest.approx(expected, abs=1e-14)
    assert terms[(np.conj(lam), 1)] == pytest.approx(np.conj(expected), abs=1e-14)
    assert expected == pytest.approx(0.5 + 0.3125j)


def test_partial_fractions_double_pole(double_pole):
    terms = partial_fraction_expand(double_pole).terms
    assert terms == ((1.0 + 0.0j, 2, 1.0 + 0.0j),)


def test_partial_fraction_reconstruction_random():
    rng = np.random.default_rng(7)
    for _ in range(10):
        k = random_kernel(rng, max_groups=3)
        expansion = partial_fraction_expand(k)
        pts = rng.uniform(-4, 4, size=32) + 1j * rng.uniform(-4, 4, size=32)
        pts = pts[np.abs(pts[:, None] - np.array(k.pole_values)[None, :]).min(axis=1) > 0.3]
        direct = transfer_on_grid(k, np.zeros(0))  # placeholder for dtype
        direct = np.array([complex(sum(c / (p - q) ** o for q, o, c in expansion.terms)) for p in pts])
        from bandcast.kernels import _denominator_at, _numerator_at

        exact = _numerator_at(k, pts) / _denominator_at(k, pts)
        rel = np.abs(direct - exact) / np.maximum(np.abs(exact), 1e-300)
        assert rel.max() <= 1e-10


def test_time_kernel_single_pole(single_pole):
    assert eval_time_kernel(single_pole, -1.0) == pytest.approx(-math.exp(-1), rel=1e-12)
    assert eval_time_kernel(single_pole, 0.5) == 0.0
    assert eval_time_kernel(single_pole, 0.0) == pytest.approx(-1.0)


def test_time_kernel_anticausal_exactly_zero():
    rng = np.random.default_rng(3)
    for _ in range(5):
        k = random_kernel(rng)
        vals = time_kernel_on_grid(k, np.linspace(1e-9, 10, 50))
        assert np.all(vals == 0.0)


def test_time_kernel_matches_transform_oracle(conjugate_pair):
    # Independent route: numerically invert K on a wide fine grid after
    # subtracting 1/(p+1), which shares the 1/p tail but is causal (vanishes
    # at negative times) and is analytic on the axis.
    t_test = -2.0
    w = np.linspace(-2000.0, 2000.0, 2**21 + 1)
    p = 1j * w
    resid = p / ((p - 0.5) ** 2 + 0.64) - 1.0 / (p + 1.0)
    oracle = np.trapezoid(resid * np.exp(1j * w * t_test), w) / (2 * np.pi)
    assert abs(oracle.imag) < 1e-9
    assert eval_time_kernel(conjugate_pair, t_test) == pytest.approx(oracle.real, abs=1e-6)


def test_transform_consistency_quadrature():
    # Integrating e^{-i w t} k(t) over enough past reproduces the transfer.
    rng = np.random.default_rng(5)
    checks = 0
    while checks < 32:
        k = random_kernel(rng)
        upper = math.log(1e10) / k.min_pole_rate
        for w in rng.uniform(-2 * k.omega, 2 * k.omega, size=4):
            re, _ = quad(lambda t: eval_time_kernel(k, t) * math.cos(w * t), -upper, 0, limit=200)
            im, _ = quad(lambda t: -eval_time_kernel(k, t) * math.sin(w * t), -upper, 0, limit=200)
            assert complex(re, im) == pytest.approx(eval_transfer(k, w), abs=1e-6)
            checks += 1


def test_l2_norm_single_pole(single_pole):
    assert kernel_l2_norm(single_pole) == pytest.approx(math.sqrt(0.5), rel=1e-8)


def test_l2_norm_scaling(single_pole):
    doubled = build_kernel([(1.0, 0.0, 1)], [2.0], 1.0)
    assert kernel_l2_norm(doubled) == pytest.approx(2 * kernel_l2_norm(single_pole), rel=1e-12)


def test_l2_norm_time_domain_oracle(conjugate_pair):
    val, err = quad(lambda t: eval_time_kernel(conjugate_pair, t) ** 2, -80.0, 0.0, limit=400)
    assert err < 1e-8
    assert kernel_l2_norm(conjugate_pair) == pytest.approx(math.sqrt(val), rel=1e-6)


def test_json_roundtrip(conjugate_pair, single_pole):
    for k in (conjugate_pair, single_pole):
        assert kernel_from_json(kernel_to_json(k)) == k
    doc = kernel_to_json(conjugate_pair)
    assert '"paired": true' in doc
    # Explicitly listed conjugate mates parse too.
    explicit = '{"omega": 1.0, "poles": [[0.5, 0.8, 1], [0.5, -0.8, 1]], "numerator": [0.0, 1.0]}'
    assert kernel_from_json(explicit) == conjugate_pair
