import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedflow.conductivity import (
    CoefficientVector,
    ExponentProfile,
    ForchheimerLaw,
    Interpolated,
    Multiplicative,
    Piecewise,
    Rational,
    canonical_interpolated,
    eval_G,
    eval_g,
    eval_H,
    eval_K,
    eval_K_prime,
    eval_K_star,
    invert_G,
    perturbation_constants,
    sandwich_constants,
)
from mixedflow.errors import DomainError, KinkError, ShapeError, UnsupportedOperation
from mixedflow.quadrature import adaptive_simpson, fixed_simpson

# 40-digit bisection on s^(1/2) + s^2 = xi
S_AT_XI6 = 2.1307924759421035
K_AT_XI1 = 0.5248885986564048
# high-precision quadrature of 2 int_0^1 u^2 / ((1+u)(1+sqrt u)) du
H_RATIONAL_1 = 0.21098247956828464


# ---------------------------------------------------------------- types


def test_profile_derived_values():
    p = ExponentProfile(0.5, (1.0,))
    assert p.beta1 == 1.0 and p.beta2 == 0.5 and p.xi_c == 2.0 and p.n_terms == 1


@pytest.mark.parametrize("alpha, ex", [(0.0, (1.0,)), (1.0, (1.0,)), (0.5, ()), (0.5, (2.0, 1.0)), (0.5, (-1.0,))])
def test_profile_rejects_invalid(alpha, ex):
    with pytest.raises(DomainError):
        ExponentProfile(alpha, ex)


def test_coefficients_admissibility():
    assert CoefficientVector((1.0, 0.0, 1.0)).xi0 == 2.0
    for bad in [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (1.0, -1.0, 1.0)]:
        with pytest.raises(DomainError):
            CoefficientVector(bad)


def test_coefficient_length_must_match_profile():
    with pytest.raises(ShapeError):
        Interpolated(ExponentProfile(0.5, (1.0,)), CoefficientVector((1.0, 0.0, 0.5, 1.0)))


# ---------------------------------------------------------------- g and G


def test_eval_g_examples(interp, piecewise):
    assert eval_g(interp, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert eval_g(interp, 4.0) == pytest.approx(4.5, rel=1e-15)
    assert eval_g(piecewise, 1.5) == pytest.approx(3.0, rel=1e-15)


def test_eval_g_domain_and_unsupported(interp, rational, multiplicative):
    with pytest.raises(DomainError):
        eval_g(interp, 0.0)
    with pytest.raises(DomainError):
        eval_g(interp, -1.0)
    for m in (rational, multiplicative):
        with pytest.raises(UnsupportedOperation):
            eval_g(m, 1.0)
        with pytest.raises(UnsupportedOperation):
            eval_G(m, 1.0)
        with pytest.raises(UnsupportedOperation):
            invert_G(m, 1.0)


def test_eval_G_examples(interp, piecewise):
    assert eval_G(interp, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert eval_G(interp, 4.0) == pytest.approx(18.0, rel=1e-15)
    assert eval_G(interp, 0.0) == 0.0
    assert eval_G(piecewise, 0.0) == 0.0
    with pytest.raises(DomainError):
        eval_G(interp, -0.5)


def test_invert_G_examples(interp):
    assert invert_G(interp, 2.0) == pytest.approx(1.0, rel=1e-12)
    assert invert_G(interp, 0.0) == 0.0
    assert invert_G(interp, 6.0) == pytest.approx(S_AT_XI6, rel=1e-12)


@pytest.mark.parametrize("name", ["interp", "piecewise"])
def test_round_trip_random(name, request, rng):
    m = request.getfixturevalue(name)
    s = np.exp(rng.uniform(math.log(1e-6), math.log(1e6), 1000))
    back = invert_G(m, eval_G(m, s))
    assert np.all(np.abs(back - s) <= 1e-10 * np.maximum(1.0, s))


def test_piecewise_G_continuous_at_thresholds(piecewise):
    for s in (piecewise.s1, piecewise.s2):
        lo, hi = eval_G(piecewise, s * (1 - 1e-12)), eval_G(piecewise, s * (1 + 1e-12))
        assert hi == pytest.approx(lo, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.sampled_from([0.2, 0.5, 0.8]),
    top=st.sampled_from([0.5, 1.0, 2.0]),
    logs=st.lists(st.floats(-2, 2), min_size=3, max_size=3),
    xi=st.floats(1e-8, 1e8),
)
def test_inversion_residual_property(alpha, top, logs, xi):
    m = Interpolated(ExponentProfile(alpha, (top,)), CoefficientVector(tuple(10.0**v for v in logs)))
    s = invert_G(m, xi)
    assert abs(eval_G(m, s) - xi) <= 1e-12 * max(1.0, xi) * 10


# ---------------------------------------------------------------- K


def test_K_examples(interp, piecewise, rational):
    assert eval_K(piecewise, 1.8) == pytest.approx(0.2, rel=1e-14)
    assert eval_K(piecewise, 4.5) == pytest.approx(1 / 3, rel=1e-14)
    assert eval_K(piecewise, 12.0) == pytest.approx(0.25, rel=1e-12)
    assert eval_K(rational, 1.0) == pytest.approx(0.25, rel=1e-15)
    assert eval_K(interp, 18.0) == pytest.approx(2 / 9, rel=1e-12)
    assert eval_K(interp, 1.0) == pytest.approx(K_AT_XI1, rel=1e-12)


def test_K_zero_and_continuity(any_model):
    assert eval_K(any_model, 0.0) == 0.0
    small = eval_K(any_model, np.array([1e-12, 1e-10]))
    assert np.all(small >= 0) and small[0] < 1e-9


def test_K_vectorised_shape(interp):
    xi = np.linspace(0.0, 5.0, 12).reshape(3, 4)
    assert eval_K(interp, xi).shape == (3, 4)
    assert isinstance(eval_K(interp, 1.0), float)


def test_multiplicative_kbar(multiplicative, piecewise):
    assert multiplicative.kbar == pytest.approx(piecewise.M1 * 1.0, rel=1e-15)
    m = Multiplicative.from_piecewise(piecewise)
    assert eval_K(m, 2.0) == pytest.approx(eval_K(multiplicative, 2.0), rel=1e-15)


def test_piecewise_derived_constants(piecewise):
    assert piecewise.c1 == pytest.approx(3.0)
    assert piecewise.c2 == pytest.approx(3.0)
    assert piecewise.Z1 == pytest.approx(3.0)
    assert piecewise.Z2 == pytest.approx(6.0)
    assert piecewise.M1 == pytest.approx(1 / 9)
    assert piecewise.M2 == pytest.approx(1 / 3)


def test_piecewise_rejects_bad_thresholds():
    with pytest.raises(DomainError):
        Piecewise(0.5, 2.0, 1.0, ForchheimerLaw((1.0, 1.0), (1.0,)))


# ---------------------------------------------------------------- K'


def test_K_prime_examples(piecewise, interp):
    assert eval_K_prime(piecewise, 1.8) == pytest.approx(1 / 9, rel=1e-14)
    assert eval_K_prime(piecewise, 4.5) == 0.0
    h = 1e-4 * 2.0
    fd = (eval_K(interp, 2.0 + h) - eval_K(interp, 2.0 - h)) / (2 * h)
    assert eval_K_prime(interp, 2.0) == pytest.approx(fd, rel=1e-6)


def test_K_prime_kinks(piecewise):
    for z in (piecewise.Z1, piecewise.Z2):
        with pytest.raises(KinkError):
            eval_K_prime(piecewise, z)
    assert eval_K_prime(piecewise, piecewise.Z1, side="left") == pytest.approx(1 / 9)
    assert eval_K_prime(piecewise, piecewise.Z1, side="right") == 0.0
    assert eval_K_prime(piecewise, piecewise.Z2, side="left") == 0.0


def test_K_prime_domain(interp):
    with pytest.raises(DomainError):
        eval_K_prime(interp, 0.0)


@pytest.mark.parametrize("xi", [1e-6, 0.3, 2.0, 7.5, 1e3, 1e6])
def test_K_prime_matches_finite_difference(any_model, xi):
    if any_model.breakpoints() and min(abs(xi - z) for z in any_model.breakpoints()) < 1e-2 * xi:
        pytest.skip("too close to a kink")
    h = 1e-4 * xi
    fd = (eval_K(any_model, xi + h) - eval_K(any_model, xi - h)) / (2 * h)
    kp = eval_K_prime(any_model, xi)
    scale = max(abs(kp), eval_K(any_model, xi) / xi)
    assert abs(kp - fd) <= 1e-6 * scale


# ---------------------------------------------------------------- K*


def test_K_star_examples():
    p = ExponentProfile(0.5, (1.0,))
    assert eval_K_star(p, 1.0) == pytest.approx(2**-1.5, rel=1e-15)
    assert eval_K_star(p, 0.0) == 0.0
    peak = eval_K_star(p, 2.0)
    assert peak == pytest.approx(2 / 3**1.5, rel=1e-15)
    grid = np.linspace(0.0, 100.0, 10_000)
    assert eval_K_star(p, grid).max() <= peak


def test_K_star_unimodal():
    p = ExponentProfile(0.5, (1.0,))
    left = eval_K_star(p, np.linspace(0, 2, 500))
    right = eval_K_star(p, np.linspace(2, 200, 500))
    assert np.all(np.diff(left) >= 0) and np.all(np.diff(right) <= 0)


# ---------------------------------------------------------------- H


def test_H_examples(piecewise, rational, any_model):
    assert eval_H(piecewise, 3.0) == pytest.approx(2.0, rel=1e-10)
    assert eval_H(any_model, 0.0) == 0.0
    assert eval_H(rational, 1.0) == pytest.approx(H_RATIONAL_1, rel=1e-9)


def test_H_matches_fixed_panel_oracle(rational):
    oracle = 2 * fixed_simpson(lambda u: u**2 / ((1 + u) * (1 + np.sqrt(u))), 0.0, 1.0, 10**6)
    assert eval_H(rational, 1.0) == pytest.approx(oracle, rel=1e-9)


def test_H_piecewise_closed_form_first_branch(piecewise):
    xi = np.linspace(0.01, 3.0, 40)
    assert np.allclose(eval_H(piecewise, xi), 2 * xi**3 / 27, rtol=1e-9, atol=0)


def test_H_nondecreasing(any_model):
    xi = np.concatenate([[0.0], np.logspace(-4, 4, 60)])
    assert np.all(np.diff(eval_H(any_model, xi)) >= 0)


def test_adaptive_simpson_basic():
    assert adaptive_simpson(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-10)
    assert adaptive_simpson(lambda x: x**2, 0.0, 3.0) == pytest.approx(9.0, rel=1e-12)


# ---------------------------------------------------------------- constants


def test_sandwich_constants_interpolated(interp):
    sc = sandwich_constants(interp)
    assert sc.d2 == pytest.approx(0.25, rel=1e-15)
    assert sc.d3 == pytest.approx(3**1.5, rel=1e-15)
    assert sc.d4 == pytest.approx(2.0, rel=1e-14)
    assert sc.d5 == pytest.approx(0.015625, rel=1e-15)
    assert sc.xi_c == 2.0
    assert sc.kstar_at_xic == pytest.approx(2 / 3**1.5, rel=1e-15)


def test_sandwich_constants_other_models(piecewise, rational, multiplicative):
    sp = sandwich_constants(piecewise)
    assert sp.d1 == pytest.approx(2.0) and sp.d2 == pytest.approx(1 / 18) and sp.d3 == pytest.approx(7 / 3)
    sr = sandwich_constants(rational)
    assert sr.d2 == pytest.approx(2**-0.5) and sr.d3 == pytest.approx(1.0)
    sm = sandwich_constants(multiplicative)
    assert sm.d2 == pytest.approx(1 / 18) and sm.d3 == pytest.approx(2.0)


def test_d5_formula_exact(any_model):
    sc = sandwich_constants(any_model)
    b1, b2 = any_model.beta1, any_model.beta2
    assert sc.d5 == pytest.approx(sc.d2 * (1 - b2) / (2 ** (b1 + 1) * (b1 + 1)), rel=1e-15)
    assert min(sc.d2, sc.d3, sc.d4, sc.d5) > 0


def test_perturbation_constants_examples():
    p = ExponentProfile(0.5, (1.0,))
    a = CoefficientVector((1.0, 0.0, 1.0))
    d6, d7 = perturbation_constants(a, a, p)
    assert d7 == pytest.approx(4.0)
    # the displayed formula carries a (beta1 + 1) factor: (1/2) / (2 * 2 * 3 * 1)^2
    assert d6 == pytest.approx(1 / 144, rel=1e-15)
    _, d7b = perturbation_constants(a, CoefficientVector((2.0, 0.0, 3.0)), p)
    assert d7b == pytest.approx(4.0)


def test_perturbation_constants_shape_mismatch():
    p = ExponentProfile(0.5, (1.0,))
    with pytest.raises(ShapeError):
        perturbation_constants(CoefficientVector((1.0, 0.0, 1.0)), CoefficientVector((1.0, 0.0, 1.0, 1.0)), p)


def test_coefficient_monotonicity_of_K():
    base = canonical_interpolated()
    up = base.with_coefficients((1.0, 0.5, 1.0))
    xi = np.logspace(-4, 4, 200)
    assert np.all(eval_K(up, xi) <= eval_K(base, xi))


def test_rational_requires_positive_parameters():
    with pytest.raises(DomainError):
        Rational(0.0, 1.0, 1.0, 1.0, 0.5)


def test_underflowing_gradients(any_model):
    xi = np.array([1e-300, 1e-200, 1e-150, 1e-100])
    k = eval_K(any_model, xi)
    assert np.all(np.isfinite(k)) and np.all(k >= 0)
    h = eval_H(any_model, xi)
    assert np.all(np.isfinite(h)) and np.all(np.diff(h) >= 0)


def test_inversion_below_double_range(interp):
    # s^2 ~ xi: the root of xi = 1e-200 is 1e-400, which rounds to 0
    assert invert_G(interp, 1e-200) == 0.0
    assert invert_G(interp, 1e-150) == pytest.approx(1e-300, rel=1e-12)
